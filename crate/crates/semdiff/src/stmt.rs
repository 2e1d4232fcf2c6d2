//! Statement mapping between two method bodies.
//!
//! Statements are matched over their canonically printed texts in fixed
//! rounds: leaves in three rounds (positional identical when the two bodies
//! share a control-structure skeleton, identical anywhere in scope, equal
//! after sub-expression replacements), then composites in two rounds
//! (identical header with a mapped nested pair, equal header after
//! replacements). Competing candidates are ordered by the rule ladders in
//! [`rank_leaf`] / [`rank_composite`]; duplicated code moved out of (or into)
//! the branches of one conditional chain is kept as a multi-mapping instead
//! of being tie-broken. The replacement engine never uses a similarity
//! threshold: a pair either becomes byte-identical after applying its
//! replacements or it does not match.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::rc::Rc;

use crate::taxonomy as tax;
use crate::tree::{
    invocation_name_index, pretty, pretty_with_offsets, AstTree, NodeId, PairStore,
};

/// Levenshtein distance over characters.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Statements a scope offers for matching: leaf statements plus `case`
/// labels, which carry text of their own.
pub fn is_mappable_leaf(label: &str) -> bool {
    tax::is_leaf_statement(label) || label == tax::SWITCH_CASE
}

/// All statement nodes properly inside `scope`, in source (preorder) order.
pub fn statements_in(tree: &AstTree, scope: NodeId) -> Vec<NodeId> {
    tree.descendants(scope)
        .filter(|&d| tax::is_statement(tree.label(d)))
        .collect()
}

/// Shared state for one mapping execution: the two trees, the scope roots
/// the depth/parent definitions are measured against, and text caches.
pub struct MappingContext<'a> {
    pub lt: &'a AstTree,
    pub rt: &'a AstTree,
    pub left_scope: NodeId,
    pub right_scope: NodeId,
    ltexts: RefCell<BTreeMap<NodeId, Rc<str>>>,
    rtexts: RefCell<BTreeMap<NodeId, Rc<str>>>,
    ldecls: RefCell<Option<Rc<Vec<(String, String)>>>>,
    rdecls: RefCell<Option<Rc<Vec<(String, String)>>>>,
}

impl<'a> MappingContext<'a> {
    pub fn new(lt: &'a AstTree, left_scope: NodeId, rt: &'a AstTree, right_scope: NodeId) -> Self {
        MappingContext {
            lt,
            rt,
            left_scope,
            right_scope,
            ltexts: RefCell::new(BTreeMap::new()),
            rtexts: RefCell::new(BTreeMap::new()),
            ldecls: RefCell::new(None),
            rdecls: RefCell::new(None),
        }
    }

    pub fn left_text(&self, id: NodeId) -> Rc<str> {
        if let Some(t) = self.ltexts.borrow().get(&id) {
            return Rc::clone(t);
        }
        let t: Rc<str> = pretty(self.lt, id).into();
        self.ltexts.borrow_mut().insert(id, Rc::clone(&t));
        t
    }

    pub fn right_text(&self, id: NodeId) -> Rc<str> {
        if let Some(t) = self.rtexts.borrow().get(&id) {
            return Rc::clone(t);
        }
        let t: Rc<str> = pretty(self.rt, id).into();
        self.rtexts.borrow_mut().insert(id, Rc::clone(&t));
        t
    }

    /// `(variable name, initializer text)` for every initialized declaration
    /// fragment in the left scope.
    fn left_decls(&self) -> Rc<Vec<(String, String)>> {
        if let Some(d) = self.ldecls.borrow().as_ref() {
            return Rc::clone(d);
        }
        let d = Rc::new(collect_decls(self.lt, self.left_scope));
        *self.ldecls.borrow_mut() = Some(Rc::clone(&d));
        d
    }

    fn right_decls(&self) -> Rc<Vec<(String, String)>> {
        if let Some(d) = self.rdecls.borrow().as_ref() {
            return Rc::clone(d);
        }
        let d = Rc::new(collect_decls(self.rt, self.right_scope));
        *self.rdecls.borrow_mut() = Some(Rc::clone(&d));
        d
    }
}

fn collect_decls(tree: &AstTree, scope: NodeId) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for d in tree.subtree(scope) {
        if tree.label(d) == tax::VARIABLE_DECLARATION_FRAGMENT {
            let cs = tree.children(d);
            if cs.len() == 2 {
                out.push((pretty(tree, cs[0]), pretty(tree, cs[1])));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Replacements
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReplacementKind {
    VariableRename,
    VariableLiteral,
    VariableInvocation,
    VariableCreation,
    TypeChange,
    ArgumentChange,
    InvokerChange,
}

impl fmt::Display for ReplacementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ReplacementKind::VariableRename => "variable-rename",
            ReplacementKind::VariableLiteral => "variable-literal",
            ReplacementKind::VariableInvocation => "variable-invocation",
            ReplacementKind::VariableCreation => "variable-creation",
            ReplacementKind::TypeChange => "type-change",
            ReplacementKind::ArgumentChange => "argument-change",
            ReplacementKind::InvokerChange => "invoker-change",
        };
        f.write_str(s)
    }
}

/// One sub-expression substitution: replacing `left_text` (the rendering of
/// the `left` node) with `right_text` inside the left statement's text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replacement {
    pub left: NodeId,
    pub right: NodeId,
    pub left_text: String,
    pub right_text: String,
    pub kind: ReplacementKind,
}

fn name_ish(label: &str) -> bool {
    matches!(label, tax::SIMPLE_NAME | tax::QUALIFIED_NAME | tax::FIELD_ACCESS)
}

fn literal_label(label: &str) -> bool {
    matches!(
        label,
        tax::NUMBER_LITERAL
            | tax::STRING_LITERAL
            | tax::CHARACTER_LITERAL
            | tax::BOOLEAN_LITERAL
            | tax::NULL_LITERAL
    )
}

fn creation_label(label: &str) -> bool {
    matches!(label, tax::CLASS_INSTANCE_CREATION | tax::ARRAY_CREATION)
}

struct Walker<'c, 'a> {
    ctx: &'c MappingContext<'a>,
    reps: Vec<Replacement>,
}

impl<'c, 'a> Walker<'c, 'a> {
    fn rep(&mut self, l: NodeId, r: NodeId, kind: ReplacementKind) {
        self.reps.push(Replacement {
            left: l,
            right: r,
            left_text: pretty(self.ctx.lt, l),
            right_text: pretty(self.ctx.rt, r),
            kind,
        });
    }

    fn walk(&mut self, l: NodeId, r: NodeId, in_type: bool) -> Result<(), ()> {
        let lt = self.ctx.lt;
        let rt = self.ctx.rt;
        let ll = lt.label(l).to_string();
        let rl = rt.label(r).to_string();
        let in_type = in_type || tax::is_type_label(&ll) || tax::is_type_label(&rl);

        if ll != rl {
            let kind = if tax::is_type_label(&ll) && tax::is_type_label(&rl) {
                ReplacementKind::TypeChange
            } else if name_ish(&ll) && name_ish(&rl) {
                if in_type {
                    ReplacementKind::TypeChange
                } else {
                    ReplacementKind::VariableRename
                }
            } else if (name_ish(&ll) && literal_label(&rl)) || (literal_label(&ll) && name_ish(&rl)) {
                ReplacementKind::VariableLiteral
            } else if (name_ish(&ll) && tax::is_invocation(&rl))
                || (tax::is_invocation(&ll) && name_ish(&rl))
            {
                ReplacementKind::VariableInvocation
            } else if (name_ish(&ll) && creation_label(&rl))
                || (creation_label(&ll) && name_ish(&rl))
            {
                ReplacementKind::VariableCreation
            } else {
                return Err(());
            };
            self.rep(l, r, kind);
            return Ok(());
        }

        // Equal labels from here on.
        if ll == tax::BLOCK {
            // Bodies print as "{"; nested statements are mapped separately.
            return Ok(());
        }
        if tax::is_valued_leaf(&ll) {
            if lt.value(l) == rt.value(r) {
                return Ok(());
            }
            let kind = match ll.as_str() {
                tax::SIMPLE_NAME => {
                    if in_type {
                        ReplacementKind::TypeChange
                    } else {
                        ReplacementKind::VariableRename
                    }
                }
                tax::PRIMITIVE_TYPE => ReplacementKind::TypeChange,
                // Operator swaps (inverted conditions, `+` vs `-`) have no
                // kind of their own in the closed list; they are hosted under
                // argument-change.
                tax::INFIX_OPERATOR => ReplacementKind::ArgumentChange,
                _ => return Err(()),
            };
            self.rep(l, r, kind);
            return Ok(());
        }
        if tax::is_invocation(&ll) || ll == tax::CLASS_INSTANCE_CREATION {
            return self.walk_call(l, r);
        }

        if tax::is_type_label(&ll) {
            // Same-shaped types recurse so a lone changed name stays a
            // narrow replacement; a shape change (type-argument arity,
            // array dimensions, union arms) makes the whole type one
            // replacement.
            let entry = self.reps.len();
            if self.walk_structural(l, r, true).is_ok() {
                return Ok(());
            }
            self.reps.truncate(entry);
            self.rep(l, r, ReplacementKind::TypeChange);
            return Ok(());
        }

        self.walk_structural(l, r, in_type)
    }

    /// Operator-like values must agree, children recurse pairwise.
    fn walk_structural(&mut self, l: NodeId, r: NodeId, in_type: bool) -> Result<(), ()> {
        let lt = self.ctx.lt;
        let rt = self.ctx.rt;
        if lt.value(l) != rt.value(r) {
            return Err(());
        }
        let lcs = lt.children(l).to_vec();
        let rcs = rt.children(r).to_vec();
        if lcs.len() != rcs.len() {
            return Err(());
        }
        for (&lc, &rc) in lcs.iter().zip(rcs.iter()) {
            self.walk(lc, rc, in_type)?;
        }
        Ok(())
    }

    /// Invocations and creations: receiver mismatches become invoker-change,
    /// unpairable or miscounted arguments become argument-change.
    fn walk_call(&mut self, l: NodeId, r: NodeId) -> Result<(), ()> {
        let lt = self.ctx.lt;
        let rt = self.ctx.rt;
        let entry = self.reps.len();
        let lcs = lt.children(l).to_vec();
        let rcs = rt.children(r).to_vec();
        let label = lt.label(l).to_string();

        let (largs_at, rargs_at) = if label == tax::METHOD_INVOCATION {
            let lni = invocation_name_index(lt, l);
            let rni = invocation_name_index(rt, r);
            if lni != rni {
                self.rep(l, r, ReplacementKind::InvokerChange);
                return Ok(());
            }
            if lni == 1 && self.walk(lcs[0], rcs[0], false).is_err() {
                self.reps.truncate(entry);
                self.rep(l, r, ReplacementKind::InvokerChange);
                return Ok(());
            }
            // Callee name: renames are hosted under variable-rename.
            if lt.value(lcs[lni]) != rt.value(rcs[rni]) {
                self.rep(lcs[lni], rcs[rni], ReplacementKind::VariableRename);
            }
            (lni + 1, rni + 1)
        } else if label == tax::SUPER_METHOD_INVOCATION {
            if lt.value(lcs[0]) != rt.value(rcs[0]) {
                self.rep(lcs[0], rcs[0], ReplacementKind::VariableRename);
            }
            (1, 1)
        } else {
            // Class instance creation: the created type is child 0.
            self.walk(lcs[0], rcs[0], true)?;
            (1, 1)
        };

        let largs = &lcs[largs_at..];
        let rargs = &rcs[rargs_at..];
        if largs.len() != rargs.len() {
            self.reps.truncate(entry);
            self.rep(l, r, ReplacementKind::ArgumentChange);
            return Ok(());
        }
        for (&la, &ra) in largs.iter().zip(rargs.iter()) {
            let mark = self.reps.len();
            if self.walk(la, ra, false).is_err() {
                self.reps.truncate(mark);
                self.rep(la, ra, ReplacementKind::ArgumentChange);
            }
        }
        Ok(())
    }
}

/// Valued leaves of the statement that appear in its printed text (bodies of
/// nested statements are excluded, mirroring the printer).
fn content_leaves(tree: &AstTree, stmt: NodeId, out: &mut Vec<NodeId>) {
    for &c in tree.children(stmt) {
        let l = tree.label(c);
        if tax::is_statement(l) {
            continue;
        }
        if tree.is_leaf(c) && tax::is_valued_leaf(l) {
            out.push(c);
        } else {
            content_leaves(tree, c, out);
        }
    }
}

/// Children that make up a composite statement's printed header.
fn header_children(tree: &AstTree, stmt: NodeId) -> Vec<NodeId> {
    tree.children(stmt)
        .iter()
        .copied()
        .filter(|&c| !tax::is_statement(tree.label(c)))
        .collect()
}

/// Splice `reps` into the printed text of `stmt`. Returns `None` when a
/// replacement's node is not rendered or ranges overlap.
pub fn apply_replacements(tree: &AstTree, stmt: NodeId, reps: &[Replacement]) -> Option<String> {
    let (text, offsets) = pretty_with_offsets(tree, stmt);
    let omap: BTreeMap<NodeId, usize> = offsets.into_iter().collect();
    let mut edits: Vec<(usize, usize, &str)> = Vec::with_capacity(reps.len());
    for rep in reps {
        let &start = omap.get(&rep.left)?;
        let end = start + rep.left_text.len();
        if text.get(start..end)? != rep.left_text {
            return None;
        }
        edits.push((start, end, rep.right_text.as_str()));
    }
    edits.sort_by_key(|&(s, _, _)| std::cmp::Reverse(s));
    let mut out = text.clone();
    let mut last_start = usize::MAX;
    for (s, e, t) in edits {
        if e > last_start {
            return None;
        }
        last_start = s;
        out.replace_range(s..e, t);
    }
    Some(out)
}

/// Try to make the left statement byte-identical to the right one through
/// kind-restricted sub-expression replacements. Composite statements are
/// compared over their headers only. Succeeds only when the spliced text
/// equals the right text exactly; rewrites that would replace every content
/// token of the statement are rejected.
pub fn replace_and_compare(
    ctx: &MappingContext,
    l: NodeId,
    r: NodeId,
) -> Option<Vec<Replacement>> {
    let ll = ctx.lt.label(l).to_string();
    let rl = ctx.rt.label(r).to_string();
    if ll != rl {
        return None;
    }
    let mut w = Walker { ctx, reps: Vec::new() };
    if tax::is_composite_statement(&ll) {
        let lh = header_children(ctx.lt, l);
        let rh = header_children(ctx.rt, r);
        if lh.len() != rh.len() {
            return None;
        }
        for (&lc, &rc) in lh.iter().zip(rh.iter()) {
            if w.walk(lc, rc, false).is_err() {
                return None;
            }
        }
    } else if w.walk(l, r, false).is_err() {
        return None;
    }
    let reps = w.reps;

    let mut content = Vec::new();
    content_leaves(ctx.lt, l, &mut content);
    if content.len() >= 2 {
        let saturated = content.iter().all(|&leaf| {
            reps.iter()
                .any(|rep| rep.left == leaf || ctx.lt.is_descendant_of(leaf, rep.left))
        });
        if saturated {
            return None;
        }
    }

    let applied = apply_replacements(ctx.lt, l, &reps)?;
    if applied != *ctx.right_text(r) {
        return None;
    }
    Some(reps)
}

// ---------------------------------------------------------------------------
// Mappings
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchRound {
    /// Leaf round 1: positionally corresponding identical leaves.
    LeafPositional,
    /// Leaf round 2: identical anywhere in scope.
    LeafIdentical,
    /// Leaf round 3: equal after replacements.
    LeafReplaced,
    /// Composite round 1: identical header with a mapped nested pair.
    CompositeHeader,
    /// Composite round 2: header equal after replacements.
    CompositeReplaced,
    /// Contributed by refactoring detection, not by the body rounds.
    Refactoring,
}

#[derive(Clone, Debug)]
pub struct StatementMapping {
    pub left: NodeId,
    pub right: NodeId,
    pub replacements: Vec<Replacement>,
    pub edit_distance: usize,
    pub is_leaf: bool,
    pub round: MatchRound,
    pub multi_group: Option<u32>,
    /// Total statements involved in the multi-mapping group; 2 for a plain
    /// one-to-one mapping.
    pub multi_size: usize,
}

#[derive(Default)]
pub struct MappingSet {
    pub mappings: Vec<StatementMapping>,
    left_taken: BTreeSet<NodeId>,
    right_taken: BTreeSet<NodeId>,
    next_group: u32,
}

impl MappingSet {
    pub fn new() -> Self {
        MappingSet::default()
    }

    pub fn len(&self) -> usize {
        self.mappings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mappings.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, StatementMapping> {
        self.mappings.iter()
    }

    pub fn is_left_mapped(&self, id: NodeId) -> bool {
        self.left_taken.contains(&id)
    }

    pub fn is_right_mapped(&self, id: NodeId) -> bool {
        self.right_taken.contains(&id)
    }

    pub fn add(&mut self, m: StatementMapping) {
        self.left_taken.insert(m.left);
        self.right_taken.insert(m.right);
        self.mappings.push(m);
    }

    /// Record a keep-all group: every mapping gets the same group id and a
    /// `multi_size` equal to the number of distinct statements involved.
    pub fn add_multi_group(&mut self, mut ms: Vec<StatementMapping>) {
        let gid = self.next_group;
        self.next_group += 1;
        let lefts: BTreeSet<NodeId> = ms.iter().map(|m| m.left).collect();
        let rights: BTreeSet<NodeId> = ms.iter().map(|m| m.right).collect();
        let size = lefts.len() + rights.len();
        for m in &mut ms {
            m.multi_group = Some(gid);
            m.multi_size = size;
        }
        for m in ms {
            self.add(m);
        }
    }

    /// Export as a node-pair store (multi-mappings keep all their pairs).
    pub fn pairs(&self) -> PairStore<NodeId> {
        let mut s = PairStore::new();
        for m in &self.mappings {
            s.add(m.left, m.right);
        }
        s
    }

    fn has_pair_within(&self, ctx: &MappingContext, l: NodeId, r: NodeId) -> bool {
        self.mappings.iter().any(|m| {
            ctx.lt.is_descendant_of(m.left, l) && ctx.rt.is_descendant_of(m.right, r)
        })
    }
}

// ---------------------------------------------------------------------------
// Rank definitions
// ---------------------------------------------------------------------------

/// Composite-statement ancestors of `id` up to (excluding) `scope`, innermost
/// first. Blocks are transparent wrappers and are skipped.
fn composite_ancestors(tree: &AstTree, scope: NodeId, id: NodeId) -> Vec<NodeId> {
    let mut out = Vec::new();
    for a in tree.ancestors(id) {
        if a == scope {
            break;
        }
        let l = tree.label(a);
        if tax::is_composite_statement(l) && l != tax::BLOCK {
            out.push(a);
        }
    }
    out
}

/// Nesting depth: the number of non-block composite statements between the
/// statement and the scope root.
pub fn depth_of(tree: &AstTree, scope: NodeId, id: NodeId) -> usize {
    composite_ancestors(tree, scope, id).len()
}

/// Index of a statement in its direct parent's statement list.
pub fn stmt_index(tree: &AstTree, id: NodeId) -> usize {
    match tree.parent(id) {
        None => 0,
        Some(p) => tree
            .children(p)
            .iter()
            .filter(|&&c| tax::is_statement(tree.label(c)))
            .position(|&c| c == id)
            .unwrap_or(0),
    }
}

/// The positional fields the rank ladders compare.
#[derive(Clone, Debug, PartialEq)]
pub struct MappingRank {
    pub left_depth: usize,
    pub right_depth: usize,
    /// min(left depth, right depth); the length of `parent_edit_distance`.
    pub depth: usize,
    pub depth_diff: usize,
    pub index_diff: usize,
    pub parent_edit_distance: Vec<usize>,
    pub parent_edit_distance_sum: usize,
    pub direct_parent_edit_distance: usize,
}

pub fn mapping_rank(ctx: &MappingContext, m: &StatementMapping) -> MappingRank {
    let lps = composite_ancestors(ctx.lt, ctx.left_scope, m.left);
    let rps = composite_ancestors(ctx.rt, ctx.right_scope, m.right);
    let (ld, rd) = (lps.len(), rps.len());
    let depth = ld.min(rd);
    let parent_edit_distance: Vec<usize> = (0..depth)
        .map(|i| edit_distance(&ctx.left_text(lps[i]), &ctx.right_text(rps[i])))
        .collect();
    let sum = parent_edit_distance.iter().sum();
    let direct = if depth >= 1 {
        parent_edit_distance[0]
    } else {
        // One side (or both) sits directly in the body: compare against the
        // empty string so the field stays total.
        let lt = lps.first().map(|&p| ctx.left_text(p)).unwrap_or_else(|| "".into());
        let rt = rps.first().map(|&p| ctx.right_text(p)).unwrap_or_else(|| "".into());
        edit_distance(&lt, &rt)
    };
    let li = stmt_index(ctx.lt, m.left);
    let ri = stmt_index(ctx.rt, m.right);
    MappingRank {
        left_depth: ld,
        right_depth: rd,
        depth,
        depth_diff: ld.abs_diff(rd),
        index_diff: li.abs_diff(ri),
        parent_edit_distance,
        parent_edit_distance_sum: sum,
        direct_parent_edit_distance: direct,
    }
}

/// Previous and next statement siblings within the direct parent.
fn sibling_stmts(tree: &AstTree, id: NodeId) -> (Option<NodeId>, Option<NodeId>) {
    let Some(p) = tree.parent(id) else {
        return (None, None);
    };
    let sibs: Vec<NodeId> = tree
        .children(p)
        .iter()
        .copied()
        .filter(|&c| tax::is_statement(tree.label(c)))
        .collect();
    let Some(i) = sibs.iter().position(|&c| c == id) else {
        return (None, None);
    };
    let prev = if i > 0 { Some(sibs[i - 1]) } else { None };
    let next = sibs.get(i + 1).copied();
    (prev, next)
}

/// Both the statements right before and right after the mapping are
/// textually identical (statement boundaries on either end count as
/// identical only when missing on both sides).
fn identical_neighbors(ctx: &MappingContext, m: &StatementMapping) -> bool {
    let (lp, ln) = sibling_stmts(ctx.lt, m.left);
    let (rp, rn) = sibling_stmts(ctx.rt, m.right);
    let ok = |a: Option<NodeId>, b: Option<NodeId>| match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => *ctx.left_text(x) == *ctx.right_text(y),
        _ => false,
    };
    ok(lp, rp) && ok(ln, rn)
}

/// The mapping becomes textually identical after undoing an overlapping
/// Extract Variable (a right-scope declaration `v = e` with replacements
/// `e -> v`) or Inline Variable (mirrored) refactoring.
fn undoes_variable_refactoring(ctx: &MappingContext, m: &StatementMapping) -> bool {
    if m.replacements.is_empty() {
        return false;
    }
    let rdecls = ctx.right_decls();
    let ldecls = ctx.left_decls();
    m.replacements.iter().all(|rep| {
        rdecls
            .iter()
            .any(|(name, init)| *name == rep.right_text && *init == rep.left_text)
            || ldecls
                .iter()
                .any(|(name, init)| *name == rep.left_text && *init == rep.right_text)
    })
}

fn first_nonblock_parent_label<'t>(tree: &'t AstTree, scope: NodeId, id: NodeId) -> Option<&'t str> {
    composite_ancestors(tree, scope, id)
        .first()
        .map(|&p| tree.label(p))
}

fn xor_rule(ca: bool, cb: bool) -> Option<Ordering> {
    match (ca, cb) {
        (true, false) => Some(Ordering::Less),
        (false, true) => Some(Ordering::Greater),
        _ => None,
    }
}

/// Final deterministic tie-break: source position of the mapped statements.
fn source_order(ctx: &MappingContext, a: &StatementMapping, b: &StatementMapping) -> Ordering {
    (ctx.lt.span(a.left).start, ctx.rt.span(a.right).start, a.left, a.right).cmp(&(
        ctx.lt.span(b.left).start,
        ctx.rt.span(b.right).start,
        b.left,
        b.right,
    ))
}

/// Rule ladder for leaf mappings. Returns `Less` when `a` ranks first. A
/// rule applies only when its condition holds for one mapping and not the
/// other; when every rule passes, source position decides.
pub fn rank_leaf(ctx: &MappingContext, a: &StatementMapping, b: &StatementMapping) -> Ordering {
    ladder_leaf(ctx, a, b).unwrap_or_else(|| source_order(ctx, a, b))
}

fn ladder_leaf(ctx: &MappingContext, a: &StatementMapping, b: &StatementMapping) -> Option<Ordering> {
    // Rule 1: multi-mapping membership; among multis the larger group wins.
    let (ma, mb) = (a.multi_size > 2, b.multi_size > 2);
    if let Some(o) = xor_rule(ma, mb) {
        return Some(o);
    }
    if ma && mb && a.multi_size != b.multi_size {
        return Some(if a.multi_size > b.multi_size { Ordering::Less } else { Ordering::Greater });
    }

    let ra = mapping_rank(ctx, a);
    let rb = mapping_rank(ctx, b);
    let (da, db) = (a.edit_distance, b.edit_distance);

    if da != db {
        // 2(a): identical after undoing an extract/inline variable.
        if let Some(o) = xor_rule(
            undoes_variable_refactoring(ctx, a),
            undoes_variable_refactoring(ctx, b),
        ) {
            return Some(o);
        }
        // 2(b): identical statements right before and right after.
        if let Some(o) = xor_rule(identical_neighbors(ctx, a), identical_neighbors(ctx, b)) {
            return Some(o);
        }
        // 2(c): same depth, same index, same first non-block parent type.
        let same_slot = |m: &StatementMapping, r: &MappingRank| {
            r.depth_diff == 0
                && stmt_index(ctx.lt, m.left) == stmt_index(ctx.rt, m.right)
                && first_nonblock_parent_label(ctx.lt, ctx.left_scope, m.left)
                    == first_nonblock_parent_label(ctx.rt, ctx.right_scope, m.right)
        };
        if let Some(o) = xor_rule(same_slot(a, &ra), same_slot(b, &rb)) {
            return Some(o);
        }
        // 2(d): deeply nested on both sides -> smaller parent distance sum.
        if ra.depth > 2 && rb.depth > 2 {
            if let Some(o) = xor_rule(
                ra.parent_edit_distance_sum < rb.parent_edit_distance_sum,
                rb.parent_edit_distance_sum < ra.parent_edit_distance_sum,
            ) {
                return Some(o);
            }
        }
        // 2(e): smaller edit distance.
        return xor_rule(da < db, db < da);
    }

    // Equal edit distances.
    // 3(a): equal depths, one parent chain identical and the other not.
    let ca = ra.depth == rb.depth
        && ra.parent_edit_distance_sum == 0
        && rb.parent_edit_distance_sum > 0;
    let cb = ra.depth == rb.depth
        && rb.parent_edit_distance_sum == 0
        && ra.parent_edit_distance_sum > 0;
    if let Some(o) = xor_rule(ca, cb) {
        return Some(o);
    }
    // 3(b): unequal depths -> smaller parent distance sum.
    let ca = ra.depth != rb.depth && ra.parent_edit_distance_sum < rb.parent_edit_distance_sum;
    let cb = ra.depth != rb.depth && rb.parent_edit_distance_sum < ra.parent_edit_distance_sum;
    if let Some(o) = xor_rule(ca, cb) {
        return Some(o);
    }
    // 3(c): smaller depth difference.
    if let Some(o) = xor_rule(ra.depth_diff < rb.depth_diff, rb.depth_diff < ra.depth_diff) {
        return Some(o);
    }
    // 3(d): smaller index difference.
    if let Some(o) = xor_rule(ra.index_diff < rb.index_diff, rb.index_diff < ra.index_diff) {
        return Some(o);
    }
    // 3(e): smaller direct-parent edit distance.
    xor_rule(
        ra.direct_parent_edit_distance < rb.direct_parent_edit_distance,
        rb.direct_parent_edit_distance < ra.direct_parent_edit_distance,
    )
}

/// Matched statement pairs nested under both sides, and how many of those
/// pairs are identical composites.
fn composite_stats(ctx: &MappingContext, set: &MappingSet, m: &StatementMapping) -> (f64, usize) {
    let lsub: BTreeSet<NodeId> = ctx
        .lt
        .descendants(m.left)
        .filter(|&d| tax::is_statement(ctx.lt.label(d)))
        .collect();
    let rsub: BTreeSet<NodeId> = ctx
        .rt
        .descendants(m.right)
        .filter(|&d| tax::is_statement(ctx.rt.label(d)))
        .collect();
    let mut matched = 0usize;
    let mut identical_composites = 0usize;
    for e in &set.mappings {
        if lsub.contains(&e.left) && rsub.contains(&e.right) {
            matched += 1;
            if !e.is_leaf && e.edit_distance == 0 {
                identical_composites += 1;
            }
        }
    }
    let den = lsub.len().max(rsub.len());
    let ratio = if den == 0 { 0.0 } else { matched as f64 / den as f64 };
    (ratio, identical_composites)
}

/// Rule ladder for composite mappings.
pub fn rank_composite(
    ctx: &MappingContext,
    set: &MappingSet,
    a: &StatementMapping,
    b: &StatementMapping,
) -> Ordering {
    ladder_composite(ctx, set, a, b).unwrap_or_else(|| source_order(ctx, a, b))
}

fn ladder_composite(
    ctx: &MappingContext,
    set: &MappingSet,
    a: &StatementMapping,
    b: &StatementMapping,
) -> Option<Ordering> {
    let (ratio_a, icc_a) = composite_stats(ctx, set, a);
    let (ratio_b, icc_b) = composite_stats(ctx, set, b);
    // Rule 1: at least double the child-match ratio.
    if let Some(o) = xor_rule(ratio_a >= 2.0 * ratio_b, ratio_b >= 2.0 * ratio_a) {
        return Some(o);
    }
    let (da, db) = (a.edit_distance, b.edit_distance);
    if da != db {
        // 2(a): identical after undoing an extract/inline variable.
        if let Some(o) = xor_rule(
            undoes_variable_refactoring(ctx, a),
            undoes_variable_refactoring(ctx, b),
        ) {
            return Some(o);
        }
        // 2(b): smaller edit distance.
        return xor_rule(da < db, db < da);
    }
    // 3(a): more identical composite children.
    if let Some(o) = xor_rule(icc_a > icc_b, icc_b > icc_a) {
        return Some(o);
    }
    // 3(b): larger child-match ratio.
    if let Some(o) = xor_rule(ratio_a > ratio_b, ratio_b > ratio_a) {
        return Some(o);
    }
    let ra = mapping_rank(ctx, a);
    let rb = mapping_rank(ctx, b);
    // 3(c): smaller depth difference.
    if let Some(o) = xor_rule(ra.depth_diff < rb.depth_diff, rb.depth_diff < ra.depth_diff) {
        return Some(o);
    }
    // 3(d): smaller index difference.
    xor_rule(ra.index_diff < rb.index_diff, rb.index_diff < ra.index_diff)
}

// ---------------------------------------------------------------------------
// Conditional multi-mappings
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultiVerdict {
    KeepAll,
    DeferToRank,
}

/// Keep all candidates when the repeated side sits in distinct branches of
/// one `if`/`else if` chain or `switch`, and the single statement on the
/// other side is strictly shallower (duplicated code merged out of, or
/// duplicated into, the branches of a conditional).
pub fn detect_conditional_multi(
    ctx: &MappingContext,
    lefts: &[NodeId],
    rights: &[NodeId],
) -> MultiVerdict {
    if lefts.len() >= 2 && rights.len() == 1 {
        branch_merge(ctx.lt, ctx.left_scope, lefts, ctx.rt, ctx.right_scope, rights[0])
    } else if lefts.len() == 1 && rights.len() >= 2 {
        branch_merge(ctx.rt, ctx.right_scope, rights, ctx.lt, ctx.left_scope, lefts[0])
    } else {
        MultiVerdict::DeferToRank
    }
}

fn branch_merge(
    branch_tree: &AstTree,
    branch_scope: NodeId,
    branch_stmts: &[NodeId],
    other_tree: &AstTree,
    other_scope: NodeId,
    merged: NodeId,
) -> MultiVerdict {
    if find_covering_chain(branch_tree, branch_scope, branch_stmts).is_none() {
        return MultiVerdict::DeferToRank;
    }
    let md = depth_of(other_tree, other_scope, merged);
    let all_deeper = branch_stmts
        .iter()
        .all(|&s| depth_of(branch_tree, branch_scope, s) > md);
    if all_deeper {
        MultiVerdict::KeepAll
    } else {
        MultiVerdict::DeferToRank
    }
}

/// A chain root (`if`/`else if` chain or `switch`) under which every
/// statement sits in a distinct execution branch.
fn find_covering_chain(tree: &AstTree, scope: NodeId, stmts: &[NodeId]) -> Option<NodeId> {
    for a in tree.ancestors(stmts[0]) {
        if a == scope {
            break;
        }
        let l = tree.label(a);
        if l != tax::IF_STATEMENT && l != tax::SWITCH_STATEMENT {
            continue;
        }
        let root = chain_root(tree, a);
        let idxs: Option<Vec<usize>> = stmts.iter().map(|&s| branch_index(tree, root, s)).collect();
        if let Some(idxs) = idxs {
            let distinct: BTreeSet<usize> = idxs.iter().copied().collect();
            if distinct.len() == idxs.len() {
                return Some(root);
            }
        }
    }
    None
}

/// Ascend `else if` links to the first `if` of the chain.
fn chain_root(tree: &AstTree, mut node: NodeId) -> NodeId {
    while let Some(p) = tree.parent(node) {
        let pcs = tree.children(p);
        let is_else_of_if =
            tree.label(p) == tax::IF_STATEMENT && pcs.len() == 3 && pcs[2] == node;
        if is_else_of_if {
            node = p;
        } else {
            break;
        }
    }
    node
}

/// Which execution branch of the chain rooted at `root` contains `stmt`.
fn branch_index(tree: &AstTree, root: NodeId, stmt: NodeId) -> Option<usize> {
    match tree.label(root) {
        tax::IF_STATEMENT => {
            let mut cur = root;
            let mut idx = 0usize;
            loop {
                let cs = tree.children(cur);
                if cs.len() < 2 {
                    return None;
                }
                let then = cs[1];
                if stmt == then || tree.is_descendant_of(stmt, then) {
                    return Some(idx);
                }
                idx += 1;
                let Some(&els) = cs.get(2) else {
                    return None;
                };
                if tree.label(els) == tax::IF_STATEMENT {
                    if stmt == els {
                        return None;
                    }
                    if tree.is_descendant_of(stmt, els) {
                        cur = els;
                        continue;
                    }
                    return None;
                }
                if stmt == els || tree.is_descendant_of(stmt, els) {
                    return Some(idx);
                }
                return None;
            }
        }
        tax::SWITCH_STATEMENT => {
            let cs = tree.children(root);
            let direct = cs
                .iter()
                .position(|&c| stmt == c || tree.is_descendant_of(stmt, c))?;
            if direct == 0 || tree.label(cs[direct]) == tax::SWITCH_CASE {
                return None;
            }
            let branch = cs[..direct]
                .iter()
                .filter(|&&c| tree.label(c) == tax::SWITCH_CASE)
                .count();
            Some(branch)
        }
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Rounds
// ---------------------------------------------------------------------------

/// Serialize the nesting structure of non-block composite statements; two
/// scopes are iso-structural when these serializations are equal.
fn skeleton_string(tree: &AstTree, node: NodeId, out: &mut String) {
    for &c in tree.children(node) {
        let l = tree.label(c);
        if l == tax::BLOCK {
            skeleton_string(tree, c, out);
        } else if tax::is_composite_statement(l) {
            out.push('(');
            out.push_str(l);
            skeleton_string(tree, c, out);
            out.push(')');
        }
    }
}

fn skeleton_list(tree: &AstTree, node: NodeId, out: &mut Vec<NodeId>) {
    for &c in tree.children(node) {
        let l = tree.label(c);
        if l == tax::BLOCK {
            skeleton_list(tree, c, out);
        } else if tax::is_composite_statement(l) {
            out.push(c);
            skeleton_list(tree, c, out);
        }
    }
}

/// The region a leaf belongs to: its nearest non-block composite ancestor
/// within the scope, or the scope root.
fn region_of(tree: &AstTree, scope: NodeId, id: NodeId) -> NodeId {
    composite_ancestors(tree, scope, id).first().copied().unwrap_or(scope)
}

struct Candidate {
    right: NodeId,
    replacements: Vec<Replacement>,
    dist: usize,
}

fn mk_mapping(l: NodeId, c: Candidate, round: MatchRound, is_leaf: bool) -> StatementMapping {
    StatementMapping {
        left: l,
        right: c.right,
        replacements: c.replacements,
        edit_distance: c.dist,
        is_leaf,
        round,
        multi_group: None,
        multi_size: 2,
    }
}

/// Map the given left statements against the right ones: leaf rounds 1-3
/// followed by composite rounds 1-2. The lists may be a subset of the scope
/// (restricted executions); positions and depths are still measured against
/// the scope roots in `ctx`.
pub fn map_statements(
    ctx: &MappingContext,
    left_stmts: &[NodeId],
    right_stmts: &[NodeId],
) -> MappingSet {
    let mut set = MappingSet::new();
    let leaves_l: Vec<NodeId> = left_stmts
        .iter()
        .copied()
        .filter(|&s| is_mappable_leaf(ctx.lt.label(s)))
        .collect();
    let leaves_r: Vec<NodeId> = right_stmts
        .iter()
        .copied()
        .filter(|&s| is_mappable_leaf(ctx.rt.label(s)))
        .collect();
    let comps_l: Vec<NodeId> = left_stmts
        .iter()
        .copied()
        .filter(|&s| tax::is_composite_statement(ctx.lt.label(s)))
        .collect();
    let comps_r: Vec<NodeId> = right_stmts
        .iter()
        .copied()
        .filter(|&s| tax::is_composite_statement(ctx.rt.label(s)))
        .collect();

    // Leaf round 1: positional identical leaves, only for iso-structural
    // scopes.
    let mut lskel = String::new();
    let mut rskel = String::new();
    skeleton_string(ctx.lt, ctx.left_scope, &mut lskel);
    skeleton_string(ctx.rt, ctx.right_scope, &mut rskel);
    if lskel == rskel {
        positional_round(ctx, &mut set, &leaves_l, &leaves_r);
    }

    // Leaf rounds 2 and 3.
    candidate_round(ctx, &mut set, &leaves_l, &leaves_r, MatchRound::LeafIdentical);
    candidate_round(ctx, &mut set, &leaves_l, &leaves_r, MatchRound::LeafReplaced);

    // Composite rounds 1 and 2.
    candidate_round(ctx, &mut set, &comps_l, &comps_r, MatchRound::CompositeHeader);
    candidate_round(ctx, &mut set, &comps_l, &comps_r, MatchRound::CompositeReplaced);

    set
}

fn positional_round(
    ctx: &MappingContext,
    set: &mut MappingSet,
    leaves_l: &[NodeId],
    leaves_r: &[NodeId],
) {
    let mut lskel = Vec::new();
    let mut rskel = Vec::new();
    skeleton_list(ctx.lt, ctx.left_scope, &mut lskel);
    skeleton_list(ctx.rt, ctx.right_scope, &mut rskel);
    if lskel.len() != rskel.len() {
        return;
    }
    let region_map: BTreeMap<NodeId, NodeId> = lskel
        .iter()
        .copied()
        .zip(rskel.iter().copied())
        .chain(std::iter::once((ctx.left_scope, ctx.right_scope)))
        .collect();
    let mut lgroups: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for &l in leaves_l {
        lgroups.entry(region_of(ctx.lt, ctx.left_scope, l)).or_default().push(l);
    }
    let mut rgroups: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for &r in leaves_r {
        rgroups.entry(region_of(ctx.rt, ctx.right_scope, r)).or_default().push(r);
    }
    for (lregion, ls) in &lgroups {
        let Some(rregion) = region_map.get(lregion) else {
            continue;
        };
        let Some(rs) = rgroups.get(rregion) else {
            continue;
        };
        for (&l, &r) in ls.iter().zip(rs.iter()) {
            if *ctx.left_text(l) == *ctx.right_text(r) {
                set.add(mk_mapping(
                    l,
                    Candidate { right: r, replacements: Vec::new(), dist: 0 },
                    MatchRound::LeafPositional,
                    true,
                ));
            }
        }
    }
}

/// A composite pair is eligible for round 1 when a statement pair nested
/// under both sides is already mapped. Blocks carry no header text of their
/// own, so they additionally qualify through their parents being mapped (and
/// are never matched without one of the two).
fn composite_eligible(
    ctx: &MappingContext,
    set: &MappingSet,
    l: NodeId,
    r: NodeId,
    round: MatchRound,
) -> bool {
    let is_block = ctx.lt.label(l) == tax::BLOCK;
    let nested = set.has_pair_within(ctx, l, r);
    if is_block {
        let parents_mapped = match (ctx.lt.parent(l), ctx.rt.parent(r)) {
            (Some(lp), Some(rp)) => {
                (lp == ctx.left_scope && rp == ctx.right_scope)
                    || set.mappings.iter().any(|m| m.left == lp && m.right == rp)
            }
            _ => false,
        };
        return nested || parents_mapped;
    }
    match round {
        MatchRound::CompositeHeader => nested,
        _ => true,
    }
}

fn candidate_round(
    ctx: &MappingContext,
    set: &mut MappingSet,
    lefts: &[NodeId],
    rights: &[NodeId],
    round: MatchRound,
) {
    let is_leaf = matches!(round, MatchRound::LeafIdentical | MatchRound::LeafReplaced);
    let candidates_for = |set: &MappingSet, l: NodeId| -> Vec<Candidate> {
        rights
            .iter()
            .copied()
            .filter(|&r| !set.is_right_mapped(r))
            .filter_map(|r| match round {
                MatchRound::LeafIdentical => {
                    (*ctx.left_text(l) == *ctx.right_text(r)).then(|| Candidate {
                        right: r,
                        replacements: Vec::new(),
                        dist: 0,
                    })
                }
                MatchRound::LeafReplaced => replace_and_compare(ctx, l, r).map(|reps| Candidate {
                    right: r,
                    dist: edit_distance(&ctx.left_text(l), &ctx.right_text(r)),
                    replacements: reps,
                }),
                MatchRound::CompositeHeader => {
                    (*ctx.left_text(l) == *ctx.right_text(r)
                        && composite_eligible(ctx, set, l, r, round))
                    .then(|| Candidate { right: r, replacements: Vec::new(), dist: 0 })
                }
                MatchRound::CompositeReplaced => {
                    if !composite_eligible(ctx, set, l, r, round) {
                        return None;
                    }
                    replace_and_compare(ctx, l, r).map(|reps| Candidate {
                        right: r,
                        dist: edit_distance(&ctx.left_text(l), &ctx.right_text(r)),
                        replacements: reps,
                    })
                }
                _ => None,
            })
            .collect()
    };

    // Many-to-one pre-pass: rights contended by several lefts may form a
    // keep-all multi-mapping instead of being tie-broken.
    let mut by_right: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for &l in lefts {
        if set.is_left_mapped(l) {
            continue;
        }
        for c in candidates_for(set, l) {
            by_right.entry(c.right).or_default().push(l);
        }
    }
    for (&r, ls) in &by_right {
        if set.is_right_mapped(r) {
            continue;
        }
        let ls: Vec<NodeId> = ls.iter().copied().filter(|&l| !set.is_left_mapped(l)).collect();
        if ls.len() < 2 {
            continue;
        }
        if detect_conditional_multi(ctx, &ls, &[r]) == MultiVerdict::KeepAll {
            let group: Vec<StatementMapping> = ls
                .iter()
                .map(|&l| {
                    let c = candidates_for(set, l)
                        .into_iter()
                        .find(|c| c.right == r)
                        .expect("candidate recorded in pre-pass");
                    mk_mapping(l, c, round, is_leaf)
                })
                .collect();
            set.add_multi_group(group);
        }
    }

    // Greedy per-left resolution in source order.
    for &l in lefts {
        if set.is_left_mapped(l) {
            continue;
        }
        let cands = candidates_for(set, l);
        if cands.is_empty() {
            continue;
        }
        if cands.len() >= 2 {
            let rs: Vec<NodeId> = cands.iter().map(|c| c.right).collect();
            if detect_conditional_multi(ctx, &[l], &rs) == MultiVerdict::KeepAll {
                let group: Vec<StatementMapping> = cands
                    .into_iter()
                    .map(|c| mk_mapping(l, c, round, is_leaf))
                    .collect();
                set.add_multi_group(group);
                continue;
            }
        }
        let mut best: Option<StatementMapping> = None;
        for c in cands {
            let challenger = mk_mapping(l, c, round, is_leaf);
            best = Some(match best.take() {
                None => challenger,
                Some(incumbent) => {
                    let o = if is_leaf {
                        rank_leaf(ctx, &challenger, &incumbent)
                    } else {
                        rank_composite(ctx, set, &challenger, &incumbent)
                    };
                    if o == Ordering::Less {
                        challenger
                    } else {
                        incumbent
                    }
                }
            });
        }
        set.add(best.expect("at least one candidate"));
    }
}

// ---------------------------------------------------------------------------
// Call-site scoping
// ---------------------------------------------------------------------------

/// Which side of the diff holds the calls to the extracted/inlined method:
/// the right side for Extract Method, the left side for Inline Method.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CallSiteSide {
    Right,
    Left,
}

/// One planned execution of the statement mapping process for a call site.
/// `counterpart_scope` is the origin-side composite whose nested statements
/// the execution is restricted to; `None` means the call shares the method
/// body scope and the region-based exclusion protocol applies instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScopedExecution {
    pub call_site: NodeId,
    pub counterpart_scope: Option<NodeId>,
}

/// Plan one mapping execution per call site. A call nested in a mapped
/// composite restricts its execution to the composite's counterpart in the
/// origin method; calls at method-body scope fall back to region exclusion.
pub fn scope_by_call_sites(
    call_tree: &AstTree,
    call_body: NodeId,
    call_sites: &[NodeId],
    parent_pairs: &PairStore<NodeId>,
    side: CallSiteSide,
) -> Vec<ScopedExecution> {
    let mut sites: Vec<NodeId> = call_sites.to_vec();
    sites.sort_by_key(|&s| (call_tree.span(s).start, s));
    sites
        .into_iter()
        .map(|cs| {
            let counterpart = composite_ancestors(call_tree, call_body, cs)
                .first()
                .and_then(|&parent| match side {
                    CallSiteSide::Right => parent_pairs.left_of(&parent).copied(),
                    CallSiteSide::Left => parent_pairs.right_of(&parent).copied(),
                });
            ScopedExecution { call_site: cs, counterpart_scope: counterpart }
        })
        .collect()
}

/// The left statements covered by the region expanding from the first to the
/// last identical mapping of the execution; empty when nothing matched
/// identically. Subsequent region-mode executions exclude these statements.
pub fn identical_region_lefts(ctx: &MappingContext, set: &MappingSet) -> Vec<NodeId> {
    let identical: Vec<NodeId> = set
        .mappings
        .iter()
        .filter(|m| m.edit_distance == 0)
        .map(|m| m.left)
        .collect();
    if identical.is_empty() {
        return Vec::new();
    }
    let start = identical.iter().map(|&l| ctx.lt.span(l).start).min().unwrap();
    let end = identical.iter().map(|&l| ctx.lt.span(l).end).max().unwrap();
    statements_in(ctx.lt, ctx.left_scope)
        .into_iter()
        .filter(|&s| {
            let sp = ctx.lt.span(s);
            sp.start >= start && sp.end <= end
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Duplicate-mapping optimization
// ---------------------------------------------------------------------------

/// Attributes of one mapping inside a group of duplicates sharing a
/// statement; `key` identifies the mapping to the caller.
#[derive(Clone, Copy, Debug)]
pub struct DuplicateCandidate {
    pub key: usize,
    /// The mapping includes a call to the extracted (or inlined) method.
    pub calls_refactored_method: bool,
    /// The parent statements of the mapping are themselves mapped.
    pub parents_mapped: bool,
    /// The mapping belongs to a nested extraction (extracted from an
    /// extracted method) or nested inlining.
    pub from_nested_refactoring: bool,
    /// The two statements are textually identical.
    pub identical: bool,
    pub edit_distance: usize,
}

/// Decide which duplicate mappings survive. Rules run in order; each one
/// discards only when at least one mapping in the current set does not
/// satisfy its discard condition. Returns the surviving keys.
pub fn optimize_duplicates(group: &[DuplicateCandidate]) -> Vec<usize> {
    let mut set: Vec<&DuplicateCandidate> = group.iter().collect();
    let discard_if = |set: &mut Vec<&DuplicateCandidate>, bad: &dyn Fn(&DuplicateCandidate) -> bool| {
        if set.iter().any(|c| !bad(c)) {
            set.retain(|c| !bad(c));
        }
    };
    // 1. Mappings containing a call to the extracted/inlined method lose to
    //    the mappings inside it.
    discard_if(&mut set, &|c| c.calls_refactored_method);
    // 2. Mappings whose parents are not mapped lose.
    discard_if(&mut set, &|c| !c.parents_mapped);
    // 3. Mappings from nested extractions/inlinings lose.
    discard_if(&mut set, &|c| c.from_nested_refactoring);
    // 4. Non-identical mappings lose.
    discard_if(&mut set, &|c| !c.identical);
    // 5. Keep only the minimum edit distance.
    if let Some(min) = set.iter().map(|c| c.edit_distance).min() {
        set.retain(|c| c.edit_distance == min);
    }
    set.into_iter().map(|c| c.key).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::java::parse_java;

    fn parse_body(body: &str) -> (AstTree, NodeId) {
        let src = format!("class W {{ void w() {{ {} }} }}", body);
        let unit = parse_java(&src).expect("fixture parses");
        let tree = unit.tree;
        let body = tree
            .preorder()
            .find(|&n| {
                tree.label(n) == tax::BLOCK
                    && tree
                        .parent(n)
                        .is_some_and(|p| tree.label(p) == tax::METHOD_DECLARATION)
            })
            .expect("method body");
        (tree, body)
    }

    fn stmt_with_text(ctx: &MappingContext, left: bool, text: &str) -> NodeId {
        let (tree, scope) = if left {
            (ctx.lt, ctx.left_scope)
        } else {
            (ctx.rt, ctx.right_scope)
        };
        statements_in(tree, scope)
            .into_iter()
            .find(|&s| {
                let t = if left { ctx.left_text(s) } else { ctx.right_text(s) };
                *t == *text
            })
            .unwrap_or_else(|| panic!("no statement printed as {text:?}"))
    }

    fn full_map(ctx: &MappingContext) -> MappingSet {
        let lefts = statements_in(ctx.lt, ctx.left_scope);
        let rights = statements_in(ctx.rt, ctx.right_scope);
        map_statements(ctx, &lefts, &rights)
    }

    #[test]
    fn edit_distance_basics() {
        assert_eq!(edit_distance("return x;", "return x;"), 0);
        assert_eq!(edit_distance("return x;", "return y;"), 1);
        assert_eq!(edit_distance("", "abc"), 3);
        assert_eq!(edit_distance("abc", ""), 3);
        assert_eq!(edit_distance("kitten", "sitting"), 3);
    }

    #[test]
    fn rename_yields_single_variable_rename() {
        let (lt, lb) = parse_body("int a = f();");
        let (rt, rb) = parse_body("int b = f();");
        let ctx = MappingContext::new(&lt, lb, &rt, rb);
        let l = stmt_with_text(&ctx, true, "int a = f();");
        let r = stmt_with_text(&ctx, false, "int b = f();");
        let reps = replace_and_compare(&ctx, l, r).expect("matches");
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].kind, ReplacementKind::VariableRename);
        assert_eq!(reps[0].left_text, "a");
        assert_eq!(reps[0].right_text, "b");
        assert_eq!(
            apply_replacements(&lt, l, &reps).unwrap(),
            "int b = f();"
        );
    }

    #[test]
    fn variable_for_invocation_replacement() {
        let (lt, lb) = parse_body("x = y;");
        let (rt, rb) = parse_body("x = compute();");
        let ctx = MappingContext::new(&lt, lb, &rt, rb);
        let l = stmt_with_text(&ctx, true, "x = y;");
        let r = stmt_with_text(&ctx, false, "x = compute();");
        let reps = replace_and_compare(&ctx, l, r).expect("matches");
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].kind, ReplacementKind::VariableInvocation);
        assert_eq!(reps[0].left_text, "y");
        assert_eq!(reps[0].right_text, "compute()");
    }

    #[test]
    fn saturated_rewrite_is_rejected() {
        let (lt, lb) = parse_body("return a + b;");
        let (rt, rb) = parse_body("return c * d;");
        let ctx = MappingContext::new(&lt, lb, &rt, rb);
        let l = stmt_with_text(&ctx, true, "return a + b;");
        let r = stmt_with_text(&ctx, false, "return c * d;");
        assert_eq!(replace_and_compare(&ctx, l, r), None);
    }

    #[test]
    fn type_and_literal_replacements() {
        let (lt, lb) = parse_body("int v = 0; x = limit;");
        let (rt, rb) = parse_body("long v = 0; x = 0;");
        let ctx = MappingContext::new(&lt, lb, &rt, rb);

        let l = stmt_with_text(&ctx, true, "int v = 0;");
        let r = stmt_with_text(&ctx, false, "long v = 0;");
        let reps = replace_and_compare(&ctx, l, r).expect("type change matches");
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].kind, ReplacementKind::TypeChange);

        let l = stmt_with_text(&ctx, true, "x = limit;");
        let r = stmt_with_text(&ctx, false, "x = 0;");
        let reps = replace_and_compare(&ctx, l, r).expect("literal swap matches");
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].kind, ReplacementKind::VariableLiteral);
    }

    #[test]
    fn replacements_reproduce_right_text_byte_exactly() {
        let pairs = [
            ("int a = f();", "int b = f();"),
            ("x = y;", "x = compute();"),
            ("save(name, 1);", "save(title, 1);"),
            ("return makeThing();", "return new Thing();"),
            ("p.run(a);", "p.run(a, b);"),
        ];
        for (ls, rs) in pairs {
            let (lt, lb) = parse_body(ls);
            let (rt, rb) = parse_body(rs);
            let ctx = MappingContext::new(&lt, lb, &rt, rb);
            let l = statements_in(&lt, lb)[0];
            let r = statements_in(&rt, rb)[0];
            if let Some(reps) = replace_and_compare(&ctx, l, r) {
                let applied = apply_replacements(&lt, l, &reps).expect("applies");
                assert_eq!(applied, *ctx.right_text(r), "pair {ls:?} -> {rs:?}");
            }
        }
    }

    #[test]
    fn identical_bodies_map_fully_in_round_one() {
        let (lt, lb) = parse_body("a(); b(); if (c) { d(); }");
        let (rt, rb) = parse_body("a(); b(); if (c) { d(); }");
        let ctx = MappingContext::new(&lt, lb, &rt, rb);
        let set = full_map(&ctx);
        let leaf_rounds: Vec<MatchRound> = set
            .iter()
            .filter(|m| m.is_leaf)
            .map(|m| m.round)
            .collect();
        assert_eq!(leaf_rounds.len(), 3);
        assert!(leaf_rounds.iter().all(|&r| r == MatchRound::LeafPositional));
        // if + its block are mapped as composites.
        assert_eq!(set.iter().filter(|m| !m.is_leaf).count(), 2);
        assert_eq!(set.len(), 5);
    }

    #[test]
    fn positional_round_survives_a_single_rename() {
        let (lt, lb) = parse_body("start(); log(); log(); stop();");
        let (rt, rb) = parse_body("begin(); log(); log(); stop();");
        let ctx = MappingContext::new(&lt, lb, &rt, rb);
        let set = full_map(&ctx);
        assert_eq!(set.len(), 4);
        // The three identical statements pair positionally.
        for m in set.iter().filter(|m| m.round == MatchRound::LeafPositional) {
            assert_eq!(*ctx.left_text(m.left), *ctx.right_text(m.right));
            assert_eq!(stmt_index(&lt, m.left), stmt_index(&rt, m.right));
        }
        // The renamed call falls through to round 3.
        let renamed = set
            .iter()
            .find(|m| m.round == MatchRound::LeafReplaced)
            .expect("rename mapped by replacement");
        assert_eq!(*ctx.left_text(renamed.left), *"start();");
        assert_eq!(*ctx.right_text(renamed.right), *"begin();");
        assert_eq!(renamed.replacements.len(), 1);
        assert_eq!(renamed.replacements[0].kind, ReplacementKind::VariableRename);
    }

    #[test]
    fn repeated_identical_returns_pair_branch_by_branch() {
        let body_l =
            "if (a) { return null; } else if (b) { return null; } else { return null; }";
        let body_r = "if (a) { return null; } else if (b) { return null; } else { return null; } while (k) { log(); }";
        let (lt, lb) = parse_body(body_l);
        let (rt, rb) = parse_body(body_r);
        let ctx = MappingContext::new(&lt, lb, &rt, rb);
        let set = full_map(&ctx);
        let returns: Vec<&StatementMapping> = set
            .iter()
            .filter(|m| *ctx.left_text(m.left) == *"return null;")
            .collect();
        assert_eq!(returns.len(), 3);
        for m in returns {
            assert_eq!(m.multi_group, None, "ranked, not merged");
            // Branch correspondence: equal depth on both sides.
            assert_eq!(
                depth_of(&lt, lb, m.left),
                depth_of(&rt, rb, m.right),
                "left {:?} right {:?}",
                lt.span(m.left),
                rt.span(m.right)
            );
            // Source order is preserved: the i-th return maps to the i-th.
            let li = statements_in(&lt, lb)
                .into_iter()
                .filter(|&s| *ctx.left_text(s) == *"return null;")
                .position(|s| s == m.left);
            let ri = statements_in(&rt, rb)
                .into_iter()
                .filter(|&s| *ctx.right_text(s) == *"return null;")
                .position(|s| s == m.right);
            assert_eq!(li, ri);
        }
        // The added while and its body stay unmatched.
        let wl = stmt_with_text(&ctx, false, "while (k)");
        assert!(!set.is_right_mapped(wl));
    }

    #[test]
    fn duplicates_merged_out_of_branches_keep_all_mappings() {
        let body_l =
            "if (a) { save(x); } else if (b) { save(x); } else { save(x); }";
        let body_r = "save(x); if (a) { t = 1; } else if (b) { t = 2; } else { t = 3; }";
        let (lt, lb) = parse_body(body_l);
        let (rt, rb) = parse_body(body_r);
        let ctx = MappingContext::new(&lt, lb, &rt, rb);

        let lefts: Vec<NodeId> = statements_in(&lt, lb)
            .into_iter()
            .filter(|&s| *ctx.left_text(s) == *"save(x);")
            .collect();
        let right = stmt_with_text(&ctx, false, "save(x);");
        assert_eq!(
            detect_conditional_multi(&ctx, &lefts, &[right]),
            MultiVerdict::KeepAll
        );

        let set = full_map(&ctx);
        let saves: Vec<&StatementMapping> = set
            .iter()
            .filter(|m| *ctx.left_text(m.left) == *"save(x);")
            .collect();
        assert_eq!(saves.len(), 3);
        let gid = saves[0].multi_group.expect("grouped");
        assert!(saves.iter().all(|m| m.multi_group == Some(gid)));
        assert!(saves.iter().all(|m| m.right == right));
        assert!(saves.iter().all(|m| m.multi_size == 4));
    }

    #[test]
    fn sequential_ifs_and_equal_depth_defer_to_rank() {
        // Two separate if statements: no chain, no merge.
        let (lt, lb) = parse_body("if (a) { save(x); } if (b) { save(x); }");
        let (rt, rb) = parse_body("save(x);");
        let ctx = MappingContext::new(&lt, lb, &rt, rb);
        let lefts: Vec<NodeId> = statements_in(&lt, lb)
            .into_iter()
            .filter(|&s| *ctx.left_text(s) == *"save(x);")
            .collect();
        let right = statements_in(&rt, rb)[0];
        assert_eq!(
            detect_conditional_multi(&ctx, &lefts, &[right]),
            MultiVerdict::DeferToRank
        );

        // Chain present but the merged statement is not shallower.
        let (lt2, lb2) = parse_body("if (a) { save(x); } else { save(x); }");
        let (rt2, rb2) = parse_body("if (c) { save(x); }");
        let ctx2 = MappingContext::new(&lt2, lb2, &rt2, rb2);
        let lefts2: Vec<NodeId> = statements_in(&lt2, lb2)
            .into_iter()
            .filter(|&s| *ctx2.left_text(s) == *"save(x);")
            .collect();
        let right2 = stmt_with_text(&ctx2, false, "save(x);");
        assert_eq!(
            detect_conditional_multi(&ctx2, &lefts2, &[right2]),
            MultiVerdict::DeferToRank
        );
    }

    #[test]
    fn inverted_condition_matches_in_composite_round_two() {
        let (lt, lb) = parse_body("if (sf == null) { init(); }");
        let (rt, rb) = parse_body("if (sf != null) { init(); }");
        let ctx = MappingContext::new(&lt, lb, &rt, rb);
        let set = full_map(&ctx);
        let ifm = set
            .iter()
            .find(|m| !m.is_leaf && ctx.lt.label(m.left) == tax::IF_STATEMENT)
            .expect("if statements matched");
        assert_eq!(ifm.round, MatchRound::CompositeReplaced);
        assert_eq!(ifm.edit_distance, 1);
        assert_eq!(ifm.replacements.len(), 1);
        assert_eq!(ifm.replacements[0].kind, ReplacementKind::ArgumentChange);
        assert_eq!(ifm.replacements[0].left_text, "==");
        assert_eq!(ifm.replacements[0].right_text, "!=");
    }

    #[test]
    fn identical_neighbors_outrank_smaller_edit_distance() {
        let (lt, lb) = parse_body("setUp(); compute(abc); tearDown();");
        let (rt, rb) =
            parse_body("setUp(); compute(xyz); tearDown(); if (k) { compute(ab); }");
        let ctx = MappingContext::new(&lt, lb, &rt, rb);
        let set = full_map(&ctx);
        let m = set
            .iter()
            .find(|m| *ctx.left_text(m.left) == *"compute(abc);")
            .expect("compute mapped");
        // Distance to compute(ab); is 1 and to compute(xyz); is 3, but the
        // surrounding statements single out the in-place counterpart.
        assert_eq!(*ctx.right_text(m.right), *"compute(xyz);");
    }

    #[test]
    fn rank_rule_one_prefers_multi_mappings() {
        let (lt, lb) = parse_body("a(); b();");
        let (rt, rb) = parse_body("a(); b();");
        let ctx = MappingContext::new(&lt, lb, &rt, rb);
        let la = statements_in(&lt, lb)[0];
        let ra = statements_in(&rt, rb)[0];
        let mut multi = mk_mapping(
            la,
            Candidate { right: ra, replacements: Vec::new(), dist: 0 },
            MatchRound::LeafIdentical,
            true,
        );
        multi.multi_group = Some(0);
        multi.multi_size = 4;
        let plain = mk_mapping(
            la,
            Candidate { right: ra, replacements: Vec::new(), dist: 0 },
            MatchRound::LeafIdentical,
            true,
        );
        assert_eq!(rank_leaf(&ctx, &multi, &plain), Ordering::Less);
        assert_eq!(rank_leaf(&ctx, &plain, &multi), Ordering::Greater);
        let mut bigger = multi.clone();
        bigger.multi_size = 5;
        assert_eq!(rank_leaf(&ctx, &bigger, &multi), Ordering::Less);
    }

    #[test]
    fn rank_is_antisymmetric_on_fixture_candidates() {
        let (lt, lb) = parse_body(
            "if (a) { return null; } else if (b) { return null; } else { return null; } log();",
        );
        let (rt, rb) = parse_body(
            "log(); if (a) { return null; } else if (b) { return null; } else { return null; }",
        );
        let ctx = MappingContext::new(&lt, lb, &rt, rb);
        let lefts = statements_in(&lt, lb);
        let rights = statements_in(&rt, rb);
        let mut mappings = Vec::new();
        for &l in &lefts {
            for &r in &rights {
                if ctx.lt.label(l) != ctx.rt.label(r) {
                    continue;
                }
                if is_mappable_leaf(ctx.lt.label(l)) && *ctx.left_text(l) == *ctx.right_text(r) {
                    mappings.push(mk_mapping(
                        l,
                        Candidate { right: r, replacements: Vec::new(), dist: 0 },
                        MatchRound::LeafIdentical,
                        true,
                    ));
                }
            }
        }
        assert!(mappings.len() >= 6, "fixture yields contended candidates");
        for a in &mappings {
            for b in &mappings {
                let ab = rank_leaf(&ctx, a, b);
                let ba = rank_leaf(&ctx, b, a);
                if a.left == b.left && a.right == b.right {
                    continue;
                }
                assert_eq!(ab, ba.reverse(), "antisymmetry");
            }
        }
    }

    #[test]
    fn depth_index_and_parent_distances_follow_definitions() {
        let (lt, lb) = parse_body("a(); if (c) { b(); while (d) { e(); } }");
        let (rt, rb) = parse_body("a(); if (c) { b(); while (x) { e(); } }");
        let ctx = MappingContext::new(&lt, lb, &rt, rb);

        let a = stmt_with_text(&ctx, true, "a();");
        let b = stmt_with_text(&ctx, true, "b();");
        let e = stmt_with_text(&ctx, true, "e();");
        assert_eq!(depth_of(&lt, lb, a), 0);
        assert_eq!(depth_of(&lt, lb, b), 1);
        assert_eq!(depth_of(&lt, lb, e), 2);
        // b is the first statement of the if body; the while is the second.
        assert_eq!(stmt_index(&lt, b), 0);
        let w = stmt_with_text(&ctx, true, "while (d)");
        assert_eq!(stmt_index(&lt, w), 1);

        let er = stmt_with_text(&ctx, false, "e();");
        let m = mk_mapping(
            e,
            Candidate { right: er, replacements: Vec::new(), dist: 0 },
            MatchRound::LeafIdentical,
            true,
        );
        let rank = mapping_rank(&ctx, &m);
        assert_eq!(rank.left_depth, 2);
        assert_eq!(rank.right_depth, 2);
        // Innermost parent first: while header distance 1, if header 0.
        assert_eq!(rank.parent_edit_distance, vec![1, 0]);
        assert_eq!(rank.parent_edit_distance_sum, 1);
        assert_eq!(rank.direct_parent_edit_distance, 1);
        assert_eq!(rank.depth_diff, 0);
        assert_eq!(rank.index_diff, 0);
    }

    #[test]
    fn no_replacement_round_mapping_for_identical_pairs() {
        let (lt, lb) = parse_body("p(); q(r); s(); t(u, v);");
        let (rt, rb) = parse_body("s(); q(w); p(); t(u, x);");
        let ctx = MappingContext::new(&lt, lb, &rt, rb);
        let set = full_map(&ctx);
        for m in set.iter() {
            if m.round == MatchRound::LeafReplaced {
                assert!(!m.replacements.is_empty());
                assert_ne!(*ctx.left_text(m.left), *ctx.right_text(m.right));
            }
            if m.edit_distance > 0 {
                let applied = apply_replacements(ctx.lt, m.left, &m.replacements).unwrap();
                assert_eq!(applied, *ctx.right_text(m.right));
            }
        }
    }

    #[test]
    fn call_sites_scope_executions_to_parent_counterparts() {
        // Origin method: duplicated fragments inside a for and an if.
        let (lt, lb) = parse_body(
            "for (int i = 0; i < n; i++) { a(); b(); } if (c) { a(); b(); }",
        );
        // After extraction: the fragments replaced by calls to the new
        // method.
        let (rt, rb) = parse_body(
            "for (int i = 0; i < n; i++) { helper(); } if (c) { helper(); }",
        );
        let lfor = {
            let ctx = MappingContext::new(&lt, lb, &rt, rb);
            stmt_with_text(&ctx, true, "for (int i = 0; i < n; i++)")
        };
        let ctx = MappingContext::new(&lt, lb, &rt, rb);
        let lif = stmt_with_text(&ctx, true, "if (c)");
        let rfor = stmt_with_text(&ctx, false, "for (int i = 0; i < n; i++)");
        let rif = stmt_with_text(&ctx, false, "if (c)");
        let mut pairs = PairStore::new();
        pairs.add(lfor, rfor);
        pairs.add(lif, rif);
        let calls: Vec<NodeId> = statements_in(&rt, rb)
            .into_iter()
            .filter(|&s| *ctx.right_text(s) == *"helper();")
            .collect();
        assert_eq!(calls.len(), 2);
        let execs = scope_by_call_sites(&rt, rb, &calls, &pairs, CallSiteSide::Right);
        assert_eq!(execs.len(), 2);
        assert_eq!(execs[0].counterpart_scope, Some(lfor));
        assert_eq!(execs[1].counterpart_scope, Some(lif));

        // A call at method-body scope has no restricting counterpart.
        let (rt2, rb2) = parse_body("helper();");
        let call2 = statements_in(&rt2, rb2);
        let execs2 = scope_by_call_sites(&rt2, rb2, &call2, &pairs, CallSiteSide::Right);
        assert_eq!(execs2.len(), 1);
        assert_eq!(execs2[0].counterpart_scope, None);
        assert!(scope_by_call_sites(&rt2, rb2, &[], &pairs, CallSiteSide::Right).is_empty());
    }

    #[test]
    fn region_exclusion_separates_adjacent_duplicates() {
        // Origin: two adjacent duplicated fragments at body scope; extracted
        // method holds one copy.
        let (lt, lb) = parse_body("a(); b(); a(); b();");
        let (rt, rb) = parse_body("a(); b();");
        let ctx = MappingContext::new(&lt, lb, &rt, rb);
        let lefts = statements_in(&lt, lb);
        let rights = statements_in(&rt, rb);

        let first = map_statements(&ctx, &lefts, &rights);
        assert_eq!(first.len(), 2);
        let region = identical_region_lefts(&ctx, &first);
        assert_eq!(region, vec![lefts[0], lefts[1]], "first duplicate region");

        let remaining: Vec<NodeId> =
            lefts.iter().copied().filter(|l| !region.contains(l)).collect();
        let second = map_statements(&ctx, &remaining, &rights);
        assert_eq!(second.len(), 2);
        for m in second.iter() {
            assert!(remaining.contains(&m.left));
            assert_eq!(*ctx.left_text(m.left), *ctx.right_text(m.right));
        }
    }

    #[test]
    fn duplicate_rules_drop_call_sites_unmapped_parents_and_larger_distances() {
        let c = |key, calls, parents, nested, identical, dist| DuplicateCandidate {
            key,
            calls_refactored_method: calls,
            parents_mapped: parents,
            from_nested_refactoring: nested,
            identical,
            edit_distance: dist,
        };
        // Rule 1: the origin-side mapping containing the extracted call is
        // discarded.
        assert_eq!(
            optimize_duplicates(&[c(0, true, true, false, true, 0), c(1, false, true, false, true, 0)]),
            vec![1]
        );
        // Rule 2: unmapped parents lose.
        assert_eq!(
            optimize_duplicates(&[c(0, false, false, false, true, 0), c(1, false, true, false, true, 0)]),
            vec![1]
        );
        // Rule 3: nested extractions lose.
        assert_eq!(
            optimize_duplicates(&[c(0, false, true, true, true, 0), c(1, false, true, false, true, 0)]),
            vec![1]
        );
        // Rule 4: non-identical mappings lose.
        assert_eq!(
            optimize_duplicates(&[c(0, false, true, false, false, 2), c(1, false, true, false, true, 0)]),
            vec![1]
        );
        // Rule 5: distances 3, 1, 1 keep the two closest.
        assert_eq!(
            optimize_duplicates(&[
                c(0, false, true, false, false, 3),
                c(1, false, true, false, false, 1),
                c(2, false, true, false, false, 1),
            ]),
            vec![1, 2]
        );
        // No rule applies when every mapping satisfies the condition.
        assert_eq!(
            optimize_duplicates(&[c(0, true, true, false, true, 0), c(1, true, true, false, true, 0)]),
            vec![0, 1]
        );
    }

    #[test]
    fn switch_branches_count_as_execution_branches() {
        let body_l = "switch (k) { case 1: save(x); break; case 2: save(x); break; default: save(x); }";
        let body_r = "save(x); switch (k) { case 1: break; case 2: break; default: log(); }";
        let (lt, lb) = parse_body(body_l);
        let (rt, rb) = parse_body(body_r);
        let ctx = MappingContext::new(&lt, lb, &rt, rb);
        let lefts: Vec<NodeId> = statements_in(&lt, lb)
            .into_iter()
            .filter(|&s| *ctx.left_text(s) == *"save(x);")
            .collect();
        assert_eq!(lefts.len(), 3);
        let right = stmt_with_text(&ctx, false, "save(x);");
        assert_eq!(
            detect_conditional_multi(&ctx, &lefts, &[right]),
            MultiVerdict::KeepAll
        );
    }
}
