//! Commit-level declaration matching in four phases.
//!
//! Phase 1 pairs program elements with identical signatures top-down
//! (types by package + name, then their fields, methods, enum constants,
//! and initializer blocks). Phase 2 pairs the leftover members of each
//! matched type whose signatures changed, scoring every combination by its
//! statement mappings, and infers field renames from identifier replacements
//! that are consistent across all mapped bodies of the type. Phase 3 pairs
//! leftover types by the intersection of their member signatures (renamed or
//! moved classes) and recurses into phases 1 and 2 for each recovered pair.
//! Phase 4 cross-pairs the remaining methods over all classes to find moved
//! members, tagging them Pull Up / Push Down when a declared inheritance
//! relation links the classes, and scans moved bodies for references to
//! unmatched fields that moved along.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::refactor::{Refactoring, RefactoringType};
use crate::stmt::{
    edit_distance, map_statements, statements_in, MappingContext, ReplacementKind,
    StatementMapping,
};
use crate::taxonomy as tax;
use crate::tree::{flags, pretty, AstTree, NodeId};

/// One parsed file of a snapshot.
#[derive(Debug, Clone)]
pub struct SourceFile {
    pub path: String,
    pub tree: AstTree,
}

/// Commit-level node address: an index into the snapshot's file list plus a
/// node in that file's tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Loc {
    pub file: usize,
    pub node: NodeId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DeclKind {
    Type,
    Method,
    Field,
    EnumConstant,
    Initializer,
    Import,
}

impl fmt::Display for DeclKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DeclKind::Type => "type",
            DeclKind::Method => "method",
            DeclKind::Field => "field",
            DeclKind::EnumConstant => "enum-constant",
            DeclKind::Initializer => "initializer",
            DeclKind::Import => "import",
        };
        f.write_str(s)
    }
}

/// What identifies a declaration: a method is identified by its name and
/// parameter type list; other kinds by their qualified name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub kind: DeclKind,
    pub qualified_name: String,
    pub name: String,
    pub parameter_types: Vec<String>,
    pub return_type: Option<String>,
    pub is_constructor: bool,
}

impl Signature {
    /// Type-local identity key; two members match in the identical phase iff
    /// their keys are equal.
    pub fn identity_key(&self) -> String {
        match self.kind {
            DeclKind::Method => format!(
                "m:{}:{}({})",
                u8::from(self.is_constructor),
                self.name,
                self.parameter_types.join(",")
            ),
            DeclKind::Field => format!("f:{}", self.name),
            DeclKind::EnumConstant => format!("e:{}", self.name),
            DeclKind::Initializer => format!("i:{}", self.name),
            DeclKind::Type => format!("t:{}", self.name),
            DeclKind::Import => format!("imp:{}", self.name),
        }
    }
}

/// A member declaration of one type.
#[derive(Clone, Debug)]
pub struct Member {
    pub loc: Loc,
    pub signature: Signature,
    /// Body block for methods and initializers.
    pub body: Option<NodeId>,
    /// Position among the same-kind members of the enclosing type.
    pub ordinal: usize,
    /// Declared variable names (fields only; one per fragment).
    pub fragment_names: Vec<String>,
}

/// A top-level type declaration and its members.
#[derive(Clone, Debug)]
pub struct TypeModel {
    pub loc: Loc,
    pub package: String,
    pub name: String,
    pub qualified: String,
    /// Declared extends/implements references, as printed.
    pub supertypes: Vec<String>,
    pub methods: Vec<Member>,
    pub fields: Vec<Member>,
    pub enum_constants: Vec<Member>,
    pub initializers: Vec<Member>,
}

/// Two matched declarations plus the statement mappings inside their bodies.
#[derive(Clone, Debug)]
pub struct DeclarationPair {
    pub kind: DeclKind,
    pub left: Loc,
    pub right: Loc,
    pub signature_changed: bool,
    pub statement_mappings: Vec<StatementMapping>,
}

/// The leftover members of one matched type pair, input to the
/// changed-signature phase.
#[derive(Clone, Debug)]
pub struct ClassDiff {
    pub left_type: Loc,
    pub right_type: Loc,
    pub unmatched_left_methods: Vec<Loc>,
    pub unmatched_right_methods: Vec<Loc>,
    pub unmatched_left_fields: Vec<Loc>,
    pub unmatched_right_fields: Vec<Loc>,
    lt_index: usize,
    rt_index: usize,
}

impl ClassDiff {
    /// Indexes of the paired types in the matcher's snapshot models.
    pub fn type_indexes(&self) -> (usize, usize) {
        (self.lt_index, self.rt_index)
    }
}

/// Final result of the declaration matching workflow.
#[derive(Debug, Default)]
pub struct CommitMatch {
    pub pairs: Vec<DeclarationPair>,
    pub refactorings: Vec<Refactoring>,
}

// ---------------------------------------------------------------------------
// Model extraction
// ---------------------------------------------------------------------------

fn package_of(tree: &AstTree) -> String {
    tree.children(tree.root())
        .iter()
        .copied()
        .find(|&c| tree.label(c) == tax::PACKAGE_DECLARATION)
        .map(|p| pretty(tree, tree.children(p)[0]))
        .unwrap_or_default()
}

fn direct_name(tree: &AstTree, node: NodeId) -> Option<(usize, String)> {
    tree.children(node)
        .iter()
        .position(|&c| tree.label(c) == tax::SIMPLE_NAME)
        .map(|i| (i, tree.value(tree.children(node)[i]).to_string()))
}

fn method_member(tree: &AstTree, file: usize, node: NodeId, owner: &str, ordinal: usize) -> Member {
    let cs = tree.children(node);
    let (name_idx, name) = direct_name(tree, node).unwrap_or((0, String::new()));
    let return_type = cs[..name_idx]
        .iter()
        .copied()
        .find(|&c| tax::is_type_label(tree.label(c)))
        .map(|c| pretty(tree, c));
    let parameter_types = cs
        .iter()
        .copied()
        .filter(|&c| tree.label(c) == tax::SINGLE_VARIABLE_DECLARATION)
        .map(|p| {
            tree.children(p)
                .iter()
                .copied()
                .find(|&c| tax::is_type_label(tree.label(c)))
                .map(|c| pretty(tree, c))
                .unwrap_or_default()
        })
        .collect();
    let body = cs.iter().copied().find(|&c| tree.label(c) == tax::BLOCK);
    Member {
        loc: Loc { file, node },
        signature: Signature {
            kind: DeclKind::Method,
            qualified_name: format!("{owner}.{name}"),
            name,
            parameter_types,
            return_type,
            is_constructor: tree.has_flag(node, flags::CONSTRUCTOR),
        },
        body,
        ordinal,
        fragment_names: Vec::new(),
    }
}

fn plain_member(
    kind: DeclKind,
    file: usize,
    node: NodeId,
    owner: &str,
    name: String,
    ordinal: usize,
    fragment_names: Vec<String>,
    body: Option<NodeId>,
) -> Member {
    Member {
        loc: Loc { file, node },
        signature: Signature {
            kind,
            qualified_name: format!("{owner}.{name}"),
            name,
            parameter_types: Vec::new(),
            return_type: None,
            is_constructor: false,
        },
        body,
        ordinal,
        fragment_names,
    }
}

fn model_type(tree: &AstTree, file: usize, node: NodeId, package: &str) -> TypeModel {
    let name = direct_name(tree, node).map(|(_, n)| n).unwrap_or_default();
    let qualified = if package.is_empty() {
        name.clone()
    } else {
        format!("{package}.{name}")
    };
    let supertypes = tree
        .children(node)
        .iter()
        .copied()
        .filter(|&c| tax::is_type_label(tree.label(c)))
        .map(|c| pretty(tree, c))
        .collect();
    let mut methods = Vec::new();
    let mut fields = Vec::new();
    let mut enum_constants = Vec::new();
    let mut initializers = Vec::new();
    let mut static_inits = 0usize;
    let mut instance_inits = 0usize;
    for &c in tree.children(node) {
        match tree.label(c) {
            tax::METHOD_DECLARATION => {
                methods.push(method_member(tree, file, c, &qualified, methods.len()));
            }
            tax::FIELD_DECLARATION => {
                let frags: Vec<String> = tree
                    .children(c)
                    .iter()
                    .copied()
                    .filter(|&f| tree.label(f) == tax::VARIABLE_DECLARATION_FRAGMENT)
                    .map(|f| tree.value(tree.children(f)[0]).to_string())
                    .collect();
                let fname = frags.join(",");
                let ord = fields.len();
                fields.push(plain_member(
                    DeclKind::Field,
                    file,
                    c,
                    &qualified,
                    fname,
                    ord,
                    frags,
                    None,
                ));
            }
            tax::ENUM_CONSTANT_DECLARATION => {
                let cname = tree.value(tree.children(c)[0]).to_string();
                let ord = enum_constants.len();
                enum_constants.push(plain_member(
                    DeclKind::EnumConstant,
                    file,
                    c,
                    &qualified,
                    cname,
                    ord,
                    Vec::new(),
                    None,
                ));
            }
            tax::INITIALIZER => {
                let is_static = tree
                    .children(c)
                    .iter()
                    .any(|&m| tree.label(m) == tax::MODIFIER && tree.value(m) == "static");
                let iname = if is_static {
                    let n = format!("static-initializer-{static_inits}");
                    static_inits += 1;
                    n
                } else {
                    let n = format!("initializer-{instance_inits}");
                    instance_inits += 1;
                    n
                };
                let body = tree
                    .children(c)
                    .iter()
                    .copied()
                    .find(|&b| tree.label(b) == tax::BLOCK);
                let ord = initializers.len();
                initializers.push(plain_member(
                    DeclKind::Initializer,
                    file,
                    c,
                    &qualified,
                    iname,
                    ord,
                    Vec::new(),
                    body,
                ));
            }
            _ => {}
        }
    }
    TypeModel {
        loc: Loc { file, node },
        package: package.to_string(),
        name,
        qualified,
        supertypes,
        methods,
        fields,
        enum_constants,
        initializers,
    }
}

/// Extract the type models of one snapshot.
pub fn model_snapshot(files: &[SourceFile]) -> Vec<TypeModel> {
    let mut out = Vec::new();
    for (fi, f) in files.iter().enumerate() {
        let package = package_of(&f.tree);
        for n in f.tree.preorder() {
            let l = f.tree.label(n);
            if l == tax::TYPE_DECLARATION || l == tax::ENUM_DECLARATION {
                out.push(model_type(&f.tree, fi, n, &package));
            }
        }
    }
    out
}

fn find_member(types: &[TypeModel], loc: Loc) -> Option<&Member> {
    for t in types {
        for mem in t
            .methods
            .iter()
            .chain(&t.fields)
            .chain(&t.enum_constants)
            .chain(&t.initializers)
        {
            if mem.loc == loc {
                return Some(mem);
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Signature similarity
// ---------------------------------------------------------------------------

fn split_tokens(s: &str, out: &mut BTreeSet<String>) {
    let mut cur = String::new();
    let mut prev_is_lower = false;
    for ch in s.chars() {
        if ch.is_alphanumeric() {
            if ch.is_uppercase() && prev_is_lower && !cur.is_empty() {
                out.insert(std::mem::take(&mut cur));
            }
            cur.extend(ch.to_lowercase());
            prev_is_lower = ch.is_lowercase() || ch.is_ascii_digit();
        } else {
            if !cur.is_empty() {
                out.insert(std::mem::take(&mut cur));
            }
            prev_is_lower = false;
        }
    }
    if !cur.is_empty() {
        out.insert(cur);
    }
}

fn signature_tokens(sig: &Signature) -> BTreeSet<String> {
    let mut t = BTreeSet::new();
    split_tokens(&sig.name, &mut t);
    for p in &sig.parameter_types {
        split_tokens(p, &mut t);
    }
    t
}

/// Dice coefficient over name + parameter-type tokens, in permille.
pub fn signature_similarity_permille(a: &Signature, b: &Signature) -> usize {
    let ta = signature_tokens(a);
    let tb = signature_tokens(b);
    if ta.is_empty() && tb.is_empty() {
        return 1000;
    }
    let inter = ta.intersection(&tb).count();
    2000 * inter / (ta.len() + tb.len())
}

fn name_similarity_permille(a: &str, b: &str) -> usize {
    let mut ta = BTreeSet::new();
    let mut tb = BTreeSet::new();
    split_tokens(a, &mut ta);
    split_tokens(b, &mut tb);
    if ta.is_empty() && tb.is_empty() {
        return 1000;
    }
    let inter = ta.intersection(&tb).count();
    2000 * inter / (ta.len() + tb.len())
}

/// `List<String>` → `List`, `com.a.Base` → `Base`.
fn simple_type_tail(s: &str) -> &str {
    let no_args = s.split('<').next().unwrap_or(s);
    no_args.rsplit('.').next().unwrap_or(no_args).trim()
}

// ---------------------------------------------------------------------------
// The matcher
// ---------------------------------------------------------------------------

pub struct DeclMatcher<'a> {
    left_files: &'a [SourceFile],
    right_files: &'a [SourceFile],
    pub left_types: Vec<TypeModel>,
    pub right_types: Vec<TypeModel>,
    pub pairs: Vec<DeclarationPair>,
    pub refactorings: Vec<Refactoring>,
    pub class_diffs: Vec<ClassDiff>,
    diff_cursor: usize,
    matched_left: BTreeSet<Loc>,
    matched_right: BTreeSet<Loc>,
    matched_left_types: BTreeSet<usize>,
    matched_right_types: BTreeSet<usize>,
}

struct PairCandidate {
    l_type: usize,
    l_member: usize,
    r_type: usize,
    r_member: usize,
    matched: usize,
    unmatched: usize,
    similarity: usize,
    position_distance: usize,
    mappings: Vec<StatementMapping>,
}

impl<'a> DeclMatcher<'a> {
    pub fn new(left: &'a [SourceFile], right: &'a [SourceFile]) -> Self {
        DeclMatcher {
            left_files: left,
            right_files: right,
            left_types: model_snapshot(left),
            right_types: model_snapshot(right),
            pairs: Vec::new(),
            refactorings: Vec::new(),
            class_diffs: Vec::new(),
            diff_cursor: 0,
            matched_left: BTreeSet::new(),
            matched_right: BTreeSet::new(),
            matched_left_types: BTreeSet::new(),
            matched_right_types: BTreeSet::new(),
        }
    }

    pub fn ltree(&self, file: usize) -> &AstTree {
        &self.left_files[file].tree
    }

    pub fn rtree(&self, file: usize) -> &AstTree {
        &self.right_files[file].tree
    }

    pub fn left_files(&self) -> &[SourceFile] {
        self.left_files
    }

    pub fn right_files(&self) -> &[SourceFile] {
        self.right_files
    }

    pub fn is_left_matched(&self, loc: Loc) -> bool {
        self.matched_left.contains(&loc)
    }

    pub fn is_right_matched(&self, loc: Loc) -> bool {
        self.matched_right.contains(&loc)
    }

    /// Looks up the modelled member declared at `loc` in the old snapshot.
    pub fn left_member(&self, loc: Loc) -> Option<&Member> {
        find_member(&self.left_types, loc)
    }

    /// Looks up the modelled member declared at `loc` in the new snapshot.
    pub fn right_member(&self, loc: Loc) -> Option<&Member> {
        find_member(&self.right_types, loc)
    }

    pub fn finish(self) -> CommitMatch {
        CommitMatch { pairs: self.pairs, refactorings: self.refactorings }
    }

    fn add_pair(&mut self, pair: DeclarationPair) {
        self.matched_left.insert(pair.left);
        self.matched_right.insert(pair.right);
        self.pairs.push(pair);
    }

    fn body_mappings(
        &self,
        lfile: usize,
        lbody: Option<NodeId>,
        rfile: usize,
        rbody: Option<NodeId>,
    ) -> Vec<StatementMapping> {
        let (Some(lb), Some(rb)) = (lbody, rbody) else {
            return Vec::new();
        };
        let lt = self.ltree(lfile);
        let rt = self.rtree(rfile);
        let ctx = MappingContext::new(lt, lb, rt, rb);
        let lefts = statements_in(lt, lb);
        let rights = statements_in(rt, rb);
        map_statements(&ctx, &lefts, &rights).mappings
    }

    fn body_totals(
        &self,
        lfile: usize,
        lbody: Option<NodeId>,
        rfile: usize,
        rbody: Option<NodeId>,
    ) -> usize {
        let l = lbody.map_or(0, |b| statements_in(self.ltree(lfile), b).len());
        let r = rbody.map_or(0, |b| statements_in(self.rtree(rfile), b).len());
        l + r
    }

    // -----------------------------------------------------------------
    // Phase 1
    // -----------------------------------------------------------------

    /// Pair types with identical (package, name) and, inside them, members
    /// with identical signatures; queue the leftovers per type pair.
    pub fn phase1_identical(&mut self) {
        let mut by_name: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, t) in self.left_types.iter().enumerate() {
            by_name.entry(t.qualified.clone()).or_default().push(i);
        }
        let mut right_by_name: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, t) in self.right_types.iter().enumerate() {
            right_by_name.entry(t.qualified.clone()).or_default().push(i);
        }
        let mut matches = Vec::new();
        for (name, ls) in &by_name {
            if let Some(rs) = right_by_name.get(name) {
                for (&li, &ri) in ls.iter().zip(rs.iter()) {
                    matches.push((li, ri));
                }
            }
        }
        for (li, ri) in matches {
            self.pair_types(li, ri, false);
        }
    }

    /// Record a matched type pair, run identical-signature member matching
    /// inside it, and queue a class diff with the leftovers.
    fn pair_types(&mut self, li: usize, ri: usize, signature_changed: bool) {
        self.matched_left_types.insert(li);
        self.matched_right_types.insert(ri);
        let (lloc, rloc) = (self.left_types[li].loc, self.right_types[ri].loc);
        self.add_pair(DeclarationPair {
            kind: DeclKind::Type,
            left: lloc,
            right: rloc,
            signature_changed,
            statement_mappings: Vec::new(),
        });
        self.match_members_identical(li, ri);

        let collect = |members: &[Member], matched: &BTreeSet<Loc>| -> Vec<Loc> {
            members
                .iter()
                .map(|m| m.loc)
                .filter(|l| !matched.contains(l))
                .collect()
        };
        let diff = ClassDiff {
            left_type: lloc,
            right_type: rloc,
            unmatched_left_methods: collect(&self.left_types[li].methods, &self.matched_left),
            unmatched_right_methods: collect(&self.right_types[ri].methods, &self.matched_right),
            unmatched_left_fields: collect(&self.left_types[li].fields, &self.matched_left),
            unmatched_right_fields: collect(&self.right_types[ri].fields, &self.matched_right),
            lt_index: li,
            rt_index: ri,
        };
        self.class_diffs.push(diff);
    }

    fn match_members_identical(&mut self, li: usize, ri: usize) {
        enum Cat {
            Methods,
            Fields,
            Constants,
            Initializers,
        }
        for cat in [Cat::Methods, Cat::Fields, Cat::Constants, Cat::Initializers] {
            let pick = |t: &TypeModel| -> Vec<Member> {
                match cat {
                    Cat::Methods => t.methods.clone(),
                    Cat::Fields => t.fields.clone(),
                    Cat::Constants => t.enum_constants.clone(),
                    Cat::Initializers => t.initializers.clone(),
                }
            };
            let lms = pick(&self.left_types[li]);
            let rms = pick(&self.right_types[ri]);
            let mut right_by_key: BTreeMap<String, Vec<&Member>> = BTreeMap::new();
            for m in &rms {
                right_by_key.entry(m.signature.identity_key()).or_default().push(m);
            }
            let mut used: BTreeMap<String, usize> = BTreeMap::new();
            let mut committed: Vec<(Member, Member)> = Vec::new();
            for lm in &lms {
                let key = lm.signature.identity_key();
                let Some(cands) = right_by_key.get(&key) else {
                    continue;
                };
                let cursor = used.entry(key).or_insert(0);
                if *cursor >= cands.len() {
                    continue;
                }
                let rm = cands[*cursor];
                *cursor += 1;
                committed.push((lm.clone(), rm.clone()));
            }
            for (lm, rm) in committed {
                let mappings =
                    self.body_mappings(lm.loc.file, lm.body, rm.loc.file, rm.body);
                let mut signature_changed = false;
                if lm.signature.kind == DeclKind::Method
                    && !lm.signature.is_constructor
                    && lm.signature.return_type != rm.signature.return_type
                {
                    signature_changed = true;
                    self.refactorings.push(
                        Refactoring::new(
                            RefactoringType::ChangeReturnType,
                            format!(
                                "{} changed to {} in {}({})",
                                lm.signature.return_type.clone().unwrap_or_default(),
                                rm.signature.return_type.clone().unwrap_or_default(),
                                rm.signature.qualified_name,
                                rm.signature.parameter_types.join(", ")
                            ),
                        )
                        .with_declaration(lm.loc, rm.loc),
                    );
                }
                self.add_pair(DeclarationPair {
                    kind: lm.signature.kind,
                    left: lm.loc,
                    right: rm.loc,
                    signature_changed,
                    statement_mappings: mappings,
                });
            }
        }
    }

    // -----------------------------------------------------------------
    // Phase 2
    // -----------------------------------------------------------------

    /// Process every queued class diff: pair leftover methods whose
    /// signatures changed, then infer field renames from consistent
    /// replacements.
    pub fn phase2_changed_signatures(&mut self) {
        while self.diff_cursor < self.class_diffs.len() {
            let d = self.diff_cursor;
            self.diff_cursor += 1;
            let (li, ri) = (self.class_diffs[d].lt_index, self.class_diffs[d].rt_index);
            self.pair_changed_methods(li, ri);
            self.infer_field_renames(li, ri);
        }
    }

    fn unmatched_method_indexes(&self, side_left: bool, ti: usize) -> Vec<usize> {
        let (model, matched) = if side_left {
            (&self.left_types[ti], &self.matched_left)
        } else {
            (&self.right_types[ti], &self.matched_right)
        };
        model
            .methods
            .iter()
            .enumerate()
            .filter(|(_, m)| !matched.contains(&m.loc))
            .map(|(i, _)| i)
            .collect()
    }

    /// Score one cross-pair of methods; `None` when inadmissible.
    fn score_pair(
        &self,
        lm: &Member,
        rm: &Member,
        require_statements: bool,
    ) -> Option<PairCandidate> {
        let total = self.body_totals(lm.loc.file, lm.body, rm.loc.file, rm.body);
        let similarity = signature_similarity_permille(&lm.signature, &rm.signature);
        if total == 0 {
            // Empty bodies on both sides: signatures alone must carry the
            // match.
            if require_statements || similarity < 500 {
                return None;
            }
            return Some(PairCandidate {
                l_type: 0,
                l_member: 0,
                r_type: 0,
                r_member: 0,
                matched: 0,
                unmatched: 0,
                similarity,
                position_distance: lm.ordinal.abs_diff(rm.ordinal),
                mappings: Vec::new(),
            });
        }
        let mappings = self.body_mappings(lm.loc.file, lm.body, rm.loc.file, rm.body);
        let mapped_left: BTreeSet<NodeId> = mappings.iter().map(|m| m.left).collect();
        let mapped_right: BTreeSet<NodeId> = mappings.iter().map(|m| m.right).collect();
        let matched = mapped_left.len() + mapped_right.len();
        let unmatched = total - matched;
        if matched <= unmatched {
            return None;
        }
        Some(PairCandidate {
            l_type: 0,
            l_member: 0,
            r_type: 0,
            r_member: 0,
            matched,
            unmatched,
            similarity,
            position_distance: lm.ordinal.abs_diff(rm.ordinal),
            mappings,
        })
    }

    fn commit_method_candidates(&mut self, mut cands: Vec<PairCandidate>, moved: bool) {
        cands.sort_by(|a, b| {
            b.matched
                .cmp(&a.matched)
                .then(a.unmatched.cmp(&b.unmatched))
                .then(b.similarity.cmp(&a.similarity))
                .then(a.position_distance.cmp(&b.position_distance))
                .then_with(|| {
                    let al = self.left_types[a.l_type].methods[a.l_member].loc;
                    let bl = self.left_types[b.l_type].methods[b.l_member].loc;
                    let ar = self.right_types[a.r_type].methods[a.r_member].loc;
                    let br = self.right_types[b.r_type].methods[b.r_member].loc;
                    (al, ar).cmp(&(bl, br))
                })
        });
        for c in cands {
            let lm = self.left_types[c.l_type].methods[c.l_member].clone();
            let rm = self.right_types[c.r_type].methods[c.r_member].clone();
            if self.matched_left.contains(&lm.loc) || self.matched_right.contains(&rm.loc) {
                continue;
            }
            if moved {
                self.emit_move_refactoring(c.l_type, &lm, c.r_type, &rm);
            } else {
                self.emit_signature_changes(&lm, &rm);
            }
            let signature_changed =
                lm.signature.identity_key() != rm.signature.identity_key()
                    || lm.signature.return_type != rm.signature.return_type;
            self.add_pair(DeclarationPair {
                kind: DeclKind::Method,
                left: lm.loc,
                right: rm.loc,
                signature_changed,
                statement_mappings: c.mappings,
            });
            if moved {
                self.move_fields_along(c.l_type, &lm, c.r_type, &rm);
            }
        }
    }

    fn pair_changed_methods(&mut self, li: usize, ri: usize) {
        let lms = self.unmatched_method_indexes(true, li);
        let rms = self.unmatched_method_indexes(false, ri);
        let mut cands = Vec::new();
        for &a in &lms {
            for &b in &rms {
                let lm = self.left_types[li].methods[a].clone();
                let rm = self.right_types[ri].methods[b].clone();
                // A constructor is never a rename candidate for an ordinary
                // method.
                if lm.signature.is_constructor != rm.signature.is_constructor {
                    continue;
                }
                if let Some(mut c) = self.score_pair(&lm, &rm, false) {
                    c.l_type = li;
                    c.l_member = a;
                    c.r_type = ri;
                    c.r_member = b;
                    cands.push(c);
                }
            }
        }
        self.commit_method_candidates(cands, false);
    }

    fn emit_signature_changes(&mut self, lm: &Member, rm: &Member) {
        let (ls, rs) = (&lm.signature, &rm.signature);
        let label = format!("{}({})", rs.qualified_name, rs.parameter_types.join(", "));
        // A constructor's name is its class's name; renaming is reported at
        // the class level.
        if ls.name != rs.name && !ls.is_constructor {
            self.refactorings.push(
                Refactoring::new(
                    RefactoringType::RenameMethod,
                    format!("{} renamed to {}", ls.qualified_name, rs.qualified_name),
                )
                .with_declaration(lm.loc, rm.loc),
            );
        }
        match ls.parameter_types.len().cmp(&rs.parameter_types.len()) {
            std::cmp::Ordering::Less => {
                self.refactorings.push(
                    Refactoring::new(
                        RefactoringType::AddParameter,
                        format!("parameter added in {label}"),
                    )
                    .with_declaration(lm.loc, rm.loc),
                );
            }
            std::cmp::Ordering::Greater => {
                self.refactorings.push(
                    Refactoring::new(
                        RefactoringType::RemoveParameter,
                        format!("parameter removed in {label}"),
                    )
                    .with_declaration(lm.loc, rm.loc),
                );
            }
            std::cmp::Ordering::Equal => {
                for (pl, pr) in ls.parameter_types.iter().zip(rs.parameter_types.iter()) {
                    if pl != pr {
                        self.refactorings.push(
                            Refactoring::new(
                                RefactoringType::ChangeParameterType,
                                format!("{pl} changed to {pr} in {label}"),
                            )
                            .with_declaration(lm.loc, rm.loc),
                        );
                    }
                }
            }
        }
        if !ls.is_constructor && ls.return_type != rs.return_type {
            self.refactorings.push(
                Refactoring::new(
                    RefactoringType::ChangeReturnType,
                    format!(
                        "{} changed to {} in {label}",
                        ls.return_type.clone().unwrap_or_default(),
                        rs.return_type.clone().unwrap_or_default()
                    ),
                )
                .with_declaration(lm.loc, rm.loc),
            );
        }
    }

    /// Identifier replacements that hold across every mapped body of the
    /// type pair recover renamed fields.
    fn infer_field_renames(&mut self, li: usize, ri: usize) {
        let lloc = self.left_types[li].loc;
        let rloc = self.right_types[ri].loc;
        let mut fwd: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
        let mut rev: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
        for p in &self.pairs {
            if p.kind != DeclKind::Method
                || p.left.file != lloc.file
                || p.right.file != rloc.file
                || !self.ltree(lloc.file).is_descendant_of(p.left.node, lloc.node)
                || !self.rtree(rloc.file).is_descendant_of(p.right.node, rloc.node)
            {
                continue;
            }
            for m in &p.statement_mappings {
                for rep in &m.replacements {
                    if rep.kind == ReplacementKind::VariableRename {
                        *fwd.entry(rep.left_text.clone())
                            .or_default()
                            .entry(rep.right_text.clone())
                            .or_insert(0) += 1;
                        *rev.entry(rep.right_text.clone())
                            .or_default()
                            .entry(rep.left_text.clone())
                            .or_insert(0) += 1;
                    }
                }
            }
        }
        let lfields: Vec<Member> = self.left_types[li]
            .fields
            .iter()
            .filter(|f| !self.matched_left.contains(&f.loc) && f.fragment_names.len() == 1)
            .cloned()
            .collect();
        let rfields: Vec<Member> = self.right_types[ri]
            .fields
            .iter()
            .filter(|f| !self.matched_right.contains(&f.loc) && f.fragment_names.len() == 1)
            .cloned()
            .collect();
        for lf in &lfields {
            let ln = &lf.fragment_names[0];
            let Some(targets) = fwd.get(ln) else {
                continue;
            };
            if targets.len() != 1 {
                continue;
            }
            let (rn, &count) = targets.iter().next().expect("one target");
            if count == 0 {
                continue;
            }
            // Consistency both ways: nothing else renames into rn.
            if rev.get(rn).is_none_or(|srcs| srcs.len() != 1) {
                continue;
            }
            let Some(rf) = rfields
                .iter()
                .find(|f| &f.fragment_names[0] == rn && !self.matched_right.contains(&f.loc))
            else {
                continue;
            };
            if self.matched_left.contains(&lf.loc) {
                continue;
            }
            self.refactorings.push(
                Refactoring::new(
                    RefactoringType::RenameField,
                    format!(
                        "{} renamed to {}",
                        lf.signature.qualified_name, rf.signature.qualified_name
                    ),
                )
                .with_declaration(lf.loc, rf.loc),
            );
            self.add_pair(DeclarationPair {
                kind: DeclKind::Field,
                left: lf.loc,
                right: rf.loc,
                signature_changed: true,
                statement_mappings: Vec::new(),
            });
        }
    }

    // -----------------------------------------------------------------
    // Phase 3
    // -----------------------------------------------------------------

    /// Pair leftover types by member-signature intersection (renamed and
    /// moved classes), then run the member phases inside each recovered
    /// pair.
    pub fn phase3_types(&mut self) {
        let lfree: Vec<usize> = (0..self.left_types.len())
            .filter(|i| !self.matched_left_types.contains(i))
            .collect();
        let rfree: Vec<usize> = (0..self.right_types.len())
            .filter(|i| !self.matched_right_types.contains(i))
            .collect();
        struct TypeCandidate {
            li: usize,
            ri: usize,
            intersection: usize,
            name_sim: usize,
            package_dist: usize,
        }
        let member_keys = |t: &TypeModel| -> BTreeSet<String> {
            t.methods
                .iter()
                .chain(t.fields.iter())
                .chain(t.enum_constants.iter())
                .map(|m| m.signature.identity_key())
                .collect()
        };
        let mut cands = Vec::new();
        for &li in &lfree {
            let lkeys = member_keys(&self.left_types[li]);
            for &ri in &rfree {
                let rkeys = member_keys(&self.right_types[ri]);
                let intersection = lkeys.intersection(&rkeys).count();
                if intersection == 0 {
                    continue;
                }
                cands.push(TypeCandidate {
                    li,
                    ri,
                    intersection,
                    name_sim: name_similarity_permille(
                        &self.left_types[li].name,
                        &self.right_types[ri].name,
                    ),
                    package_dist: edit_distance(
                        &self.left_types[li].package,
                        &self.right_types[ri].package,
                    ),
                });
            }
        }
        cands.sort_by(|a, b| {
            b.intersection
                .cmp(&a.intersection)
                .then(b.name_sim.cmp(&a.name_sim))
                .then(a.package_dist.cmp(&b.package_dist))
                .then_with(|| {
                    (self.left_types[a.li].loc, self.right_types[a.ri].loc)
                        .cmp(&(self.left_types[b.li].loc, self.right_types[b.ri].loc))
                })
        });
        for c in cands {
            if self.matched_left_types.contains(&c.li) || self.matched_right_types.contains(&c.ri)
            {
                continue;
            }
            let lt = &self.left_types[c.li];
            let rt = &self.right_types[c.ri];
            let same_name = lt.name == rt.name;
            let same_pkg = lt.package == rt.package;
            let tag = match (same_pkg, same_name) {
                (true, false) => Some(RefactoringType::RenameClass),
                (false, true) => Some(RefactoringType::MoveClass),
                (false, false) => Some(RefactoringType::MoveAndRenameClass),
                (true, true) => None,
            };
            if let Some(tag) = tag {
                self.refactorings.push(
                    Refactoring::new(
                        tag,
                        format!("{} matched with {}", lt.qualified, rt.qualified),
                    )
                    .with_declaration(lt.loc, rt.loc),
                );
            }
            self.pair_types(c.li, c.ri, true);
        }
        // The recovered pairs queued fresh class diffs; give them the
        // changed-signature treatment too.
        self.phase2_changed_signatures();
    }

    // -----------------------------------------------------------------
    // Phase 4
    // -----------------------------------------------------------------

    /// Cross-pair the remaining methods over all classes to find moved
    /// members.
    pub fn phase4_moved_members(&mut self) {
        let matched_type_pairs: BTreeSet<(usize, usize)> = self
            .class_diffs
            .iter()
            .map(|d| (d.lt_index, d.rt_index))
            .collect();
        let mut cands = Vec::new();
        for (li, lt) in self.left_types.iter().enumerate() {
            for (a, lm) in lt.methods.iter().enumerate() {
                if self.matched_left.contains(&lm.loc) || lm.signature.is_constructor {
                    continue;
                }
                for (ri, rt) in self.right_types.iter().enumerate() {
                    // Same-class leftovers already had their chance in the
                    // changed-signature phase.
                    if matched_type_pairs.contains(&(li, ri)) {
                        continue;
                    }
                    for (b, rm) in rt.methods.iter().enumerate() {
                        if self.matched_right.contains(&rm.loc) || rm.signature.is_constructor {
                            continue;
                        }
                        if let Some(mut c) = self.score_pair(lm, rm, true) {
                            c.l_type = li;
                            c.l_member = a;
                            c.r_type = ri;
                            c.r_member = b;
                            cands.push(c);
                        }
                    }
                }
            }
        }
        self.commit_method_candidates(cands, true);
    }

    /// A declared `sub extends/implements sup` relation in either snapshot.
    fn inheritance_edge(&self, sub: &str, sup: &str) -> bool {
        self.left_types
            .iter()
            .chain(self.right_types.iter())
            .any(|t| t.name == sub && t.supertypes.iter().any(|s| simple_type_tail(s) == sup))
    }

    fn emit_move_refactoring(&mut self, li: usize, lm: &Member, ri: usize, rm: &Member) {
        let lt_name = self.left_types[li].name.clone();
        let rt_name = self.right_types[ri].name.clone();
        let tag = if self.inheritance_edge(&lt_name, &rt_name) {
            RefactoringType::PullUpMethod
        } else if self.inheritance_edge(&rt_name, &lt_name) {
            RefactoringType::PushDownMethod
        } else if lm.signature.name == rm.signature.name {
            RefactoringType::MoveMethod
        } else {
            RefactoringType::MoveAndRenameMethod
        };
        self.refactorings.push(
            Refactoring::new(
                tag,
                format!(
                    "{} moved to {}",
                    lm.signature.qualified_name, rm.signature.qualified_name
                ),
            )
            .with_declaration(lm.loc, rm.loc),
        );
    }

    /// Unmatched fields referenced inside a moved method's bodies move with
    /// it.
    fn move_fields_along(&mut self, li: usize, lm: &Member, ri: usize, rm: &Member) {
        let (Some(lb), Some(rb)) = (lm.body, rm.body) else {
            return;
        };
        let lt_name = self.left_types[li].name.clone();
        let rt_name = self.right_types[ri].name.clone();
        let lfields: Vec<Member> = self.left_types[li]
            .fields
            .iter()
            .filter(|f| !self.matched_left.contains(&f.loc) && f.fragment_names.len() == 1)
            .cloned()
            .collect();
        let rfields: Vec<Member> = self.right_types[ri]
            .fields
            .iter()
            .filter(|f| !self.matched_right.contains(&f.loc) && f.fragment_names.len() == 1)
            .cloned()
            .collect();
        for lf in &lfields {
            if self.matched_left.contains(&lf.loc) {
                continue;
            }
            let name = &lf.fragment_names[0];
            if !name_referenced(self.ltree(lf.loc.file), lb, name) {
                continue;
            }
            let Some(rf) = rfields.iter().find(|f| {
                &f.fragment_names[0] == name && !self.matched_right.contains(&f.loc)
            }) else {
                continue;
            };
            if !name_referenced(self.rtree(rf.loc.file), rb, name) {
                continue;
            }
            let tag = if self.inheritance_edge(&lt_name, &rt_name) {
                RefactoringType::PullUpField
            } else if self.inheritance_edge(&rt_name, &lt_name) {
                RefactoringType::PushDownField
            } else {
                RefactoringType::MoveField
            };
            self.refactorings.push(
                Refactoring::new(
                    tag,
                    format!(
                        "{} moved to {}",
                        lf.signature.qualified_name, rf.signature.qualified_name
                    ),
                )
                .with_declaration(lf.loc, rf.loc),
            );
            self.add_pair(DeclarationPair {
                kind: DeclKind::Field,
                left: lf.loc,
                right: rf.loc,
                signature_changed: false,
                statement_mappings: Vec::new(),
            });
        }
    }
}

fn name_referenced(tree: &AstTree, scope: NodeId, name: &str) -> bool {
    tree.subtree(scope)
        .any(|n| tree.label(n) == tax::SIMPLE_NAME && tree.value(n) == name)
}

/// Run the four matching phases over two parsed snapshots.
pub fn match_commit(left: &[SourceFile], right: &[SourceFile]) -> CommitMatch {
    let mut m = DeclMatcher::new(left, right);
    m.phase1_identical();
    m.phase2_changed_signatures();
    m.phase3_types();
    m.phase4_moved_members();
    m.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::java::parse_java;

    fn file(path: &str, src: &str) -> SourceFile {
        SourceFile {
            path: path.to_string(),
            tree: parse_java(src).expect("fixture parses").tree,
        }
    }

    fn tags(m: &CommitMatch) -> Vec<String> {
        m.refactorings.iter().map(|r| r.type_tag.to_string()).collect()
    }

    fn pairs_of_kind<'m>(m: &'m CommitMatch, kind: DeclKind) -> Vec<&'m DeclarationPair> {
        m.pairs.iter().filter(|p| p.kind == kind).collect()
    }

    #[test]
    fn unchanged_file_pairs_every_declaration() {
        let src = "class W { int count; void a() { sync(); } int b(int k) { return k; } }";
        let left = [file("W.java", src)];
        let right = [file("W.java", src)];
        let m = match_commit(&left, &right);
        assert_eq!(pairs_of_kind(&m, DeclKind::Type).len(), 1);
        assert_eq!(pairs_of_kind(&m, DeclKind::Method).len(), 2);
        assert_eq!(pairs_of_kind(&m, DeclKind::Field).len(), 1);
        assert!(m.refactorings.is_empty());
        assert!(m.pairs.iter().all(|p| !p.signature_changed));
        for p in pairs_of_kind(&m, DeclKind::Method) {
            assert!(!p.statement_mappings.is_empty(), "bodies mapped");
        }
    }

    #[test]
    fn renamed_method_pairs_with_rename_record() {
        let left = [file("C.java", "class C { void first() { open(); run(); close(); } }")];
        let right = [file("C.java", "class C { void begin() { open(); run(); close(); } }")];
        let m = match_commit(&left, &right);
        assert_eq!(tags(&m), vec!["Rename Method"]);
        let mp = pairs_of_kind(&m, DeclKind::Method);
        assert_eq!(mp.len(), 1);
        assert!(mp[0].signature_changed);
        assert_eq!(mp[0].statement_mappings.len(), 3);
        assert!(m.refactorings[0].description.contains("C.first"));
        assert!(m.refactorings[0].description.contains("C.begin"));
    }

    #[test]
    fn overloads_pair_with_exact_counterparts() {
        let src = "class C { int f(int x) { return x; } int f(String s) { return len(s); } }";
        let left = [file("C.java", src)];
        let right = [file("C.java", src)];
        let m = match_commit(&left, &right);
        let mp = pairs_of_kind(&m, DeclKind::Method);
        assert_eq!(mp.len(), 2);
        for p in mp {
            let lt = &left[p.left.file].tree;
            let rt = &right[p.right.file].tree;
            let params = |t: &AstTree, n: NodeId| -> Vec<String> {
                t.children(n)
                    .iter()
                    .copied()
                    .filter(|&c| t.label(c) == tax::SINGLE_VARIABLE_DECLARATION)
                    .map(|c| pretty(t, c))
                    .collect()
            };
            assert_eq!(params(lt, p.left.node), params(rt, p.right.node));
        }
    }

    #[test]
    fn changed_return_type_detected_in_identical_phase() {
        let left = [file("C.java", "class C { int m() { return 1; } }")];
        let right = [file("C.java", "class C { long m() { return 1; } }")];
        let m = match_commit(&left, &right);
        assert_eq!(tags(&m), vec!["Change Return Type"]);
        let mp = pairs_of_kind(&m, DeclKind::Method);
        assert_eq!(mp.len(), 1);
        assert!(mp[0].signature_changed);
        assert!(m.refactorings[0].description.contains("int"));
        assert!(m.refactorings[0].description.contains("long"));
    }

    #[test]
    fn parameter_additions_and_type_changes_are_recorded() {
        let left = [file("C.java", "class C { void m(int a) { use(a); } }")];
        let right = [file("C.java", "class C { void m(int a, int b) { use(a); } }")];
        let m = match_commit(&left, &right);
        assert_eq!(tags(&m), vec!["Add Parameter"]);

        let left = [file("C.java", "class C { void m(int a) { use(a); } }")];
        let right = [file("C.java", "class C { void m(long a) { use(a); } }")];
        let m = match_commit(&left, &right);
        assert_eq!(tags(&m), vec!["Change Parameter Type"]);
        assert!(m.refactorings[0].description.contains("int"));
        assert!(m.refactorings[0].description.contains("long"));
    }

    #[test]
    fn consistent_replacements_recover_renamed_field() {
        let left = [file(
            "C.java",
            "class C { int count; void inc() { count = count + 1; } int get() { return count; } void show() { print(count); } }",
        )];
        let right = [file(
            "C.java",
            "class C { int total; void inc() { total = total + 1; } int get() { return total; } void show() { print(total); } }",
        )];
        let m = match_commit(&left, &right);
        assert!(tags(&m).contains(&"Rename Field".to_string()), "tags: {:?}", tags(&m));
        let fp = pairs_of_kind(&m, DeclKind::Field);
        assert_eq!(fp.len(), 1);
        assert!(fp[0].signature_changed);
        let r = m
            .refactorings
            .iter()
            .find(|r| r.type_tag == RefactoringType::RenameField)
            .unwrap();
        assert!(r.description.contains("count") && r.description.contains("total"));
    }

    #[test]
    fn empty_methods_pair_by_signature_similarity_only() {
        let left = [file("C.java", "class C { void setUpHandler(); }")];
        let right = [file("C.java", "class C { void setUpHandlerNow(); }")];
        let m = match_commit(&left, &right);
        assert_eq!(tags(&m), vec!["Rename Method"]);
        assert_eq!(pairs_of_kind(&m, DeclKind::Method).len(), 1);

        let left = [file("D.java", "class D { void alpha(); }")];
        let right = [file("D.java", "class D { void omega(); }")];
        let m = match_commit(&left, &right);
        assert!(pairs_of_kind(&m, DeclKind::Method).is_empty());
        assert!(m.refactorings.is_empty());
    }

    #[test]
    fn renamed_class_matched_by_member_intersection() {
        let left = [file("A.java", "class Alpha { int f; void m() { work(); } }")];
        let right = [file("B.java", "class Beta { int f; void m() { work(); } }")];
        let m = match_commit(&left, &right);
        assert!(tags(&m).contains(&"Rename Class".to_string()));
        assert_eq!(pairs_of_kind(&m, DeclKind::Type).len(), 1);
        assert!(pairs_of_kind(&m, DeclKind::Type)[0].signature_changed);
        // Members matched inside the recovered pair.
        assert_eq!(pairs_of_kind(&m, DeclKind::Method).len(), 1);
        assert_eq!(pairs_of_kind(&m, DeclKind::Field).len(), 1);
        assert!(!pairs_of_kind(&m, DeclKind::Method)[0].statement_mappings.is_empty());
    }

    #[test]
    fn moved_class_keeps_name_and_changes_package() {
        let left = [file("a/X.java", "package a; class X { int f; void m() { work(); } }")];
        let right = [file("b/X.java", "package b; class X { int f; void m() { work(); } }")];
        let m = match_commit(&left, &right);
        assert!(tags(&m).contains(&"Move Class".to_string()));
        assert_eq!(pairs_of_kind(&m, DeclKind::Type).len(), 1);
    }

    #[test]
    fn unrelated_classes_stay_unpaired() {
        let left = [file("A.java", "class A { void x() { a(); } }")];
        let right = [file(
            "Z.java",
            "class Z { void q() { b(); c(); d(); e(); f(); } }",
        )];
        let m = match_commit(&left, &right);
        assert!(pairs_of_kind(&m, DeclKind::Type).is_empty());
        assert!(pairs_of_kind(&m, DeclKind::Method).is_empty());
        assert!(m.refactorings.is_empty());
    }

    #[test]
    fn moved_method_crosses_files() {
        let left = [
            file(
                "A.java",
                "class A { void helper() { setUp(); runTask(); finish(); } void keep() { stay(); } }",
            ),
            file("B.java", "class B { void other() { o(); } }"),
        ];
        let right = [
            file("A.java", "class A { void keep() { stay(); } }"),
            file(
                "B.java",
                "class B { void other() { o(); } void helper() { setUp(); runTask(); finish(); } }",
            ),
        ];
        let m = match_commit(&left, &right);
        assert!(tags(&m).contains(&"Move Method".to_string()), "tags: {:?}", tags(&m));
        let moved = pairs_of_kind(&m, DeclKind::Method)
            .into_iter()
            .find(|p| p.left.file != p.right.file)
            .expect("cross-file method pair");
        assert_eq!(moved.left.file, 0);
        assert_eq!(moved.right.file, 1);
        assert_eq!(moved.statement_mappings.len(), 3);
    }

    #[test]
    fn pull_up_method_follows_declared_extends() {
        let left = [
            file("Base.java", "class Base { void stay() { s(); } }"),
            file("Sub.java", "class Sub extends Base { void calc() { a(); b(); } }"),
        ];
        let right = [
            file("Base.java", "class Base { void stay() { s(); } void calc() { a(); b(); } }"),
            file("Sub.java", "class Sub extends Base { }"),
        ];
        let m = match_commit(&left, &right);
        assert!(tags(&m).contains(&"Pull Up Method".to_string()), "tags: {:?}", tags(&m));
    }

    #[test]
    fn constructors_never_pair_with_methods() {
        let left = [file("C.java", "class C { C(int x) { init(x); } }")];
        let right = [file("C.java", "class C { void create(int x) { init(x); } }")];
        let m = match_commit(&left, &right);
        assert!(pairs_of_kind(&m, DeclKind::Method).is_empty());
        assert!(m.refactorings.is_empty());
        assert_eq!(m.pairs.len(), 1, "only the type pair");
    }

    #[test]
    fn moved_field_travels_with_moved_method() {
        let left = [
            file("A.java", "class A { int cache; void warm() { cache = load(); } }"),
            file("B.java", "class B { void other() { o(); } }"),
        ];
        let right = [
            file("A.java", "class A { }"),
            file(
                "B.java",
                "class B { int cache; void warm() { cache = load(); } void other() { o(); } }",
            ),
        ];
        let m = match_commit(&left, &right);
        let t = tags(&m);
        assert!(t.contains(&"Move Method".to_string()), "tags: {t:?}");
        assert!(t.contains(&"Move Field".to_string()), "tags: {t:?}");
        let fp = pairs_of_kind(&m, DeclKind::Field);
        assert_eq!(fp.len(), 1);
        assert_eq!(fp[0].left.file, 0);
        assert_eq!(fp[0].right.file, 1);
    }

    #[test]
    fn matching_is_independent_of_file_order() {
        let x_l = "class X { void a() { q(); w(); e(); } }";
        let x_r = "class X { void b() { q(); w(); e(); } }";
        let y = "class Y { void y() { t(); } }";
        let summarize = |left: &[SourceFile], right: &[SourceFile]| -> BTreeSet<String> {
            match_commit(left, right)
                .pairs
                .iter()
                .map(|p| {
                    format!(
                        "{}:{}:{}..{}:{}:{}",
                        p.kind,
                        left[p.left.file].path,
                        left[p.left.file].tree.span(p.left.node).start,
                        right[p.right.file].path,
                        right[p.right.file].tree.span(p.right.node).start,
                        p.signature_changed,
                    )
                })
                .collect()
        };
        let a = summarize(
            &[file("X.java", x_l), file("Y.java", y)],
            &[file("X.java", x_r), file("Y.java", y)],
        );
        let b = summarize(
            &[file("Y.java", y), file("X.java", x_l)],
            &[file("Y.java", y), file("X.java", x_r)],
        );
        assert_eq!(a, b);
    }

    #[test]
    fn no_declaration_participates_twice_on_a_side() {
        let left = [
            file("A.java", "class A { int cache; void warm() { cache = load(); } }"),
            file("B.java", "class B { void other() { o(); } }"),
        ];
        let right = [
            file("A.java", "class A { }"),
            file(
                "B.java",
                "class B { int cache; void warm() { cache = load(); } void other() { o(); } }",
            ),
        ];
        let m = match_commit(&left, &right);
        let mut lefts = BTreeSet::new();
        let mut rights = BTreeSet::new();
        for p in &m.pairs {
            assert!(lefts.insert(p.left), "left side reused: {:?}", p.left);
            assert!(rights.insert(p.right), "right side reused: {:?}", p.right);
        }
    }

    #[test]
    fn signature_identity_and_similarity_behave() {
        let sig = |name: &str, params: &[&str]| Signature {
            kind: DeclKind::Method,
            qualified_name: format!("C.{name}"),
            name: name.to_string(),
            parameter_types: params.iter().map(|s| s.to_string()).collect(),
            return_type: Some("void".into()),
            is_constructor: false,
        };
        assert_eq!(
            sig("run", &["int"]).identity_key(),
            sig("run", &["int"]).identity_key()
        );
        assert_ne!(
            sig("run", &["int"]).identity_key(),
            sig("run", &["long"]).identity_key()
        );
        // Return types do not participate in identity.
        let mut a = sig("run", &["int"]);
        a.return_type = Some("int".into());
        assert_eq!(a.identity_key(), sig("run", &["int"]).identity_key());
        assert_eq!(
            signature_similarity_permille(&sig("setUpHandler", &[]), &sig("setUpHandlerNow", &[])),
            857
        );
        assert_eq!(signature_similarity_permille(&sig("alpha", &[]), &sig("omega", &[])), 0);
    }
}
