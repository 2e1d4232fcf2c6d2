//! Commit-level assembly of AST node mappings.
//!
//! Declaration matching produces matched program elements with statement
//! mappings inside their bodies; refactoring detection produces further
//! statement and sub-expression pairs, including one-to-many ones. This
//! module expands every such pair into node-level mappings with a
//! sub-statement tree matcher, merges the two sources with refactoring
//! priority (a refactoring-sourced pair displaces conflicting
//! declaration-sourced pairs, never other refactoring-sourced ones), matches
//! import declarations semantically, and partitions the final store into
//! intra-file and inter-file groups.

use std::collections::{BTreeMap, BTreeSet};

use crate::decl::{DeclKind, DeclMatcher, Loc, SourceFile};
use crate::gumtree::{self, MatcherConfig};
use crate::refactor::{MappingKind, Refactoring, RefactoringType};
use crate::stmt::ReplacementKind;
use crate::taxonomy as tax;
use crate::tree::{pretty, AstTree, MappingStore, NodeId, NodeRef, PairStore, TreeBuilder};

// ---------------------------------------------------------------------------
// Output model
// ---------------------------------------------------------------------------

/// A matched program element with file-qualified endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementPair {
    pub kind: DeclKind,
    pub left: NodeRef,
    pub right: NodeRef,
    pub signature_changed: bool,
}

/// A detected refactoring with its mapping records resolved to
/// file-qualified node addresses.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposedRefactoring {
    pub type_tag: RefactoringType,
    pub description: String,
    pub mappings: Vec<(MappingKind, NodeRef, NodeRef)>,
}

/// All mappings between one origin file and one destination file, split
/// into element pairs (declarations, compilation units) and the node
/// mappings beneath them.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FileGroup {
    pub origin: String,
    pub destination: String,
    pub matched_elements: Vec<(NodeRef, NodeRef)>,
    pub mappings: Vec<(NodeRef, NodeRef)>,
}

/// The final composed diff of one commit.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposedDiff {
    /// Every node mapping of the commit, element pairs included.
    pub store: MappingStore,
    pub declaration_pairs: Vec<ElementPair>,
    pub refactorings: Vec<ComposedRefactoring>,
    /// Groups whose origin and destination paths are equal.
    pub intra_file: Vec<FileGroup>,
    /// Groups keyed by (origin path, destination path), paths differing.
    pub inter_file: Vec<FileGroup>,
}

/// File-qualified address of `loc` within a snapshot.
pub fn node_ref(files: &[SourceFile], loc: Loc) -> NodeRef {
    let f = &files[loc.file];
    NodeRef::new(f.path.clone(), f.tree.label(loc.node), f.tree.span(loc.node))
}

// ---------------------------------------------------------------------------
// Sub-statement tree matcher
// ---------------------------------------------------------------------------

/// Labels that end a matching region: nested statements have mappings of
/// their own, nested declarations are paired by the declaration matcher.
fn blocks_region(label: &str) -> bool {
    tax::is_statement(label) || tax::is_declaration(label)
}

fn region_children(tree: &AstTree, node: NodeId) -> Vec<NodeId> {
    tree.children(node)
        .iter()
        .copied()
        .filter(|&c| !blocks_region(tree.label(c)))
        .collect()
}

/// A copy of the anchor's subtree pruned at nested statements and
/// declarations, with an index back to the source tree's node ids.
struct Region {
    tree: AstTree,
    index: Vec<NodeId>,
}

impl Region {
    fn extract(tree: &AstTree, anchor: NodeId) -> Region {
        fn collect(tree: &AstTree, n: NodeId, out: &mut Vec<NodeId>) {
            out.push(n);
            for c in region_children(tree, n) {
                collect(tree, c, out);
            }
        }
        fn build(tree: &AstTree, n: NodeId, b: &mut TreeBuilder) -> NodeId {
            let cs: Vec<NodeId> = region_children(tree, n)
                .into_iter()
                .map(|c| build(tree, c, b))
                .collect();
            b.node_with_flags(tree.label(n), tree.value(n), tree.span(n), cs, tree.flags(n))
        }
        let mut index = Vec::new();
        collect(tree, anchor, &mut index);
        let mut b = TreeBuilder::new();
        let root = build(tree, anchor, &mut b);
        let tree = b.finish(root).expect("region spans nest like the source tree");
        Region { tree, index }
    }
}

/// When two mapped name leaves sit under invocation parents, or two mapped
/// infix operators under infix-expression parents, that are not mapped to
/// each other, the parents are realigned to follow their leaves: every
/// conflicting mapping of either parent is dropped and the parent pair is
/// added.
fn realign_parents(lt: &AstTree, rt: &AstTree, store: &mut PairStore<NodeId>) {
    let leaf_pairs: Vec<(NodeId, NodeId)> = store
        .iter()
        .filter(|&&(a, b)| lt.is_leaf(a) && rt.is_leaf(b))
        .copied()
        .collect();
    for (a, b) in leaf_pairs {
        let (Some(pa), Some(pb)) = (lt.parent(a), rt.parent(b)) else {
            continue;
        };
        let name_case = lt.label(a) == tax::SIMPLE_NAME
            && rt.label(b) == tax::SIMPLE_NAME
            && tax::is_invocation(lt.label(pa))
            && tax::is_invocation(rt.label(pb));
        let operator_case = lt.label(a) == tax::INFIX_OPERATOR
            && rt.label(b) == tax::INFIX_OPERATOR
            && lt.label(pa) == tax::INFIX_EXPRESSION
            && rt.label(pb) == tax::INFIX_EXPRESSION;
        if !(name_case || operator_case) || store.contains(&pa, &pb) {
            continue;
        }
        let stale: Vec<NodeId> = store.rights_of(&pa).copied().collect();
        for y in stale {
            store.remove(&pa, &y);
        }
        let stale: Vec<NodeId> = store.lefts_of(&pb).copied().collect();
        for x in stale {
            store.remove(&x, &pb);
        }
        store.add(pa, pb);
    }
}

/// Node mappings between the subtrees anchored at a matched pair, using the
/// sub-statement configuration (simple bottom-up, minimum height one, the
/// SimpleName parent guard) plus the parent realignment pass. The anchor
/// pair itself is always part of the result.
pub fn tree_matcher(lt: &AstTree, left: NodeId, rt: &AstTree, right: NodeId) -> Vec<(NodeId, NodeId)> {
    tree_matcher_with(lt, left, rt, right, &MatcherConfig::sub_statement())
}

/// [`tree_matcher`] with an explicit matcher configuration.
pub fn tree_matcher_with(
    lt: &AstTree,
    left: NodeId,
    rt: &AstTree,
    right: NodeId,
    cfg: &MatcherConfig,
) -> Vec<(NodeId, NodeId)> {
    let lr = Region::extract(lt, left);
    let rr = Region::extract(rt, right);
    let matched = gumtree::match_trees(&lr.tree, &rr.tree, cfg);
    let mut store: PairStore<NodeId> = matched
        .iter()
        .map(|&(a, b)| (lr.index[a.index()], rr.index[b.index()]))
        .collect();
    realign_parents(lt, rt, &mut store);
    store.iter().copied().collect()
}

// ---------------------------------------------------------------------------
// Import diff
// ---------------------------------------------------------------------------

fn imports_of(tree: &AstTree) -> Vec<NodeId> {
    tree.children(tree.root())
        .iter()
        .copied()
        .filter(|&c| tree.label(c) == tax::IMPORT_DECLARATION)
        .collect()
}

fn import_name(tree: &AstTree, imp: NodeId) -> String {
    pretty(tree, tree.children(imp)[0])
}

fn is_on_demand(name: &str) -> bool {
    name.ends_with(".*")
}

/// `a.b.C` → (`a.b`, `C`); a bare name has an empty package.
fn split_import(name: &str) -> (&str, &str) {
    match name.rfind('.') {
        Some(i) => (&name[..i], &name[i + 1..]),
        None => ("", name),
    }
}

/// Semantic import matching for one file pair, in four fixed passes:
/// identical texts; imports of moved or renamed classes; imports connected
/// by a consistent in-file type change (`type_changes` must already be
/// filtered to consistent ones — an inconsistently changed type must not
/// appear); single-type imports grouped onto an on-demand import sharing
/// their package prefix (and the mirror un-grouping), as a multi-mapping.
pub fn import_diff(
    lt: &AstTree,
    rt: &AstTree,
    class_renames: &BTreeMap<String, String>,
    type_changes: &BTreeMap<String, String>,
) -> Vec<(NodeId, NodeId)> {
    let lefts = imports_of(lt);
    let rights = imports_of(rt);
    let ltexts: Vec<String> = lefts.iter().map(|&i| import_name(lt, i)).collect();
    let rtexts: Vec<String> = rights.iter().map(|&i| import_name(rt, i)).collect();
    let mut ltaken = vec![false; lefts.len()];
    let mut rtaken = vec![false; rights.len()];
    let mut out = Vec::new();

    // Pass 1: identical texts.
    for i in 0..lefts.len() {
        if let Some(j) = (0..rights.len()).find(|&j| !rtaken[j] && rtexts[j] == ltexts[i]) {
            ltaken[i] = true;
            rtaken[j] = true;
            out.push((lefts[i], rights[j]));
        }
    }
    // Pass 2: imports of moved or renamed classes.
    for i in 0..lefts.len() {
        if ltaken[i] {
            continue;
        }
        let Some(target) = class_renames.get(&ltexts[i]) else {
            continue;
        };
        if let Some(j) = (0..rights.len()).find(|&j| !rtaken[j] && rtexts[j] == *target) {
            ltaken[i] = true;
            rtaken[j] = true;
            out.push((lefts[i], rights[j]));
        }
    }
    // Pass 3: consistent in-file type changes, preferring a target in the
    // same package.
    for i in 0..lefts.len() {
        if ltaken[i] || is_on_demand(&ltexts[i]) {
            continue;
        }
        let (lpkg, lname) = split_import(&ltexts[i]);
        let Some(new_name) = type_changes.get(lname) else {
            continue;
        };
        let mut cands: Vec<usize> = (0..rights.len())
            .filter(|&j| {
                !rtaken[j]
                    && !is_on_demand(&rtexts[j])
                    && split_import(&rtexts[j]).1 == new_name.as_str()
            })
            .collect();
        cands.sort_by_key(|&j| (split_import(&rtexts[j]).0 != lpkg, j));
        if let Some(&j) = cands.first() {
            ltaken[i] = true;
            rtaken[j] = true;
            out.push((lefts[i], rights[j]));
        }
    }
    // Pass 4: grouping onto an on-demand import, then the mirror
    // un-grouping.
    for j in 0..rights.len() {
        if rtaken[j] || !is_on_demand(&rtexts[j]) {
            continue;
        }
        let pkg = split_import(&rtexts[j]).0;
        let members: Vec<usize> = (0..lefts.len())
            .filter(|&i| !ltaken[i] && !is_on_demand(&ltexts[i]) && split_import(&ltexts[i]).0 == pkg)
            .collect();
        if members.is_empty() {
            continue;
        }
        rtaken[j] = true;
        for i in members {
            ltaken[i] = true;
            out.push((lefts[i], rights[j]));
        }
    }
    for i in 0..lefts.len() {
        if ltaken[i] || !is_on_demand(&ltexts[i]) {
            continue;
        }
        let pkg = split_import(&ltexts[i]).0;
        let members: Vec<usize> = (0..rights.len())
            .filter(|&j| !rtaken[j] && !is_on_demand(&rtexts[j]) && split_import(&rtexts[j]).0 == pkg)
            .collect();
        if members.is_empty() {
            continue;
        }
        ltaken[i] = true;
        for j in members {
            rtaken[j] = true;
            out.push((lefts[i], rights[j]));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

/// `old qualified name → new qualified name` for every moved or renamed
/// class of the commit.
fn class_rename_targets(m: &DeclMatcher) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for r in &m.refactorings {
        if !matches!(
            r.type_tag,
            RefactoringType::RenameClass | RefactoringType::MoveClass | RefactoringType::MoveAndRenameClass
        ) {
            continue;
        }
        for rec in &r.mappings {
            let lq = m.left_types.iter().find(|t| t.loc == rec.left).map(|t| t.qualified.clone());
            let rq = m.right_types.iter().find(|t| t.loc == rec.right).map(|t| t.qualified.clone());
            if let (Some(lq), Some(rq)) = (lq, rq) {
                out.insert(lq, rq);
            }
        }
    }
    out
}

/// `Map<K, V>` → `Map`; `a.b.C[]` → `C`.
fn base_type_name(text: &str) -> String {
    let no_args = text.split('<').next().unwrap_or(text).trim();
    let no_array = no_args.trim_end_matches("[]").trim();
    no_array.rsplit('.').next().unwrap_or(no_array).to_string()
}

/// Type-name changes observed inside one file pair, reduced to the
/// consistent ones: a left name mapped to exactly one right name and vice
/// versa. Sources are type-change replacements and detected variable/field
/// type changes.
fn local_type_changes(
    m: &DeclMatcher,
    operations: &[Refactoring],
    lfile: usize,
    rfile: usize,
) -> BTreeMap<String, String> {
    let mut observations: Vec<(String, String)> = Vec::new();
    for p in &m.pairs {
        if p.left.file != lfile || p.right.file != rfile {
            continue;
        }
        for sm in &p.statement_mappings {
            for rep in &sm.replacements {
                if rep.kind == ReplacementKind::TypeChange {
                    observations.push((base_type_name(&rep.left_text), base_type_name(&rep.right_text)));
                }
            }
        }
    }
    for r in operations {
        if r.type_tag != RefactoringType::ChangeVariableType {
            continue;
        }
        for rec in &r.mappings {
            if rec.kind != MappingKind::SubExpression || rec.left.file != lfile || rec.right.file != rfile {
                continue;
            }
            let (lt, rt) = (m.ltree(lfile), m.rtree(rfile));
            if tax::is_type_label(lt.label(rec.left.node)) && tax::is_type_label(rt.label(rec.right.node)) {
                observations.push((
                    base_type_name(&pretty(lt, rec.left.node)),
                    base_type_name(&pretty(rt, rec.right.node)),
                ));
            }
        }
    }
    let mut fwd: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut rev: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (a, b) in &observations {
        if a != b {
            fwd.entry(a).or_default().insert(b);
            rev.entry(b).or_default().insert(a);
        }
    }
    let mut out = BTreeMap::new();
    for (a, b) in &observations {
        if a != b && fwd[a.as_str()].len() == 1 && rev[b.as_str()].len() == 1 {
            out.insert(a.clone(), b.clone());
        }
    }
    out
}

fn package_decl(tree: &AstTree) -> Option<NodeId> {
    tree.children(tree.root())
        .iter()
        .copied()
        .find(|&c| tree.label(c) == tax::PACKAGE_DECLARATION)
}

fn add_matched(store: &mut PairStore<Loc>, lfile: usize, rfile: usize, pairs: Vec<(NodeId, NodeId)>) {
    for (a, b) in pairs {
        store.add(Loc { file: lfile, node: a }, Loc { file: rfile, node: b });
    }
}

/// Composes the commit's final mapping store from the declaration pairs of
/// `m` and the refactorings detected over them.
///
/// Declaration-sourced mappings come from the element pairs themselves
/// (signature regions plus body pairs), their statement mappings, matched
/// compilation units with package declarations, and the semantic import
/// diff. Refactoring-sourced mappings come from every refactoring mapping
/// record. Each refactoring-sourced pair first removes every
/// declaration-sourced pair sharing its left or right node, then is added;
/// refactoring-sourced pairs never displace each other, which preserves
/// one-to-many mappings contributed by duplicating refactorings.
pub fn compose(m: &DeclMatcher, operations: &[Refactoring]) -> ComposedDiff {
    let lfiles = m.left_files();
    let rfiles = m.right_files();
    let mut base: PairStore<Loc> = PairStore::new();

    // File-level pairs: compilation units, package declarations, imports.
    let renames = class_rename_targets(m);
    for (li, lf) in lfiles.iter().enumerate() {
        let Some(ri) = rfiles.iter().position(|rf| rf.path == lf.path) else {
            continue;
        };
        let rt = &rfiles[ri].tree;
        let lt = &lf.tree;
        base.add(
            Loc { file: li, node: lt.root() },
            Loc { file: ri, node: rt.root() },
        );
        if let (Some(lp), Some(rp)) = (package_decl(lt), package_decl(rt)) {
            add_matched(&mut base, li, ri, tree_matcher(lt, lp, rt, rp));
        }
        let changes = local_type_changes(m, operations, li, ri);
        for (a, b) in import_diff(lt, rt, &renames, &changes) {
            add_matched(&mut base, li, ri, tree_matcher(lt, a, rt, b));
        }
    }

    // Declaration pairs: signature regions, bodies, statement mappings.
    for p in &m.pairs {
        let lt = m.ltree(p.left.file);
        let rt = m.rtree(p.right.file);
        add_matched(
            &mut base,
            p.left.file,
            p.right.file,
            tree_matcher(lt, p.left.node, rt, p.right.node),
        );
        let lb = m.left_member(p.left).and_then(|mm| mm.body);
        let rb = m.right_member(p.right).and_then(|mm| mm.body);
        if let (Some(lb), Some(rb)) = (lb, rb) {
            base.add(Loc { file: p.left.file, node: lb }, Loc { file: p.right.file, node: rb });
        }
        for sm in &p.statement_mappings {
            add_matched(
                &mut base,
                p.left.file,
                p.right.file,
                tree_matcher(lt, sm.left, rt, sm.right),
            );
        }
    }

    // Refactoring-sourced pairs, with priority over declaration-sourced
    // ones.
    let mut ordered: Vec<(Loc, Loc)> = Vec::new();
    for r in m.refactorings.iter().chain(operations) {
        for rec in &r.mappings {
            let lt = m.ltree(rec.left.file);
            let rt = m.rtree(rec.right.file);
            for (a, b) in tree_matcher(lt, rec.left.node, rt, rec.right.node) {
                ordered.push((
                    Loc { file: rec.left.file, node: a },
                    Loc { file: rec.right.file, node: b },
                ));
            }
        }
    }
    let mut from_refactoring: BTreeSet<(Loc, Loc)> = BTreeSet::new();
    for (l, r) in ordered {
        if from_refactoring.contains(&(l, r)) {
            continue;
        }
        let stale: Vec<Loc> = base
            .rights_of(&l)
            .copied()
            .filter(|y| !from_refactoring.contains(&(l, *y)))
            .collect();
        for y in stale {
            base.remove(&l, &y);
        }
        let stale: Vec<Loc> = base
            .lefts_of(&r)
            .copied()
            .filter(|x| !from_refactoring.contains(&(*x, r)))
            .collect();
        for x in stale {
            base.remove(&x, &r);
        }
        base.add(l, r);
        from_refactoring.insert((l, r));
    }

    // File-qualified store and per-file partition.
    let mut store = MappingStore::new();
    for (l, r) in base.iter() {
        store.add(node_ref(lfiles, *l), node_ref(rfiles, *r));
    }
    let (intra_file, inter_file) = group_store(&store);

    let declaration_pairs = m
        .pairs
        .iter()
        .map(|p| ElementPair {
            kind: p.kind,
            left: node_ref(lfiles, p.left),
            right: node_ref(rfiles, p.right),
            signature_changed: p.signature_changed,
        })
        .collect();
    let refactorings = m
        .refactorings
        .iter()
        .chain(operations)
        .map(|r| ComposedRefactoring {
            type_tag: r.type_tag,
            description: r.description.clone(),
            mappings: r
                .mappings
                .iter()
                .map(|rec| (rec.kind, node_ref(lfiles, rec.left), node_ref(rfiles, rec.right)))
                .collect(),
        })
        .collect();

    ComposedDiff {
        store,
        declaration_pairs,
        refactorings,
        intra_file,
        inter_file,
    }
}

/// Splits a commit-level store into per-file-pair groups, separating
/// program-element pairs (declarations and compilation units) from the node
/// mappings beneath them. Groups whose origin and destination paths agree
/// come back in the first list (intra-file), the rest in the second; groups
/// sort by path pair and entries by source position.
pub fn group_store(store: &MappingStore) -> (Vec<FileGroup>, Vec<FileGroup>) {
    let mut groups: BTreeMap<(String, String), FileGroup> = BTreeMap::new();
    for (lref, rref) in store.iter() {
        let g = groups
            .entry((lref.file.clone(), rref.file.clone()))
            .or_insert_with(|| FileGroup {
                origin: lref.file.clone(),
                destination: rref.file.clone(),
                ..FileGroup::default()
            });
        let element = tax::is_declaration(&lref.label) || lref.label == tax::COMPILATION_UNIT;
        if element {
            g.matched_elements.push((lref.clone(), rref.clone()));
        } else {
            g.mappings.push((lref.clone(), rref.clone()));
        }
    }
    let (mut intra_file, mut inter_file) = (Vec::new(), Vec::new());
    for (_, g) in groups {
        if g.origin == g.destination {
            intra_file.push(g);
        } else {
            inter_file.push(g);
        }
    }
    (intra_file, inter_file)
}
