//! Language-independent tree matchers and a simplified edit-script deriver.
//!
//! The matcher runs in two stages: a top-down pass that maps maximal
//! identical subtrees by descending height, then a bottom-up pass that maps
//! containers whose descendants are largely mapped (dice coefficient). The
//! greedy variant adds a leaf-recovery sweep inside matched containers; the
//! simple variant stays conservative. A fine-grained relabeling mode fuses
//! each leaf's label with its parent's to keep same-labelled leaves from
//! crossing contexts, and a staged project-level pass catches subtrees that
//! moved between files.

use crate::taxonomy as tax;
use crate::tree::{AstTree, NodeId, PairStore, Span, TreeBuilder};
use std::collections::{BTreeMap, BTreeSet};

/// Node-level mappings between two trees (left ids → right ids).
pub type NodeMappings = PairStore<NodeId>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BottomUpMode {
    /// Container matching plus leaf recovery inside matched containers.
    Greedy,
    /// Container matching only.
    Simple,
}

#[derive(Debug, Clone)]
pub struct MatcherConfig {
    /// Minimum subtree height eligible for top-down matching.
    pub min_height: usize,
    /// Minimum dice similarity for bottom-up container matching.
    pub dice_threshold: f64,
    pub bottom_up_mode: BottomUpMode,
    /// Refuse SimpleName pairs whose parents carry different labels.
    pub simple_name_parent_guard: bool,
    /// Fuse each leaf label with its parent label before matching.
    pub fine_grained_labels: bool,
}

impl Default for MatcherConfig {
    fn default() -> Self {
        MatcherConfig {
            min_height: 2,
            dice_threshold: 0.5,
            bottom_up_mode: BottomUpMode::Greedy,
            simple_name_parent_guard: false,
            fine_grained_labels: false,
        }
    }
}

impl MatcherConfig {
    pub fn greedy() -> Self {
        Self::default()
    }

    pub fn simple() -> Self {
        MatcherConfig {
            bottom_up_mode: BottomUpMode::Simple,
            ..Self::default()
        }
    }

    /// The sub-statement matcher configuration: simple mode, height one,
    /// with the SimpleName parent guard on.
    pub fn sub_statement() -> Self {
        MatcherConfig {
            min_height: 1,
            bottom_up_mode: BottomUpMode::Simple,
            simple_name_parent_guard: true,
            ..Self::default()
        }
    }

    pub fn with_fine_grained(mut self) -> Self {
        self.fine_grained_labels = true;
        self
    }
}

/// True when mapping `a ↔ b` would violate the SimpleName parent guard.
fn guard_rejects(cfg: &MatcherConfig, t1: &AstTree, a: NodeId, t2: &AstTree, b: NodeId) -> bool {
    if !cfg.simple_name_parent_guard {
        return false;
    }
    if t1.label(a) != tax::SIMPLE_NAME || t2.label(b) != tax::SIMPLE_NAME {
        return false;
    }
    match (t1.parent(a), t2.parent(b)) {
        (Some(pa), Some(pb)) => t1.label(pa) != t2.label(pb),
        (None, None) => false,
        _ => true,
    }
}

/// Map every node of subtree `a` to the corresponding node of the
/// isomorphic subtree `b` (pairwise by preorder position).
fn map_subtrees(t1: &AstTree, a: NodeId, t2: &AstTree, b: NodeId, store: &mut NodeMappings) {
    debug_assert_eq!(t1.size(a), t2.size(b));
    for (x, y) in t1.subtree(a).zip(t2.subtree(b)) {
        store.add(x, y);
    }
}

/// Height-bucketed worklist over open subtree roots.
struct HeightList {
    by_height: BTreeMap<u32, Vec<NodeId>>,
}

impl HeightList {
    fn new() -> Self {
        HeightList { by_height: BTreeMap::new() }
    }

    fn push(&mut self, tree: &AstTree, id: NodeId) {
        self.by_height.entry(tree.height(id)).or_default().push(id);
    }

    fn peek_max(&self) -> Option<u32> {
        self.by_height.keys().next_back().copied()
    }

    fn pop_max(&mut self) -> Vec<NodeId> {
        match self.by_height.keys().next_back().copied() {
            Some(h) => {
                let mut v = self.by_height.remove(&h).unwrap();
                v.sort();
                v
            }
            None => Vec::new(),
        }
    }

    fn open(&mut self, tree: &AstTree, id: NodeId) {
        for &c in tree.children(id) {
            self.push(tree, c);
        }
    }
}

/// Maximal identical-subtree matching by descending height.
///
/// Subtrees whose full hash occurs exactly once on each side at the current
/// height are mapped outright; ambiguous occurrences are deferred and
/// resolved afterwards by parent similarity, then by source position.
pub fn top_down(t1: &AstTree, t2: &AstTree, cfg: &MatcherConfig) -> NodeMappings {
    let mut store = NodeMappings::new();
    let mut l1 = HeightList::new();
    let mut l2 = HeightList::new();
    l1.push(t1, t1.root());
    l2.push(t2, t2.root());
    // Deferred ambiguous candidates, in discovery order.
    let mut candidates: Vec<(NodeId, NodeId)> = Vec::new();

    let min_h = cfg.min_height.max(1) as u32;
    loop {
        let (h1, h2) = match (l1.peek_max(), l2.peek_max()) {
            (Some(a), Some(b)) => (a, b),
            _ => break,
        };
        if h1.max(h2) < min_h {
            break;
        }
        if h1 > h2 {
            for n in l1.pop_max() {
                l1.open(t1, n);
            }
            continue;
        }
        if h2 > h1 {
            for n in l2.pop_max() {
                l2.open(t2, n);
            }
            continue;
        }
        let level1 = l1.pop_max();
        let level2 = l2.pop_max();
        let mut by_hash1: BTreeMap<u64, Vec<NodeId>> = BTreeMap::new();
        let mut by_hash2: BTreeMap<u64, Vec<NodeId>> = BTreeMap::new();
        for &n in &level1 {
            by_hash1.entry(t1.value_hash(n)).or_default().push(n);
        }
        for &n in &level2 {
            by_hash2.entry(t2.value_hash(n)).or_default().push(n);
        }
        let mut matched1: BTreeSet<NodeId> = BTreeSet::new();
        let mut matched2: BTreeSet<NodeId> = BTreeSet::new();
        for (hash, ones) in &by_hash1 {
            if let Some(twos) = by_hash2.get(hash) {
                if ones.len() == 1 && twos.len() == 1 {
                    if !guard_rejects(cfg, t1, ones[0], t2, twos[0]) {
                        map_subtrees(t1, ones[0], t2, twos[0], &mut store);
                        matched1.insert(ones[0]);
                        matched2.insert(twos[0]);
                    }
                } else {
                    for &a in ones {
                        for &b in twos {
                            if !guard_rejects(cfg, t1, a, t2, b) {
                                candidates.push((a, b));
                            }
                        }
                    }
                    matched1.extend(ones.iter().copied());
                    matched2.extend(twos.iter().copied());
                }
            }
        }
        for n in level1 {
            if !matched1.contains(&n) {
                l1.open(t1, n);
            }
        }
        for n in level2 {
            if !matched2.contains(&n) {
                l2.open(t2, n);
            }
        }
    }

    resolve_candidates(t1, t2, &mut candidates, &mut store);
    store
}

/// Greedy resolution of deferred same-hash candidates: highest parent dice
/// first, then source position; a pair is taken only while both sides are
/// still free.
fn resolve_candidates(
    t1: &AstTree,
    t2: &AstTree,
    candidates: &mut Vec<(NodeId, NodeId)>,
    store: &mut NodeMappings,
) {
    let scored: Vec<(f64, NodeId, NodeId)> = candidates
        .iter()
        .map(|&(a, b)| {
            let d = match (t1.parent(a), t2.parent(b)) {
                (Some(pa), Some(pb)) => dice(t1, pa, t2, pb, store),
                _ => 0.0,
            };
            (d, a, b)
        })
        .collect();
    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_by(|&i, &j| {
        scored[j]
            .0
            .partial_cmp(&scored[i].0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(scored[i].1.cmp(&scored[j].1))
            .then(scored[i].2.cmp(&scored[j].2))
    });
    let mut used1: BTreeSet<NodeId> = BTreeSet::new();
    let mut used2: BTreeSet<NodeId> = BTreeSet::new();
    for idx in order {
        let (_, a, b) = scored[idx];
        if used1.contains(&a) || used2.contains(&b) || store.has_left(&a) || store.has_right(&b) {
            continue;
        }
        used1.insert(a);
        used2.insert(b);
        map_subtrees(t1, a, t2, b, store);
    }
    candidates.clear();
}

/// Symmetric coverage of mapped descendant pairs under `(a, b)`:
/// `2·common / (|desc(a)| + |desc(b)|)`.
pub fn dice(t1: &AstTree, a: NodeId, t2: &AstTree, b: NodeId, store: &NodeMappings) -> f64 {
    let da = t1.size(a) - 1;
    let db = t2.size(b) - 1;
    if da + db == 0 {
        return 0.0;
    }
    let mut common = 0usize;
    for d in t1.descendants(a) {
        for r in store.rights_of(&d) {
            if t2.is_descendant_of(*r, b) {
                common += 1;
                break;
            }
        }
    }
    2.0 * common as f64 / (da + db) as f64
}

/// Container matching over the top-down result. Containers are visited in
/// postorder; a pair is taken when its dice reaches the threshold. Roots are
/// paired unconditionally. Greedy mode then recovers stray height-1 leaves
/// inside each newly matched container, pairing equal labels in source
/// order.
pub fn bottom_up(t1: &AstTree, t2: &AstTree, store: &mut NodeMappings, cfg: &MatcherConfig) {
    if !store.has_left(&t1.root()) && !store.has_right(&t2.root()) {
        store.add(t1.root(), t2.root());
        if cfg.bottom_up_mode == BottomUpMode::Greedy {
            recover_leaves(t1, t1.root(), t2, t2.root(), store, cfg);
        }
    }
    for a in t1.postorder() {
        if a == t1.root() || store.has_left(&a) || t1.is_leaf(a) {
            continue;
        }
        let has_mapped_descendant = t1.descendants(a).any(|d| store.has_left(&d));
        if !has_mapped_descendant {
            continue;
        }
        // Candidates: unmapped right ancestors of the images of a's mapped
        // descendants, sharing a's label.
        let mut cands: Vec<NodeId> = Vec::new();
        let mut seen: BTreeSet<NodeId> = BTreeSet::new();
        for d in t1.descendants(a) {
            for &r in store.rights_of(&d) {
                for anc in t2.ancestors(r) {
                    if !seen.insert(anc) {
                        break;
                    }
                    if !store.has_right(&anc) && t2.label(anc) == t1.label(a) {
                        cands.push(anc);
                    }
                }
            }
        }
        let mut best: Option<(f64, NodeId)> = None;
        for b in cands {
            let d = dice(t1, a, t2, b, store);
            let better = match best {
                None => true,
                Some((bd, bb)) => d > bd + 1e-12 || (d > bd - 1e-12 && b < bb),
            };
            if better {
                best = Some((d, b));
            }
        }
        if let Some((d, b)) = best {
            if d >= cfg.dice_threshold {
                store.add(a, b);
                if cfg.bottom_up_mode == BottomUpMode::Greedy {
                    recover_leaves(t1, a, t2, b, store, cfg);
                }
            }
        }
    }
}

/// Pair remaining height-1 leaves under a matched container by equal label,
/// walking both sides in source order.
fn recover_leaves(
    t1: &AstTree,
    a: NodeId,
    t2: &AstTree,
    b: NodeId,
    store: &mut NodeMappings,
    cfg: &MatcherConfig,
) {
    let left: Vec<NodeId> = t1
        .subtree(a)
        .filter(|&n| t1.is_leaf(n) && !store.has_left(&n))
        .collect();
    let right: Vec<NodeId> = t2
        .subtree(b)
        .filter(|&n| t2.is_leaf(n) && !store.has_right(&n))
        .collect();
    let mut taken = vec![false; right.len()];
    let mut cursor = 0usize;
    for l in left {
        let mut pick = None;
        for (i, &r) in right.iter().enumerate().skip(cursor) {
            if taken[i] || t2.label(r) != t1.label(l) {
                continue;
            }
            if guard_rejects(cfg, t1, l, t2, r) {
                continue;
            }
            pick = Some(i);
            break;
        }
        if let Some(i) = pick {
            taken[i] = true;
            store.add(l, right[i]);
            cursor = i + 1;
        }
    }
}

/// Rewrite each leaf's label to `ParentLabel-LeafLabel`; structure, values,
/// spans, and flags are untouched, and derived data is recomputed. Node ids
/// are stable across the rewrite.
pub fn fg_relabel(tree: &AstTree) -> AstTree {
    let mut out = tree.clone();
    let relabel: Vec<(NodeId, String)> = tree
        .preorder()
        .filter(|&n| tree.is_leaf(n))
        .filter_map(|n| {
            tree.parent(n)
                .map(|p| (n, format!("{}-{}", tree.label(p), tree.label(n))))
        })
        .collect();
    for (n, l) in relabel {
        out.set_label(n, l);
    }
    out.annotate();
    out
}

/// One full matcher run: optional fine-grained relabeling, top-down, then
/// bottom-up.
pub fn match_trees(t1: &AstTree, t2: &AstTree, cfg: &MatcherConfig) -> NodeMappings {
    if cfg.fine_grained_labels {
        let f1 = fg_relabel(t1);
        let f2 = fg_relabel(t2);
        let mut store = top_down(&f1, &f2, cfg);
        bottom_up(&f1, &f2, &mut store, cfg);
        store
    } else {
        let mut store = top_down(t1, t2, cfg);
        bottom_up(t1, t2, &mut store, cfg);
        store
    }
}

/// A node in one side of a project: file index plus node id within that
/// file's tree.
pub type ProjectNode = (usize, NodeId);

/// Project-level staged matching: subtrees left unmapped by per-file
/// matching are grafted under a pseudo project root on each side and matched
/// again (always in simple mode), surfacing mappings that cross file
/// boundaries. `pairs` lists the per-file stores as
/// `(left file index, right file index, store)`.
pub fn staged_tree_match(
    left: &[(&str, &AstTree)],
    right: &[(&str, &AstTree)],
    pairs: &[(usize, usize, NodeMappings)],
    cfg: &MatcherConfig,
) -> Vec<(ProjectNode, ProjectNode)> {
    let mapped_left: BTreeSet<ProjectNode> = pairs
        .iter()
        .flat_map(|(fi, _, s)| s.iter().map(move |(l, _)| (*fi, *l)))
        .collect();
    let mapped_right: BTreeSet<ProjectNode> = pairs
        .iter()
        .flat_map(|(_, fj, s)| s.iter().map(move |(_, r)| (*fj, *r)))
        .collect();
    let (lt, lmap) = pseudo_project(left, &mapped_left);
    let (rt, rmap) = pseudo_project(right, &mapped_right);
    let (lt, rt) = match (lt, rt) {
        (Some(a), Some(b)) => (a, b),
        _ => return Vec::new(),
    };
    let stm_cfg = MatcherConfig {
        bottom_up_mode: BottomUpMode::Simple,
        ..cfg.clone()
    };
    let store = match_trees(&lt, &rt, &stm_cfg);
    let paired: BTreeSet<(usize, usize)> = pairs.iter().map(|(i, j, _)| (*i, *j)).collect();
    let mut out = Vec::new();
    for (l, r) in store.iter() {
        let (Some(&pl), Some(&pr)) = (lmap.get(l), rmap.get(r)) else {
            continue; // pseudo root
        };
        if !paired.contains(&(pl.0, pr.0)) {
            out.push((pl, pr));
        }
    }
    out
}

/// Build one pseudo-rooted tree holding every maximal fully-unmapped subtree
/// of the side, with a reverse map from pseudo ids to project nodes. Spans
/// are shifted per file so sibling order stays valid.
fn pseudo_project(
    files: &[(&str, &AstTree)],
    mapped: &BTreeSet<ProjectNode>,
) -> (Option<AstTree>, BTreeMap<NodeId, ProjectNode>) {
    let mut b = TreeBuilder::new();
    // Pseudo-root children in order, with the original subtree each copies.
    let mut top: Vec<(NodeId, usize, NodeId)> = Vec::new();
    let mut offset = 0usize;
    for (fi, (_, tree)) in files.iter().enumerate() {
        // Maximal nodes whose whole subtree is unmapped.
        let mut roots: Vec<NodeId> = Vec::new();
        for n in tree.preorder() {
            if roots.iter().any(|&r| tree.is_descendant_of(n, r)) {
                continue;
            }
            if tree.subtree(n).all(|d| !mapped.contains(&(fi, d))) {
                roots.push(n);
            }
        }
        for r in roots {
            let copied = copy_subtree(tree, r, offset, &mut b);
            top.push((copied, fi, r));
        }
        offset += tree.span(tree.root()).end + 1;
    }
    if top.is_empty() {
        return (None, BTreeMap::new());
    }
    let children: Vec<NodeId> = top.iter().map(|(c, _, _)| *c).collect();
    let root = b.node("Program", "", Span::new(0, offset), children);
    let tree = b.finish(root).expect("pseudo-project spans are consistent");
    // finish() renumbers into preorder, but copied subtrees keep their
    // shapes, so zipping each pseudo child against its original subtree
    // recovers the correspondence.
    let mut remap = BTreeMap::new();
    for (&child, &(_, fi, orig)) in tree.children(tree.root()).iter().zip(top.iter()) {
        let orig_tree = files[fi].1;
        for (p, o) in tree.subtree(child).zip(orig_tree.subtree(orig)) {
            remap.insert(p, (fi, o));
        }
    }
    (Some(tree), remap)
}

fn copy_subtree(tree: &AstTree, n: NodeId, offset: usize, b: &mut TreeBuilder) -> NodeId {
    let children: Vec<NodeId> = tree
        .children(n)
        .iter()
        .map(|&c| copy_subtree(tree, c, offset, b))
        .collect();
    let span = Span::new(tree.span(n).start + offset, tree.span(n).end + offset);
    b.node_with_flags(tree.label(n), tree.value(n), span, children, tree.flags(n))
}

// ----------------------------------------------------------------------
// Simplified edit scripts

/// Where an action attaches a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// A node of the left tree (by its original id).
    Left(NodeId),
    /// The node created by the `n`-th Insert action of the script.
    Inserted(usize),
}

/// One step of a tree edit script. Actions are applied strictly in script
/// order; positions index the child list of the target parent at
/// application time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EditAction {
    Update { node: NodeId, value: String },
    Insert { label: String, value: String, parent: Target, position: usize },
    Move { node: NodeId, parent: Target, position: usize },
    Delete { node: NodeId },
}

/// Mutable scratch tree used to derive and replay scripts.
#[derive(Debug, Clone)]
pub struct ScratchTree {
    labels: Vec<String>,
    values: Vec<String>,
    children: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    root: usize,
    /// Left-tree id → scratch handle (stable; never reused).
    left_handle: Vec<usize>,
    /// Insert-action ordinal → scratch handle.
    inserted_handle: Vec<usize>,
}

impl ScratchTree {
    fn from_tree(t: &AstTree) -> Self {
        let n = t.len();
        let mut s = ScratchTree {
            labels: Vec::with_capacity(n),
            values: Vec::with_capacity(n),
            children: Vec::with_capacity(n),
            parent: Vec::with_capacity(n),
            root: t.root().index(),
            left_handle: (0..n).collect(),
            inserted_handle: Vec::new(),
        };
        for id in t.preorder() {
            s.labels.push(t.label(id).to_string());
            s.values.push(t.value(id).to_string());
            s.children.push(t.children(id).iter().map(|c| c.index()).collect());
            s.parent.push(t.parent(id).map(|p| p.index()));
        }
        s
    }

    fn resolve(&self, t: Target) -> Option<usize> {
        match t {
            Target::Left(id) => self.left_handle.get(id.index()).copied(),
            Target::Inserted(k) => self.inserted_handle.get(k).copied(),
        }
    }

    fn detach(&mut self, h: usize) {
        if let Some(p) = self.parent[h] {
            self.children[p].retain(|&c| c != h);
            self.parent[h] = None;
        }
    }

    fn attach(&mut self, h: usize, parent: usize, position: usize) {
        let pos = position.min(self.children[parent].len());
        self.children[parent].insert(pos, h);
        self.parent[h] = Some(parent);
    }

    fn child_index(&self, h: usize) -> Option<usize> {
        let p = self.parent[h]?;
        self.children[p].iter().position(|&c| c == h)
    }

    fn apply(&mut self, action: &EditAction) -> Result<(), String> {
        match action {
            EditAction::Update { node, value } => {
                let h = self
                    .resolve(Target::Left(*node))
                    .ok_or("update target missing")?;
                self.values[h] = value.clone();
            }
            EditAction::Insert { label, value, parent, position } => {
                let p = self.resolve(*parent).ok_or("insert parent missing")?;
                let h = self.labels.len();
                self.labels.push(label.clone());
                self.values.push(value.clone());
                self.children.push(Vec::new());
                self.parent.push(None);
                self.inserted_handle.push(h);
                self.attach(h, p, *position);
            }
            EditAction::Move { node, parent, position } => {
                let h = self.resolve(Target::Left(*node)).ok_or("move target missing")?;
                let p = self.resolve(*parent).ok_or("move parent missing")?;
                self.detach(h);
                self.attach(h, p, *position);
            }
            EditAction::Delete { node } => {
                let h = self.resolve(Target::Left(*node)).ok_or("delete target missing")?;
                if !self.children[h].is_empty() {
                    return Err(format!(
                        "delete of non-empty node {:?} (children must go first)",
                        node
                    ));
                }
                self.detach(h);
            }
        }
        Ok(())
    }

    /// Structural equality (labels, values, child order) against `t2`,
    /// ignoring spans.
    pub fn matches(&self, t2: &AstTree) -> bool {
        fn rec(s: &ScratchTree, h: usize, t2: &AstTree, n: NodeId) -> bool {
            if s.labels[h] != t2.label(n) || s.values[h] != t2.value(n) {
                return false;
            }
            let kids = &s.children[h];
            if kids.len() != t2.children(n).len() {
                return false;
            }
            kids.iter()
                .zip(t2.children(n))
                .all(|(&ch, &cn)| rec(s, ch, t2, cn))
        }
        rec(self, self.root, t2, t2.root())
    }
}

/// Apply a script to (a copy of) the left tree.
pub fn replay(t1: &AstTree, script: &[EditAction]) -> Result<ScratchTree, String> {
    let mut s = ScratchTree::from_tree(t1);
    for a in script {
        s.apply(a)?;
    }
    Ok(s)
}

/// Derive a simplified edit script turning `t1` into a tree structurally
/// equal to `t2` under the given mappings. Multi-mappings are projected to
/// their first pair; unmapped roots are aligned implicitly.
///
/// The deriver simulates every action on a scratch copy, so emitted
/// positions are exact for in-order replay.
pub fn derive_edit_script(t1: &AstTree, t2: &AstTree, store: &NodeMappings) -> Vec<EditAction> {
    // One-to-one projection, first pair wins on both sides. Scripts are
    // rooted at the left root, so the root pair is forced and any mapping
    // that ties a root to a non-root is dropped.
    let mut l2r: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut r2l: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    l2r.insert(t1.root(), t2.root());
    r2l.insert(t2.root(), t1.root());
    for (l, r) in store.iter() {
        if *l == t1.root() || *r == t2.root() {
            continue;
        }
        if !l2r.contains_key(l) && !r2l.contains_key(r) {
            l2r.insert(*l, *r);
            r2l.insert(*r, *l);
        }
    }

    let mut script: Vec<EditAction> = Vec::new();
    let mut sim = ScratchTree::from_tree(t1);
    let mut insert_count = 0usize;
    // Right id → the target that reaches its rebuilt counterpart.
    let mut right_target: BTreeMap<NodeId, Target> = BTreeMap::new();

    // Updates first: value changes on mapped pairs.
    for (l, r) in &l2r {
        if t1.value(*l) != t2.value(*r) {
            let a = EditAction::Update { node: *l, value: t2.value(*r).to_string() };
            sim.apply(&a).expect("update applies");
            script.push(a);
        }
    }

    // Structure pass in right preorder.
    for r in t2.preorder() {
        if let Some(&l) = r2l.get(&r) {
            right_target.insert(r, Target::Left(l));
        }
        let Some(pr) = t2.parent(r) else {
            continue; // the right root is anchored at the left root
        };
        let parent_target = *right_target
            .get(&pr)
            .expect("parents precede children in preorder");
        let position = t2.child_index(r);
        match r2l.get(&r) {
            Some(&l) => {
                let h = sim.resolve(Target::Left(l)).unwrap();
                let want_parent = sim.resolve(parent_target).unwrap();
                let in_place =
                    sim.parent[h] == Some(want_parent) && sim.child_index(h) == Some(position);
                if !in_place {
                    let a = EditAction::Move { node: l, parent: parent_target, position };
                    sim.apply(&a).expect("move applies");
                    script.push(a);
                }
            }
            None => {
                let a = EditAction::Insert {
                    label: t2.label(r).to_string(),
                    value: t2.value(r).to_string(),
                    parent: parent_target,
                    position,
                };
                sim.apply(&a).expect("insert applies");
                script.push(a);
                right_target.insert(r, Target::Inserted(insert_count));
                insert_count += 1;
            }
        }
    }

    // Deletes in left postorder: children are gone (moved or deleted) by the
    // time their parent is removed.
    for l in t1.postorder() {
        if !l2r.contains_key(&l) {
            let a = EditAction::Delete { node: l };
            sim.apply(&a).expect("delete applies");
            script.push(a);
        }
    }
    debug_assert!(sim.matches(t2), "derived script must rebuild the right tree");
    script
}
