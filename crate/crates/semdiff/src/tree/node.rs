use std::fmt;

use thiserror::Error;

/// Half-open byte range `[start, end)` into the source text of one file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// Containment, inclusive of equal bounds.
    pub fn contains(&self, other: Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}-{}]", self.start, self.end)
    }
}

/// Index into the arena of one [`AstTree`]. Ids are preorder positions, so
/// `a < b` for an ancestor `a` of `b`, and a subtree occupies the contiguous
/// id range `[id, id + size)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Frontend-private node markers. They never serialize and never feed the
/// hashes; they record facts the child list alone cannot express.
pub mod flags {
    /// The name child of an invocation (distinguishes it from a receiver or
    /// an argument that is also a bare SimpleName).
    pub const NAME_SLOT: u8 = 1;
    /// MethodDeclaration that is a constructor. Constructors share the
    /// method label for benchmark compatibility.
    pub const CONSTRUCTOR: u8 = 2;
    /// The superclass entry in a TypeDeclaration's heritage list (the rest
    /// are implemented interfaces).
    pub const SUPERCLASS: u8 = 4;
    /// TypeDeclaration that declares an interface.
    pub const INTERFACE: u8 = 8;
    /// The condition expression in a classic for header.
    pub const FOR_CONDITION: u8 = 16;
    /// An updater expression in a classic for header.
    pub const FOR_UPDATE: u8 = 32;
    /// The finally block of a try statement.
    pub const FINALLY: u8 = 64;
}

#[derive(Debug, Clone)]
pub(crate) struct NodeData {
    pub label: String,
    pub value: String,
    pub span: Span,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub height: u32,
    pub size: u32,
    pub value_hash: u64,
    pub structure_hash: u64,
    pub flags: u8,
}

/// Isomorphism flavor: `Value` compares labels and values, `Structure`
/// compares labels only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoMode {
    Value,
    Structure,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("node {label} {span} escapes its parent {parent_label} {parent_span}")]
    SpanEscapesParent {
        label: String,
        span: Span,
        parent_label: String,
        parent_span: Span,
    },
    #[error("children of {label} {span} are not in source order")]
    ChildrenOutOfOrder { label: String, span: Span },
    #[error("node {label} has reversed span {span}")]
    ReversedSpan { label: String, span: Span },
}

/// An annotated ordered labeled tree for one compilation unit.
///
/// Construction goes through [`TreeBuilder`]; `finish` reindexes nodes into
/// preorder, links parents, validates span nesting, and computes the derived
/// attributes. Trees are immutable afterwards except for relabeling passes
/// that call [`AstTree::annotate`] again.
#[derive(Debug, Clone)]
pub struct AstTree {
    pub(crate) nodes: Vec<NodeData>,
    root: NodeId,
}

impl AstTree {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.nodes[id.index()].label
    }

    pub fn value(&self, id: NodeId) -> &str {
        &self.nodes[id.index()].value
    }

    pub fn span(&self, id: NodeId) -> Span {
        self.nodes[id.index()].span
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.index()].parent
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id.index()].children
    }

    /// Height with leaves at 1.
    pub fn height(&self, id: NodeId) -> u32 {
        self.nodes[id.index()].height
    }

    /// Node count of the subtree, including the node itself.
    pub fn size(&self, id: NodeId) -> u32 {
        self.nodes[id.index()].size
    }

    /// Hash over label, value, and child value hashes, in order.
    pub fn value_hash(&self, id: NodeId) -> u64 {
        self.nodes[id.index()].value_hash
    }

    /// Hash over label and child structure hashes, ignoring values.
    pub fn structure_hash(&self, id: NodeId) -> u64 {
        self.nodes[id.index()].structure_hash
    }

    pub fn flags(&self, id: NodeId) -> u8 {
        self.nodes[id.index()].flags
    }

    pub fn has_flag(&self, id: NodeId, flag: u8) -> bool {
        self.nodes[id.index()].flags & flag != 0
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id.index()].children.is_empty()
    }

    /// All ids in preorder (which is also ascending id order).
    pub fn preorder(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    /// Ids of the subtree rooted at `id`, including `id`, in preorder.
    pub fn subtree(&self, id: NodeId) -> impl Iterator<Item = NodeId> {
        let size = self.size(id);
        (id.0..id.0 + size).map(NodeId)
    }

    /// Proper descendants of `id` in preorder.
    pub fn descendants(&self, id: NodeId) -> impl Iterator<Item = NodeId> {
        let size = self.size(id);
        (id.0 + 1..id.0 + size).map(NodeId)
    }

    pub fn is_descendant_of(&self, node: NodeId, ancestor: NodeId) -> bool {
        node.0 > ancestor.0 && node.0 < ancestor.0 + self.size(ancestor)
    }

    /// Postorder traversal of the whole tree.
    pub fn postorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if expanded {
                out.push(id);
            } else {
                stack.push((id, true));
                for &c in self.children(id).iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// Ancestors from the parent upwards to the root.
    pub fn ancestors(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut cur = self.parent(id);
        while let Some(p) = cur {
            out.push(p);
            cur = self.parent(p);
        }
        out
    }

    /// Index of `id` in its parent's child list; 0 for the root.
    pub fn child_index(&self, id: NodeId) -> usize {
        match self.parent(id) {
            None => 0,
            Some(p) => self
                .children(p)
                .iter()
                .position(|&c| c == id)
                .expect("child lists and parent links agree"),
        }
    }

    /// Structural equality of two subtrees, comparing labels (and values in
    /// [`IsoMode::Value`]) and recursing pairwise over children. Spans are
    /// deliberately not compared.
    pub fn isomorphic(a_tree: &AstTree, a: NodeId, b_tree: &AstTree, b: NodeId, mode: IsoMode) -> bool {
        let an = &a_tree.nodes[a.index()];
        let bn = &b_tree.nodes[b.index()];
        if an.label != bn.label || an.children.len() != bn.children.len() {
            return false;
        }
        if mode == IsoMode::Value && an.value != bn.value {
            return false;
        }
        an.children
            .iter()
            .zip(bn.children.iter())
            .all(|(&ca, &cb)| AstTree::isomorphic(a_tree, ca, b_tree, cb, mode))
    }

    /// Replace a node's label in place. Callers must re-[`annotate`] before
    /// using hashes again.
    ///
    /// [`annotate`]: AstTree::annotate
    pub fn set_label(&mut self, id: NodeId, label: String) {
        self.nodes[id.index()].label = label;
    }

    /// Recompute heights, sizes, and both hashes bottom-up.
    pub fn annotate(&mut self) {
        for id in self.postorder() {
            let (height, size, value_hash, structure_hash) = {
                let n = &self.nodes[id.index()];
                let mut height = 0u32;
                let mut size = 1u32;
                let mut vh = Fnv::new();
                let mut sh = Fnv::new();
                vh.write(n.label.as_bytes());
                vh.write(&[0xff]);
                vh.write(n.value.as_bytes());
                vh.write(&[0xfe]);
                sh.write(n.label.as_bytes());
                sh.write(&[0xfe]);
                for &c in &n.children {
                    let cd = &self.nodes[c.index()];
                    height = height.max(cd.height);
                    size += cd.size;
                    vh.write(&cd.value_hash.to_le_bytes());
                    sh.write(&cd.structure_hash.to_le_bytes());
                }
                (height + 1, size, vh.finish(), sh.finish())
            };
            let n = &mut self.nodes[id.index()];
            n.height = height;
            n.size = size;
            n.value_hash = value_hash;
            n.structure_hash = structure_hash;
        }
    }
}

/// FNV-1a, 64-bit. Fixed offset basis keeps hashes stable across runs and
/// platforms, which the deterministic-output guarantees depend on.
struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

/// Bottom-up tree construction: children are created before their parent and
/// passed by id. `finish` produces the final preorder-indexed tree.
pub struct TreeBuilder {
    nodes: Vec<NodeData>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        TreeBuilder { nodes: Vec::new() }
    }

    pub fn node(
        &mut self,
        label: impl Into<String>,
        value: impl Into<String>,
        span: Span,
        children: Vec<NodeId>,
    ) -> NodeId {
        self.node_with_flags(label, value, span, children, 0)
    }

    pub fn node_with_flags(
        &mut self,
        label: impl Into<String>,
        value: impl Into<String>,
        span: Span,
        children: Vec<NodeId>,
        flags: u8,
    ) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(NodeData {
            label: label.into(),
            value: value.into(),
            span,
            parent: None,
            children,
            height: 0,
            size: 0,
            value_hash: 0,
            structure_hash: 0,
            flags,
        });
        id
    }

    pub fn leaf(&mut self, label: impl Into<String>, value: impl Into<String>, span: Span) -> NodeId {
        self.node(label, value, span, Vec::new())
    }

    /// Or extra flag bits onto an already-created node.
    pub fn add_flags(&mut self, id: NodeId, flags: u8) {
        self.nodes[id.index()].flags |= flags;
    }

    /// Widen a node's span (used to absorb leading javadoc into its
    /// declaration).
    pub fn set_span(&mut self, id: NodeId, span: Span) {
        self.nodes[id.index()].span = span;
    }

    pub fn span_of(&self, id: NodeId) -> Span {
        self.nodes[id.index()].span
    }

    pub fn label_of(&self, id: NodeId) -> &str {
        &self.nodes[id.index()].label
    }

    /// Validate, reindex into preorder, link parents, and annotate.
    pub fn finish(self, root: NodeId) -> Result<AstTree, TreeError> {
        let nodes = self.nodes;
        for n in &nodes {
            if n.span.start > n.span.end {
                return Err(TreeError::ReversedSpan {
                    label: n.label.clone(),
                    span: n.span,
                });
            }
        }
        // Preorder permutation over the builder graph.
        let mut order = Vec::with_capacity(nodes.len());
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            order.push(id);
            for &c in nodes[id.index()].children.iter().rev() {
                stack.push(c);
            }
        }
        let mut remap = vec![u32::MAX; nodes.len()];
        for (new_idx, old) in order.iter().enumerate() {
            remap[old.index()] = new_idx as u32;
        }
        let mut out: Vec<NodeData> = order
            .iter()
            .map(|old| {
                let mut n = nodes[old.index()].clone();
                n.children = n.children.iter().map(|c| NodeId(remap[c.index()])).collect();
                n
            })
            .collect();
        for i in 0..out.len() {
            let children = out[i].children.clone();
            for c in children {
                out[c.index()].parent = Some(NodeId(i as u32));
            }
        }
        for i in 0..out.len() {
            let span = out[i].span;
            let label = out[i].label.clone();
            let mut prev_end: Option<usize> = None;
            for &c in &out[i].children {
                let cs = out[c.index()].span;
                if !span.contains(cs) {
                    return Err(TreeError::SpanEscapesParent {
                        label: out[c.index()].label.clone(),
                        span: cs,
                        parent_label: label,
                        parent_span: span,
                    });
                }
                if let Some(pe) = prev_end {
                    if cs.start < pe {
                        return Err(TreeError::ChildrenOutOfOrder { label, span });
                    }
                }
                prev_end = Some(cs.end);
            }
        }
        let mut tree = AstTree {
            nodes: out,
            root: NodeId(0),
        };
        tree.annotate();
        Ok(tree)
    }
}

impl Default for TreeBuilder {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf_tree() -> AstTree {
        let mut b = TreeBuilder::new();
        let n = b.leaf("SimpleName", "x", Span::new(0, 1));
        b.finish(n).unwrap()
    }

    #[test]
    fn single_leaf_has_height_one_size_one() {
        let t = leaf_tree();
        assert_eq!(t.height(t.root()), 1);
        assert_eq!(t.size(t.root()), 1);
    }

    #[test]
    fn two_children_height_two_size_three() {
        let mut b = TreeBuilder::new();
        let a = b.leaf("SimpleName", "a", Span::new(0, 1));
        let c = b.leaf("SimpleName", "b", Span::new(4, 5));
        let root = b.node("InfixExpression", "", Span::new(0, 5), vec![a, c]);
        let t = b.finish(root).unwrap();
        assert_eq!(t.height(t.root()), 2);
        assert_eq!(t.size(t.root()), 3);
    }

    #[test]
    fn value_rename_changes_value_hash_not_structure_hash() {
        let mk = |v: &str| {
            let mut b = TreeBuilder::new();
            let n = b.leaf("SimpleName", v, Span::new(0, 1));
            let root = b.node("ExpressionStatement", "", Span::new(0, 2), vec![n]);
            b.finish(root).unwrap()
        };
        let t1 = mk("x");
        let t2 = mk("y");
        assert_eq!(t1.structure_hash(t1.root()), t2.structure_hash(t2.root()));
        assert_ne!(t1.value_hash(t1.root()), t2.value_hash(t2.root()));
    }

    #[test]
    fn isomorphic_is_reflexive_and_value_sensitive() {
        let t1 = leaf_tree();
        let t2 = {
            let mut b = TreeBuilder::new();
            let n = b.leaf("SimpleName", "y", Span::new(10, 11));
            b.finish(n).unwrap()
        };
        assert!(AstTree::isomorphic(&t1, t1.root(), &t1, t1.root(), IsoMode::Value));
        assert!(!AstTree::isomorphic(&t1, t1.root(), &t2, t2.root(), IsoMode::Value));
        assert!(AstTree::isomorphic(&t1, t1.root(), &t2, t2.root(), IsoMode::Structure));
    }

    #[test]
    fn span_escape_is_rejected() {
        let mut b = TreeBuilder::new();
        let child = b.leaf("SimpleName", "x", Span::new(5, 9));
        let root = b.node("Block", "", Span::new(0, 7), vec![child]);
        let err = b.finish(root).unwrap_err();
        assert!(matches!(err, TreeError::SpanEscapesParent { .. }));
    }

    #[test]
    fn out_of_order_children_are_rejected() {
        let mut b = TreeBuilder::new();
        let c1 = b.leaf("SimpleName", "a", Span::new(4, 5));
        let c2 = b.leaf("SimpleName", "b", Span::new(0, 1));
        let root = b.node("Block", "", Span::new(0, 6), vec![c1, c2]);
        assert!(matches!(
            b.finish(root).unwrap_err(),
            TreeError::ChildrenOutOfOrder { .. }
        ));
    }

    #[test]
    fn subtree_ranges_are_contiguous_preorder() {
        let mut b = TreeBuilder::new();
        let a = b.leaf("SimpleName", "a", Span::new(1, 2));
        let bb = b.leaf("SimpleName", "b", Span::new(3, 4));
        let inner = b.node("InfixExpression", "", Span::new(1, 4), vec![a, bb]);
        let c = b.leaf("SimpleName", "c", Span::new(6, 7));
        let root = b.node("Block", "", Span::new(0, 8), vec![inner, c]);
        let t = b.finish(root).unwrap();
        let r = t.root();
        assert_eq!(t.label(r), "Block");
        let subtree: Vec<_> = t.subtree(r).map(|n| t.label(n).to_string()).collect();
        assert_eq!(
            subtree,
            ["Block", "InfixExpression", "SimpleName", "SimpleName", "SimpleName"]
        );
        // Preorder ids: parents precede children, spans nest.
        for n in t.preorder() {
            if let Some(p) = t.parent(n) {
                assert!(p < n);
                assert!(t.span(p).contains(t.span(n)));
            }
        }
    }
}
