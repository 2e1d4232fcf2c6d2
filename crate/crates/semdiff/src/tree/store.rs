use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::node::{AstTree, NodeId, Span};

/// File-qualified node address: the identity used by the benchmark format
/// and the metric engine. Two refs are the same node iff file, span, and
/// label all agree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeRef {
    pub file: String,
    pub span: Span,
    pub label: String,
}

impl NodeRef {
    pub fn new(file: impl Into<String>, label: impl Into<String>, span: Span) -> Self {
        NodeRef {
            file: file.into(),
            span,
            label: label.into(),
        }
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}{}", self.file, self.label, self.span)
    }
}

/// A set of left/right pairs with indexes on both sides. Insertion is
/// idempotent; one-to-many and many-to-one pairs coexist; partner queries
/// come back in the key's natural (source-position) order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairStore<T: Ord + Clone> {
    pairs: BTreeSet<(T, T)>,
    by_left: BTreeMap<T, BTreeSet<T>>,
    by_right: BTreeMap<T, BTreeSet<T>>,
}

impl<T: Ord + Clone> PairStore<T> {
    pub fn new() -> Self {
        PairStore {
            pairs: BTreeSet::new(),
            by_left: BTreeMap::new(),
            by_right: BTreeMap::new(),
        }
    }

    /// Insert a pair. Returns false when it was already present.
    pub fn add(&mut self, left: T, right: T) -> bool {
        if !self.pairs.insert((left.clone(), right.clone())) {
            return false;
        }
        self.by_left.entry(left.clone()).or_default().insert(right.clone());
        self.by_right.entry(right).or_default().insert(left);
        true
    }

    pub fn remove(&mut self, left: &T, right: &T) -> bool {
        if !self.pairs.remove(&(left.clone(), right.clone())) {
            return false;
        }
        if let Some(s) = self.by_left.get_mut(left) {
            s.remove(right);
            if s.is_empty() {
                self.by_left.remove(left);
            }
        }
        if let Some(s) = self.by_right.get_mut(right) {
            s.remove(left);
            if s.is_empty() {
                self.by_right.remove(right);
            }
        }
        true
    }

    pub fn contains(&self, left: &T, right: &T) -> bool {
        self.by_left.get(left).is_some_and(|s| s.contains(right))
    }

    pub fn has_left(&self, left: &T) -> bool {
        self.by_left.contains_key(left)
    }

    pub fn has_right(&self, right: &T) -> bool {
        self.by_right.contains_key(right)
    }

    /// Right partners of `left`, in natural order.
    pub fn rights_of(&self, left: &T) -> impl Iterator<Item = &T> {
        self.by_left.get(left).into_iter().flatten()
    }

    /// Left partners of `right`, in natural order.
    pub fn lefts_of(&self, right: &T) -> impl Iterator<Item = &T> {
        self.by_right.get(right).into_iter().flatten()
    }

    /// The unique right partner, when exactly one exists.
    pub fn right_of(&self, left: &T) -> Option<&T> {
        let s = self.by_left.get(left)?;
        if s.len() == 1 {
            s.iter().next()
        } else {
            None
        }
    }

    pub fn left_of(&self, right: &T) -> Option<&T> {
        let s = self.by_right.get(right)?;
        if s.len() == 1 {
            s.iter().next()
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(T, T)> {
        self.pairs.iter()
    }

    /// Lefts that participate in more than one pair.
    pub fn multi_lefts(&self) -> impl Iterator<Item = &T> {
        self.by_left.iter().filter(|(_, s)| s.len() > 1).map(|(l, _)| l)
    }

    pub fn multi_rights(&self) -> impl Iterator<Item = &T> {
        self.by_right.iter().filter(|(_, s)| s.len() > 1).map(|(r, _)| r)
    }

    pub fn has_multi(&self) -> bool {
        self.multi_lefts().next().is_some() || self.multi_rights().next().is_some()
    }

    pub fn extend_from(&mut self, other: &PairStore<T>) {
        for (l, r) in other.iter() {
            self.add(l.clone(), r.clone());
        }
    }
}

impl<T: Ord + Clone> FromIterator<(T, T)> for PairStore<T> {
    fn from_iter<I: IntoIterator<Item = (T, T)>>(iter: I) -> Self {
        let mut s = PairStore::new();
        for (l, r) in iter {
            s.add(l, r);
        }
        s
    }
}

/// Commit-level mapping store over file-qualified refs.
pub type MappingStore = PairStore<NodeRef>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LocateError {
    #[error("no node {label} {span}; nearest candidates: {candidates}")]
    NotFound {
        label: String,
        span: Span,
        candidates: String,
    },
    #[error("{count} nodes match {label} {span}")]
    Ambiguous { label: String, span: Span, count: usize },
}

/// Resolve `(label, span)` to the unique node of `tree`, or explain what is
/// near the requested address.
pub fn locate(tree: &AstTree, label: &str, span: Span) -> Result<NodeId, LocateError> {
    let mut hits = Vec::new();
    let mut near = Vec::new();
    for id in tree.preorder() {
        let s = tree.span(id);
        let l = tree.label(id);
        if s == span && l == label {
            hits.push(id);
        } else if s == span || (l == label && s.start == span.start) {
            near.push((l, s));
        }
    }
    match hits.len() {
        1 => Ok(hits[0]),
        0 => {
            near.truncate(4);
            let candidates = if near.is_empty() {
                "none".to_string()
            } else {
                near.iter()
                    .map(|(l, s)| format!("{l}{s}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            Err(LocateError::NotFound {
                label: label.to_string(),
                span,
                candidates,
            })
        }
        n => Err(LocateError::Ambiguous {
            label: label.to_string(),
            span,
            count: n,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::node::TreeBuilder;

    fn store_of(pairs: &[(&str, &str)]) -> PairStore<String> {
        pairs
            .iter()
            .map(|(l, r)| (l.to_string(), r.to_string()))
            .collect()
    }

    #[test]
    fn one_to_many_and_many_to_one_coexist() {
        let mut s = store_of(&[("A", "X"), ("A", "Y")]);
        s.add("B".into(), "X".into());
        assert_eq!(s.len(), 3);
        let rights: Vec<_> = s.rights_of(&"A".to_string()).cloned().collect();
        assert_eq!(rights, ["X", "Y"]);
        let lefts: Vec<_> = s.lefts_of(&"X".to_string()).cloned().collect();
        assert_eq!(lefts, ["A", "B"]);
        assert!(s.has_multi());
    }

    #[test]
    fn insertion_is_idempotent() {
        let mut s = store_of(&[("A", "X")]);
        assert!(!s.add("A".into(), "X".into()));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn removal_cleans_indexes() {
        let mut s = store_of(&[("A", "X"), ("A", "Y")]);
        assert!(s.remove(&"A".to_string(), &"X".to_string()));
        assert!(!s.contains(&"A".to_string(), &"X".to_string()));
        assert_eq!(s.right_of(&"A".to_string()), Some(&"Y".to_string()));
        assert!(!s.has_right(&"X".to_string()));
    }

    #[test]
    fn locate_finds_root_and_rejects_off_by_one() {
        let mut b = TreeBuilder::new();
        let n = b.leaf("SimpleName", "x", Span::new(4, 5));
        let root = b.node("ExpressionStatement", "", Span::new(4, 6), vec![n]);
        let t = b.finish(root).unwrap();
        assert_eq!(
            locate(&t, "ExpressionStatement", Span::new(4, 6)).unwrap(),
            t.root()
        );
        let err = locate(&t, "SimpleName", Span::new(4, 6)).unwrap_err();
        match err {
            LocateError::NotFound { candidates, .. } => {
                assert!(candidates.contains("ExpressionStatement[4-6]"), "{candidates}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn every_node_is_locatable_by_its_own_address() {
        let mut b = TreeBuilder::new();
        let a = b.leaf("SimpleName", "a", Span::new(0, 1));
        let op = b.leaf("InfixOperator", "+", Span::new(2, 3));
        let c = b.leaf("SimpleName", "b", Span::new(4, 5));
        let e = b.node("InfixExpression", "", Span::new(0, 5), vec![a, op, c]);
        let root = b.node("ExpressionStatement", "", Span::new(0, 6), vec![e]);
        let t = b.finish(root).unwrap();
        for id in t.preorder() {
            let found = locate(&t, t.label(id), t.span(id)).unwrap();
            assert_eq!(found, id);
        }
    }
}
