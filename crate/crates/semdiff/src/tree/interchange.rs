//! Strict JSON interchange for annotated trees.
//!
//! One node object per tree node: `typeLabel`, `value`, `span` (two-element
//! byte array), `children`. Unknown fields are rejected, spans are validated
//! on load, and serialization is canonical (2-space indent, fixed key
//! order), so `serialize ∘ parse` is the identity on files this module
//! wrote.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::node::{AstTree, NodeId, Span, TreeBuilder, TreeError};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonNode {
    #[serde(rename = "typeLabel")]
    type_label: String,
    value: String,
    span: (usize, usize),
    children: Vec<JsonNode>,
}

#[derive(Debug, Error)]
pub enum InterchangeError {
    #[error("malformed interchange JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid tree: {0}")]
    Tree(#[from] TreeError),
}

/// Serialize a whole tree to canonical JSON text.
pub fn serialize_tree(tree: &AstTree) -> String {
    let root = to_json(tree, tree.root());
    let mut out = serde_json::to_string_pretty(&root).expect("tree serialization cannot fail");
    out.push('\n');
    out
}

fn to_json(tree: &AstTree, id: NodeId) -> JsonNode {
    JsonNode {
        type_label: tree.label(id).to_string(),
        value: tree.value(id).to_string(),
        span: (tree.span(id).start, tree.span(id).end),
        children: tree.children(id).iter().map(|&c| to_json(tree, c)).collect(),
    }
}

/// Parse interchange JSON into an annotated tree. Span nesting and ordering
/// are validated; schema violations (unknown fields, missing fields) are
/// rejected with the serde error.
pub fn parse_interchange(text: &str) -> Result<AstTree, InterchangeError> {
    let root: JsonNode = serde_json::from_str(text)?;
    let mut b = TreeBuilder::new();
    let root_id = build(&mut b, &root);
    Ok(b.finish(root_id)?)
}

fn build(b: &mut TreeBuilder, n: &JsonNode) -> NodeId {
    let children = n.children.iter().map(|c| build(b, c)).collect();
    b.node(
        n.type_label.clone(),
        n.value.clone(),
        Span::new(n.span.0, n.span.1),
        children,
    )
}
