//! Canonical single-style rendering of subtrees.
//!
//! The printer is the textual basis for statement comparison: statements are
//! compared and edit-distanced over these strings, never over raw source, so
//! formatting differences can never influence matching. Two properties are
//! load-bearing and covered by tests:
//!
//! - determinism: one style, one space around binary operators, no line
//!   breaks inside a statement;
//! - compositionality: every rendered child appears verbatim, exactly once,
//!   inside its parent's rendering (composite statements render their header
//!   only, so "inside" means the header for composites). This is what makes
//!   text replacement by sub-expression sound.

use super::node::{flags, AstTree, NodeId};
use crate::taxonomy as tax;

/// Render one subtree in the canonical style. Composite statements render
/// their header only (`if (cond)`, `try`, `{` for blocks); declarations
/// render a short signature.
pub fn pretty(tree: &AstTree, id: NodeId) -> String {
    let mut p = Printer {
        tree,
        out: String::new(),
        offsets: None,
    };
    p.render(id);
    p.out
}

/// Like [`pretty`], also reporting the start offset of every rendered node
/// within the returned string. Nodes that do not appear (e.g. composite
/// bodies) are absent from the list.
pub(crate) fn pretty_with_offsets(tree: &AstTree, id: NodeId) -> (String, Vec<(NodeId, usize)>) {
    let mut p = Printer {
        tree,
        out: String::new(),
        offsets: Some(Vec::new()),
    };
    p.render(id);
    (p.out, p.offsets.unwrap())
}

struct Printer<'t> {
    tree: &'t AstTree,
    out: String,
    offsets: Option<Vec<(NodeId, usize)>>,
}

impl<'t> Printer<'t> {
    fn push(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn join(&mut self, ids: &[NodeId], sep: &str) {
        for (i, &c) in ids.iter().enumerate() {
            if i > 0 {
                self.push(sep);
            }
            self.render(c);
        }
    }

    fn render(&mut self, id: NodeId) {
        if let Some(offsets) = &mut self.offsets {
            offsets.push((id, self.out.len()));
        }
        let t = self.tree;
        let label = t.label(id);
        let cs: Vec<NodeId> = t.children(id).to_vec();
        match label {
            l if tax::is_valued_leaf(l) => {
                let v = t.value(id).to_string();
                self.push(&v);
            }
            tax::QUALIFIED_NAME | tax::FIELD_ACCESS | tax::QUALIFIED_TYPE => {
                self.render(cs[0]);
                self.push(".");
                self.render(cs[1]);
            }
            tax::METHOD_INVOCATION => {
                let name_at = invocation_name_index(t, id);
                if name_at > 0 {
                    self.render(cs[0]);
                    self.push(".");
                }
                self.render(cs[name_at]);
                self.push("(");
                self.join(&cs[name_at + 1..], ", ");
                self.push(")");
            }
            tax::SUPER_METHOD_INVOCATION => {
                self.push("super.");
                self.render(cs[0]);
                self.push("(");
                self.join(&cs[1..], ", ");
                self.push(")");
            }
            tax::CLASS_INSTANCE_CREATION => {
                self.push("new ");
                self.render(cs[0]);
                self.push("(");
                self.join(&cs[1..], ", ");
                self.push(")");
            }
            tax::INFIX_EXPRESSION => {
                self.join(&cs, " ");
            }
            tax::PREFIX_EXPRESSION => {
                let v = t.value(id).to_string();
                self.push(&v);
                self.render(cs[0]);
            }
            tax::POSTFIX_EXPRESSION => {
                self.render(cs[0]);
                let v = t.value(id).to_string();
                self.push(&v);
            }
            tax::ASSIGNMENT => {
                self.render(cs[0]);
                let v = format!(" {} ", t.value(id));
                self.push(&v);
                self.render(cs[1]);
            }
            tax::CONDITIONAL_EXPRESSION => {
                self.render(cs[0]);
                self.push(" ? ");
                self.render(cs[1]);
                self.push(" : ");
                self.render(cs[2]);
            }
            tax::CAST_EXPRESSION => {
                self.push("(");
                self.render(cs[0]);
                self.push(") ");
                self.render(cs[1]);
            }
            tax::INSTANCEOF_EXPRESSION => {
                self.render(cs[0]);
                self.push(" instanceof ");
                self.render(cs[1]);
            }
            tax::LAMBDA_EXPRESSION => {
                let (params, body) = cs.split_at(cs.len() - 1);
                if params.len() == 1 && t.label(params[0]) == tax::SIMPLE_NAME {
                    self.render(params[0]);
                } else {
                    self.push("(");
                    self.join(params, ", ");
                    self.push(")");
                }
                self.push(" -> ");
                self.render(body[0]);
            }
            tax::TYPE_LITERAL => {
                self.render(cs[0]);
                self.push(".class");
            }
            tax::PARENTHESIZED_EXPRESSION => {
                self.push("(");
                self.render(cs[0]);
                self.push(")");
            }
            tax::ARRAY_ACCESS => {
                self.render(cs[0]);
                self.push("[");
                self.render(cs[1]);
                self.push("]");
            }
            tax::ARRAY_CREATION => {
                self.push("new ");
                self.render(cs[0]);
                let rest = &cs[1..];
                match rest {
                    [] => self.push("[]"),
                    [one] if t.label(*one) == tax::ARRAY_INITIALIZER => {
                        self.push("[] ");
                        self.render(*one);
                    }
                    dims => {
                        for &d in dims {
                            self.push("[");
                            self.render(d);
                            self.push("]");
                        }
                    }
                }
            }
            tax::ARRAY_INITIALIZER => {
                self.push("{");
                self.join(&cs, ", ");
                self.push("}");
            }
            tax::SIMPLE_TYPE => {
                self.render(cs[0]);
            }
            tax::PARAMETERIZED_TYPE => {
                self.render(cs[0]);
                self.push("<");
                self.join(&cs[1..], ", ");
                self.push(">");
            }
            tax::ARRAY_TYPE => {
                self.render(cs[0]);
                self.push("[]");
            }
            tax::UNION_TYPE => {
                self.join(&cs, " | ");
            }
            tax::EXPRESSION_STATEMENT => {
                self.render(cs[0]);
                self.push(";");
            }
            tax::VARIABLE_DECLARATION_STATEMENT => {
                self.render_mods_then(&cs, |p, rest| {
                    p.render(rest[0]);
                    p.push(" ");
                    p.join(&rest[1..], ", ");
                    p.push(";");
                });
            }
            tax::VARIABLE_DECLARATION_FRAGMENT => {
                self.render(cs[0]);
                if cs.len() > 1 {
                    self.push(" = ");
                    self.render(cs[1]);
                }
            }
            tax::RETURN_STATEMENT => {
                self.push("return");
                if let Some(&e) = cs.first() {
                    self.push(" ");
                    self.render(e);
                }
                self.push(";");
            }
            tax::THROW_STATEMENT => {
                self.push("throw ");
                self.render(cs[0]);
                self.push(";");
            }
            tax::BREAK_STATEMENT | tax::CONTINUE_STATEMENT => {
                self.push(if label == tax::BREAK_STATEMENT { "break" } else { "continue" });
                if let Some(&l) = cs.first() {
                    self.push(" ");
                    self.render(l);
                }
                self.push(";");
            }
            tax::IF_STATEMENT => {
                self.push("if (");
                self.render(cs[0]);
                self.push(")");
            }
            tax::WHILE_STATEMENT => {
                self.push("while (");
                self.render(cs[0]);
                self.push(")");
            }
            tax::DO_STATEMENT => {
                self.push("do while (");
                self.render(cs[1]);
                self.push(")");
            }
            tax::FOR_STATEMENT => {
                let body = *cs.last().expect("for has a body");
                let header = &cs[..cs.len() - 1];
                let cond: Vec<NodeId> = header
                    .iter()
                    .copied()
                    .filter(|&c| t.has_flag(c, flags::FOR_CONDITION))
                    .collect();
                let upds: Vec<NodeId> = header
                    .iter()
                    .copied()
                    .filter(|&c| t.has_flag(c, flags::FOR_UPDATE))
                    .collect();
                let inits: Vec<NodeId> = header
                    .iter()
                    .copied()
                    .filter(|&c| {
                        !t.has_flag(c, flags::FOR_CONDITION) && !t.has_flag(c, flags::FOR_UPDATE)
                    })
                    .collect();
                self.push("for (");
                if inits.first().is_some_and(|&c| tax::is_type_label(t.label(c))) {
                    self.render(inits[0]);
                    self.push(" ");
                    self.join(&inits[1..], ", ");
                } else {
                    self.join(&inits, ", ");
                }
                self.push("; ");
                self.join(&cond, ", ");
                self.push("; ");
                self.join(&upds, ", ");
                self.push(")");
                let _ = body;
            }
            tax::ENHANCED_FOR_STATEMENT => {
                self.push("for (");
                self.render(cs[0]);
                self.push(" : ");
                self.render(cs[1]);
                self.push(")");
            }
            tax::SWITCH_STATEMENT => {
                self.push("switch (");
                self.render(cs[0]);
                self.push(")");
            }
            tax::SWITCH_CASE => {
                if let Some(&e) = cs.first() {
                    self.push("case ");
                    self.render(e);
                    self.push(":");
                } else {
                    self.push("default:");
                }
            }
            tax::TRY_STATEMENT => {
                self.push("try");
            }
            tax::CATCH_CLAUSE => {
                self.push("catch (");
                self.render(cs[0]);
                self.push(")");
            }
            tax::SYNCHRONIZED_STATEMENT => {
                self.push("synchronized (");
                self.render(cs[0]);
                self.push(")");
            }
            tax::LABELED_STATEMENT => {
                self.render(cs[0]);
                self.push(":");
            }
            tax::BLOCK => {
                self.push("{");
            }
            tax::SINGLE_VARIABLE_DECLARATION => {
                self.render_mods_then(&cs, |p, rest| {
                    p.render(rest[0]);
                    p.push(" ");
                    p.render(rest[1]);
                });
            }
            tax::METHOD_DECLARATION => {
                let rest = self.render_leading_mods(&cs);
                // rest: [return type?] name params... (throws types and body
                // are not part of the signature rendering).
                let name_at = rest
                    .iter()
                    .position(|&c| t.label(c) == tax::SIMPLE_NAME)
                    .expect("method has a name");
                if name_at > 0 {
                    self.render(rest[0]);
                    self.push(" ");
                }
                self.render(rest[name_at]);
                self.push("(");
                let params: Vec<NodeId> = rest[name_at + 1..]
                    .iter()
                    .copied()
                    .filter(|&c| t.label(c) == tax::SINGLE_VARIABLE_DECLARATION)
                    .collect();
                self.join(&params, ", ");
                self.push(")");
            }
            tax::FIELD_DECLARATION => {
                self.render_mods_then(&cs, |p, rest| {
                    p.render(rest[0]);
                    p.push(" ");
                    p.join(&rest[1..], ", ");
                    p.push(";");
                });
            }
            tax::TYPE_DECLARATION => {
                let rest = self.render_leading_mods(&cs);
                self.push(if t.has_flag(id, flags::INTERFACE) { "interface " } else { "class " });
                self.render(rest[0]);
            }
            tax::ENUM_DECLARATION => {
                let rest = self.render_leading_mods(&cs);
                self.push("enum ");
                self.render(rest[0]);
            }
            tax::ENUM_CONSTANT_DECLARATION => {
                self.render(cs[0]);
                if cs.len() > 1 {
                    self.push("(");
                    self.join(&cs[1..], ", ");
                    self.push(")");
                }
            }
            tax::INITIALIZER => {
                let rest = self.render_leading_mods(&cs);
                self.push("{");
                let _ = rest;
            }
            tax::IMPORT_DECLARATION => {
                self.push("import ");
                self.render(cs[0]);
                self.push(";");
            }
            tax::PACKAGE_DECLARATION => {
                self.push("package ");
                self.render(cs[0]);
                self.push(";");
            }
            tax::COMPILATION_UNIT => {
                self.join(&cs, " ");
            }
            tax::JAVADOC => {}
            _ => {
                // Unknown labels (relabeled baseline trees, interchange
                // input): value if present, else children joined.
                if !t.value(id).is_empty() {
                    let v = t.value(id).to_string();
                    self.push(&v);
                } else {
                    self.join(&cs, " ");
                }
            }
        }
    }

    /// Render `Modifier`/`Javadoc` prefix children (modifiers separated by
    /// spaces), then hand the remaining children to `rest_fn`.
    fn render_mods_then(&mut self, cs: &[NodeId], rest_fn: impl FnOnce(&mut Self, &[NodeId])) {
        let rest = self.render_leading_mods(cs);
        rest_fn(self, &rest);
    }

    fn render_leading_mods(&mut self, cs: &[NodeId]) -> Vec<NodeId> {
        let mut i = 0;
        while i < cs.len()
            && matches!(self.tree.label(cs[i]), tax::MODIFIER | tax::JAVADOC)
        {
            if self.tree.label(cs[i]) == tax::MODIFIER {
                self.render(cs[i]);
                self.push(" ");
            }
            i += 1;
        }
        cs[i..].to_vec()
    }
}

/// Index of the name child of an invocation: the flagged slot when present,
/// otherwise a structural fallback for trees that did not come from the
/// frontend.
pub(crate) fn invocation_name_index(tree: &AstTree, id: NodeId) -> usize {
    let cs = tree.children(id);
    if let Some(i) = cs.iter().position(|&c| tree.has_flag(c, flags::NAME_SLOT)) {
        return i;
    }
    if cs.len() >= 2 && tree.label(cs[0]) != tax::SIMPLE_NAME {
        1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::node::{Span, TreeBuilder};

    #[test]
    fn infix_renders_with_single_spaces() {
        let mut b = TreeBuilder::new();
        let a = b.leaf(tax::SIMPLE_NAME, "a", Span::new(0, 1));
        let op = b.leaf(tax::INFIX_OPERATOR, "+", Span::new(4, 5));
        let c = b.leaf(tax::SIMPLE_NAME, "b", Span::new(8, 9));
        let e = b.node(tax::INFIX_EXPRESSION, "", Span::new(0, 9), vec![a, op, c]);
        let root = b.node(tax::EXPRESSION_STATEMENT, "", Span::new(0, 10), vec![e]);
        let t = b.finish(root).unwrap();
        assert_eq!(pretty(&t, t.root()), "a + b;");
    }

    #[test]
    fn if_header_elides_body() {
        let mut b = TreeBuilder::new();
        let x = b.leaf(tax::SIMPLE_NAME, "x", Span::new(4, 5));
        let body = b.node(tax::BLOCK, "", Span::new(7, 9), vec![]);
        let iff = b.node(tax::IF_STATEMENT, "", Span::new(0, 9), vec![x, body]);
        let t = b.finish(iff).unwrap();
        assert_eq!(pretty(&t, t.root()), "if (x)");
    }

    #[test]
    fn invocation_with_receiver_uses_flagged_name() {
        let mut b = TreeBuilder::new();
        let recv = b.leaf(tax::SIMPLE_NAME, "a", Span::new(0, 1));
        let name = b.node_with_flags(tax::SIMPLE_NAME, "foo", Span::new(2, 5), vec![], flags::NAME_SLOT);
        let arg = b.leaf(tax::SIMPLE_NAME, "b", Span::new(6, 7));
        let call = b.node(tax::METHOD_INVOCATION, "", Span::new(0, 8), vec![recv, name, arg]);
        let t = b.finish(call).unwrap();
        assert_eq!(pretty(&t, t.root()), "a.foo(b)");
    }

    #[test]
    fn offsets_locate_children_within_parent_text() {
        let mut b = TreeBuilder::new();
        let a = b.leaf(tax::SIMPLE_NAME, "alpha", Span::new(0, 5));
        let op = b.leaf(tax::INFIX_OPERATOR, "*", Span::new(6, 7));
        let c = b.leaf(tax::NUMBER_LITERAL, "42", Span::new(8, 10));
        let e = b.node(tax::INFIX_EXPRESSION, "", Span::new(0, 10), vec![a, op, c]);
        let root = b.node(tax::RETURN_STATEMENT, "", Span::new(0, 11), vec![e]);
        let t = b.finish(root).unwrap();
        let (text, offsets) = pretty_with_offsets(&t, t.root());
        assert_eq!(text, "return alpha * 42;");
        for (id, off) in offsets {
            let sub = pretty(&t, id);
            assert_eq!(&text[off..off + sub.len()], sub, "node text embeds at its offset");
        }
    }
}
