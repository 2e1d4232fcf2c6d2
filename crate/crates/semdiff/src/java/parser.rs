//! Recursive-descent parser from tokens to taxonomy trees.
//!
//! Representation choices that differ from a full Java parser, all driven by
//! the closed taxonomy:
//!
//! - dotted type names parse to `SimpleType` over a `QualifiedName` chain
//!   (`QualifiedType` is reserved for interchange compatibility);
//! - classic `for` headers keep their parts as direct children in source
//!   order; the condition and updaters carry internal flags;
//! - on-demand imports end in a `SimpleName` child with value `*`;
//! - infix chains are left-nested binary `InfixExpression` nodes, each with
//!   an `InfixOperator` child;
//! - marker annotations become `Modifier` nodes with the `@Name` token.

use crate::java::lexer::{lex, CommentKind, Token, TokenKind};
use crate::taxonomy as tax;
use crate::tree::{flags, AstTree, NodeId, Span, TreeBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    /// Not lexically/syntactically well-formed for the subset grammar.
    Syntax,
    /// Recognized as valid Java that the subset deliberately excludes.
    Unsupported,
}

/// Parse failure at a byte offset.
#[derive(Debug, Clone)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub offset: usize,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.kind {
            DiagnosticKind::Syntax => "syntax error",
            DiagnosticKind::Unsupported => "unsupported construct",
        };
        write!(f, "{} at offset {}: {}", kind, self.offset, self.message)
    }
}

impl std::error::Error for Diagnostic {}

#[derive(Debug)]
pub struct ParsedUnit {
    pub tree: AstTree,
    pub comments: Vec<Span>,
}

/// Parse one compilation unit. Deterministic: equal input bytes produce
/// identical trees (labels, values, spans, flags).
pub fn parse_java(source: &str) -> Result<ParsedUnit, Diagnostic> {
    let lexed = lex(source).map_err(|e| Diagnostic {
        kind: if e.unsupported {
            DiagnosticKind::Unsupported
        } else {
            DiagnosticKind::Syntax
        },
        offset: e.offset,
        message: e.message,
    })?;
    let javadocs: Vec<Span> = lexed
        .comments
        .iter()
        .filter(|(_, k)| *k == CommentKind::Javadoc)
        .map(|(s, _)| *s)
        .collect();
    let comments: Vec<Span> = lexed.comments.iter().map(|(s, _)| *s).collect();
    let mut p = Parser {
        src: source,
        toks: lexed.tokens,
        pos: 0,
        b: TreeBuilder::new(),
        javadocs,
    };
    let root = p.compilation_unit()?;
    let tree = p.b.finish(root).map_err(|e| Diagnostic {
        kind: DiagnosticKind::Syntax,
        offset: 0,
        message: format!("inconsistent spans: {e}"),
    })?;
    Ok(ParsedUnit { tree, comments })
}

type PResult<T> = Result<T, Diagnostic>;

struct Parser<'s> {
    src: &'s str,
    toks: Vec<Token>,
    pos: usize,
    b: TreeBuilder,
    javadocs: Vec<Span>,
}

const PRIMITIVES: &[&str] = &["boolean", "byte", "char", "double", "float", "int", "long", "short", "void"];
const MODIFIER_KEYWORDS: &[&str] = &[
    "abstract", "final", "native", "private", "protected", "public", "static", "strictfp",
    "synchronized", "transient", "volatile",
];

impl<'s> Parser<'s> {
    fn cur(&self) -> Token {
        self.toks[self.pos]
    }

    fn peek(&self, n: usize) -> Token {
        let i = (self.pos + n).min(self.toks.len() - 1);
        self.toks[i]
    }

    fn text(&self, t: Token) -> &'s str {
        t.text(self.src)
    }

    fn cur_text(&self) -> &'s str {
        self.text(self.cur())
    }

    fn bump(&mut self) -> Token {
        let t = self.cur();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn at_sym(&self, s: &str) -> bool {
        self.cur().kind == TokenKind::Sym && self.cur_text() == s
    }

    fn at_kw(&self, s: &str) -> bool {
        self.cur().kind == TokenKind::Keyword && self.cur_text() == s
    }

    fn at_ident(&self) -> bool {
        self.cur().kind == TokenKind::Ident
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, s: &str) -> bool {
        if self.at_kw(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn syntax<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(Diagnostic {
            kind: DiagnosticKind::Syntax,
            offset: self.cur().start,
            message: message.into(),
        })
    }

    fn unsupported<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(Diagnostic {
            kind: DiagnosticKind::Unsupported,
            offset: self.cur().start,
            message: message.into(),
        })
    }

    fn expect_sym(&mut self, s: &str) -> PResult<Token> {
        if self.at_sym(s) {
            Ok(self.bump())
        } else {
            self.syntax(format!("expected `{s}`, found `{}`", self.cur_text()))
        }
    }

    fn expect_kw(&mut self, s: &str) -> PResult<Token> {
        if self.at_kw(s) {
            Ok(self.bump())
        } else {
            self.syntax(format!("expected `{s}`, found `{}`", self.cur_text()))
        }
    }

    fn expect_ident(&mut self) -> PResult<Token> {
        if self.at_ident() {
            Ok(self.bump())
        } else {
            self.syntax(format!("expected identifier, found `{}`", self.cur_text()))
        }
    }

    /// Tokens `a` and `b` touch with no whitespace between them.
    fn adjacent(&self, a: Token, b: Token) -> bool {
        a.end == b.start
    }

    fn end_of(&self, id: NodeId) -> usize {
        self.b.span_of(id).end
    }

    fn start_of(&self, id: NodeId) -> usize {
        self.b.span_of(id).start
    }

    /// A javadoc comment immediately above the token at `self.pos`, with no
    /// token in between.
    fn pending_javadoc(&mut self) -> Option<NodeId> {
        let decl_start = self.cur().start;
        let prev_end = if self.pos == 0 { 0 } else { self.toks[self.pos - 1].end };
        let jd = self
            .javadocs
            .iter()
            .find(|s| s.start >= prev_end && s.end <= decl_start)
            .copied()?;
        Some(self.b.leaf(tax::JAVADOC, "", jd))
    }

    // ------------------------------------------------------------------
    // Compilation unit and declarations

    fn compilation_unit(&mut self) -> PResult<NodeId> {
        let mut children = Vec::new();
        if self.at_kw("package") {
            let start = self.bump().start;
            let name = self.qualified_name(false)?;
            let end = self.expect_sym(";")?.end;
            children.push(self.b.node(tax::PACKAGE_DECLARATION, "", Span::new(start, end), vec![name]));
        }
        while self.at_kw("import") {
            let start = self.bump().start;
            if self.at_kw("static") {
                return self.unsupported("static imports");
            }
            let name = self.qualified_name(true)?;
            let end = self.expect_sym(";")?.end;
            children.push(self.b.node(tax::IMPORT_DECLARATION, "", Span::new(start, end), vec![name]));
        }
        while self.cur().kind != TokenKind::Eof {
            if self.eat_sym(";") {
                continue;
            }
            children.push(self.type_declaration()?);
        }
        Ok(self
            .b
            .node(tax::COMPILATION_UNIT, "", Span::new(0, self.src.len()), children))
    }

    /// `a.b.c` as left-nested QualifiedName; with `allow_star`, a final
    /// `.*` adds a SimpleName `*` segment.
    fn qualified_name(&mut self, allow_star: bool) -> PResult<NodeId> {
        let first = self.expect_ident()?;
        let mut node = self.b.leaf(tax::SIMPLE_NAME, self.text(first), first.span());
        while self.at_sym(".") {
            if allow_star && self.peek(1).kind == TokenKind::Sym && self.text(self.peek(1)) == "*" {
                self.bump();
                let star = self.bump();
                let star_node = self.b.leaf(tax::SIMPLE_NAME, "*", star.span());
                let span = Span::new(self.start_of(node), star.end);
                return Ok(self.b.node(tax::QUALIFIED_NAME, "", span, vec![node, star_node]));
            }
            if self.peek(1).kind != TokenKind::Ident {
                break;
            }
            self.bump();
            let seg = self.bump();
            let seg_node = self.b.leaf(tax::SIMPLE_NAME, self.text(seg), seg.span());
            let span = Span::new(self.start_of(node), seg.end);
            node = self.b.node(tax::QUALIFIED_NAME, "", span, vec![node, seg_node]);
        }
        Ok(node)
    }

    fn modifiers(&mut self) -> PResult<Vec<NodeId>> {
        let mut out = Vec::new();
        loop {
            if self.cur().kind == TokenKind::Keyword && MODIFIER_KEYWORDS.contains(&self.cur_text()) {
                // `synchronized (` begins a statement, not a modifier.
                if self.cur_text() == "synchronized" && self.text(self.peek(1)) == "(" {
                    break;
                }
                let t = self.bump();
                out.push(self.b.leaf(tax::MODIFIER, self.text(t), t.span()));
            } else if self.at_sym("@") {
                let at = self.bump();
                let name = self.expect_ident()?;
                if self.at_sym("(") {
                    return self.unsupported("annotations with members (only marker annotations are accepted)");
                }
                let text = format!("@{}", self.text(name));
                out.push(self.b.leaf(tax::MODIFIER, text, Span::new(at.start, name.end)));
            } else {
                break;
            }
        }
        Ok(out)
    }

    fn type_declaration(&mut self) -> PResult<NodeId> {
        let javadoc = self.pending_javadoc();
        let start = javadoc.map(|j| self.start_of(j)).unwrap_or(self.cur().start);
        let mut children: Vec<NodeId> = javadoc.into_iter().collect();
        children.extend(self.modifiers()?);
        if self.at_ident() && matches!(self.cur_text(), "record" | "sealed" | "permits" | "module") {
            return self.unsupported(format!("`{}` declarations", self.cur_text()));
        }
        if self.at_kw("class") || self.at_kw("interface") {
            let is_interface = self.cur_text() == "interface";
            self.bump();
            let name = self.expect_ident()?;
            children.push(self.b.leaf(tax::SIMPLE_NAME, self.text(name), name.span()));
            if self.at_sym("<") {
                return self.unsupported("type parameter declarations");
            }
            if self.eat_kw("extends") {
                let t = self.parse_type()?;
                if !is_interface {
                    self.b.add_flags(t, flags::SUPERCLASS);
                }
                children.push(t);
                while !is_interface && self.at_sym(",") {
                    return self.syntax("a class extends a single type");
                }
                while is_interface && self.eat_sym(",") {
                    children.push(self.parse_type()?);
                }
            }
            if self.eat_kw("implements") {
                children.push(self.parse_type()?);
                while self.eat_sym(",") {
                    children.push(self.parse_type()?);
                }
            }
            self.expect_sym("{")?;
            let type_name = self.text(name).to_string();
            while !self.at_sym("}") {
                if self.eat_sym(";") {
                    continue;
                }
                children.push(self.class_member(&type_name)?);
            }
            let end = self.expect_sym("}")?.end;
            let node = self.b.node(tax::TYPE_DECLARATION, "", Span::new(start, end), children);
            if is_interface {
                self.b.add_flags(node, flags::INTERFACE);
            }
            Ok(node)
        } else if self.at_kw("enum") {
            self.bump();
            let name = self.expect_ident()?;
            children.push(self.b.leaf(tax::SIMPLE_NAME, self.text(name), name.span()));
            if self.eat_kw("implements") {
                children.push(self.parse_type()?);
                while self.eat_sym(",") {
                    children.push(self.parse_type()?);
                }
            }
            self.expect_sym("{")?;
            while self.at_ident() {
                let cname = self.bump();
                let cname_node = self.b.leaf(tax::SIMPLE_NAME, self.text(cname), cname.span());
                let mut cchildren = vec![cname_node];
                let mut cend = cname.end;
                if self.at_sym("(") {
                    self.bump();
                    if !self.at_sym(")") {
                        cchildren.push(self.expression()?);
                        while self.eat_sym(",") {
                            cchildren.push(self.expression()?);
                        }
                    }
                    cend = self.expect_sym(")")?.end;
                }
                if self.at_sym("{") {
                    return self.unsupported("enum constants with bodies");
                }
                children.push(self.b.node(
                    tax::ENUM_CONSTANT_DECLARATION,
                    "",
                    Span::new(cname.start, cend),
                    cchildren,
                ));
                if !self.eat_sym(",") {
                    break;
                }
            }
            if self.eat_sym(";") {
                let type_name = self.text(name).to_string();
                while !self.at_sym("}") {
                    if self.eat_sym(";") {
                        continue;
                    }
                    children.push(self.class_member(&type_name)?);
                }
            }
            let end = self.expect_sym("}")?.end;
            Ok(self.b.node(tax::ENUM_DECLARATION, "", Span::new(start, end), children))
        } else {
            self.syntax(format!("expected type declaration, found `{}`", self.cur_text()))
        }
    }

    fn class_member(&mut self, enclosing: &str) -> PResult<NodeId> {
        let javadoc = self.pending_javadoc();
        let start = javadoc.map(|j| self.start_of(j)).unwrap_or(self.cur().start);
        let mut lead: Vec<NodeId> = javadoc.into_iter().collect();
        lead.extend(self.modifiers()?);
        if self.at_sym("{") {
            let block = self.block()?;
            let end = self.end_of(block);
            lead.push(block);
            return Ok(self.b.node(tax::INITIALIZER, "", Span::new(start, end), lead));
        }
        if self.at_kw("class") || self.at_kw("interface") || self.at_kw("enum") {
            // Nested types restart the declaration rule; fold the modifiers
            // we already consumed back in by re-parsing from their start.
            return self.unsupported("nested type declarations");
        }
        // Constructor: identifier immediately followed by `(`.
        if self.at_ident() && self.text(self.peek(1)) == "(" && self.cur_text() == enclosing {
            let name = self.bump();
            let name_node = self.b.leaf(tax::SIMPLE_NAME, self.text(name), name.span());
            lead.push(name_node);
            return self.method_rest(start, lead, true);
        }
        let ty = self.parse_type()?;
        lead.push(ty);
        let name = self.expect_ident()?;
        if self.at_sym("(") {
            let name_node = self.b.leaf(tax::SIMPLE_NAME, self.text(name), name.span());
            lead.push(name_node);
            return self.method_rest(start, lead, false);
        }
        // Field declaration.
        let mut frag = {
            let name_node = self.b.leaf(tax::SIMPLE_NAME, self.text(name), name.span());
            self.fragment_rest(name, name_node)?
        };
        let mut children = lead;
        children.push(frag);
        while self.eat_sym(",") {
            let n = self.expect_ident()?;
            let n_node = self.b.leaf(tax::SIMPLE_NAME, self.text(n), n.span());
            frag = self.fragment_rest(n, n_node)?;
            children.push(frag);
        }
        let end = self.expect_sym(";")?.end;
        Ok(self.b.node(tax::FIELD_DECLARATION, "", Span::new(start, end), children))
    }

    /// `name [= initializer]` where the initializer is an expression or an
    /// array initializer.
    fn fragment_rest(&mut self, name_tok: Token, name_node: NodeId) -> PResult<NodeId> {
        if self.eat_sym("=") {
            let init = if self.at_sym("{") {
                self.array_initializer()?
            } else {
                self.expression()?
            };
            let span = Span::new(name_tok.start, self.end_of(init));
            Ok(self
                .b
                .node(tax::VARIABLE_DECLARATION_FRAGMENT, "", span, vec![name_node, init]))
        } else {
            Ok(self
                .b
                .node(tax::VARIABLE_DECLARATION_FRAGMENT, "", name_tok.span(), vec![name_node]))
        }
    }

    /// Parameters, optional throws clause, and body (or `;`) of a method or
    /// constructor whose children so far are in `lead`.
    fn method_rest(&mut self, start: usize, mut lead: Vec<NodeId>, ctor: bool) -> PResult<NodeId> {
        self.expect_sym("(")?;
        if !self.at_sym(")") {
            lead.push(self.parameter()?);
            while self.eat_sym(",") {
                lead.push(self.parameter()?);
            }
        }
        self.expect_sym(")")?;
        if self.eat_kw("throws") {
            lead.push(self.parse_type()?);
            while self.eat_sym(",") {
                lead.push(self.parse_type()?);
            }
        }
        let end = if self.at_sym("{") {
            let body = self.block()?;
            let e = self.end_of(body);
            lead.push(body);
            e
        } else {
            self.expect_sym(";")?.end
        };
        let node = self.b.node(tax::METHOD_DECLARATION, "", Span::new(start, end), lead);
        if ctor {
            self.b.add_flags(node, flags::CONSTRUCTOR);
        }
        Ok(node)
    }

    fn parameter(&mut self) -> PResult<NodeId> {
        let start = self.cur().start;
        let mut children = self.modifiers()?;
        let ty = self.parse_type()?;
        if self.at_sym("...") {
            return self.unsupported("varargs parameters");
        }
        children.push(ty);
        let name = self.expect_ident()?;
        children.push(self.b.leaf(tax::SIMPLE_NAME, self.text(name), name.span()));
        Ok(self
            .b
            .node(tax::SINGLE_VARIABLE_DECLARATION, "", Span::new(start, name.end), children))
    }

    // ------------------------------------------------------------------
    // Types

    fn parse_type(&mut self) -> PResult<NodeId> {
        let mut node = if self.cur().kind == TokenKind::Keyword && PRIMITIVES.contains(&self.cur_text()) {
            let t = self.bump();
            self.b.leaf(tax::PRIMITIVE_TYPE, self.text(t), t.span())
        } else if self.at_ident() {
            let name = self.qualified_name(false)?;
            let span = self.b.span_of(name);
            self.b.node(tax::SIMPLE_TYPE, "", span, vec![name])
        } else {
            return self.syntax(format!("expected type, found `{}`", self.cur_text()));
        };
        if self.at_sym("<") {
            self.bump();
            let mut args = vec![node];
            if self.at_sym("?") {
                return self.unsupported("wildcard type arguments");
            }
            args.push(self.parse_type()?);
            while self.eat_sym(",") {
                args.push(self.parse_type()?);
            }
            let close = self.expect_sym(">")?;
            let span = Span::new(self.start_of(args[0]), close.end);
            node = self.b.node(tax::PARAMETERIZED_TYPE, "", span, args);
        }
        while self.at_sym("[") && self.text(self.peek(1)) == "]" {
            self.bump();
            let close = self.bump();
            let span = Span::new(self.start_of(node), close.end);
            node = self.b.node(tax::ARRAY_TYPE, "", span, vec![node]);
        }
        Ok(node)
    }

    // ------------------------------------------------------------------
    // Statements

    fn block(&mut self) -> PResult<NodeId> {
        let open = self.expect_sym("{")?;
        let mut children = Vec::new();
        while !self.at_sym("}") {
            if self.cur().kind == TokenKind::Eof {
                return self.syntax("unterminated block");
            }
            children.push(self.statement()?);
        }
        let close = self.expect_sym("}")?;
        Ok(self.b.node(tax::BLOCK, "", Span::new(open.start, close.end), children))
    }

    fn statement(&mut self) -> PResult<NodeId> {
        if self.at_sym("{") {
            return self.block();
        }
        if self.at_kw("if") {
            let start = self.bump().start;
            self.expect_sym("(")?;
            let cond = self.expression()?;
            self.expect_sym(")")?;
            let then = self.statement()?;
            let mut children = vec![cond, then];
            let mut end = self.end_of(then);
            if self.eat_kw("else") {
                let els = self.statement()?;
                end = self.end_of(els);
                children.push(els);
            }
            return Ok(self.b.node(tax::IF_STATEMENT, "", Span::new(start, end), children));
        }
        if self.at_kw("while") {
            let start = self.bump().start;
            self.expect_sym("(")?;
            let cond = self.expression()?;
            self.expect_sym(")")?;
            let body = self.statement()?;
            let end = self.end_of(body);
            return Ok(self
                .b
                .node(tax::WHILE_STATEMENT, "", Span::new(start, end), vec![cond, body]));
        }
        if self.at_kw("do") {
            let start = self.bump().start;
            let body = self.statement()?;
            self.expect_kw("while")?;
            self.expect_sym("(")?;
            let cond = self.expression()?;
            self.expect_sym(")")?;
            let end = self.expect_sym(";")?.end;
            return Ok(self
                .b
                .node(tax::DO_STATEMENT, "", Span::new(start, end), vec![body, cond]));
        }
        if self.at_kw("for") {
            return self.for_statement();
        }
        if self.at_kw("switch") {
            return self.switch_statement();
        }
        if self.at_kw("try") {
            return self.try_statement();
        }
        if self.at_kw("synchronized") {
            let start = self.bump().start;
            self.expect_sym("(")?;
            let lock = self.expression()?;
            self.expect_sym(")")?;
            let body = self.block()?;
            let end = self.end_of(body);
            return Ok(self.b.node(
                tax::SYNCHRONIZED_STATEMENT,
                "",
                Span::new(start, end),
                vec![lock, body],
            ));
        }
        if self.at_kw("return") {
            let start = self.bump().start;
            let mut children = Vec::new();
            if !self.at_sym(";") {
                children.push(self.expression()?);
            }
            let end = self.expect_sym(";")?.end;
            return Ok(self.b.node(tax::RETURN_STATEMENT, "", Span::new(start, end), children));
        }
        if self.at_kw("throw") {
            let start = self.bump().start;
            let e = self.expression()?;
            let end = self.expect_sym(";")?.end;
            return Ok(self.b.node(tax::THROW_STATEMENT, "", Span::new(start, end), vec![e]));
        }
        if self.at_kw("break") || self.at_kw("continue") {
            let label = if self.at_kw("break") {
                tax::BREAK_STATEMENT
            } else {
                tax::CONTINUE_STATEMENT
            };
            let start = self.bump().start;
            let mut children = Vec::new();
            if self.at_ident() {
                let l = self.bump();
                children.push(self.b.leaf(tax::SIMPLE_NAME, self.text(l), l.span()));
            }
            let end = self.expect_sym(";")?.end;
            return Ok(self.b.node(label, "", Span::new(start, end), children));
        }
        if self.at_kw("assert") {
            return self.unsupported("assert statements");
        }
        // Labeled statement: identifier directly followed by `:`.
        if self.at_ident() && self.text(self.peek(1)) == ":" {
            let l = self.bump();
            let label_node = self.b.leaf(tax::SIMPLE_NAME, self.text(l), l.span());
            self.bump();
            let body = self.statement()?;
            let end = self.end_of(body);
            return Ok(self.b.node(
                tax::LABELED_STATEMENT,
                "",
                Span::new(l.start, end),
                vec![label_node, body],
            ));
        }
        // Local variable declaration, or an expression statement.
        if let Some(decl) = self.try_local_declaration()? {
            return Ok(decl);
        }
        let start = self.cur().start;
        let e = self.expression()?;
        let end = self.expect_sym(";")?.end;
        Ok(self.b.node(tax::EXPRESSION_STATEMENT, "", Span::new(start, end), vec![e]))
    }

    /// Speculative parse of `modifiers type name (= init)? (, ...)* ;`.
    /// Backtracks and returns None when the lookahead does not commit to a
    /// declaration. Abandoned builder nodes are dropped at `finish`.
    fn try_local_declaration(&mut self) -> PResult<Option<NodeId>> {
        let looks_like_decl = self.at_kw("final")
            || (self.cur().kind == TokenKind::Keyword && PRIMITIVES.contains(&self.cur_text()))
            || self.at_ident();
        if !looks_like_decl {
            return Ok(None);
        }
        let save = self.pos;
        let start = self.cur().start;
        let mut children = Vec::new();
        while self.at_kw("final") {
            let t = self.bump();
            children.push(self.b.leaf(tax::MODIFIER, self.text(t), t.span()));
        }
        let ty = match self.parse_type() {
            Ok(t) => t,
            Err(_) => {
                self.pos = save;
                return Ok(None);
            }
        };
        if !self.at_ident() {
            self.pos = save;
            return Ok(None);
        }
        let name = self.bump();
        if !(self.at_sym("=") || self.at_sym(",") || self.at_sym(";")) {
            self.pos = save;
            return Ok(None);
        }
        children.push(ty);
        let name_node = self.b.leaf(tax::SIMPLE_NAME, self.text(name), name.span());
        children.push(self.fragment_rest(name, name_node)?);
        while self.eat_sym(",") {
            let n = self.expect_ident()?;
            let n_node = self.b.leaf(tax::SIMPLE_NAME, self.text(n), n.span());
            children.push(self.fragment_rest(n, n_node)?);
        }
        let end = self.expect_sym(";")?.end;
        Ok(Some(self.b.node(
            tax::VARIABLE_DECLARATION_STATEMENT,
            "",
            Span::new(start, end),
            children,
        )))
    }

    fn for_statement(&mut self) -> PResult<NodeId> {
        let start = self.expect_kw("for")?.start;
        self.expect_sym("(")?;
        // Enhanced form: `modifiers type name :`.
        let save = self.pos;
        if let Ok(param) = self.parameter() {
            if self.at_sym(":") {
                self.bump();
                let iterable = self.expression()?;
                self.expect_sym(")")?;
                let body = self.statement()?;
                let end = self.end_of(body);
                return Ok(self.b.node(
                    tax::ENHANCED_FOR_STATEMENT,
                    "",
                    Span::new(start, end),
                    vec![param, iterable, body],
                ));
            }
        }
        self.pos = save;
        let mut children = Vec::new();
        if !self.at_sym(";") {
            // Declaration initializer or expression list.
            let dsave = self.pos;
            let mut done = false;
            if self.at_kw("final") || self.at_ident() || self.cur().kind == TokenKind::Keyword {
                if let Ok(ty) = self.parse_type() {
                    if self.at_ident() {
                        let name = self.bump();
                        if self.at_sym("=") || self.at_sym(",") || self.at_sym(";") {
                            children.push(ty);
                            let name_node = self.b.leaf(tax::SIMPLE_NAME, self.text(name), name.span());
                            children.push(self.fragment_rest(name, name_node)?);
                            while self.eat_sym(",") {
                                let n = self.expect_ident()?;
                                let n_node = self.b.leaf(tax::SIMPLE_NAME, self.text(n), n.span());
                                children.push(self.fragment_rest(n, n_node)?);
                            }
                            done = true;
                        }
                    }
                }
            }
            if !done {
                self.pos = dsave;
                children.push(self.expression()?);
                while self.eat_sym(",") {
                    children.push(self.expression()?);
                }
            }
        }
        self.expect_sym(";")?;
        if !self.at_sym(";") {
            let cond = self.expression()?;
            self.b.add_flags(cond, flags::FOR_CONDITION);
            children.push(cond);
        }
        self.expect_sym(";")?;
        if !self.at_sym(")") {
            let u = self.expression()?;
            self.b.add_flags(u, flags::FOR_UPDATE);
            children.push(u);
            while self.eat_sym(",") {
                let u = self.expression()?;
                self.b.add_flags(u, flags::FOR_UPDATE);
                children.push(u);
            }
        }
        self.expect_sym(")")?;
        let body = self.statement()?;
        let end = self.end_of(body);
        children.push(body);
        Ok(self.b.node(tax::FOR_STATEMENT, "", Span::new(start, end), children))
    }

    fn switch_statement(&mut self) -> PResult<NodeId> {
        let start = self.expect_kw("switch")?.start;
        self.expect_sym("(")?;
        let scrutinee = self.expression()?;
        self.expect_sym(")")?;
        self.expect_sym("{")?;
        let mut children = vec![scrutinee];
        while !self.at_sym("}") {
            if self.at_kw("case") {
                let cstart = self.bump().start;
                if self.text(self.peek(1)) == "->" {
                    return self.unsupported("arrow switch cases");
                }
                let e = self.expression()?;
                if self.at_sym("->") {
                    return self.unsupported("arrow switch cases");
                }
                let cend = self.expect_sym(":")?.end;
                children.push(self.b.node(tax::SWITCH_CASE, "", Span::new(cstart, cend), vec![e]));
            } else if self.at_kw("default") {
                let cstart = self.bump().start;
                if self.at_sym("->") {
                    return self.unsupported("arrow switch cases");
                }
                let cend = self.expect_sym(":")?.end;
                children.push(self.b.node(tax::SWITCH_CASE, "", Span::new(cstart, cend), vec![]));
            } else {
                children.push(self.statement()?);
            }
        }
        let end = self.expect_sym("}")?.end;
        Ok(self.b.node(tax::SWITCH_STATEMENT, "", Span::new(start, end), children))
    }

    fn try_statement(&mut self) -> PResult<NodeId> {
        let start = self.expect_kw("try")?.start;
        if self.at_sym("(") {
            return self.unsupported("try-with-resources");
        }
        let body = self.block()?;
        let mut children = vec![body];
        let mut end = self.end_of(body);
        while self.at_kw("catch") {
            let cstart = self.bump().start;
            self.expect_sym("(")?;
            let pstart = self.cur().start;
            let mut pchildren = self.modifiers()?;
            let first_ty = self.parse_type()?;
            let ty = if self.at_sym("|") {
                let mut members = vec![first_ty];
                while self.eat_sym("|") {
                    members.push(self.parse_type()?);
                }
                let span = Span::new(self.start_of(members[0]), self.end_of(*members.last().unwrap()));
                self.b.node(tax::UNION_TYPE, "", span, members)
            } else {
                first_ty
            };
            pchildren.push(ty);
            let pname = self.expect_ident()?;
            pchildren.push(self.b.leaf(tax::SIMPLE_NAME, self.text(pname), pname.span()));
            let param = self.b.node(
                tax::SINGLE_VARIABLE_DECLARATION,
                "",
                Span::new(pstart, pname.end),
                pchildren,
            );
            self.expect_sym(")")?;
            let cbody = self.block()?;
            end = self.end_of(cbody);
            children.push(self.b.node(
                tax::CATCH_CLAUSE,
                "",
                Span::new(cstart, end),
                vec![param, cbody],
            ));
        }
        if self.eat_kw("finally") {
            let fbody = self.block()?;
            self.b.add_flags(fbody, flags::FINALLY);
            end = self.end_of(fbody);
            children.push(fbody);
        }
        Ok(self.b.node(tax::TRY_STATEMENT, "", Span::new(start, end), children))
    }

    fn array_initializer(&mut self) -> PResult<NodeId> {
        let open = self.expect_sym("{")?;
        let mut children = Vec::new();
        while !self.at_sym("}") {
            let item = if self.at_sym("{") {
                self.array_initializer()?
            } else {
                self.expression()?
            };
            children.push(item);
            if !self.eat_sym(",") {
                break;
            }
        }
        let close = self.expect_sym("}")?;
        Ok(self
            .b
            .node(tax::ARRAY_INITIALIZER, "", Span::new(open.start, close.end), children))
    }

    // ------------------------------------------------------------------
    // Expressions

    fn expression(&mut self) -> PResult<NodeId> {
        self.assignment()
    }

    fn assignment(&mut self) -> PResult<NodeId> {
        let lhs = self.conditional()?;
        let op = if self.cur().kind == TokenKind::Sym {
            match self.cur_text() {
                t @ ("=" | "+=" | "-=" | "*=" | "/=" | "%=" | "&=" | "|=" | "^=") => Some(t.to_string()),
                _ => None,
            }
        } else {
            None
        };
        if let Some(op) = op {
            self.bump();
            let rhs = self.assignment()?;
            let span = Span::new(self.start_of(lhs), self.end_of(rhs));
            return Ok(self.b.node(tax::ASSIGNMENT, op, span, vec![lhs, rhs]));
        }
        Ok(lhs)
    }

    fn conditional(&mut self) -> PResult<NodeId> {
        let c = self.binary(0)?;
        if self.at_sym("?") {
            self.bump();
            let t = self.expression()?;
            self.expect_sym(":")?;
            let f = self.conditional()?;
            let span = Span::new(self.start_of(c), self.end_of(f));
            return Ok(self
                .b
                .node(tax::CONDITIONAL_EXPRESSION, "", Span::new(span.start, span.end), vec![c, t, f]));
        }
        Ok(c)
    }

    /// Operator, precedence level, and token count, merging adjacent `<`/`>`
    /// tokens into shift/relational operators.
    fn peek_binary_op(&self) -> Option<(String, u8, usize)> {
        let t = self.cur();
        if self.at_kw("instanceof") {
            return Some(("instanceof".into(), 6, 1));
        }
        if t.kind != TokenKind::Sym {
            return None;
        }
        let t1 = self.peek(1);
        let t2 = self.peek(2);
        match self.text(t) {
            "||" => Some(("||".into(), 0, 1)),
            "&&" => Some(("&&".into(), 1, 1)),
            "|" => Some(("|".into(), 2, 1)),
            "^" => Some(("^".into(), 3, 1)),
            "&" => Some(("&".into(), 4, 1)),
            "==" => Some(("==".into(), 5, 1)),
            "!=" => Some(("!=".into(), 5, 1)),
            "<" => {
                if self.text(t1) == "<" && self.adjacent(t, t1) {
                    Some(("<<".into(), 7, 2))
                } else if self.text(t1) == "=" && self.adjacent(t, t1) {
                    Some(("<=".into(), 6, 2))
                } else {
                    Some(("<".into(), 6, 1))
                }
            }
            ">" => {
                if self.text(t1) == ">" && self.adjacent(t, t1) {
                    if self.text(t2) == ">" && self.adjacent(t1, t2) {
                        Some((">>>".into(), 7, 3))
                    } else {
                        Some((">>".into(), 7, 2))
                    }
                } else if self.text(t1) == "=" && self.adjacent(t, t1) {
                    Some((">=".into(), 6, 2))
                } else {
                    Some((">".into(), 6, 1))
                }
            }
            "+" => Some(("+".into(), 8, 1)),
            "-" => Some(("-".into(), 8, 1)),
            "*" => Some(("*".into(), 9, 1)),
            "/" => Some(("/".into(), 9, 1)),
            "%" => Some(("%".into(), 9, 1)),
            _ => None,
        }
    }

    fn binary(&mut self, min_level: u8) -> PResult<NodeId> {
        let mut lhs = self.unary()?;
        while let Some((op, level, ntoks)) = self.peek_binary_op() {
            if level < min_level {
                break;
            }
            let op_start = self.cur().start;
            let mut op_end = self.cur().end;
            for _ in 0..ntoks {
                op_end = self.bump().end;
            }
            if op == "instanceof" {
                let ty = self.parse_type()?;
                let span = Span::new(self.start_of(lhs), self.end_of(ty));
                lhs = self.b.node(tax::INSTANCEOF_EXPRESSION, "", span, vec![lhs, ty]);
                continue;
            }
            let rhs = self.binary(level + 1)?;
            let op_node = self.b.leaf(tax::INFIX_OPERATOR, op, Span::new(op_start, op_end));
            let span = Span::new(self.start_of(lhs), self.end_of(rhs));
            lhs = self
                .b
                .node(tax::INFIX_EXPRESSION, "", span, vec![lhs, op_node, rhs]);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<NodeId> {
        if self.cur().kind == TokenKind::Sym {
            let t = self.cur_text();
            if matches!(t, "+" | "-" | "!" | "~" | "++" | "--") {
                let op = self.bump();
                let operand = self.unary()?;
                let span = Span::new(op.start, self.end_of(operand));
                return Ok(self
                    .b
                    .node(tax::PREFIX_EXPRESSION, self.text(op), span, vec![operand]));
            }
            if t == "(" {
                if let Some(cast) = self.try_cast()? {
                    return Ok(cast);
                }
            }
        }
        self.postfix()
    }

    /// `(Type) unary` with Java's usual disambiguation: a parenthesized
    /// plain name counts as a cast only when the next token cannot continue
    /// an arithmetic expression.
    fn try_cast(&mut self) -> PResult<Option<NodeId>> {
        let save = self.pos;
        let open = self.bump();
        let ty = match self.parse_type() {
            Ok(t) => t,
            Err(_) => {
                self.pos = save;
                return Ok(None);
            }
        };
        if !self.at_sym(")") {
            self.pos = save;
            return Ok(None);
        }
        let unambiguous = {
            let l = self.b.label_of(ty);
            l == tax::PRIMITIVE_TYPE || l == tax::ARRAY_TYPE || l == tax::PARAMETERIZED_TYPE
        };
        self.bump();
        let next = self.cur();
        let next_text = self.text(next);
        let starts_cast_operand = match next.kind {
            TokenKind::Ident | TokenKind::Number | TokenKind::Str | TokenKind::Char => true,
            TokenKind::Keyword => matches!(next_text, "this" | "new" | "true" | "false" | "null" | "super"),
            TokenKind::Sym => {
                matches!(next_text, "(" | "!" | "~") || (unambiguous && matches!(next_text, "+" | "-"))
            }
            TokenKind::Eof => false,
        };
        if !starts_cast_operand {
            self.pos = save;
            return Ok(None);
        }
        let operand = self.unary()?;
        let span = Span::new(open.start, self.end_of(operand));
        Ok(Some(self.b.node(tax::CAST_EXPRESSION, "", span, vec![ty, operand])))
    }

    fn arguments(&mut self) -> PResult<(Vec<NodeId>, usize)> {
        self.expect_sym("(")?;
        let mut args = Vec::new();
        if !self.at_sym(")") {
            args.push(self.expression()?);
            while self.eat_sym(",") {
                args.push(self.expression()?);
            }
        }
        let end = self.expect_sym(")")?.end;
        Ok((args, end))
    }

    fn postfix(&mut self) -> PResult<NodeId> {
        let mut e = self.primary()?;
        loop {
            if self.at_sym(".") {
                if self.text(self.peek(1)) == "class" {
                    self.bump();
                    let cls = self.bump();
                    let base_label = self.b.label_of(e);
                    if base_label != tax::SIMPLE_NAME && base_label != tax::QUALIFIED_NAME {
                        return self.syntax("`.class` requires a type name");
                    }
                    let tspan = self.b.span_of(e);
                    let st = self.b.node(tax::SIMPLE_TYPE, "", tspan, vec![e]);
                    let span = Span::new(tspan.start, cls.end);
                    e = self.b.node(tax::TYPE_LITERAL, "", span, vec![st]);
                    continue;
                }
                if self.peek(1).kind != TokenKind::Ident {
                    if self.text(self.peek(1)) == "this" {
                        return self.unsupported("qualified this expressions");
                    }
                    return self.syntax("expected member name after `.`");
                }
                self.bump();
                let name = self.bump();
                if self.at_sym("(") {
                    let name_node =
                        self.b
                            .node_with_flags(tax::SIMPLE_NAME, self.text(name), name.span(), vec![], flags::NAME_SLOT);
                    let (args, end) = self.arguments()?;
                    let mut children = vec![e, name_node];
                    children.extend(args);
                    let span = Span::new(self.start_of(e), end);
                    e = self.b.node(tax::METHOD_INVOCATION, "", span, children);
                } else {
                    let name_node = self.b.leaf(tax::SIMPLE_NAME, self.text(name), name.span());
                    let base_label = self.b.label_of(e);
                    let label = if base_label == tax::SIMPLE_NAME || base_label == tax::QUALIFIED_NAME {
                        tax::QUALIFIED_NAME
                    } else {
                        tax::FIELD_ACCESS
                    };
                    let span = Span::new(self.start_of(e), name.end);
                    e = self.b.node(label, "", span, vec![e, name_node]);
                }
                continue;
            }
            if self.at_sym("[") {
                self.bump();
                let idx = self.expression()?;
                let close = self.expect_sym("]")?;
                let span = Span::new(self.start_of(e), close.end);
                e = self.b.node(tax::ARRAY_ACCESS, "", span, vec![e, idx]);
                continue;
            }
            if self.at_sym("++") || self.at_sym("--") {
                let op = self.bump();
                let span = Span::new(self.start_of(e), op.end);
                e = self.b.node(tax::POSTFIX_EXPRESSION, self.text(op), span, vec![e]);
                continue;
            }
            return Ok(e);
        }
    }

    /// Token index of the `)` matching an opening paren at `self.pos`,
    /// scanning nested parens only.
    fn matching_paren(&self) -> Option<usize> {
        let mut depth = 0usize;
        let mut i = self.pos;
        loop {
            let t = self.toks.get(i)?;
            if t.kind == TokenKind::Eof {
                return None;
            }
            match t.text(self.src) {
                "(" => depth += 1,
                ")" => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(i);
                    }
                }
                _ => {}
            }
            i += 1;
        }
    }

    fn primary(&mut self) -> PResult<NodeId> {
        let t = self.cur();
        match t.kind {
            TokenKind::Number => {
                self.bump();
                Ok(self.b.leaf(tax::NUMBER_LITERAL, self.text(t), t.span()))
            }
            TokenKind::Str => {
                self.bump();
                Ok(self.b.leaf(tax::STRING_LITERAL, self.text(t), t.span()))
            }
            TokenKind::Char => {
                self.bump();
                Ok(self.b.leaf(tax::CHARACTER_LITERAL, self.text(t), t.span()))
            }
            TokenKind::Keyword => match self.cur_text() {
                "true" | "false" => {
                    self.bump();
                    Ok(self.b.leaf(tax::BOOLEAN_LITERAL, self.text(t), t.span()))
                }
                "null" => {
                    self.bump();
                    Ok(self.b.leaf(tax::NULL_LITERAL, "null", t.span()))
                }
                "this" => {
                    self.bump();
                    if self.at_sym("(") {
                        return self.unsupported("alternate constructor invocations");
                    }
                    Ok(self.b.leaf(tax::THIS_EXPRESSION, "this", t.span()))
                }
                "super" => {
                    self.bump();
                    if self.at_sym("(") {
                        return self.unsupported("super constructor invocations");
                    }
                    self.expect_sym(".")?;
                    let name = self.expect_ident()?;
                    if !self.at_sym("(") {
                        return self.unsupported("super field accesses");
                    }
                    let name_node =
                        self.b
                            .node_with_flags(tax::SIMPLE_NAME, self.text(name), name.span(), vec![], flags::NAME_SLOT);
                    let (args, end) = self.arguments()?;
                    let mut children = vec![name_node];
                    children.extend(args);
                    Ok(self
                        .b
                        .node(tax::SUPER_METHOD_INVOCATION, "", Span::new(t.start, end), children))
                }
                "new" => self.creation(t),
                other => self.syntax(format!("unexpected keyword `{other}` in expression")),
            },
            TokenKind::Ident => {
                // Single-parameter lambda without parens.
                if self.text(self.peek(1)) == "->" {
                    let p = self.bump();
                    let param = self.b.leaf(tax::SIMPLE_NAME, self.text(p), p.span());
                    self.bump();
                    let body = if self.at_sym("{") { self.block()? } else { self.expression()? };
                    let span = Span::new(p.start, self.end_of(body));
                    return Ok(self.b.node(tax::LAMBDA_EXPRESSION, "", span, vec![param, body]));
                }
                if self.text(self.peek(1)) == "(" {
                    let name = self.bump();
                    let name_node =
                        self.b
                            .node_with_flags(tax::SIMPLE_NAME, self.text(name), name.span(), vec![], flags::NAME_SLOT);
                    let (args, end) = self.arguments()?;
                    let mut children = vec![name_node];
                    children.extend(args);
                    return Ok(self
                        .b
                        .node(tax::METHOD_INVOCATION, "", Span::new(name.start, end), children));
                }
                let name = self.bump();
                Ok(self.b.leaf(tax::SIMPLE_NAME, self.text(name), name.span()))
            }
            TokenKind::Sym if self.at_sym("(") => {
                // Lambda when the matching `)` is followed by `->`.
                if let Some(close) = self.matching_paren() {
                    if close + 1 < self.toks.len() && self.toks[close + 1].text(self.src) == "->" {
                        return self.lambda_with_parens();
                    }
                }
                let open = self.bump();
                let inner = self.expression()?;
                let close = self.expect_sym(")")?;
                Ok(self.b.node(
                    tax::PARENTHESIZED_EXPRESSION,
                    "",
                    Span::new(open.start, close.end),
                    vec![inner],
                ))
            }
            _ => self.syntax(format!("unexpected token `{}` in expression", self.cur_text())),
        }
    }

    fn lambda_with_parens(&mut self) -> PResult<NodeId> {
        let open = self.expect_sym("(")?;
        let mut params = Vec::new();
        let mut typed = false;
        if !self.at_sym(")") {
            loop {
                let save = self.pos;
                // Typed parameter attempt; plain identifier otherwise.
                if let Ok(p) = self.parameter() {
                    if self.at_sym(",") || self.at_sym(")") {
                        params.push(p);
                        typed = true;
                        if !self.eat_sym(",") {
                            break;
                        }
                        continue;
                    }
                }
                self.pos = save;
                let n = self.expect_ident()?;
                params.push(self.b.leaf(tax::SIMPLE_NAME, self.text(n), n.span()));
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        let _ = typed;
        self.expect_sym(")")?;
        self.expect_sym("->")?;
        let body = if self.at_sym("{") { self.block()? } else { self.expression()? };
        let span = Span::new(open.start, self.end_of(body));
        let mut children = params;
        children.push(body);
        Ok(self.b.node(tax::LAMBDA_EXPRESSION, "", span, children))
    }

    fn creation(&mut self, new_tok: Token) -> PResult<NodeId> {
        self.bump();
        // Component type: primitives or (possibly generic) names; array
        // suffix is handled by the creation forms below.
        let ty = if self.cur().kind == TokenKind::Keyword && PRIMITIVES.contains(&self.cur_text()) {
            let t = self.bump();
            self.b.leaf(tax::PRIMITIVE_TYPE, self.text(t), t.span())
        } else {
            let name = self.qualified_name(false)?;
            let span = self.b.span_of(name);
            let mut node = self.b.node(tax::SIMPLE_TYPE, "", span, vec![name]);
            if self.at_sym("<") {
                self.bump();
                let mut args = vec![node];
                // Diamond `<>`.
                if !self.at_sym(">") {
                    args.push(self.parse_type()?);
                    while self.eat_sym(",") {
                        args.push(self.parse_type()?);
                    }
                }
                let close = self.expect_sym(">")?;
                let tspan = Span::new(span.start, close.end);
                node = self.b.node(tax::PARAMETERIZED_TYPE, "", tspan, args);
            }
            node
        };
        if self.at_sym("(") {
            let (args, end) = self.arguments()?;
            if self.at_sym("{") {
                return self.unsupported("anonymous class bodies");
            }
            let mut children = vec![ty];
            children.extend(args);
            return Ok(self.b.node(
                tax::CLASS_INSTANCE_CREATION,
                "",
                Span::new(new_tok.start, end),
                children,
            ));
        }
        if self.at_sym("[") {
            self.bump();
            if self.eat_sym("]") {
                let init = self.array_initializer()?;
                let span = Span::new(new_tok.start, self.end_of(init));
                return Ok(self.b.node(tax::ARRAY_CREATION, "", span, vec![ty, init]));
            }
            let dim = self.expression()?;
            let close = self.expect_sym("]")?;
            if self.at_sym("[") {
                return self.unsupported("multi-dimensional array creation");
            }
            return Ok(self.b.node(
                tax::ARRAY_CREATION,
                "",
                Span::new(new_tok.start, close.end),
                vec![ty, dim],
            ));
        }
        self.syntax("expected `(` or `[` after `new T`")
    }
}
