//! Java subset frontend: lexer, recursive-descent parser onto the closed
//! node-type taxonomy, and semantic-role derivation.
//!
//! The subset covers the constructs the taxonomy can express: classes,
//! interfaces, enums, fields, methods, constructors, initializer blocks, the
//! usual statement forms, generics as parameterized type references, marker
//! annotations (as modifiers), union catch types, and lambdas. Anything
//! outside (records, bounded type parameters, text blocks, modules,
//! try-with-resources, switch expressions) is rejected with a dedicated
//! "unsupported construct" diagnostic rather than a generic syntax error.

mod lexer;
mod parser;
mod roles;

pub use lexer::{lex, Token, TokenKind};
pub use parser::{parse_java, Diagnostic, DiagnosticKind, ParsedUnit};
pub use roles::{modifier_group, semantic_role, ModifierGroup, SemanticRole};

use std::collections::BTreeMap;

use crate::tree::AstTree;

/// One parsed compilation unit with its repository-relative path.
#[derive(Debug, Clone)]
pub struct SourceFile {
    pub path: String,
    pub text: String,
    pub tree: AstTree,
    /// Comment spans (line, block, and javadoc), for tooling that anchors
    /// human annotations; never matched.
    pub comments: Vec<crate::tree::Span>,
}

impl SourceFile {
    pub fn parse(path: impl Into<String>, text: impl Into<String>) -> Result<Self, Diagnostic> {
        let text = text.into();
        let unit = parse_java(&text)?;
        Ok(SourceFile {
            path: path.into(),
            text,
            tree: unit.tree,
            comments: unit.comments,
        })
    }
}

/// One side of a commit: files keyed by path.
#[derive(Debug, Clone, Default)]
pub struct Snapshot {
    pub files: BTreeMap<String, SourceFile>,
}

impl Snapshot {
    pub fn new() -> Self {
        Snapshot::default()
    }

    pub fn add(&mut self, file: SourceFile) {
        self.files.insert(file.path.clone(), file);
    }

    /// Convenience for tests and examples: parse `(path, text)` pairs.
    pub fn from_sources(sources: &[(&str, &str)]) -> Result<Self, Diagnostic> {
        let mut s = Snapshot::new();
        for (path, text) in sources {
            s.add(SourceFile::parse(*path, *text)?);
        }
        Ok(s)
    }
}
