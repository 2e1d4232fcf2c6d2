//! Token scanner for the Java subset.
//!
//! `<` and `>` are always emitted as single-character tokens; the expression
//! parser merges adjacent ones into shift and relational operators. This
//! sidesteps the classic `List<List<String>>` ambiguity without lexer modes.

use crate::tree::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Keyword,
    Number,
    Str,
    Char,
    Sym,
    Eof,
}

#[derive(Debug, Clone, Copy)]
pub struct Token {
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn span(&self) -> Span {
        Span::new(self.start, self.end)
    }

    pub fn text<'s>(&self, src: &'s str) -> &'s str {
        &src[self.start..self.end]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommentKind {
    Line,
    Block,
    Javadoc,
}

#[derive(Debug)]
pub struct LexOutput {
    pub tokens: Vec<Token>,
    pub comments: Vec<(Span, CommentKind)>,
}

#[derive(Debug)]
pub struct LexError {
    pub offset: usize,
    pub message: String,
    /// True when the construct is valid Java outside the supported subset.
    pub unsupported: bool,
}

const KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long", "native",
    "new", "package", "private", "protected", "public", "return", "short", "static", "strictfp",
    "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try", "void",
    "volatile", "while", "true", "false", "null",
];

/// Multi-character symbols the lexer recognizes greedily. None of them
/// contains `<` or `>`; see the module note.
const SYMBOLS: &[&str] = &[
    "->", "++", "--", "&&", "||", "==", "!=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "...",
    "::",
];

pub fn lex(src: &str) -> Result<LexOutput, LexError> {
    let bytes = src.as_bytes();
    let mut i = 0usize;
    let mut tokens = Vec::new();
    let mut comments = Vec::new();
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'/' && i + 1 < bytes.len() {
            match bytes[i + 1] {
                b'/' => {
                    let start = i;
                    while i < bytes.len() && bytes[i] != b'\n' {
                        i += 1;
                    }
                    comments.push((Span::new(start, i), CommentKind::Line));
                    continue;
                }
                b'*' => {
                    let start = i;
                    let kind = if src[i..].starts_with("/**") && !src[i..].starts_with("/**/") {
                        CommentKind::Javadoc
                    } else {
                        CommentKind::Block
                    };
                    i += 2;
                    loop {
                        if i + 1 >= bytes.len() {
                            return Err(LexError {
                                offset: start,
                                message: "unterminated block comment".into(),
                                unsupported: false,
                            });
                        }
                        if bytes[i] == b'*' && bytes[i + 1] == b'/' {
                            i += 2;
                            break;
                        }
                        i += 1;
                    }
                    comments.push((Span::new(start, i), kind));
                    continue;
                }
                _ => {}
            }
        }
        if c == b'"' {
            if src[i..].starts_with("\"\"\"") {
                return Err(LexError {
                    offset: i,
                    message: "text blocks are not supported".into(),
                    unsupported: true,
                });
            }
            let start = i;
            i += 1;
            loop {
                if i >= bytes.len() || bytes[i] == b'\n' {
                    return Err(LexError {
                        offset: start,
                        message: "unterminated string literal".into(),
                        unsupported: false,
                    });
                }
                match bytes[i] {
                    b'\\' => i += 2,
                    b'"' => {
                        i += 1;
                        break;
                    }
                    _ => i += 1,
                }
            }
            tokens.push(Token {
                kind: TokenKind::Str,
                start,
                end: i,
            });
            continue;
        }
        if c == b'\'' {
            let start = i;
            i += 1;
            loop {
                if i >= bytes.len() || bytes[i] == b'\n' {
                    return Err(LexError {
                        offset: start,
                        message: "unterminated character literal".into(),
                        unsupported: false,
                    });
                }
                match bytes[i] {
                    b'\\' => i += 2,
                    b'\'' => {
                        i += 1;
                        break;
                    }
                    _ => i += 1,
                }
            }
            tokens.push(Token {
                kind: TokenKind::Char,
                start,
                end: i,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            i += 1;
            while i < bytes.len() {
                let b = bytes[i];
                if b.is_ascii_alphanumeric() || b == b'_' {
                    i += 1;
                } else if b == b'.' && i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                } else {
                    break;
                }
            }
            tokens.push(Token {
                kind: TokenKind::Number,
                start,
                end: i,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' || c == b'$' {
            let start = i;
            while i < bytes.len()
                && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'$')
            {
                i += 1;
            }
            let text = &src[start..i];
            let kind = if KEYWORDS.contains(&text) {
                TokenKind::Keyword
            } else {
                TokenKind::Ident
            };
            tokens.push(Token { kind, start, end: i });
            continue;
        }
        if let Some(sym) = SYMBOLS.iter().find(|s| src[i..].starts_with(**s)) {
            tokens.push(Token {
                kind: TokenKind::Sym,
                start: i,
                end: i + sym.len(),
            });
            i += sym.len();
            continue;
        }
        if b"+-*/%=<>!&|^~?:;,.(){}[]@".contains(&c) {
            tokens.push(Token {
                kind: TokenKind::Sym,
                start: i,
                end: i + 1,
            });
            i += 1;
            continue;
        }
        return Err(LexError {
            offset: i,
            message: format!("unexpected character {:?}", src[i..].chars().next().unwrap()),
            unsupported: false,
        });
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        start: src.len(),
        end: src.len(),
    });
    Ok(LexOutput { tokens, comments })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<String> {
        lex(src)
            .unwrap()
            .tokens
            .iter()
            .filter(|t| t.kind != TokenKind::Eof)
            .map(|t| t.text(src).to_string())
            .collect()
    }

    #[test]
    fn angle_brackets_stay_single() {
        assert_eq!(
            texts("Map<String,List<Integer>> m"),
            ["Map", "<", "String", ",", "List", "<", "Integer", ">", ">", "m"]
        );
    }

    #[test]
    fn greedy_symbols_and_literals() {
        assert_eq!(
            texts("a += b++ - 'x' + \"s\\\"t\" / 1.5e3f"),
            ["a", "+=", "b", "++", "-", "'x'", "+", "\"s\\\"t\"", "/", "1.5e3f"]
        );
    }

    #[test]
    fn comments_collected_with_kinds() {
        let out = lex("/** doc */ int x; // tail\n/* b */").unwrap();
        let kinds: Vec<_> = out.comments.iter().map(|(_, k)| *k).collect();
        assert_eq!(kinds, [CommentKind::Javadoc, CommentKind::Line, CommentKind::Block]);
    }

    #[test]
    fn text_block_is_rejected() {
        assert!(lex("String s = \"\"\"x\"\"\";").is_err());
    }
}
