use crate::error::FrontendError;

pub const KEYWORDS: &[&str] = &[
    "int", "char", "float", "void", "if", "else", "while", "for", "return", "break", "continue",
    "switch", "goto",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Identifier,
    IntegerLiteral,
    StringLiteral,
    Operator,
    Punctuation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based source line.
    pub line: usize,
    /// 1-based source column.
    pub column: usize,
    /// Byte offset of the first character in the source.
    pub offset: usize,
}

// longest first so maximal munch falls out of the scan order
const OPERATORS: &[&str] = &[
    "&&", "||", "==", "!=", "<=", ">=", "<", ">", "+", "-", "*", "/", "%", "=", "!", "&",
];

const PUNCTUATION: &[char] = &['(', ')', '{', '}', '[', ']', ';', ','];

struct Cursor<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }


    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(b)
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s)
    }
}

/// Maximal-munch lexer for the subset. Comments and whitespace are
/// dropped; identifiers and keywords are distinguished by the fixed
/// keyword set.
pub fn tokenize(source: &str) -> Result<Vec<Token>, FrontendError> {
    let mut cur = Cursor {
        src: source,
        bytes: source.as_bytes(),
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();

    'outer: while let Some(b) = cur.peek() {
        if b.is_ascii_whitespace() {
            cur.bump();
            continue;
        }
        if cur.starts_with("//") {
            while let Some(b) = cur.peek() {
                if b == b'\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        if cur.starts_with("/*") {
            let (line, column) = (cur.line, cur.column);
            cur.bump();
            cur.bump();
            loop {
                if cur.starts_with("*/") {
                    cur.bump();
                    cur.bump();
                    continue 'outer;
                }
                if cur.bump().is_none() {
                    return Err(FrontendError::Lex {
                        line,
                        column,
                        message: "unterminated block comment".into(),
                    });
                }
            }
        }

        let (line, column, offset) = (cur.line, cur.column, cur.pos);

        if b == b'"' {
            cur.bump();
            loop {
                match cur.peek() {
                    None | Some(b'\n') => {
                        return Err(FrontendError::Lex {
                            line,
                            column,
                            message: "unterminated string literal".into(),
                        })
                    }
                    Some(b'\\') => {
                        cur.bump();
                        cur.bump();
                    }
                    Some(b'"') => {
                        cur.bump();
                        break;
                    }
                    Some(_) => {
                        cur.bump();
                    }
                }
            }
            tokens.push(Token {
                kind: TokenKind::StringLiteral,
                text: source[offset..cur.pos].to_string(),
                line,
                column,
                offset,
            });
            continue;
        }

        if b.is_ascii_digit() {
            while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
                cur.bump();
            }
            tokens.push(Token {
                kind: TokenKind::IntegerLiteral,
                text: source[offset..cur.pos].to_string(),
                line,
                column,
                offset,
            });
            continue;
        }

        if b.is_ascii_alphabetic() || b == b'_' {
            while matches!(cur.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                cur.bump();
            }
            let text = &source[offset..cur.pos];
            let kind = if KEYWORDS.contains(&text) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            };
            tokens.push(Token {
                kind,
                text: text.to_string(),
                line,
                column,
                offset,
            });
            continue;
        }

        if PUNCTUATION.contains(&(b as char)) {
            cur.bump();
            tokens.push(Token {
                kind: TokenKind::Punctuation,
                text: (b as char).to_string(),
                line,
                column,
                offset,
            });
            continue;
        }

        for op in OPERATORS {
            if cur.starts_with(op) {
                for _ in 0..op.len() {
                    cur.bump();
                }
                tokens.push(Token {
                    kind: TokenKind::Operator,
                    text: (*op).to_string(),
                    line,
                    column,
                    offset,
                });
                continue 'outer;
            }
        }

        return Err(FrontendError::Lex {
            line,
            column,
            message: format!("illegal character {:?}", b as char),
        });
    }
    Ok(tokens)
}
