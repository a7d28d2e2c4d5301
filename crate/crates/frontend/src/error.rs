use thiserror::Error;

#[derive(Debug, Error)]
pub enum FrontendError {
    #[error("lexical error at {line}:{column}: {message}")]
    Lex {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("syntax error at {line}:{column}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
        found: String,
    },
    #[error("unsupported construct at {line}:{column}: {construct}")]
    Unsupported {
        line: usize,
        column: usize,
        construct: String,
    },
    #[error("structural error at {line}:{column}: {message}")]
    Structure {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("DOT parse error at line {line}: {message}")]
    Dot { line: usize, message: String },
    #[error("DOT schema error: {0}")]
    DotSchema(String),
}
