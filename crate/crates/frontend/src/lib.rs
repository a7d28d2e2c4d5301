//! Frontend for a small C subset: lexing, parsing, per-function
//! control-flow graph construction, and DOT serialization.
//!
//! All operations are pure functions of their inputs; there is no shared
//! mutable state.

mod ast;
mod cfg;
mod dot;
mod error;
mod lexer;
mod parser;
mod split;

pub use ast::{Expr, ExprKind, FunctionAst, Param, Span, Stmt, StmtKind};
pub use cfg::{build_cfg, BasicBlock, BlockRole, Cfg, CfgBuild};
pub use dot::{cfg_to_dot, parse_dot};
pub use error::FrontendError;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse_function;
pub use split::split_source_into_functions;
