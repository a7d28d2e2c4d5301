use crate::ast::{Expr, ExprKind, FunctionAst, Param, Span, Stmt, StmtKind};
use crate::error::FrontendError;
use crate::lexer::{Token, TokenKind};

const TYPE_KEYWORDS: &[&str] = &["int", "char", "float", "void"];

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    source: &'a str,
}

type PResult<T> = Result<T, FrontendError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> FrontendError {
        match self.peek() {
            Some(t) => FrontendError::Syntax {
                line: t.line,
                column: t.column,
                expected: expected.to_string(),
                found: format!("{:?}", t.text),
            },
            None => {
                let (line, column) = self
                    .tokens
                    .last()
                    .map(|t| (t.line, t.column + t.text.len()))
                    .unwrap_or((1, 1));
                FrontendError::Syntax {
                    line,
                    column,
                    expected: expected.to_string(),
                    found: "end of input".to_string(),
                }
            }
        }
    }

    fn at_text(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.text == text)
    }

    fn expect_text(&mut self, text: &str) -> PResult<&Token> {
        if self.at_text(text) {
            Ok(self.bump().unwrap())
        } else {
            Err(self.error(&format!("'{text}'")))
        }
    }

    fn expect_ident(&mut self) -> PResult<Token> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                let t = t.clone();
                self.pos += 1;
                Ok(t)
            }
            _ => Err(self.error("identifier")),
        }
    }

    fn at_type_keyword(&self) -> bool {
        self.peek()
            .is_some_and(|t| t.kind == TokenKind::Keyword && TYPE_KEYWORDS.contains(&t.text.as_str()))
    }

    fn token_end(&self, t: &Token) -> usize {
        t.offset + t.text.len()
    }

    // type keyword plus any number of '*'s, collected as opaque type text
    fn parse_type_text(&mut self) -> PResult<String> {
        if !self.at_type_keyword() {
            return Err(self.error("type keyword"));
        }
        let mut text = self.bump().unwrap().text.clone();
        while self.at_text("*") {
            self.bump();
            text.push_str(" *");
        }
        Ok(text)
    }

    fn parse_function(&mut self) -> PResult<FunctionAst> {
        // reject switch/goto up front anywhere in the token stream
        for t in self.tokens {
            if t.kind == TokenKind::Keyword && (t.text == "switch" || t.text == "goto") {
                return Err(FrontendError::Unsupported {
                    line: t.line,
                    column: t.column,
                    construct: t.text.clone(),
                });
            }
        }
        let return_type = self.parse_type_text()?;
        let name = self.expect_ident()?.text;
        self.expect_text("(")?;
        let mut params = Vec::new();
        if !self.at_text(")") {
            loop {
                let type_text = self.parse_type_text()?;
                let pname = self.expect_ident()?.text;
                params.push(Param {
                    name: pname,
                    type_text,
                });
                if self.at_text(",") {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect_text(")")?;
        self.expect_text("{")?;
        let body = self.parse_stmt_list()?;
        self.expect_text("}")?;
        if let Some(t) = self.peek() {
            return Err(FrontendError::Syntax {
                line: t.line,
                column: t.column,
                expected: "end of function".into(),
                found: format!("{:?}", t.text),
            });
        }
        Ok(FunctionAst {
            name,
            return_type,
            params,
            body,
            source: self.source.to_string(),
        })
    }

    fn parse_stmt_list(&mut self) -> PResult<Vec<Stmt>> {
        let mut stmts = Vec::new();
        while self.peek().is_some() && !self.at_text("}") {
            stmts.push(self.parse_stmt()?);
        }
        Ok(stmts)
    }

    fn parse_block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_text("{")?;
        let stmts = self.parse_stmt_list()?;
        self.expect_text("}")?;
        Ok(stmts)
    }

    fn parse_stmt(&mut self) -> PResult<Stmt> {
        let start = self.peek().map(|t| t.offset).unwrap_or(0);
        let tok = self.peek().ok_or_else(|| self.error("statement"))?.clone();

        let kind = match (tok.kind, tok.text.as_str()) {
            (TokenKind::Keyword, "if") => {
                self.bump();
                self.expect_text("(")?;
                let cond = self.parse_expr()?;
                self.expect_text(")")?;
                let then_branch = self.parse_block()?;
                let else_branch = if self.at_text("else") {
                    self.bump();
                    Some(self.parse_block()?)
                } else {
                    None
                };
                let end = self.prev_end();
                return Ok(Stmt {
                    kind: StmtKind::If {
                        cond,
                        then_branch,
                        else_branch,
                    },
                    span: Span::new(start, end),
                });
            }
            (TokenKind::Keyword, "while") => {
                self.bump();
                self.expect_text("(")?;
                let cond = self.parse_expr()?;
                self.expect_text(")")?;
                let body = self.parse_block()?;
                let end = self.prev_end();
                return Ok(Stmt {
                    kind: StmtKind::While { cond, body },
                    span: Span::new(start, end),
                });
            }
            (TokenKind::Keyword, "for") => {
                self.bump();
                self.expect_text("(")?;
                let init = if self.at_text(";") {
                    self.bump();
                    None
                } else {
                    Some(Box::new(self.parse_simple_stmt()?))
                };
                let cond = if self.at_text(";") {
                    None
                } else {
                    Some(self.parse_expr()?)
                };
                self.expect_text(";")?;
                let step = if self.at_text(")") {
                    None
                } else {
                    Some(Box::new(self.parse_simple_no_semi()?))
                };
                self.expect_text(")")?;
                let body = self.parse_block()?;
                let end = self.prev_end();
                return Ok(Stmt {
                    kind: StmtKind::For {
                        init,
                        cond,
                        step,
                        body,
                    },
                    span: Span::new(start, end),
                });
            }
            (TokenKind::Keyword, "return") => {
                self.bump();
                let value = if self.at_text(";") {
                    None
                } else {
                    Some(self.parse_expr()?)
                };
                self.expect_text(";")?;
                StmtKind::Return(value)
            }
            (TokenKind::Keyword, "break") => {
                self.bump();
                self.expect_text(";")?;
                StmtKind::Break
            }
            (TokenKind::Keyword, "continue") => {
                self.bump();
                self.expect_text(";")?;
                StmtKind::Continue
            }
            _ => {
                let s = self.parse_simple_stmt()?;
                return Ok(s);
            }
        };
        let end = self.prev_end();
        Ok(Stmt {
            kind,
            span: Span::new(start, end),
        })
    }

    fn prev_end(&self) -> usize {
        self.tokens
            .get(self.pos.saturating_sub(1))
            .map(|t| self.token_end(t))
            .unwrap_or(0)
    }

    // declaration, assignment, or expression statement, ending in ';'
    fn parse_simple_stmt(&mut self) -> PResult<Stmt> {
        let stmt = self.parse_simple_no_semi()?;
        self.expect_text(";")?;
        let end = self.prev_end();
        Ok(Stmt {
            kind: stmt.kind,
            span: Span::new(stmt.span.start, end),
        })
    }

    fn parse_simple_no_semi(&mut self) -> PResult<Stmt> {
        let start = self.peek().map(|t| t.offset).unwrap_or(0);
        if self.at_type_keyword() {
            let type_text = self.parse_type_text()?;
            let name = self.expect_ident()?.text;
            let array_len = if self.at_text("[") {
                self.bump();
                let len = match self.peek() {
                    Some(t) if t.kind == TokenKind::IntegerLiteral => {
                        let s = t.text.clone();
                        self.pos += 1;
                        s
                    }
                    _ => return Err(self.error("array length")),
                };
                self.expect_text("]")?;
                Some(len)
            } else {
                None
            };
            let init = if self.at_text("=") {
                self.bump();
                Some(self.parse_expr()?)
            } else {
                None
            };
            let end = self.prev_end();
            return Ok(Stmt {
                kind: StmtKind::Decl {
                    type_text,
                    name,
                    array_len,
                    init,
                },
                span: Span::new(start, end),
            });
        }
        let expr = self.parse_expr()?;
        if self.at_text("=") {
            match expr.kind {
                ExprKind::Ident(_) | ExprKind::Index { .. } | ExprKind::Unary { .. } => {}
                _ => return Err(self.error("assignable expression before '='")),
            }
            self.bump();
            let value = self.parse_expr()?;
            let end = self.prev_end();
            return Ok(Stmt {
                kind: StmtKind::Assign {
                    target: expr,
                    value,
                },
                span: Span::new(start, end),
            });
        }
        let end = self.prev_end();
        Ok(Stmt {
            kind: StmtKind::ExprStmt(expr),
            span: Span::new(start, end),
        })
    }

    fn parse_expr(&mut self) -> PResult<Expr> {
        self.parse_binary(0)
    }

    fn binary_precedence(op: &str) -> Option<u8> {
        Some(match op {
            "||" => 1,
            "&&" => 2,
            "==" | "!=" => 3,
            "<" | ">" | "<=" | ">=" => 4,
            "+" | "-" => 5,
            "*" | "/" | "%" => 6,
            _ => return None,
        })
    }

    fn parse_binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.parse_unary()?;
        while let Some(t) = self.peek() {
            if t.kind != TokenKind::Operator {
                break;
            }
            let Some(prec) = Self::binary_precedence(&t.text) else {
                break;
            };
            if prec <= min_prec {
                break;
            }
            let op = t.text.clone();
            self.bump();
            let rhs = self.parse_binary(prec)?;
            let span = Span::new(lhs.span.start, rhs.span.end);
            lhs = Expr {
                kind: ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            };
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        if let Some(t) = self.peek() {
            if t.kind == TokenKind::Operator && matches!(t.text.as_str(), "!" | "-" | "*" | "&") {
                let op = t.text.clone();
                let start = t.offset;
                self.bump();
                let operand = self.parse_unary()?;
                let span = Span::new(start, operand.span.end);
                return Ok(Expr {
                    kind: ExprKind::Unary {
                        op,
                        operand: Box::new(operand),
                    },
                    span,
                });
            }
        }
        self.parse_postfix()
    }

    fn parse_postfix(&mut self) -> PResult<Expr> {
        let mut expr = self.parse_primary()?;
        loop {
            if self.at_text("[") {
                self.bump();
                let index = self.parse_expr()?;
                let close = self.expect_text("]")?;
                let end = close.offset + 1;
                let span = Span::new(expr.span.start, end);
                expr = Expr {
                    kind: ExprKind::Index {
                        base: Box::new(expr),
                        index: Box::new(index),
                    },
                    span,
                };
            } else {
                break;
            }
        }
        Ok(expr)
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
        let t = self.peek().ok_or_else(|| self.error("expression"))?.clone();
        let start = t.offset;
        match t.kind {
            TokenKind::IntegerLiteral => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::IntLit(t.text),
                    span: Span::new(start, self.prev_end()),
                })
            }
            TokenKind::StringLiteral => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::StrLit(t.text),
                    span: Span::new(start, self.prev_end()),
                })
            }
            TokenKind::Identifier => {
                self.bump();
                if self.at_text("(") {
                    self.bump();
                    let mut args = Vec::new();
                    if !self.at_text(")") {
                        loop {
                            args.push(self.parse_expr()?);
                            if self.at_text(",") {
                                self.bump();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect_text(")")?;
                    Ok(Expr {
                        kind: ExprKind::Call {
                            callee: t.text,
                            args,
                        },
                        span: Span::new(start, self.prev_end()),
                    })
                } else {
                    Ok(Expr {
                        kind: ExprKind::Ident(t.text),
                        span: Span::new(start, self.prev_end()),
                    })
                }
            }
            TokenKind::Punctuation if t.text == "(" => {
                self.bump();
                let inner = self.parse_expr()?;
                self.expect_text(")")?;
                Ok(Expr {
                    kind: inner.kind,
                    span: Span::new(start, self.prev_end()),
                })
            }
            _ => Err(self.error("expression")),
        }
    }
}

/// Recursive-descent parse of one complete function definition.
///
/// The tokens must carry offsets into `source`, which is stored on the
/// returned AST so statement spans stay resolvable.
pub fn parse_function(tokens: &[Token], source: &str) -> Result<FunctionAst, FrontendError> {
    let mut parser = Parser {
        tokens,
        pos: 0,
        source,
    };
    parser.parse_function()
}
