/// Byte range into the function source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub type_text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Ident(String),
    IntLit(String),
    StrLit(String),
    Unary {
        op: String,
        operand: Box<Expr>,
    },
    Binary {
        op: String,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        callee: String,
        args: Vec<Expr>,
    },
    Index {
        base: Box<Expr>,
        index: Box<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Decl {
        type_text: String,
        name: String,
        array_len: Option<String>,
        init: Option<Expr>,
    },
    Assign {
        target: Expr,
        value: Expr,
    },
    ExprStmt(Expr),
    If {
        cond: Expr,
        then_branch: Vec<Stmt>,
        else_branch: Option<Vec<Stmt>>,
    },
    While {
        cond: Expr,
        body: Vec<Stmt>,
    },
    For {
        init: Option<Box<Stmt>>,
        cond: Option<Expr>,
        step: Option<Box<Stmt>>,
        body: Vec<Stmt>,
    },
    Return(Option<Expr>),
    Break,
    Continue,
}

/// One parsed function definition. Spans index into `source`, the
/// verbatim text of the definition.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionAst {
    pub name: String,
    pub return_type: String,
    pub params: Vec<Param>,
    pub body: Vec<Stmt>,
    pub source: String,
}

impl FunctionAst {
    pub fn span_text(&self, span: Span) -> &str {
        &self.source[span.start..span.end]
    }

    /// Pretty-print back to subset source. `parse(print(ast))` is
    /// structurally equal to `ast` (spans aside).
    pub fn print(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.return_type);
        out.push(' ');
        out.push_str(&self.name);
        out.push('(');
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&p.type_text);
            out.push(' ');
            out.push_str(&p.name);
        }
        out.push_str(") {\n");
        for stmt in &self.body {
            print_stmt(stmt, 1, &mut out);
        }
        out.push_str("}\n");
        out
    }

    /// Structural equality that ignores spans and formatting.
    pub fn structurally_equal(&self, other: &FunctionAst) -> bool {
        self.print() == other.print()
    }
}

fn indent(depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn print_block(stmts: &[Stmt], depth: usize, out: &mut String) {
    out.push_str("{\n");
    for s in stmts {
        print_stmt(s, depth + 1, out);
    }
    indent(depth, out);
    out.push('}');
}

fn print_stmt(stmt: &Stmt, depth: usize, out: &mut String) {
    indent(depth, out);
    print_stmt_bare(stmt, depth, out);
    out.push('\n');
}

fn print_stmt_bare(stmt: &Stmt, depth: usize, out: &mut String) {
    match &stmt.kind {
        StmtKind::Decl {
            type_text,
            name,
            array_len,
            init,
        } => {
            out.push_str(type_text);
            out.push(' ');
            out.push_str(name);
            if let Some(len) = array_len {
                out.push('[');
                out.push_str(len);
                out.push(']');
            }
            if let Some(e) = init {
                out.push_str(" = ");
                print_expr(e, out);
            }
            out.push(';');
        }
        StmtKind::Assign { target, value } => {
            print_expr(target, out);
            out.push_str(" = ");
            print_expr(value, out);
            out.push(';');
        }
        StmtKind::ExprStmt(e) => {
            print_expr(e, out);
            out.push(';');
        }
        StmtKind::If {
            cond,
            then_branch,
            else_branch,
        } => {
            out.push_str("if (");
            print_expr(cond, out);
            out.push_str(") ");
            print_block(then_branch, depth, out);
            if let Some(els) = else_branch {
                out.push_str(" else ");
                print_block(els, depth, out);
            }
        }
        StmtKind::While { cond, body } => {
            out.push_str("while (");
            print_expr(cond, out);
            out.push_str(") ");
            print_block(body, depth, out);
        }
        StmtKind::For {
            init,
            cond,
            step,
            body,
        } => {
            out.push_str("for (");
            if let Some(s) = init {
                print_stmt_bare(s, depth, out);
            } else {
                out.push(';');
            }
            out.push(' ');
            if let Some(c) = cond {
                print_expr(c, out);
            }
            out.push_str("; ");
            if let Some(s) = step {
                // step prints without its trailing semicolon
                let mut tmp = String::new();
                print_stmt_bare(s, depth, &mut tmp);
                out.push_str(tmp.trim_end_matches(';'));
            }
            out.push_str(") ");
            print_block(body, depth, out);
        }
        StmtKind::Return(e) => {
            out.push_str("return");
            if let Some(e) = e {
                out.push(' ');
                print_expr(e, out);
            }
            out.push(';');
        }
        StmtKind::Break => out.push_str("break;"),
        StmtKind::Continue => out.push_str("continue;"),
    }
}

fn print_expr(expr: &Expr, out: &mut String) {
    match &expr.kind {
        ExprKind::Ident(s) | ExprKind::IntLit(s) | ExprKind::StrLit(s) => out.push_str(s),
        ExprKind::Unary { op, operand } => {
            out.push_str(op);
            print_expr_paren(operand, out);
        }
        ExprKind::Binary { op, lhs, rhs } => {
            print_expr_paren(lhs, out);
            out.push(' ');
            out.push_str(op);
            out.push(' ');
            print_expr_paren(rhs, out);
        }
        ExprKind::Call { callee, args } => {
            out.push_str(callee);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                print_expr(a, out);
            }
            out.push(')');
        }
        ExprKind::Index { base, index } => {
            print_expr_paren(base, out);
            out.push('[');
            print_expr(index, out);
            out.push(']');
        }
    }
}

// fully parenthesized compound operands, so precedence survives reparsing
fn print_expr_paren(expr: &Expr, out: &mut String) {
    match expr.kind {
        ExprKind::Binary { .. } | ExprKind::Unary { .. } => {
            out.push('(');
            print_expr(expr, out);
            out.push(')');
        }
        _ => print_expr(expr, out),
    }
}
