use crate::ast::{FunctionAst, Span, Stmt, StmtKind};

pub const ENTRY_ID: usize = 0;
pub const EXIT_ID: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockRole {
    Entry,
    Exit,
    Body,
}

impl BlockRole {
    pub fn as_str(&self) -> &'static str {
        match self {
            BlockRole::Entry => "entry",
            BlockRole::Exit => "exit",
            BlockRole::Body => "body",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "entry" => Some(BlockRole::Entry),
            "exit" => Some(BlockRole::Exit),
            "body" => Some(BlockRole::Body),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasicBlock {
    /// Dense id; entry is 0, exit is 1, body blocks follow.
    pub id: usize,
    /// Source spans of the statements in this block, in order.
    pub statements: Vec<Span>,
    /// Verbatim concatenated source of the statements.
    pub code_text: String,
    pub role: BlockRole,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cfg {
    pub function_name: String,
    pub blocks: Vec<BasicBlock>,
    /// Ordered (src, dst) pairs; no duplicates, no self-loops.
    pub edges: Vec<(usize, usize)>,
    pub entry_id: usize,
    pub exit_id: usize,
}

/// A built CFG plus non-fatal diagnostics (unreachable code).
#[derive(Debug, Clone)]
pub struct CfgBuild {
    pub cfg: Cfg,
    pub warnings: Vec<String>,
}

impl Cfg {
    pub fn out_degree(&self, id: usize) -> usize {
        self.edges.iter().filter(|(s, _)| *s == id).count()
    }

    pub fn in_degree(&self, id: usize) -> usize {
        self.edges.iter().filter(|(_, d)| *d == id).count()
    }

    pub fn successors(&self, id: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|(s, _)| *s == id)
            .map(|(_, d)| *d)
            .collect()
    }

    /// Block ids reachable from entry.
    pub fn reachable_from_entry(&self) -> Vec<bool> {
        let mut seen = vec![false; self.blocks.len()];
        let mut stack = vec![self.entry_id];
        seen[self.entry_id] = true;
        while let Some(b) = stack.pop() {
            for s in self.successors(b) {
                if !seen[s] {
                    seen[s] = true;
                    stack.push(s);
                }
            }
        }
        seen
    }

    /// True when the edge relation contains a cycle.
    pub fn has_cycle(&self) -> bool {
        // Kahn's algorithm; leftover nodes are on a cycle
        let n = self.blocks.len();
        let mut indeg = vec![0usize; n];
        for &(_, d) in &self.edges {
            indeg[d] += 1;
        }
        let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut visited = 0;
        while let Some(b) = queue.pop() {
            visited += 1;
            for s in self.successors(b) {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    queue.push(s);
                }
            }
        }
        visited != n
    }
}

struct Builder<'a> {
    ast: &'a FunctionAst,
    blocks: Vec<BasicBlock>,
    edges: Vec<(usize, usize)>,
    warnings: Vec<String>,
}

struct LoopCtx {
    cond_id: usize,
    breaks: Vec<usize>,
}

impl<'a> Builder<'a> {
    fn new_block(&mut self, statements: Vec<Span>) -> usize {
        let id = self.blocks.len();
        let code_text = statements
            .iter()
            .map(|s| self.ast.span_text(*s))
            .collect::<Vec<_>>()
            .join("\n");
        self.blocks.push(BasicBlock {
            id,
            statements,
            code_text,
            role: BlockRole::Body,
        });
        id
    }

    fn edge(&mut self, src: usize, dst: usize) {
        if src == dst {
            return; // no self-loops at the CFG level (empty loop bodies)
        }
        if !self.edges.contains(&(src, dst)) {
            self.edges.push((src, dst));
        }
    }

    fn connect_all(&mut self, preds: &[usize], dst: usize) {
        for &p in preds {
            self.edge(p, dst);
        }
    }

    /// Lower a statement sequence. `preds` are the dangling blocks that
    /// flow into it; the return value is the dangling set after it.
    fn lower_stmts(
        &mut self,
        stmts: &[Stmt],
        mut preds: Vec<usize>,
        loop_ctx: &mut Vec<LoopCtx>,
    ) -> Vec<usize> {
        let mut run: Vec<Span> = Vec::new();
        let mut dead_reported = false;

        for stmt in stmts {
            if preds.is_empty() && run.is_empty() && !dead_reported {
                self.warnings.push(format!(
                    "unreachable code in '{}': {}",
                    self.ast.name,
                    self.ast.span_text(stmt.span).lines().next().unwrap_or("")
                ));
                dead_reported = true;
            }
            match &stmt.kind {
                StmtKind::Decl { .. } | StmtKind::Assign { .. } | StmtKind::ExprStmt(_) => {
                    run.push(stmt.span);
                }
                StmtKind::Return(_) => {
                    run.push(stmt.span);
                    let b = self.new_block(std::mem::take(&mut run));
                    self.connect_all(&preds, b);
                    self.edge(b, EXIT_ID);
                    preds = Vec::new();
                }
                StmtKind::Break => {
                    run.push(stmt.span);
                    let b = self.new_block(std::mem::take(&mut run));
                    self.connect_all(&preds, b);
                    if let Some(ctx) = loop_ctx.last_mut() {
                        ctx.breaks.push(b);
                    } else {
                        self.warnings
                            .push(format!("'break' outside a loop in '{}'", self.ast.name));
                        self.edge(b, EXIT_ID);
                    }
                    preds = Vec::new();
                }
                StmtKind::Continue => {
                    run.push(stmt.span);
                    let b = self.new_block(std::mem::take(&mut run));
                    self.connect_all(&preds, b);
                    if let Some(ctx) = loop_ctx.last() {
                        self.edge(b, ctx.cond_id);
                    } else {
                        self.warnings
                            .push(format!("'continue' outside a loop in '{}'", self.ast.name));
                        self.edge(b, EXIT_ID);
                    }
                    preds = Vec::new();
                }
                StmtKind::If {
                    cond,
                    then_branch,
                    else_branch,
                } => {
                    if !run.is_empty() {
                        let b = self.new_block(std::mem::take(&mut run));
                        self.connect_all(&preds, b);
                        preds = vec![b];
                    }
                    // the condition expression occupies its own block
                    let cond_block = self.new_block(vec![cond.span]);
                    self.connect_all(&preds, cond_block);

                    let mut exits =
                        self.lower_stmts(then_branch, vec![cond_block], loop_ctx);
                    match else_branch {
                        Some(els) => {
                            let else_exits = self.lower_stmts(els, vec![cond_block], loop_ctx);
                            exits.extend(else_exits);
                        }
                        None => exits.push(cond_block),
                    }
                    exits.dedup();
                    preds = exits;
                }
                StmtKind::While { cond, body } => {
                    if !run.is_empty() {
                        let b = self.new_block(std::mem::take(&mut run));
                        self.connect_all(&preds, b);
                        preds = vec![b];
                    }
                    let cond_block = self.new_block(vec![cond.span]);
                    self.connect_all(&preds, cond_block);

                    loop_ctx.push(LoopCtx {
                        cond_id: cond_block,
                        breaks: Vec::new(),
                    });
                    let body_exits = self.lower_stmts(body, vec![cond_block], loop_ctx);
                    let ctx = loop_ctx.pop().unwrap();
                    // back edge(s) body-end -> cond
                    self.connect_all(&body_exits, cond_block);
                    let mut after = vec![cond_block];
                    after.extend(ctx.breaks);
                    preds = after;
                }
                StmtKind::For {
                    init,
                    cond,
                    step,
                    body,
                } => {
                    if let Some(init) = init {
                        run.push(init.span);
                    }
                    if !run.is_empty() {
                        let b = self.new_block(std::mem::take(&mut run));
                        self.connect_all(&preds, b);
                        preds = vec![b];
                    }
                    let cond_span = cond.as_ref().map(|c| c.span).unwrap_or(stmt.span);
                    let cond_block = self.new_block(vec![cond_span]);
                    self.connect_all(&preds, cond_block);

                    loop_ctx.push(LoopCtx {
                        cond_id: cond_block,
                        breaks: Vec::new(),
                    });
                    let mut body_exits = self.lower_stmts(body, vec![cond_block], loop_ctx);
                    if let Some(step) = step {
                        let step_block = self.new_block(vec![step.span]);
                        self.connect_all(&body_exits, step_block);
                        body_exits = vec![step_block];
                    }
                    let ctx = loop_ctx.pop().unwrap();
                    self.connect_all(&body_exits, cond_block);
                    let mut after = vec![cond_block];
                    after.extend(ctx.breaks);
                    preds = after;
                }
            }
        }
        if !run.is_empty() {
            let b = self.new_block(run);
            self.connect_all(&preds, b);
            preds = vec![b];
        }
        preds
    }
}

/// Build the control-flow graph of a parsed function.
///
/// Dedicated empty entry/exit blocks carry ids 0 and 1. Straight-line
/// statement runs collapse into one block; condition expressions occupy
/// their own block with two out-edges; loops contribute a back edge to
/// their condition block. Unreachable code after a `return` is kept as a
/// block and reported as a warning.
pub fn build_cfg(ast: &FunctionAst) -> CfgBuild {
    let mut builder = Builder {
        ast,
        blocks: Vec::new(),
        edges: Vec::new(),
        warnings: Vec::new(),
    };
    let entry = builder.new_block(Vec::new());
    let exit = builder.new_block(Vec::new());
    builder.blocks[entry].role = BlockRole::Entry;
    builder.blocks[exit].role = BlockRole::Exit;

    let mut loop_ctx = Vec::new();
    let exits = builder.lower_stmts(&ast.body, vec![entry], &mut loop_ctx);
    builder.connect_all(&exits, exit);

    CfgBuild {
        cfg: Cfg {
            function_name: ast.name.clone(),
            blocks: builder.blocks,
            edges: builder.edges,
            entry_id: entry,
            exit_id: exit,
        },
        warnings: builder.warnings,
    }
}
