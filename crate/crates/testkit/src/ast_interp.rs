//! Reference interpreter over the syntax tree for single-function programs
//! without calls or objects. Variables live in one flat function scope.

use std::collections::BTreeMap;

use arklight::frontend::ast::{Block, Expr, ExprKind, FunctionDecl, LogicalOp, Stmt, StmtKind};

use crate::value::{binary, unary, Value};

pub type State = BTreeMap<String, Value>;

enum Flow {
    Next,
    Break,
    Continue,
    Return,
}

pub struct AstInterp {
    pub vars: State,
    steps: usize,
    limit: usize,
}

impl AstInterp {
    pub fn new(limit: usize) -> Self {
        AstInterp { vars: State::new(), steps: 0, limit }
    }

    /// Runs `f` with the given arguments bound to its parameters and
    /// returns the final variable state.
    pub fn run(mut self, f: &FunctionDecl, args: &[Value]) -> Result<State, String> {
        for (i, p) in f.params.iter().enumerate() {
            self.vars.insert(p.name.clone(), args.get(i).cloned().unwrap_or(Value::Undefined));
        }
        let body = f.body.as_ref().ok_or("function has no body")?;
        self.block(body)?;
        Ok(self.vars)
    }

    fn tick(&mut self) -> Result<(), String> {
        self.steps += 1;
        if self.steps > self.limit {
            return Err("step limit exceeded".into());
        }
        Ok(())
    }

    fn block(&mut self, b: &Block) -> Result<Flow, String> {
        for s in &b.stmts {
            match self.stmt(s)? {
                Flow::Next => {}
                other => return Ok(other),
            }
        }
        Ok(Flow::Next)
    }

    fn stmt(&mut self, s: &Stmt) -> Result<Flow, String> {
        self.tick()?;
        match &s.kind {
            StmtKind::Var(v) => {
                let val = match &v.init {
                    Some(e) => self.expr(e)?,
                    None => Value::Undefined,
                };
                self.vars.insert(v.name.clone(), val);
            }
            StmtKind::Expr(e) => {
                self.expr(e)?;
            }
            StmtKind::If { cond, then, otherwise } => {
                if self.expr(cond)?.truthy() {
                    return self.stmt(then);
                } else if let Some(o) = otherwise {
                    return self.stmt(o);
                }
            }
            StmtKind::While { cond, body } => {
                while self.expr(cond)?.truthy() {
                    match self.stmt(body)? {
                        Flow::Break => break,
                        Flow::Return => return Ok(Flow::Return),
                        Flow::Next | Flow::Continue => {}
                    }
                }
            }
            StmtKind::For { init, cond, update, body } => {
                if let Some(i) = init {
                    self.stmt(i)?;
                }
                loop {
                    if let Some(c) = cond {
                        if !self.expr(c)?.truthy() {
                            break;
                        }
                    }
                    match self.stmt(body)? {
                        Flow::Break => break,
                        Flow::Return => return Ok(Flow::Return),
                        Flow::Next | Flow::Continue => {}
                    }
                    if let Some(u) = update {
                        self.expr(u)?;
                    }
                    self.tick()?;
                }
            }
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    self.expr(e)?;
                }
                return Ok(Flow::Return);
            }
            StmtKind::Break => return Ok(Flow::Break),
            StmtKind::Continue => return Ok(Flow::Continue),
            StmtKind::Block(b) => return self.block(b),
            StmtKind::Empty => {}
            StmtKind::Component(_) => return Err("component blocks are not supported".into()),
        }
        Ok(Flow::Next)
    }

    fn var(&self, name: &str) -> Result<Value, String> {
        self.vars.get(name).cloned().ok_or_else(|| format!("unbound variable `{name}`"))
    }

    fn target<'e>(&self, e: &'e Expr) -> Result<&'e str, String> {
        match &e.kind {
            ExprKind::Ident(n) => Ok(n),
            _ => Err("only variables can be assigned".into()),
        }
    }

    fn expr(&mut self, e: &Expr) -> Result<Value, String> {
        Ok(match &e.kind {
            ExprKind::Ident(n) => self.var(n)?,
            ExprKind::Number(n) => Value::Num(*n),
            ExprKind::Str(s) => Value::Str(s.clone()),
            ExprKind::Bool(b) => Value::Bool(*b),
            ExprKind::Null => Value::Null,
            ExprKind::Undefined => Value::Undefined,
            ExprKind::Binary(op, a, b) => {
                let x = self.expr(a)?;
                let y = self.expr(b)?;
                binary(*op, &x, &y)?
            }
            ExprKind::Logical(op, a, b) => {
                let x = self.expr(a)?;
                match (op, x.truthy()) {
                    (LogicalOp::And, true) | (LogicalOp::Or, false) => self.expr(b)?,
                    _ => x,
                }
            }
            ExprKind::Unary(op, a) => {
                let x = self.expr(a)?;
                unary(*op, &x)
            }
            ExprKind::Update { increment, prefix, target } => {
                let name = self.target(target)?;
                let old = self.var(name)?.to_number();
                let new = if *increment { old + 1.0 } else { old - 1.0 };
                self.vars.insert(name.to_string(), Value::Num(new));
                Value::Num(if *prefix { new } else { old })
            }
            ExprKind::Assign { op, target, value } => {
                let name = self.target(target)?;
                let v = match op {
                    None => self.expr(value)?,
                    Some(op) => {
                        let old = self.var(name)?;
                        let rhs = self.expr(value)?;
                        binary(*op, &old, &rhs)?
                    }
                };
                self.vars.insert(name.to_string(), v.clone());
                v
            }
            ExprKind::Conditional(c, a, b) => {
                if self.expr(c)?.truthy() {
                    self.expr(a)?
                } else {
                    self.expr(b)?
                }
            }
            ExprKind::Template(_)
            | ExprKind::This
            | ExprKind::Super
            | ExprKind::Call { .. }
            | ExprKind::New { .. }
            | ExprKind::Member { .. }
            | ExprKind::Index { .. }
            | ExprKind::Arrow { .. }
            | ExprKind::Function { .. }
            | ExprKind::Object(_)
            | ExprKind::Array(_) => return Err("expression is outside the integer subset".into()),
        })
    }
}
