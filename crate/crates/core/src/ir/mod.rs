//! Three-address IR, lowering from the AST, and per-method control-flow graphs.
//!
//! Lowering emits a linear statement list in label/goto form. Sugared
//! constructs (increments, compound assignments, template strings, object
//! literals, component blocks) appear once as a [`Sugar`] statement together
//! with their expansion into core statements: the original CFG keeps the
//! sugar node, the simplified CFG uses the expansion.

pub mod cfg;
pub mod dump;
pub mod lower;

use std::collections::BTreeMap;

pub use cfg::{build_cfg, BasicBlock, BlockId, Cfg, CfgError, StmtId, StmtNode};
pub use dump::{dump_body, dump_method};

use crate::frontend::ast::{BinaryOp, UnaryOp};
use crate::frontend::Span;
use crate::scene::{ClassSignature, MethodSignature};
use crate::types::Type;

pub const TEMP_PREFIX: &str = "temp";
pub const RET_PREFIX: &str = "_ret";
pub const ANON_PREFIX: &str = "Anonymous_";
pub const THIS: &str = "this";

#[derive(Debug, Clone, PartialEq)]
pub enum Constant {
    Number(f64),
    String(String),
    Bool(bool),
    Null,
    Undefined,
    /// Reference to a named (possibly hoisted) function.
    FuncRef(MethodSignature),
}

/// Operand usable directly in any statement.
#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    Local(String),
    Const(Constant),
}

impl Atom {
    pub fn local(&self) -> Option<&str> {
        match self {
            Atom::Local(l) => Some(l),
            Atom::Const(_) => None,
        }
    }
}

/// A class named in the source, with its resolved signature when known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRef {
    pub name: String,
    pub sig: Option<ClassSignature>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldBase {
    Local(String),
    Class(ClassRef),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Place {
    Local(String),
    Field { base: FieldBase, field: String },
    Array { base: String, index: Atom },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rvalue {
    Atom(Atom),
    Field { base: FieldBase, field: String },
    Array { base: String, index: Atom },
    Param(usize),
    This,
    Binary(BinaryOp, Atom, Atom),
    Unary(UnaryOp, Atom),
}

#[derive(Debug, Clone, PartialEq)]
pub enum CallKind {
    /// Call of a named free function, with its declaration when resolved.
    Free(Option<MethodSignature>),
    /// Call through a local holding a function value; `method` is the local.
    Pointer,
    Static(ClassRef),
    Instance(String),
    /// Non-virtual call on `base` of a specific class's method
    /// (constructors and `super.m()`).
    Special { base: String, class: ClassRef },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Invoke {
    pub kind: CallKind,
    pub method: String,
    pub args: Vec<Atom>,
    pub result: Option<String>,
}

impl Invoke {
    /// Local the call is dispatched on, if any.
    pub fn base(&self) -> Option<&str> {
        match &self.kind {
            CallKind::Instance(b) | CallKind::Special { base: b, .. } => Some(b),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cond {
    Compare(BinaryOp, Atom, Atom),
    Truthy(Atom),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TemplatePiece {
    Str(String),
    Value(Atom),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sugar {
    Incr { target: Place, increment: bool },
    Compound { target: Place, op: BinaryOp, value: Atom },
    Template { result: String, parts: Vec<TemplatePiece> },
    ObjectLiteral { result: String, class: ClassRef, fields: Vec<(String, Atom)> },
    ComponentCreate { component: String, args: Vec<Atom>, result: String },
    ComponentAttr { base: String, name: String, args: Vec<Atom> },
    ComponentPop { component: String },
}

/// Branch targets are label ids before CFG construction and block ids after.
#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Assign { lhs: Place, rhs: Rvalue },
    Invoke(Invoke),
    New { result: String, class: ClassRef },
    NewArray { result: String, len: Atom },
    If { cond: Cond, then: usize, els: usize },
    Goto(usize),
    Return(Option<Atom>),
    Label(usize),
    Nop,
    Sugar(Sugar),
}

impl Stmt {
    pub fn is_terminator(&self) -> bool {
        matches!(self, Stmt::If { .. } | Stmt::Goto(_) | Stmt::Return(_))
    }

    /// Local written by this statement.
    pub fn def(&self) -> Option<&str> {
        match self {
            Stmt::Assign { lhs: Place::Local(l), .. } => Some(l),
            Stmt::Invoke(inv) => inv.result.as_deref(),
            Stmt::New { result, .. } | Stmt::NewArray { result, .. } => Some(result),
            Stmt::Sugar(Sugar::Incr { target: Place::Local(l), .. })
            | Stmt::Sugar(Sugar::Compound { target: Place::Local(l), .. }) => Some(l),
            Stmt::Sugar(Sugar::Template { result, .. })
            | Stmt::Sugar(Sugar::ObjectLiteral { result, .. })
            | Stmt::Sugar(Sugar::ComponentCreate { result, .. }) => Some(result),
            _ => None,
        }
    }

    /// Locals read by this statement, in operand order (may repeat).
    pub fn uses(&self) -> Vec<&str> {
        let mut out = Vec::new();
        fn atom<'a>(a: &'a Atom, out: &mut Vec<&'a str>) {
            if let Atom::Local(l) = a {
                out.push(l);
            }
        }
        fn base<'a>(b: &'a FieldBase, out: &mut Vec<&'a str>) {
            if let FieldBase::Local(l) = b {
                out.push(l);
            }
        }
        fn place_read<'a>(p: &'a Place, read_local: bool, out: &mut Vec<&'a str>) {
            match p {
                Place::Local(l) => {
                    if read_local {
                        out.push(l)
                    }
                }
                Place::Field { base: b, .. } => base(b, out),
                Place::Array { base: b, index } => {
                    out.push(b);
                    atom(index, out);
                }
            }
        }
        match self {
            Stmt::Assign { lhs, rhs } => {
                place_read(lhs, false, &mut out);
                match rhs {
                    Rvalue::Atom(a) | Rvalue::Unary(_, a) => atom(a, &mut out),
                    Rvalue::Field { base: b, .. } => base(b, &mut out),
                    Rvalue::Array { base: b, index } => {
                        out.push(b);
                        atom(index, &mut out);
                    }
                    Rvalue::Binary(_, a, b) => {
                        atom(a, &mut out);
                        atom(b, &mut out);
                    }
                    Rvalue::Param(_) | Rvalue::This => {}
                }
            }
            Stmt::Invoke(inv) => {
                match &inv.kind {
                    CallKind::Pointer => out.push(&inv.method),
                    CallKind::Instance(b) | CallKind::Special { base: b, .. } => out.push(b),
                    _ => {}
                }
                for a in &inv.args {
                    atom(a, &mut out);
                }
            }
            Stmt::NewArray { len, .. } => atom(len, &mut out),
            Stmt::If { cond, .. } => match cond {
                Cond::Compare(_, a, b) => {
                    atom(a, &mut out);
                    atom(b, &mut out);
                }
                Cond::Truthy(a) => atom(a, &mut out),
            },
            Stmt::Return(Some(a)) => atom(a, &mut out),
            Stmt::Sugar(s) => match s {
                Sugar::Incr { target, .. } => place_read(target, true, &mut out),
                Sugar::Compound { target, value, .. } => {
                    place_read(target, true, &mut out);
                    atom(value, &mut out);
                }
                Sugar::Template { parts, .. } => {
                    for p in parts {
                        if let TemplatePiece::Value(a) = p {
                            atom(a, &mut out);
                        }
                    }
                }
                Sugar::ObjectLiteral { fields, .. } => {
                    for (_, a) in fields {
                        atom(a, &mut out);
                    }
                }
                Sugar::ComponentCreate { args, .. } => {
                    for a in args {
                        atom(a, &mut out);
                    }
                }
                Sugar::ComponentAttr { base: b, args, .. } => {
                    out.push(b);
                    for a in args {
                        atom(a, &mut out);
                    }
                }
                Sugar::ComponentPop { .. } => {}
            },
            Stmt::New { .. } | Stmt::Goto(_) | Stmt::Return(None) | Stmt::Label(_) | Stmt::Nop => {}
        }
        out
    }

    /// Calls `f` on every local name the statement mentions, defs included.
    pub fn visit_locals_mut(&mut self, f: &mut dyn FnMut(&mut String)) {
        fn atom(a: &mut Atom, f: &mut dyn FnMut(&mut String)) {
            if let Atom::Local(l) = a {
                f(l);
            }
        }
        fn base(b: &mut FieldBase, f: &mut dyn FnMut(&mut String)) {
            if let FieldBase::Local(l) = b {
                f(l);
            }
        }
        fn place(p: &mut Place, f: &mut dyn FnMut(&mut String)) {
            match p {
                Place::Local(l) => f(l),
                Place::Field { base: b, .. } => base(b, f),
                Place::Array { base: b, index } => {
                    f(b);
                    atom(index, f);
                }
            }
        }
        match self {
            Stmt::Assign { lhs, rhs } => {
                match rhs {
                    Rvalue::Atom(a) | Rvalue::Unary(_, a) => atom(a, f),
                    Rvalue::Field { base: b, .. } => base(b, f),
                    Rvalue::Array { base: b, index } => {
                        f(b);
                        atom(index, f);
                    }
                    Rvalue::Binary(_, a, b) => {
                        atom(a, f);
                        atom(b, f);
                    }
                    Rvalue::Param(_) | Rvalue::This => {}
                }
                place(lhs, f);
            }
            Stmt::Invoke(inv) => {
                match &mut inv.kind {
                    CallKind::Pointer => f(&mut inv.method),
                    CallKind::Instance(b) | CallKind::Special { base: b, .. } => f(b),
                    _ => {}
                }
                inv.args.iter_mut().for_each(|a| atom(a, f));
                if let Some(r) = &mut inv.result {
                    f(r);
                }
            }
            Stmt::New { result, .. } => f(result),
            Stmt::NewArray { result, len } => {
                atom(len, f);
                f(result);
            }
            Stmt::If { cond, .. } => match cond {
                Cond::Compare(_, a, b) => {
                    atom(a, f);
                    atom(b, f);
                }
                Cond::Truthy(a) => atom(a, f),
            },
            Stmt::Return(Some(a)) => atom(a, f),
            Stmt::Sugar(s) => match s {
                Sugar::Incr { target, .. } => place(target, f),
                Sugar::Compound { target, value, .. } => {
                    atom(value, f);
                    place(target, f);
                }
                Sugar::Template { result, parts } => {
                    for p in parts {
                        if let TemplatePiece::Value(a) = p {
                            atom(a, f);
                        }
                    }
                    f(result);
                }
                Sugar::ObjectLiteral { result, fields, .. } => {
                    fields.iter_mut().for_each(|(_, a)| atom(a, f));
                    f(result);
                }
                Sugar::ComponentCreate { args, result, .. } => {
                    args.iter_mut().for_each(|a| atom(a, f));
                    f(result);
                }
                Sugar::ComponentAttr { base: b, args, .. } => {
                    f(b);
                    args.iter_mut().for_each(|a| atom(a, f));
                }
                Sugar::ComponentPop { .. } => {}
            },
            Stmt::Goto(_) | Stmt::Return(None) | Stmt::Label(_) | Stmt::Nop => {}
        }
    }

    pub fn invoke(&self) -> Option<&Invoke> {
        match self {
            Stmt::Invoke(i) => Some(i),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalInfo {
    pub name: String,
    /// Type from a source annotation, if any.
    pub declared: Option<Type>,
}

/// Lowered body of a method: both CFGs plus analysis results attached later.
#[derive(Debug, Clone)]
pub struct ArkBody {
    pub locals: Vec<LocalInfo>,
    pub original_cfg: Cfg,
    pub cfg: Cfg,
    /// Inferred type per local, filled in by type inference.
    pub types: BTreeMap<String, Type>,
}

impl ArkBody {
    pub fn local(&self, name: &str) -> Option<&LocalInfo> {
        self.locals.iter().find(|l| l.name == name)
    }

    pub fn type_of(&self, name: &str) -> Type {
        self.types.get(name).cloned().unwrap_or(Type::Unknown)
    }
}

/// Statement with an optional expansion into core statements.
#[derive(Debug, Clone, PartialEq)]
pub struct LStmt {
    pub stmt: Stmt,
    pub span: Span,
    pub expansion: Option<Vec<Stmt>>,
}

/// Builds both CFGs from a lowered statement list.
pub fn build_body(locals: Vec<LocalInfo>, stmts: &[LStmt]) -> Result<ArkBody, CfgError> {
    let original: Vec<(Stmt, Span)> = stmts.iter().map(|s| (s.stmt.clone(), s.span)).collect();
    let mut simplified = Vec::with_capacity(stmts.len());
    for s in stmts {
        match &s.expansion {
            Some(exp) => simplified.extend(exp.iter().map(|e| (e.clone(), s.span))),
            None => simplified.push((s.stmt.clone(), s.span)),
        }
    }
    Ok(ArkBody { locals, original_cfg: build_cfg(original)?, cfg: build_cfg(simplified)?, types: BTreeMap::new() })
}

/// Replaces every sugar statement by its expansion. Idempotent.
pub fn desugar(stmts: &[LStmt]) -> Vec<LStmt> {
    let mut out = Vec::with_capacity(stmts.len());
    for s in stmts {
        match &s.expansion {
            Some(exp) => out.extend(exp.iter().map(|e| LStmt { stmt: e.clone(), span: s.span, expansion: None })),
            None => out.push(s.clone()),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Place {
        Place::Local("x".into())
    }

    fn sugared() -> Vec<LStmt> {
        let one = Atom::Const(Constant::Number(1.0));
        let incr = LStmt {
            stmt: Stmt::Sugar(Sugar::Incr { target: x(), increment: true }),
            span: Span::new(0, 3, 1, 1),
            expansion: Some(vec![Stmt::Assign { lhs: x(), rhs: Rvalue::Binary(BinaryOp::Add, Atom::Local("x".into()), one.clone()) }]),
        };
        let plain = LStmt { stmt: Stmt::Assign { lhs: x(), rhs: Rvalue::Atom(one) }, span: Span::new(4, 9, 2, 1), expansion: None };
        vec![plain.clone(), incr, plain, LStmt { stmt: Stmt::Return(None), span: Span::default(), expansion: None }]
    }

    #[test]
    fn desugar_expands_and_is_idempotent() {
        let once = desugar(&sugared());
        assert_eq!(once.len(), 4);
        assert!(once.iter().all(|s| s.expansion.is_none() && !matches!(s.stmt, Stmt::Sugar(_))));
        assert_eq!(once[1].span, Span::new(0, 3, 1, 1));
        assert_eq!(desugar(&once), once);
    }

    #[test]
    fn build_body_keeps_sugar_only_in_original() {
        let body = build_body(Vec::new(), &sugared()).unwrap();
        let sugar = |c: &Cfg| c.stmts().filter(|s| matches!(s.stmt, Stmt::Sugar(_))).count();
        assert_eq!(sugar(&body.original_cfg), 1);
        assert_eq!(sugar(&body.cfg), 0);
    }
}
