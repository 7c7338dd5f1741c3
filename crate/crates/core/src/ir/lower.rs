//! AST to three-address lowering.
//!
//! Every intermediate value lands in a fresh `temp<N>`; call results in
//! argument or subscript-base position use `_ret<N>`. Operands and arguments
//! are evaluated strictly left to right. Control flow is emitted directly in
//! label/goto form.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::*;
use crate::diag::{Code, Diagnostic};
use super::Stmt;
use crate::frontend::ast::{self, *};
use crate::scene::CONSTRUCTOR;

/// How lowering classifies a component name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Component {
    /// System component backed by an SDK interface class (`RowInterface`).
    System(ClassSignature),
    /// User-defined struct component.
    Custom(ClassSignature),
    Unknown,
}

/// Name resolution services lowering needs from the project model.
/// `scope` is the class owning the method being lowered.
pub trait Resolver {
    fn class(&self, name: &str, scope: &ClassSignature) -> Option<ClassSignature>;
    /// Default class holding a top-level variable `name` visible from `scope`.
    fn global(&self, name: &str, scope: &ClassSignature) -> Option<ClassSignature>;
    /// Top-level function `name` visible from `scope`.
    fn function(&self, name: &str, scope: &ClassSignature) -> Option<MethodSignature>;
    /// Default class of a namespace named `name`.
    fn namespace(&self, name: &str, scope: &ClassSignature) -> Option<ClassSignature>;
    fn super_class(&self, class: &ClassSignature) -> Option<ClassRef>;
    /// True when `class` or an ancestor declares a constructor.
    fn has_constructor(&self, class: &ClassSignature) -> bool;
    fn component(&self, name: &str, scope: &ClassSignature) -> Component;
    fn resolve_type(&self, ty: &TypeAnno, scope: &ClassSignature) -> Type;
}

/// File holding synthesized interfaces for components without a stub.
pub const SYNTHESIZED_STUBS: &str = "@stubs/synthesized.ets";

pub fn component_interface_name(component: &str) -> String {
    format!("{component}Interface")
}

/// One piece of a method body.
#[derive(Debug, Clone, Copy)]
pub enum Piece<'a> {
    Stmt(&'a ast::Stmt),
    /// `Class.name = init` for top-level variables and static fields.
    StaticInit { class: &'a ClassSignature, name: &'a str, init: &'a Expr, span: Span },
    /// `this.name = init` for instance field initializers.
    FieldInit { name: &'a str, init: &'a Expr, span: Span },
    /// Expression body of an arrow function.
    ReturnExpr(&'a Expr),
}

pub struct MethodInput<'a> {
    pub sig: MethodSignature,
    pub is_static: bool,
    pub params: &'a [Param],
    pub body: Vec<Piece<'a>>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct LoweredMethod {
    pub locals: Vec<LocalInfo>,
    pub stmts: Vec<LStmt>,
}

/// Arrow or anonymous function hoisted to a named method of the owning class.
#[derive(Debug, Clone)]
pub struct HoistedMethod {
    pub index: usize,
    pub sig: MethodSignature,
    pub is_static: bool,
    pub params: Vec<(String, Option<Type>)>,
    pub ret: Option<Type>,
    pub lowered: LoweredMethod,
    pub span: Span,
}

/// Class synthesized from an object literal.
#[derive(Debug, Clone)]
pub struct AnonClass {
    pub sig: ClassSignature,
    pub fields: Vec<(String, Option<Type>)>,
    pub span: Span,
}

/// Lowering state shared by all methods of one file.
pub struct FileLowerer<'r> {
    resolver: &'r dyn Resolver,
    path: String,
    anon_counter: usize,
    pub hoisted: Vec<HoistedMethod>,
    pub anon_classes: Vec<AnonClass>,
    /// Components without a stub, with the attribute methods called on them.
    pub unknown_components: BTreeMap<String, BTreeSet<(String, usize)>>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug)]
struct LowerError {
    span: Span,
    message: String,
}

type LResult<T> = Result<T, LowerError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pos {
    Value,
    Arg,
    SubscriptBase,
}

impl<'r> FileLowerer<'r> {
    pub fn new(resolver: &'r dyn Resolver, path: impl Into<String>) -> Self {
        FileLowerer {
            resolver,
            path: path.into(),
            anon_counter: 0,
            hoisted: Vec::new(),
            anon_classes: Vec::new(),
            unknown_components: BTreeMap::new(),
            diagnostics: Vec::new(),
        }
    }

    fn next_anon(&mut self) -> usize {
        self.anon_counter += 1;
        self.anon_counter
    }

    fn warn(&mut self, code: Code, span: Span, message: String) {
        self.diagnostics.push(Diagnostic::warning(&self.path, code, span, message));
    }

    pub fn lower_method(&mut self, input: &MethodInput<'_>) -> LoweredMethod {
        let mut m = MethodLowerer::new(self, input.sig.clone(), input.is_static, &input.body);
        m.span = input.span;
        m.identity(input.params);
        m.run(&input.body);
        m.finish()
    }

    /// Hoisted methods ordered by their anonymous index.
    pub fn take_hoisted(&mut self) -> Vec<HoistedMethod> {
        let mut h = std::mem::take(&mut self.hoisted);
        h.sort_by_key(|m| m.index);
        h
    }
}

struct MethodLowerer<'f, 'r> {
    file: &'f mut FileLowerer<'r>,
    sig: MethodSignature,
    is_static: bool,
    out: Vec<LStmt>,
    locals: Vec<LocalInfo>,
    local_set: HashSet<String>,
    /// Names declared anywhere in the body (function-level scoping).
    declared: HashSet<String>,
    source_names: HashSet<String>,
    temp_counter: usize,
    ret_counter: usize,
    label_counter: usize,
    loops: Vec<(usize, usize)>,
    /// Locals bound once to a hoisted closure, with its captured names.
    closures: HashMap<String, Vec<String>>,
    assign_counts: HashMap<String, usize>,
    /// Temps created by [`MethodLowerer::fresh`].
    generated: HashSet<String>,
    span: Span,
}

impl<'f, 'r> MethodLowerer<'f, 'r> {
    fn new(file: &'f mut FileLowerer<'r>, sig: MethodSignature, is_static: bool, body: &[Piece<'_>]) -> Self {
        let mut declared = HashSet::new();
        let mut source_names = HashSet::new();
        let mut assign_counts = HashMap::new();
        for p in body {
            match p {
                Piece::Stmt(s) => {
                    decls_stmt(s, &mut declared);
                    idents_stmt(s, &mut source_names);
                    assigns_stmt(s, &mut assign_counts);
                }
                Piece::StaticInit { init, .. } | Piece::FieldInit { init, .. } | Piece::ReturnExpr(init) => {
                    idents_expr(init, &mut source_names);
                    assigns_expr(init, &mut assign_counts);
                }
            }
        }
        source_names.extend(declared.iter().cloned());
        MethodLowerer {
            file,
            sig,
            is_static,
            out: Vec::new(),
            locals: Vec::new(),
            local_set: HashSet::new(),
            declared,
            source_names,
            temp_counter: 0,
            ret_counter: 0,
            label_counter: 0,
            loops: Vec::new(),
            closures: HashMap::new(),
            assign_counts,
            generated: HashSet::new(),
            span: Span::default(),
        }
    }

    fn scope(&self) -> &ClassSignature {
        &self.sig.class
    }

    fn add_local(&mut self, name: &str, declared: Option<Type>) {
        if self.local_set.insert(name.to_string()) {
            self.locals.push(LocalInfo { name: name.to_string(), declared });
        } else if declared.is_some() {
            if let Some(l) = self.locals.iter_mut().find(|l| l.name == name) {
                if l.declared.is_none() {
                    l.declared = declared;
                }
            }
        }
    }

    fn is_local(&self, name: &str) -> bool {
        self.local_set.contains(name) || self.declared.contains(name) || (name == THIS && !self.is_static)
    }

    fn fresh(&mut self, prefix: &str) -> String {
        loop {
            let counter = if prefix == RET_PREFIX { &mut self.ret_counter } else { &mut self.temp_counter };
            let name = format!("{prefix}{counter}");
            *counter += 1;
            if !self.source_names.contains(&name) && !self.local_set.contains(&name) {
                self.add_local(&name, None);
                self.generated.insert(name.clone());
                return name;
            }
        }
    }

    fn temp(&mut self) -> String {
        self.fresh(TEMP_PREFIX)
    }

    fn label(&mut self) -> usize {
        self.label_counter += 1;
        self.label_counter
    }

    fn emit(&mut self, stmt: Stmt) {
        self.out.push(LStmt { stmt, span: self.span, expansion: None });
    }

    fn emit_sugar(&mut self, sugar: Sugar, expansion: Vec<Stmt>) {
        self.out.push(LStmt { stmt: Stmt::Sugar(sugar), span: self.span, expansion: Some(expansion) });
    }

    fn error<T>(&self, span: Span, message: impl Into<String>) -> LResult<T> {
        Err(LowerError { span, message: message.into() })
    }

    // ---- method structure ------------------------------------------------

    fn identity(&mut self, params: &[Param]) {
        if !self.is_static {
            self.add_local(THIS, None);
            self.emit(Stmt::Assign { lhs: Place::Local(THIS.into()), rhs: Rvalue::This });
        }
        for (i, p) in params.iter().enumerate() {
            let ty = p.ty.as_ref().map(|t| self.file.resolver.resolve_type(t, &self.sig.class));
            let ty = if p.rest { ty.map(|t| if matches!(t, Type::Array(_)) { t } else { Type::Array(Box::new(t)) }) } else { ty };
            self.add_local(&p.name, ty);
            self.span = p.span;
            self.emit(Stmt::Assign { lhs: Place::Local(p.name.clone()), rhs: Rvalue::Param(i) });
        }
    }

    fn run(&mut self, body: &[Piece<'_>]) {
        for piece in body {
            let mark = self.out.len();
            let res = match *piece {
                Piece::Stmt(s) => self.stmt(s),
                Piece::StaticInit { class, name, init, span } => {
                    self.span = span;
                    let place = Place::Field {
                        base: FieldBase::Class(ClassRef { name: class.qualified_name(), sig: Some(class.clone()) }),
                        field: name.to_string(),
                    };
                    self.store(place, init)
                }
                Piece::FieldInit { name, init, span } => {
                    self.span = span;
                    let place = Place::Field { base: FieldBase::Local(THIS.into()), field: name.to_string() };
                    self.store(place, init)
                }
                Piece::ReturnExpr(e) => {
                    self.span = e.span;
                    self.atom(e, Pos::Value).map(|a| self.emit(Stmt::Return(Some(a))))
                }
            };
            if let Err(e) = res {
                self.out.truncate(mark);
                let msg = format!("cannot lower statement: {}", e.message);
                self.file.diagnostics.push(Diagnostic::error(&self.file.path, Code::LoweringError, e.span, msg));
            }
        }
    }

    fn finish(mut self) -> LoweredMethod {
        let terminated = matches!(self.out.last().map(|s| &s.stmt), Some(Stmt::Return(_)) | Some(Stmt::Goto(_)));
        if !terminated {
            self.emit(Stmt::Return(None));
        }
        self.renumber_temps();
        LoweredMethod { locals: self.locals, stmts: self.out }
    }

    /// Renames temps so numbering follows the order of first definition in
    /// the desugared statement sequence. Temps are allocated before their
    /// operands are lowered, so creation order is outermost-first.
    fn renumber_temps(&mut self) {
        let mut order: Vec<String> = Vec::new();
        let mut seen = HashSet::new();
        for s in &self.out {
            let stmts = s.expansion.as_deref().unwrap_or(std::slice::from_ref(&s.stmt));
            for st in stmts {
                if let Some(d) = st.def() {
                    if self.generated.contains(d) && seen.insert(d.to_string()) {
                        order.push(d.to_string());
                    }
                }
            }
        }
        for l in &self.locals {
            if self.generated.contains(&l.name) && seen.insert(l.name.clone()) {
                order.push(l.name.clone());
            }
        }
        let mut counters: HashMap<&str, usize> = HashMap::new();
        let mut map: HashMap<String, String> = HashMap::new();
        for old in &order {
            let prefix = if old.starts_with(RET_PREFIX) { RET_PREFIX } else { TEMP_PREFIX };
            let c = counters.entry(prefix).or_insert(0);
            let name = loop {
                let n = format!("{prefix}{c}");
                *c += 1;
                if !self.source_names.contains(&n) {
                    break n;
                }
            };
            map.insert(old.clone(), name);
        }
        if map.iter().all(|(a, b)| a == b) {
            return;
        }
        let mut rename = |l: &mut String| {
            if let Some(n) = map.get(l.as_str()) {
                *l = n.clone();
            }
        };
        for s in &mut self.out {
            s.stmt.visit_locals_mut(&mut rename);
            if let Some(exp) = &mut s.expansion {
                exp.iter_mut().for_each(|e| e.visit_locals_mut(&mut rename));
            }
        }
        let slots: Vec<usize> = (0..self.locals.len()).filter(|&i| self.generated.contains(&self.locals[i].name)).collect();
        for (slot, old) in slots.into_iter().zip(&order) {
            self.locals[slot] = LocalInfo { name: map[old].clone(), declared: None };
        }
    }

    // ---- statements ------------------------------------------------------

    fn stmt(&mut self, s: &ast::Stmt) -> LResult<()> {
        self.span = s.span;
        match &s.kind {
            StmtKind::Var(v) => {
                let ty = v.ty.as_ref().map(|t| self.file.resolver.resolve_type(t, &self.sig.class));
                self.add_local(&v.name, ty);
                if let Some(init) = &v.init {
                    self.span = v.span;
                    self.into(init, &v.name)?;
                }
                Ok(())
            }
            StmtKind::Expr(e) => self.expr_stmt(e),
            StmtKind::If { cond, then, otherwise } => {
                let lt = self.label();
                let lf = self.label();
                let lend = if otherwise.is_some() { self.label() } else { lf };
                self.cond_jump(cond, lt, lf)?;
                self.emit(Stmt::Label(lt));
                self.stmt(then)?;
                self.emit(Stmt::Goto(lend));
                if let Some(e) = otherwise {
                    self.emit(Stmt::Label(lf));
                    self.stmt(e)?;
                    self.emit(Stmt::Goto(lend));
                }
                self.emit(Stmt::Label(lend));
                Ok(())
            }
            StmtKind::While { cond, body } => {
                let head = self.label();
                let lbody = self.label();
                let exit = self.label();
                self.emit(Stmt::Label(head));
                self.cond_jump(cond, lbody, exit)?;
                self.emit(Stmt::Label(lbody));
                self.loops.push((head, exit));
                let r = self.stmt(body);
                self.loops.pop();
                r?;
                self.emit(Stmt::Goto(head));
                self.emit(Stmt::Label(exit));
                Ok(())
            }
            StmtKind::For { init, cond, update, body } => {
                if let Some(i) = init {
                    self.stmt(i)?;
                }
                let head = self.label();
                let lbody = self.label();
                let cont = self.label();
                let exit = self.label();
                self.emit(Stmt::Label(head));
                if let Some(c) = cond {
                    self.span = c.span;
                    self.cond_jump(c, lbody, exit)?;
                }
                self.emit(Stmt::Label(lbody));
                self.loops.push((cont, exit));
                let r = self.stmt(body);
                self.loops.pop();
                r?;
                self.emit(Stmt::Label(cont));
                if let Some(u) = update {
                    self.span = u.span;
                    self.expr_stmt(u)?;
                }
                self.emit(Stmt::Goto(head));
                self.emit(Stmt::Label(exit));
                Ok(())
            }
            StmtKind::Return(value) => {
                let v = match value {
                    Some(e) => Some(self.atom(e, Pos::Value)?),
                    None => None,
                };
                self.span = s.span;
                self.emit(Stmt::Return(v));
                Ok(())
            }
            StmtKind::Break | StmtKind::Continue => {
                let Some(&(cont, brk)) = self.loops.last() else {
                    return self.error(s.span, "`break`/`continue` outside of a loop");
                };
                self.emit(Stmt::Goto(if matches!(s.kind, StmtKind::Break) { brk } else { cont }));
                Ok(())
            }
            StmtKind::Block(b) => {
                for s in &b.stmts {
                    self.stmt(s)?;
                }
                Ok(())
            }
            StmtKind::Component(c) => self.component(c),
            StmtKind::Empty => Ok(()),
        }
    }

    fn expr_stmt(&mut self, e: &Expr) -> LResult<()> {
        self.span = e.span;
        match &e.kind {
            ExprKind::Assign { op, target, value } => self.assign(*op, target, value, false).map(|_| ()),
            ExprKind::Update { increment, target, .. } => {
                let place = self.place(target)?;
                self.incr(place, *increment);
                Ok(())
            }
            ExprKind::Call { callee, args } => {
                let t = self.temp();
                self.call(callee, args, Some(t))
            }
            ExprKind::New { .. } => {
                let t = self.temp();
                self.into(e, &t)
            }
            _ => self.atom(e, Pos::Value).map(|_| ()),
        }
    }

    /// Branches to `t` when `e` is truthy, else to `f`; `&&`, `||` and `!`
    /// short-circuit.
    fn cond_jump(&mut self, e: &Expr, t: usize, f: usize) -> LResult<()> {
        match &e.kind {
            ExprKind::Logical(LogicalOp::And, a, b) => {
                let mid = self.label();
                self.cond_jump(a, mid, f)?;
                self.emit(Stmt::Label(mid));
                self.cond_jump(b, t, f)
            }
            ExprKind::Logical(LogicalOp::Or, a, b) => {
                let mid = self.label();
                self.cond_jump(a, t, mid)?;
                self.emit(Stmt::Label(mid));
                self.cond_jump(b, t, f)
            }
            ExprKind::Unary(UnaryOp::Not, a) => self.cond_jump(a, f, t),
            ExprKind::Binary(op, a, b) if op.is_relational() && !matches!(op, BinaryOp::InstanceOf | BinaryOp::In) => {
                let x = self.atom_before(a, &[b], Pos::Value)?;
                let y = self.atom(b, Pos::Value)?;
                self.span = e.span;
                self.emit(Stmt::If { cond: Cond::Compare(*op, x, y), then: t, els: f });
                Ok(())
            }
            _ => {
                let x = self.atom(e, Pos::Value)?;
                self.span = e.span;
                self.emit(Stmt::If { cond: Cond::Truthy(x), then: t, els: f });
                Ok(())
            }
        }
    }

    // ---- expressions -----------------------------------------------------

    /// Lowers `e` to an operand, introducing a temp when needed.
    fn atom(&mut self, e: &Expr, pos: Pos) -> LResult<Atom> {
        match &e.kind {
            ExprKind::Ident(n) => self.ident(n, e.span),
            ExprKind::This => Ok(Atom::Local(THIS.into())),
            ExprKind::Number(n) => Ok(Atom::Const(Constant::Number(*n))),
            ExprKind::Str(s) => Ok(Atom::Const(Constant::String(s.clone()))),
            ExprKind::Bool(b) => Ok(Atom::Const(Constant::Bool(*b))),
            ExprKind::Null => Ok(Atom::Const(Constant::Null)),
            ExprKind::Undefined => Ok(Atom::Const(Constant::Undefined)),
            ExprKind::Unary(UnaryOp::Neg, inner) if matches!(inner.kind, ExprKind::Number(_)) => {
                let ExprKind::Number(n) = inner.kind else { unreachable!() };
                Ok(Atom::Const(Constant::Number(-n)))
            }
            ExprKind::Arrow { .. } | ExprKind::Function { .. } => {
                let (sig, captures) = self.hoist(e)?;
                if !captures.is_empty() {
                    self.capture_warning(e.span, &captures);
                }
                Ok(Atom::Const(Constant::FuncRef(sig)))
            }
            ExprKind::Super => self.error(e.span, "`super` used as a value"),
            ExprKind::Call { .. } if pos != Pos::Value => {
                let r = self.fresh(RET_PREFIX);
                self.into(e, &r)?;
                Ok(Atom::Local(r))
            }
            _ => {
                let t = self.temp();
                self.into(e, &t)?;
                Ok(Atom::Local(t))
            }
        }
    }

    /// Lowers `e` where operands in `later` are evaluated after it. A local
    /// read directly is copied first if one of them assigns it.
    fn atom_before(&mut self, e: &Expr, later: &[&Expr], pos: Pos) -> LResult<Atom> {
        let a = self.atom(e, pos)?;
        match &a {
            Atom::Local(l) if matches!(&e.kind, ExprKind::Ident(n) if n == l) && writes_local(later, l) => {
                let t = self.temp();
                self.emit(Stmt::Assign { lhs: Place::Local(t.clone()), rhs: Rvalue::Atom(a) });
                Ok(Atom::Local(t))
            }
            _ => Ok(a),
        }
    }

    /// Like [`Self::atom`] but always yields a local.
    fn local(&mut self, e: &Expr, pos: Pos) -> LResult<String> {
        match self.atom(e, pos)? {
            Atom::Local(l) => Ok(l),
            Atom::Const(c) => {
                let t = self.temp();
                self.emit(Stmt::Assign { lhs: Place::Local(t.clone()), rhs: Rvalue::Atom(Atom::Const(c)) });
                Ok(t)
            }
        }
    }

    fn ident(&mut self, n: &str, span: Span) -> LResult<Atom> {
        if self.is_local(n) {
            self.add_local(n, None);
            return Ok(Atom::Local(n.to_string()));
        }
        if let Some(g) = self.file.resolver.global(n, self.scope()) {
            let t = self.temp();
            self.span = span;
            self.emit(Stmt::Assign { lhs: Place::Local(t.clone()), rhs: Rvalue::Field { base: class_base(g), field: n.into() } });
            return Ok(Atom::Local(t));
        }
        if let Some(f) = self.file.resolver.function(n, self.scope()) {
            return Ok(Atom::Const(Constant::FuncRef(f)));
        }
        // Unknown name: modeled as a local that is never defined.
        self.add_local(n, None);
        Ok(Atom::Local(n.to_string()))
    }

    /// Class named by an identifier or dotted path that is not shadowed by a local.
    fn static_class(&self, e: &Expr) -> Option<ClassRef> {
        let path = static_path(e)?;
        let first = path.split('.').next().unwrap_or(&path);
        if self.is_local(first) || self.file.resolver.global(first, self.scope()).is_some() {
            return None;
        }
        if let Some(sig) = self.file.resolver.class(&path, self.scope()) {
            return Some(ClassRef { name: path, sig: Some(sig) });
        }
        if !path.contains('.') {
            if let Some(sig) = self.file.resolver.namespace(&path, self.scope()) {
                return Some(ClassRef { name: sig.qualified_name(), sig: Some(sig) });
            }
        }
        None
    }

    /// Evaluates `e` and stores its value into local `dest`.
    fn into(&mut self, e: &Expr, dest: &str) -> LResult<()> {
        let d = || Place::Local(dest.to_string());
        match &e.kind {
            ExprKind::Ident(_)
            | ExprKind::This
            | ExprKind::Number(_)
            | ExprKind::Str(_)
            | ExprKind::Bool(_)
            | ExprKind::Null
            | ExprKind::Undefined => {
                let a = self.atom(e, Pos::Value)?;
                self.span = e.span;
                self.emit(Stmt::Assign { lhs: d(), rhs: Rvalue::Atom(a) });
            }
            ExprKind::Arrow { .. } | ExprKind::Function { .. } => {
                let (sig, captures) = self.hoist(e)?;
                let single = self.assign_counts.get(dest).copied().unwrap_or(0) <= 1 && self.declared.contains(dest);
                if !captures.is_empty() {
                    if single {
                        self.closures.insert(dest.to_string(), captures);
                    } else {
                        self.capture_warning(e.span, &captures);
                    }
                }
                self.span = e.span;
                self.emit(Stmt::Assign { lhs: d(), rhs: Rvalue::Atom(Atom::Const(Constant::FuncRef(sig))) });
            }
            ExprKind::Member { object, property } => {
                let base = self.field_base(object)?;
                self.span = e.span;
                self.emit(Stmt::Assign { lhs: d(), rhs: Rvalue::Field { base, field: property.clone() } });
            }
            ExprKind::Index { object, index } => {
                let base = self.local(object, Pos::SubscriptBase)?;
                let index = self.atom(index, Pos::Value)?;
                self.span = e.span;
                self.emit(Stmt::Assign { lhs: d(), rhs: Rvalue::Array { base, index } });
            }
            ExprKind::Binary(op, l, r) => {
                let a = self.atom_before(l, &[r], Pos::Value)?;
                let b = match (&r.kind, op) {
                    (ExprKind::Ident(n), BinaryOp::InstanceOf) if !self.is_local(n) => Atom::Const(Constant::String(n.clone())),
                    _ => self.atom(r, Pos::Value)?,
                };
                self.span = e.span;
                self.emit(Stmt::Assign { lhs: d(), rhs: Rvalue::Binary(*op, a, b) });
            }
            ExprKind::Unary(UnaryOp::Neg, inner) if matches!(inner.kind, ExprKind::Number(_)) => {
                let a = self.atom(e, Pos::Value)?;
                self.span = e.span;
                self.emit(Stmt::Assign { lhs: d(), rhs: Rvalue::Atom(a) });
            }
            ExprKind::Unary(op, inner) => {
                let a = self.atom(inner, Pos::Value)?;
                self.span = e.span;
                self.emit(Stmt::Assign { lhs: d(), rhs: Rvalue::Unary(*op, a) });
            }
            ExprKind::Logical(op, l, r) => {
                let a = self.atom(l, Pos::Value)?;
                self.span = e.span;
                self.emit(Stmt::Assign { lhs: d(), rhs: Rvalue::Atom(a) });
                let lr = self.label();
                let lend = self.label();
                let (t, f) = if *op == LogicalOp::And { (lr, lend) } else { (lend, lr) };
                self.emit(Stmt::If { cond: Cond::Truthy(Atom::Local(dest.into())), then: t, els: f });
                self.emit(Stmt::Label(lr));
                self.into(r, dest)?;
                self.emit(Stmt::Label(lend));
            }
            ExprKind::Conditional(c, a, b) => {
                let lt = self.label();
                let lf = self.label();
                let lend = self.label();
                self.cond_jump(c, lt, lf)?;
                self.emit(Stmt::Label(lt));
                self.into(a, dest)?;
                self.emit(Stmt::Goto(lend));
                self.emit(Stmt::Label(lf));
                self.into(b, dest)?;
                self.emit(Stmt::Goto(lend));
                self.emit(Stmt::Label(lend));
            }
            ExprKind::Call { callee, args } => self.call(callee, args, Some(dest.to_string()))?,
            ExprKind::New { class, args } => {
                let args = self.args(args)?;
                let sig = self.file.resolver.class(class, self.scope());
                let needs_ctor = sig.as_ref().is_some_and(|s| self.file.resolver.has_constructor(s)) || !args.is_empty();
                let class = ClassRef { name: class.clone(), sig };
                self.span = e.span;
                self.emit(Stmt::New { result: dest.into(), class: class.clone() });
                if needs_ctor {
                    self.emit(Stmt::Invoke(Invoke {
                        kind: CallKind::Special { base: dest.into(), class },
                        method: CONSTRUCTOR.into(),
                        args,
                        result: None,
                    }));
                }
            }
            ExprKind::Template(segs) => {
                let mut parts = Vec::new();
                for s in segs {
                    match s {
                        TemplateSegment::Str(s) => parts.push(TemplatePiece::Str(s.clone())),
                        TemplateSegment::Expr(x) => parts.push(TemplatePiece::Value(self.atom(x, Pos::Value)?)),
                    }
                }
                self.span = e.span;
                let expansion = self.concat(&parts, dest);
                self.emit_sugar(Sugar::Template { result: dest.into(), parts }, expansion);
            }
            ExprKind::Object(props) => {
                let mut fields = Vec::new();
                for (k, v) in props {
                    fields.push((k.clone(), self.atom(v, Pos::Value)?));
                }
                let n = self.file.next_anon();
                let scope = self.scope().clone();
                let sig = ClassSignature::new(scope.file.clone(), scope.namespace.clone(), format!("{ANON_PREFIX}{n}"));
                let mut seen = HashSet::new();
                let decl_fields = fields
                    .iter()
                    .filter(|(k, _)| seen.insert(k.clone()))
                    .map(|(k, a)| (k.clone(), literal_type(a)))
                    .collect();
                self.file.anon_classes.push(AnonClass { sig: sig.clone(), fields: decl_fields, span: e.span });
                let class = ClassRef { name: sig.name.clone(), sig: Some(sig) };
                let mut expansion = vec![Stmt::New { result: dest.into(), class: class.clone() }];
                for (k, a) in &fields {
                    expansion.push(Stmt::Assign {
                        lhs: Place::Field { base: FieldBase::Local(dest.into()), field: k.clone() },
                        rhs: Rvalue::Atom(a.clone()),
                    });
                }
                self.span = e.span;
                self.emit_sugar(Sugar::ObjectLiteral { result: dest.into(), class, fields }, expansion);
            }
            ExprKind::Array(elems) => {
                let mut atoms = Vec::new();
                for x in elems {
                    atoms.push(self.atom(x, Pos::Value)?);
                }
                self.span = e.span;
                self.emit(Stmt::NewArray { result: dest.into(), len: Atom::Const(Constant::Number(atoms.len() as f64)) });
                for (i, a) in atoms.into_iter().enumerate() {
                    self.emit(Stmt::Assign {
                        lhs: Place::Array { base: dest.into(), index: Atom::Const(Constant::Number(i as f64)) },
                        rhs: Rvalue::Atom(a),
                    });
                }
            }
            ExprKind::Assign { op, target, value } => {
                let v = self.assign(*op, target, value, true)?;
                self.span = e.span;
                self.emit(Stmt::Assign { lhs: d(), rhs: Rvalue::Atom(v) });
            }
            ExprKind::Update { increment, prefix, target } => {
                let place = self.place(target)?;
                self.span = e.span;
                if *prefix {
                    self.incr(place.clone(), *increment);
                    self.emit(Stmt::Assign { lhs: d(), rhs: read_place(&place) });
                } else {
                    self.emit(Stmt::Assign { lhs: d(), rhs: read_place(&place) });
                    self.incr(place, *increment);
                }
            }
            ExprKind::Super => return self.error(e.span, "`super` used as a value"),
        }
        Ok(())
    }

    fn field_base(&mut self, object: &Expr) -> LResult<FieldBase> {
        if matches!(object.kind, ExprKind::Super) {
            return Ok(FieldBase::Local(THIS.into()));
        }
        if let Some(c) = self.static_class(object) {
            return Ok(FieldBase::Class(c));
        }
        Ok(FieldBase::Local(self.local(object, Pos::Value)?))
    }

    /// Assignable location for `target`; its base is evaluated once.
    fn place(&mut self, target: &Expr) -> LResult<Place> {
        match &target.kind {
            ExprKind::Ident(n) => {
                if self.is_local(n) {
                    self.add_local(n, None);
                    Ok(Place::Local(n.clone()))
                } else if let Some(g) = self.file.resolver.global(n, self.scope()) {
                    Ok(Place::Field { base: class_base(g), field: n.clone() })
                } else {
                    self.add_local(n, None);
                    Ok(Place::Local(n.clone()))
                }
            }
            ExprKind::Member { object, property } => {
                let base = self.field_base(object)?;
                Ok(Place::Field { base, field: property.clone() })
            }
            ExprKind::Index { object, index } => {
                let base = self.local(object, Pos::SubscriptBase)?;
                let index = self.atom(index, Pos::Value)?;
                Ok(Place::Array { base, index })
            }
            _ => self.error(target.span, "invalid assignment target"),
        }
    }

    fn store(&mut self, place: Place, value: &Expr) -> LResult<()> {
        if let Place::Local(l) = &place {
            return self.into(value, l);
        }
        let v = self.atom(value, Pos::Value)?;
        self.emit(Stmt::Assign { lhs: place, rhs: Rvalue::Atom(v) });
        Ok(())
    }

    /// Lowers an assignment; returns the assigned value when `want_value`.
    fn assign(&mut self, op: Option<BinaryOp>, target: &Expr, value: &Expr, want_value: bool) -> LResult<Atom> {
        let span = self.span;
        let place = self.place(target)?;
        match op {
            None => {
                if let Place::Local(l) = &place {
                    if writes_local(&[value], l) {
                        let v = self.atom(value, Pos::Value)?;
                        self.span = span;
                        self.emit(Stmt::Assign { lhs: place.clone(), rhs: Rvalue::Atom(v) });
                    } else {
                        self.into(value, l)?;
                    }
                    return Ok(Atom::Local(l.clone()));
                }
                let v = self.atom(value, Pos::Value)?;
                self.span = span;
                self.emit(Stmt::Assign { lhs: place, rhs: Rvalue::Atom(v.clone()) });
                Ok(v)
            }
            Some(op) => {
                if let Place::Local(l) = &place {
                    if writes_local(&[value], l) {
                        // The old value is read before `value` runs.
                        let old = self.temp();
                        self.emit(Stmt::Assign { lhs: Place::Local(old.clone()), rhs: Rvalue::Atom(Atom::Local(l.clone())) });
                        let v = self.atom(value, Pos::Value)?;
                        self.span = span;
                        self.emit(Stmt::Assign { lhs: place.clone(), rhs: Rvalue::Binary(op, Atom::Local(old), v) });
                        return Ok(Atom::Local(l.clone()));
                    }
                }
                let v = self.atom(value, Pos::Value)?;
                self.span = span;
                let expansion = self.update_expansion(&place, op, v.clone());
                self.emit_sugar(Sugar::Compound { target: place.clone(), op, value: v }, expansion);
                match place {
                    Place::Local(l) => Ok(Atom::Local(l)),
                    p if want_value => {
                        let t = self.temp();
                        self.emit(Stmt::Assign { lhs: Place::Local(t.clone()), rhs: read_place(&p) });
                        Ok(Atom::Local(t))
                    }
                    _ => Ok(Atom::Const(Constant::Undefined)),
                }
            }
        }
    }

    fn incr(&mut self, place: Place, increment: bool) {
        let op = if increment { BinaryOp::Add } else { BinaryOp::Sub };
        let expansion = self.update_expansion(&place, op, Atom::Const(Constant::Number(1.0)));
        self.emit_sugar(Sugar::Incr { target: place, increment }, expansion);
    }

    /// `place = place op value` in three-address form.
    fn update_expansion(&mut self, place: &Place, op: BinaryOp, value: Atom) -> Vec<Stmt> {
        match place {
            Place::Local(l) => {
                vec![Stmt::Assign { lhs: place.clone(), rhs: Rvalue::Binary(op, Atom::Local(l.clone()), value) }]
            }
            _ => {
                let t1 = self.temp();
                let t2 = self.temp();
                vec![
                    Stmt::Assign { lhs: Place::Local(t1.clone()), rhs: read_place(place) },
                    Stmt::Assign { lhs: Place::Local(t2.clone()), rhs: Rvalue::Binary(op, Atom::Local(t1), value) },
                    Stmt::Assign { lhs: place.clone(), rhs: Rvalue::Atom(Atom::Local(t2)) },
                ]
            }
        }
    }

    /// Right-nested string concatenation of template pieces:
    /// `` `!${name}!` `` becomes `t = name + '!'; dest = '!' + t`.
    fn concat(&mut self, parts: &[TemplatePiece], dest: &str) -> Vec<Stmt> {
        let mut pieces: Vec<Atom> = parts
            .iter()
            .filter_map(|p| match p {
                TemplatePiece::Str(s) if s.is_empty() => None,
                TemplatePiece::Str(s) => Some(Atom::Const(Constant::String(s.clone()))),
                TemplatePiece::Value(a) => Some(a.clone()),
            })
            .collect();
        let is_str = |a: &Atom| matches!(a, Atom::Const(Constant::String(_)));
        let d = Place::Local(dest.to_string());
        match pieces.len() {
            0 => return vec![Stmt::Assign { lhs: d, rhs: Rvalue::Atom(Atom::Const(Constant::String(String::new()))) }],
            1 if is_str(&pieces[0]) => return vec![Stmt::Assign { lhs: d, rhs: Rvalue::Atom(pieces.remove(0)) }],
            1 => pieces.insert(0, Atom::Const(Constant::String(String::new()))),
            n if !is_str(&pieces[n - 1]) && !is_str(&pieces[n - 2]) => pieces.push(Atom::Const(Constant::String(String::new()))),
            _ => {}
        }
        let n = pieces.len();
        let mut out = Vec::new();
        let mut acc = pieces[n - 1].clone();
        for i in (0..n - 1).rev() {
            let target = if i == 0 { dest.to_string() } else { self.temp() };
            out.push(Stmt::Assign {
                lhs: Place::Local(target.clone()),
                rhs: Rvalue::Binary(BinaryOp::Add, pieces[i].clone(), acc),
            });
            acc = Atom::Local(target);
        }
        out
    }

    fn args(&mut self, args: &[Expr]) -> LResult<Vec<Atom>> {
        let mut out = Vec::with_capacity(args.len());
        for (i, a) in args.iter().enumerate() {
            let rest: Vec<&Expr> = args[i + 1..].iter().collect();
            out.push(self.atom_before(a, &rest, Pos::Arg)?);
        }
        Ok(out)
    }

    fn call(&mut self, callee: &Expr, args: &[Expr], result: Option<String>) -> LResult<()> {
        let span = self.span;
        let (kind, method) = match &callee.kind {
            ExprKind::Ident(n) if self.is_local(n) => {
                self.add_local(n, None);
                (CallKind::Pointer, n.clone())
            }
            ExprKind::Ident(n) if self.file.resolver.global(n, self.scope()).is_some() => {
                let l = self.local(callee, Pos::Value)?;
                (CallKind::Pointer, l)
            }
            ExprKind::Ident(n) => (CallKind::Free(self.file.resolver.function(n, self.scope())), n.clone()),
            ExprKind::Super => {
                let class = self.super_ref(callee.span)?;
                (CallKind::Special { base: THIS.into(), class }, CONSTRUCTOR.to_string())
            }
            ExprKind::Member { object, property } => {
                if matches!(object.kind, ExprKind::Super) {
                    let class = self.super_ref(object.span)?;
                    (CallKind::Special { base: THIS.into(), class }, property.clone())
                } else if let Some(c) = self.static_class(object) {
                    (CallKind::Static(c), property.clone())
                } else {
                    let base = self.local(object, Pos::Value)?;
                    (CallKind::Instance(base), property.clone())
                }
            }
            _ => {
                let l = self.local(callee, Pos::Value)?;
                (CallKind::Pointer, l)
            }
        };
        let mut atoms = self.args(args)?;
        if kind == CallKind::Pointer {
            if let Some(caps) = self.closures.get(&method) {
                atoms.extend(caps.iter().map(|c| Atom::Local(c.clone())));
            }
        }
        self.span = span;
        self.emit(Stmt::Invoke(Invoke { kind, method, args: atoms, result }));
        Ok(())
    }

    fn super_ref(&self, span: Span) -> LResult<ClassRef> {
        match self.file.resolver.super_class(self.scope()) {
            Some(c) => Ok(c),
            None => self.error(span, "`super` in a class without a superclass"),
        }
    }

    // ---- closures --------------------------------------------------------

    fn capture_warning(&mut self, span: Span, captures: &[String]) {
        let msg = format!("closure captures {} and escapes; captured values are passed only at statically known call sites", captures.join(", "));
        self.file.warn(Code::CaptureUnsupported, span, msg);
    }

    /// Hoists an arrow or anonymous function to `Anonymous_<N>` on the
    /// owning class. Captured outer locals become trailing parameters.
    fn hoist(&mut self, e: &Expr) -> LResult<(MethodSignature, Vec<String>)> {
        let (params, ret, body) = match &e.kind {
            ExprKind::Arrow { params, body } => (params, None, body_pieces_arrow(body)),
            ExprKind::Function { params, ret, body, .. } => (params, ret.as_ref(), body.stmts.iter().map(Piece::Stmt).collect()),
            _ => unreachable!("hoist called on non-function"),
        };
        let index = self.file.next_anon();
        let mut referenced = Vec::new();
        let mut inner_decls: HashSet<String> = params.iter().map(|p| p.name.clone()).collect();
        match &e.kind {
            ExprKind::Arrow { body: ArrowBody::Expr(x), .. } => idents_expr_ordered(x, &mut referenced, &mut inner_decls),
            ExprKind::Arrow { body: ArrowBody::Block(b), .. } | ExprKind::Function { body: b, .. } => {
                for s in &b.stmts {
                    idents_stmt_ordered(s, &mut referenced, &mut inner_decls)
                }
            }
            _ => {}
        }
        let captures: Vec<String> = referenced
            .into_iter()
            .filter(|n| n != THIS && !inner_decls.contains(n) && (self.local_set.contains(n) || self.declared.contains(n)))
            .collect();
        let mut all_params: Vec<Param> = params.clone();
        for c in &captures {
            all_params.push(Param { name: c.clone(), ty: None, rest: false, optional: false, span: e.span });
        }
        let sig = self.scope().method(format!("{ANON_PREFIX}{index}"), all_params.len());
        let is_static = self.is_static;
        let param_types: Vec<(String, Option<Type>)> = all_params
            .iter()
            .map(|p| {
                let ty = match &p.ty {
                    Some(t) => Some(self.file.resolver.resolve_type(t, &self.sig.class)),
                    None => self.locals.iter().find(|l| l.name == p.name).and_then(|l| l.declared.clone()),
                };
                (p.name.clone(), ty)
            })
            .collect();
        let ret = ret.map(|t| self.file.resolver.resolve_type(t, &self.sig.class));
        let lowered = {
            let mut inner = MethodLowerer::new(self.file, sig.clone(), is_static, &body);
            inner.identity(&all_params);
            for (l, (_, ty)) in inner.locals.iter_mut().rev().zip(param_types.iter().rev()) {
                if l.declared.is_none() {
                    l.declared = ty.clone();
                }
            }
            inner.run(&body);
            inner.finish()
        };
        self.file.hoisted.push(HoistedMethod { index, sig: sig.clone(), is_static, params: param_types, ret, lowered, span: e.span });
        Ok((sig, captures))
    }

    // ---- components ------------------------------------------------------

    fn component(&mut self, c: &ComponentBlock) -> LResult<()> {
        let span = c.span;
        match self.file.resolver.component(&c.name, self.scope()) {
            Component::Custom(sig) => {
                // `Child({a: x})` initializes fields of the new component instance.
                let mut inits = Vec::new();
                for arg in &c.args {
                    match &arg.kind {
                        ExprKind::Object(props) => {
                            for (k, v) in props {
                                inits.push((k.clone(), self.atom(v, Pos::Value)?));
                            }
                        }
                        _ => {
                            self.atom(arg, Pos::Arg)?;
                        }
                    }
                }
                let t = self.temp();
                self.span = span;
                let class = ClassRef { name: c.name.clone(), sig: Some(sig.clone()) };
                self.emit(Stmt::New { result: t.clone(), class: class.clone() });
                if self.file.resolver.has_constructor(&sig) {
                    self.emit(Stmt::Invoke(Invoke {
                        kind: CallKind::Special { base: t.clone(), class },
                        method: CONSTRUCTOR.into(),
                        args: vec![],
                        result: None,
                    }));
                }
                for (k, a) in inits {
                    self.emit(Stmt::Assign { lhs: Place::Field { base: FieldBase::Local(t.clone()), field: k }, rhs: Rvalue::Atom(a) });
                }
                for call in &c.chain {
                    let args = self.args(&call.args)?;
                    let r = self.temp();
                    self.span = call.span;
                    self.emit(Stmt::Invoke(Invoke { kind: CallKind::Instance(t.clone()), method: call.name.clone(), args, result: Some(r) }));
                }
                let r = self.temp();
                self.span = span;
                self.emit(Stmt::Invoke(Invoke { kind: CallKind::Instance(t), method: "build".into(), args: vec![], result: Some(r) }));
                if let Some(children) = &c.children {
                    for s in &children.stmts {
                        self.stmt(s)?;
                    }
                }
            }
            kind => {
                let iface = match kind {
                    Component::System(sig) => sig,
                    _ => {
                        let name = component_interface_name(&c.name);
                        let entry = self.file.unknown_components.entry(c.name.clone()).or_default();
                        for call in &c.chain {
                            entry.insert((call.name.clone(), call.args.len()));
                        }
                        self.file.warn(Code::UnknownComponent, span, format!("unknown component `{}`; using a synthesized `{name}`", c.name));
                        ClassSignature::new(SYNTHESIZED_STUBS, vec![], name)
                    }
                };
                let iface = ClassRef { name: iface.name.clone(), sig: Some(iface) };
                let args = self.args(&c.args)?;
                let t = self.temp();
                self.span = span;
                let create = Stmt::Invoke(Invoke {
                    kind: CallKind::Static(iface.clone()),
                    method: "create".into(),
                    args: args.clone(),
                    result: Some(t.clone()),
                });
                self.emit_sugar(Sugar::ComponentCreate { component: c.name.clone(), args, result: t.clone() }, vec![create]);
                for call in &c.chain {
                    let args = self.args(&call.args)?;
                    let r = self.temp();
                    self.span = call.span;
                    let inv = Stmt::Invoke(Invoke {
                        kind: CallKind::Instance(t.clone()),
                        method: call.name.clone(),
                        args: args.clone(),
                        result: Some(r),
                    });
                    self.emit_sugar(Sugar::ComponentAttr { base: t.clone(), name: call.name.clone(), args }, vec![inv]);
                }
                if let Some(children) = &c.children {
                    for s in &children.stmts {
                        self.stmt(s)?;
                    }
                }
                self.span = span;
                let pop = Stmt::Invoke(Invoke { kind: CallKind::Static(iface), method: "pop".into(), args: vec![], result: None });
                self.emit_sugar(Sugar::ComponentPop { component: c.name.clone() }, vec![pop]);
            }
        }
        Ok(())
    }
}

fn body_pieces_arrow(body: &ArrowBody) -> Vec<Piece<'_>> {
    match body {
        ArrowBody::Expr(e) => vec![Piece::ReturnExpr(e)],
        ArrowBody::Block(b) => b.stmts.iter().map(Piece::Stmt).collect(),
    }
}

fn class_base(sig: ClassSignature) -> FieldBase {
    FieldBase::Class(ClassRef { name: sig.qualified_name(), sig: Some(sig) })
}

fn read_place(p: &Place) -> Rvalue {
    match p {
        Place::Local(l) => Rvalue::Atom(Atom::Local(l.clone())),
        Place::Field { base, field } => Rvalue::Field { base: base.clone(), field: field.clone() },
        Place::Array { base, index } => Rvalue::Array { base: base.clone(), index: index.clone() },
    }
}

fn literal_type(a: &Atom) -> Option<Type> {
    match a {
        Atom::Const(Constant::Number(_)) => Some(Type::Number),
        Atom::Const(Constant::String(_)) => Some(Type::String),
        Atom::Const(Constant::Bool(_)) => Some(Type::Boolean),
        _ => None,
    }
}

/// `a` or `a.b.c` when the expression is a chain of plain identifiers.
fn static_path(e: &Expr) -> Option<String> {
    match &e.kind {
        ExprKind::Ident(n) => Some(n.clone()),
        ExprKind::Member { object, property } => Some(format!("{}.{property}", static_path(object)?)),
        _ => None,
    }
}

// ---- syntactic scans -----------------------------------------------------

/// Names declared by `let`/`const`/`var` in `s`, not descending into nested functions.
fn decls_stmt(s: &ast::Stmt, out: &mut HashSet<String>) {
    match &s.kind {
        StmtKind::Var(v) => {
            out.insert(v.name.clone());
        }
        StmtKind::If { then, otherwise, .. } => {
            decls_stmt(then, out);
            if let Some(o) = otherwise {
                decls_stmt(o, out);
            }
        }
        StmtKind::While { body, .. } => decls_stmt(body, out),
        StmtKind::For { init, body, .. } => {
            if let Some(i) = init {
                decls_stmt(i, out);
            }
            decls_stmt(body, out);
        }
        StmtKind::Block(b) => b.stmts.iter().for_each(|s| decls_stmt(s, out)),
        StmtKind::Component(c) => {
            if let Some(b) = &c.children {
                b.stmts.iter().for_each(|s| decls_stmt(s, out));
            }
        }
        _ => {}
    }
}

fn idents_stmt(s: &ast::Stmt, out: &mut HashSet<String>) {
    let mut v = Vec::new();
    let mut d = HashSet::new();
    idents_stmt_ordered(s, &mut v, &mut d);
    out.extend(v);
    out.extend(d);
}

fn idents_expr(e: &Expr, out: &mut HashSet<String>) {
    let mut v = Vec::new();
    let mut d = HashSet::new();
    idents_expr_ordered(e, &mut v, &mut d);
    out.extend(v);
    out.extend(d);
}

fn push_unique(out: &mut Vec<String>, n: &str) {
    if !out.iter().any(|x| x == n) {
        out.push(n.to_string());
    }
}

/// Referenced identifiers in first-occurrence order (descending into nested
/// functions); names declared anywhere inside are added to `decls`.
fn idents_stmt_ordered(s: &ast::Stmt, out: &mut Vec<String>, decls: &mut HashSet<String>) {
    match &s.kind {
        StmtKind::Var(v) => {
            decls.insert(v.name.clone());
            if let Some(i) = &v.init {
                idents_expr_ordered(i, out, decls);
            }
        }
        StmtKind::Expr(e) => idents_expr_ordered(e, out, decls),
        StmtKind::If { cond, then, otherwise } => {
            idents_expr_ordered(cond, out, decls);
            idents_stmt_ordered(then, out, decls);
            if let Some(o) = otherwise {
                idents_stmt_ordered(o, out, decls);
            }
        }
        StmtKind::While { cond, body } => {
            idents_expr_ordered(cond, out, decls);
            idents_stmt_ordered(body, out, decls);
        }
        StmtKind::For { init, cond, update, body } => {
            if let Some(i) = init {
                idents_stmt_ordered(i, out, decls);
            }
            if let Some(c) = cond {
                idents_expr_ordered(c, out, decls);
            }
            if let Some(u) = update {
                idents_expr_ordered(u, out, decls);
            }
            idents_stmt_ordered(body, out, decls);
        }
        StmtKind::Return(Some(e)) => idents_expr_ordered(e, out, decls),
        StmtKind::Block(b) => b.stmts.iter().for_each(|s| idents_stmt_ordered(s, out, decls)),
        StmtKind::Component(c) => {
            c.args.iter().for_each(|a| idents_expr_ordered(a, out, decls));
            if let Some(b) = &c.children {
                b.stmts.iter().for_each(|s| idents_stmt_ordered(s, out, decls));
            }
            for call in &c.chain {
                call.args.iter().for_each(|a| idents_expr_ordered(a, out, decls));
            }
        }
        _ => {}
    }
}

fn idents_expr_ordered(e: &Expr, out: &mut Vec<String>, decls: &mut HashSet<String>) {
    match &e.kind {
        ExprKind::Ident(n) => push_unique(out, n),
        ExprKind::Template(segs) => {
            for s in segs {
                if let TemplateSegment::Expr(x) = s {
                    idents_expr_ordered(x, out, decls);
                }
            }
        }
        ExprKind::Binary(_, a, b) | ExprKind::Logical(_, a, b) => {
            idents_expr_ordered(a, out, decls);
            idents_expr_ordered(b, out, decls);
        }
        ExprKind::Unary(_, a) => idents_expr_ordered(a, out, decls),
        ExprKind::Update { target, .. } => idents_expr_ordered(target, out, decls),
        ExprKind::Assign { target, value, .. } => {
            idents_expr_ordered(target, out, decls);
            idents_expr_ordered(value, out, decls);
        }
        ExprKind::Conditional(a, b, c) => {
            idents_expr_ordered(a, out, decls);
            idents_expr_ordered(b, out, decls);
            idents_expr_ordered(c, out, decls);
        }
        ExprKind::Call { callee, args } => {
            idents_expr_ordered(callee, out, decls);
            args.iter().for_each(|a| idents_expr_ordered(a, out, decls));
        }
        ExprKind::New { args, .. } | ExprKind::Array(args) => args.iter().for_each(|a| idents_expr_ordered(a, out, decls)),
        ExprKind::Member { object, .. } => idents_expr_ordered(object, out, decls),
        ExprKind::Index { object, index } => {
            idents_expr_ordered(object, out, decls);
            idents_expr_ordered(index, out, decls);
        }
        ExprKind::Arrow { params, body } => {
            decls.extend(params.iter().map(|p| p.name.clone()));
            match body {
                ArrowBody::Expr(x) => idents_expr_ordered(x, out, decls),
                ArrowBody::Block(b) => b.stmts.iter().for_each(|s| idents_stmt_ordered(s, out, decls)),
            }
        }
        ExprKind::Function { params, body, .. } => {
            decls.extend(params.iter().map(|p| p.name.clone()));
            body.stmts.iter().for_each(|s| idents_stmt_ordered(s, out, decls));
        }
        ExprKind::Object(props) => props.iter().for_each(|(_, v)| idents_expr_ordered(v, out, decls)),
        ExprKind::Number(_)
        | ExprKind::Str(_)
        | ExprKind::Bool(_)
        | ExprKind::Null
        | ExprKind::Undefined
        | ExprKind::This
        | ExprKind::Super => {}
    }
}

fn writes_local(exprs: &[&Expr], name: &str) -> bool {
    let mut m = HashMap::new();
    exprs.iter().for_each(|e| assigns_expr(e, &mut m));
    m.contains_key(name)
}

/// Counts assignments (including declarations with initializers) per name.
fn assigns_stmt(s: &ast::Stmt, out: &mut HashMap<String, usize>) {
    match &s.kind {
        StmtKind::Var(v) => {
            if v.init.is_some() {
                *out.entry(v.name.clone()).or_default() += 1;
            }
            if let Some(i) = &v.init {
                assigns_expr(i, out);
            }
        }
        StmtKind::Expr(e) => assigns_expr(e, out),
        StmtKind::If { cond, then, otherwise } => {
            assigns_expr(cond, out);
            assigns_stmt(then, out);
            if let Some(o) = otherwise {
                assigns_stmt(o, out);
            }
        }
        StmtKind::While { cond, body } => {
            assigns_expr(cond, out);
            assigns_stmt(body, out);
        }
        StmtKind::For { init, cond, update, body } => {
            if let Some(i) = init {
                assigns_stmt(i, out);
            }
            if let Some(c) = cond {
                assigns_expr(c, out);
            }
            if let Some(u) = update {
                assigns_expr(u, out);
            }
            assigns_stmt(body, out);
        }
        StmtKind::Return(Some(e)) => assigns_expr(e, out),
        StmtKind::Block(b) => b.stmts.iter().for_each(|s| assigns_stmt(s, out)),
        StmtKind::Component(c) => {
            if let Some(b) = &c.children {
                b.stmts.iter().for_each(|s| assigns_stmt(s, out));
            }
        }
        _ => {}
    }
}

fn assigns_expr(e: &Expr, out: &mut HashMap<String, usize>) {
    match &e.kind {
        ExprKind::Assign { target, value, .. } => {
            if let ExprKind::Ident(n) = &target.kind {
                *out.entry(n.clone()).or_default() += 1;
            }
            assigns_expr(value, out);
        }
        ExprKind::Update { target, .. } => {
            if let ExprKind::Ident(n) = &target.kind {
                *out.entry(n.clone()).or_default() += 1;
            }
        }
        ExprKind::Binary(_, a, b) | ExprKind::Logical(_, a, b) => {
            assigns_expr(a, out);
            assigns_expr(b, out);
        }
        ExprKind::Unary(_, a) => assigns_expr(a, out),
        ExprKind::Conditional(a, b, c) => {
            assigns_expr(a, out);
            assigns_expr(b, out);
            assigns_expr(c, out);
        }
        ExprKind::Call { callee, args } => {
            assigns_expr(callee, out);
            args.iter().for_each(|a| assigns_expr(a, out));
        }
        ExprKind::New { args, .. } | ExprKind::Array(args) => args.iter().for_each(|a| assigns_expr(a, out)),
        ExprKind::Member { object, .. } => assigns_expr(object, out),
        ExprKind::Index { object, index } => {
            assigns_expr(object, out);
            assigns_expr(index, out);
        }
        ExprKind::Object(props) => props.iter().for_each(|(_, v)| assigns_expr(v, out)),
        _ => {}
    }
}
