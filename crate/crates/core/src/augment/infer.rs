//! Rule-based, flow-insensitive type inference for method locals.
//!
//! Each local's type is the join of the types of all its definitions;
//! annotated locals keep their declared type. Rules: comparisons give
//! boolean, arithmetic follows [`binop_type`], `new C()` gives `C`, call
//! results take the callee's declared (or inferred) return type, and field
//! reads take the declared field type.

use std::collections::BTreeMap;

use crate::frontend::ast::{BinaryOp, UnaryOp};
use crate::ir::{ArkBody, Atom, CallKind, Constant, FieldBase, Place, Rvalue, Stmt, THIS};
use crate::scene::{ClassKind, MethodSignature, Scene};
use crate::types::Type;

/// Result type of `a op b`. With `table3_literal`, `string op number` is
/// string and `boolean op number` is boolean; otherwise both are number.
pub fn binop_type(op: BinaryOp, a: &Type, b: &Type, table3_literal: bool) -> Type {
    use Type::*;
    if op.is_relational() {
        return Boolean;
    }
    if !op.is_arithmetic() {
        return Number;
    }
    match (a, b) {
        (String, _) | (_, String) if op == BinaryOp::Add => String,
        (Number, Number) | (Boolean, Boolean) => Number,
        (String, Number) | (Number, String) => {
            if table3_literal {
                String
            } else {
                Number
            }
        }
        (Boolean, Number) | (Number, Boolean) => {
            if table3_literal {
                Boolean
            } else {
                Number
            }
        }
        (String, String) => Number,
        _ => Unknown,
    }
}

pub fn unop_type(op: UnaryOp) -> Type {
    match op {
        UnaryOp::Not => Type::Boolean,
        UnaryOp::TypeOf => Type::String,
        UnaryOp::Neg | UnaryOp::Plus | UnaryOp::BitNot => Type::Number,
    }
}

pub fn const_type(scene: &Scene, c: &Constant, returns: &BTreeMap<MethodSignature, Type>) -> Type {
    match c {
        Constant::Number(_) => Type::Number,
        Constant::String(_) => Type::String,
        Constant::Bool(_) => Type::Boolean,
        Constant::Null => Type::Null,
        Constant::Undefined => Type::Undefined,
        Constant::FuncRef(sig) => match scene.method(sig) {
            Some(m) => Type::Function(
                m.params.iter().map(|(_, t)| t.clone().unwrap_or(Type::Unknown)).collect(),
                Box::new(return_type(scene, sig, returns)),
            ),
            None => Type::Unknown,
        },
    }
}

/// Declared return type of a method, else its inferred one.
pub fn return_type(scene: &Scene, sig: &MethodSignature, returns: &BTreeMap<MethodSignature, Type>) -> Type {
    scene
        .method(sig)
        .and_then(|m| m.declared_return.clone())
        .or_else(|| returns.get(sig).cloned())
        .unwrap_or(Type::Unknown)
}

/// Declared type of field `name` on values of type `t`.
pub fn field_type(scene: &Scene, t: &Type, name: &str) -> Type {
    let class = match t {
        Type::Class(c) => Some(c.clone()),
        Type::String => scene.classes_named("String").first().map(|c| c.signature.clone()),
        Type::Array(_) => scene.classes_named("Array").first().map(|c| c.signature.clone()),
        _ => None,
    };
    class
        .and_then(|c| scene.lookup_field(&c, name))
        .and_then(|f| f.declared.clone())
        .unwrap_or(Type::Unknown)
}

pub struct Inference<'s> {
    pub scene: &'s Scene,
    pub table3_literal: bool,
    pub returns: &'s BTreeMap<MethodSignature, Type>,
}

impl Inference<'_> {
    pub fn infer(&self, sig: &MethodSignature, body: &ArkBody) -> BTreeMap<String, Type> {
        let method = self.scene.method(sig);
        let mut types: BTreeMap<String, Type> = BTreeMap::new();
        let mut fixed = std::collections::BTreeSet::new();
        for l in &body.locals {
            if let Some(t) = &l.declared {
                types.insert(l.name.clone(), t.clone());
                fixed.insert(l.name.clone());
            }
        }
        let owner = &sig.class;
        let is_static = method.is_some_and(|m| m.is_static);
        if !is_static && self.scene.class(owner).is_some_and(|c| c.kind != ClassKind::Default) {
            types.insert(THIS.into(), Type::Class(owner.clone()));
            fixed.insert(THIS.to_string());
        }
        loop {
            let mut changed = false;
            for st in body.cfg.stmts() {
                let Some(def) = st.stmt.def() else { continue };
                if fixed.contains(def) {
                    continue;
                }
                let t = self.def_type(&st.stmt, &types, method.map(|m| m.params.as_slice()).unwrap_or(&[]));
                if t == Type::Unknown {
                    continue;
                }
                let old = types.get(def).cloned().unwrap_or(Type::Unknown);
                let new = old.join(&t);
                if new != old {
                    types.insert(def.to_string(), new);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        types
    }

    fn atom(&self, a: &Atom, types: &BTreeMap<String, Type>) -> Type {
        match a {
            Atom::Local(l) => types.get(l).cloned().unwrap_or(Type::Unknown),
            Atom::Const(c) => const_type(self.scene, c, self.returns),
        }
    }

    fn def_type(&self, s: &Stmt, types: &BTreeMap<String, Type>, params: &[(String, Option<Type>)]) -> Type {
        match s {
            Stmt::Assign { lhs: Place::Local(_), rhs } => match rhs {
                Rvalue::Atom(a) => self.atom(a, types),
                Rvalue::Binary(op, a, b) => binop_type(*op, &self.atom(a, types), &self.atom(b, types), self.table3_literal),
                Rvalue::Unary(op, _) => unop_type(*op),
                Rvalue::Field { base: FieldBase::Class(c), field } => match &c.sig {
                    Some(sig) => field_type(self.scene, &Type::Class(sig.clone()), field),
                    None => Type::Unknown,
                },
                Rvalue::Field { base: FieldBase::Local(b), field } => {
                    field_type(self.scene, types.get(b).unwrap_or(&Type::Unknown), field)
                }
                Rvalue::Array { base, .. } => match types.get(base) {
                    Some(Type::Array(e)) => (**e).clone(),
                    _ => Type::Unknown,
                },
                Rvalue::Param(i) => params.get(*i).and_then(|(_, t)| t.clone()).unwrap_or(Type::Unknown),
                Rvalue::This => types.get(THIS).cloned().unwrap_or(Type::Unknown),
            },
            Stmt::New { class, .. } => class.sig.clone().map(Type::Class).unwrap_or(Type::Unknown),
            Stmt::NewArray { .. } => Type::Array(Box::new(Type::Unknown)),
            Stmt::Invoke(inv) => {
                if let CallKind::Pointer = inv.kind {
                    return match types.get(&inv.method) {
                        Some(Type::Function(_, r)) => (**r).clone(),
                        _ => Type::Unknown,
                    };
                }
                let recv = inv.base().and_then(|b| types.get(b));
                match crate::callgraph::resolve_static(self.scene, inv, recv) {
                    Some(callee) => return_type(self.scene, &callee, self.returns),
                    None => Type::Unknown,
                }
            }
            _ => Type::Unknown,
        }
    }
}

/// Join of the types of all returned values.
pub fn body_return_type(body: &ArkBody, types: &BTreeMap<String, Type>, scene: &Scene, returns: &BTreeMap<MethodSignature, Type>) -> Type {
    let mut t = Type::Unknown;
    for st in body.cfg.stmts() {
        if let Stmt::Return(Some(a)) = &st.stmt {
            let at = match a {
                Atom::Local(l) => types.get(l).cloned().unwrap_or(Type::Unknown),
                Atom::Const(c) => const_type(scene, c, returns),
            };
            t = t.join(&at);
        }
    }
    t
}
