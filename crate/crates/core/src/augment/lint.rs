//! ArkTS constraint lints over the scene.

use crate::augment::defuse::build_def_use;
use crate::diag::{sort_diagnostics, Code, Diagnostic};
use crate::frontend::ast::{
    self, ArrowBody, Expr, ExprKind, FunctionDecl, Item, Member, Param, StmtKind, TemplateSegment, TypeAnno, UnaryOp, VarDecl,
};
use crate::frontend::Span;
use crate::ir::{Atom, FieldBase, Place, Rvalue, Stmt};
use crate::scene::{ClassKind, Scene};
use crate::types::Type;

/// `NO_ANY`, `IMPLICIT_ANY`, `NO_LAYOUT_CHANGE`, `OPERATOR_SEMANTICS` and
/// `MAYBE_UNDEFINED` findings for user files, sorted.
pub fn check_constraints(scene: &Scene) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for f in &scene.files {
        let mut spans = Vec::new();
        any_items(&f.module.items, &mut spans);
        for s in spans {
            out.push(Diagnostic::warning(&f.path, Code::NoAny, s, "explicit `any` type is not allowed"));
        }
    }
    for (sig, m, body) in scene.bodies() {
        if m.is_stub {
            continue;
        }
        let path = &sig.class.file;
        let cfg = &body.cfg;
        for l in &body.locals {
            if l.declared.is_none() && body.types.get(&l.name) == Some(&Type::Any) {
                let span = cfg.stmts().find(|s| s.stmt.def() == Some(l.name.as_str())).map(|s| s.span).unwrap_or(m.span);
                out.push(Diagnostic::warning(
                    path,
                    Code::ImplicitAny,
                    span,
                    format!("`{}` in {} is assigned values of conflicting types", l.name, sig.short()),
                ));
            }
        }
        for st in cfg.stmts() {
            match &st.stmt {
                Stmt::Assign { lhs: Place::Field { base: FieldBase::Local(b), field }, .. } => {
                    if let Some(Type::Class(c)) = body.types.get(b) {
                        let Some(class) = scene.class(c) else { continue };
                        if class.is_stub || class.kind == ClassKind::Default {
                            continue;
                        }
                        let has_method = scene.hierarchy.ancestors(c).iter().any(|a| scene.methods_of(a).any(|m| &m.signature.name == field));
                        if scene.lookup_field(c, field).is_none() && !has_method {
                            out.push(Diagnostic::warning(
                                path,
                                Code::NoLayoutChange,
                                st.span,
                                format!("`{field}` is not a declared field of `{}`", c.qualified_name()),
                            ));
                        }
                    }
                }
                Stmt::Assign { rhs: Rvalue::Unary(UnaryOp::Plus, a), .. } => {
                    let t = match a {
                        Atom::Local(l) => body.types.get(l).cloned().unwrap_or(Type::Unknown),
                        Atom::Const(c) => crate::augment::infer::const_type(scene, c, &Default::default()),
                    };
                    if t.is_concrete() && t != Type::Number {
                        out.push(Diagnostic::warning(
                            path,
                            Code::OperatorSemantics,
                            st.span,
                            format!("unary `+` applied to a value of type {t}"),
                        ));
                    }
                }
                _ => {}
            }
        }
        let du = build_def_use(cfg);
        for (local, id) in du.undefined_uses() {
            out.push(Diagnostic::warning(
                path,
                Code::MaybeUndefined,
                cfg.stmt(id).span,
                format!("`{local}` is used in {} without a reaching definition", sig.short()),
            ));
        }
    }
    sort_diagnostics(&mut out);
    out.dedup();
    out
}

fn any_type(t: &Option<TypeAnno>, out: &mut Vec<Span>) {
    if let Some(t) = t {
        if t.mentions_any() {
            out.push(t.span);
        }
    }
}

fn any_params(ps: &[Param], out: &mut Vec<Span>) {
    ps.iter().for_each(|p| any_type(&p.ty, out));
}

fn any_items(items: &[Item], out: &mut Vec<Span>) {
    for i in items {
        match i {
            Item::Class(c) => {
                for m in &c.members {
                    match m {
                        Member::Field(f) => {
                            any_type(&f.ty, out);
                            if let Some(e) = &f.init {
                                any_expr(e, out);
                            }
                        }
                        Member::Method(f) => any_fn(f, out),
                    }
                }
            }
            Item::Function(f) => any_fn(f, out),
            Item::Namespace(n) => any_items(&n.items, out),
            Item::Var(v) => any_var(v, out),
            Item::Stmt(s) => any_stmt(s, out),
            Item::Import(_) => {}
        }
    }
}

fn any_fn(f: &FunctionDecl, out: &mut Vec<Span>) {
    any_params(&f.params, out);
    any_type(&f.ret, out);
    if let Some(b) = &f.body {
        b.stmts.iter().for_each(|s| any_stmt(s, out));
    }
}

fn any_var(v: &VarDecl, out: &mut Vec<Span>) {
    any_type(&v.ty, out);
    if let Some(e) = &v.init {
        any_expr(e, out);
    }
}

fn any_stmt(s: &ast::Stmt, out: &mut Vec<Span>) {
    match &s.kind {
        StmtKind::Var(v) => any_var(v, out),
        StmtKind::Expr(e) | StmtKind::Return(Some(e)) => any_expr(e, out),
        StmtKind::If { cond, then, otherwise } => {
            any_expr(cond, out);
            any_stmt(then, out);
            if let Some(o) = otherwise {
                any_stmt(o, out);
            }
        }
        StmtKind::While { cond, body } => {
            any_expr(cond, out);
            any_stmt(body, out);
        }
        StmtKind::For { init, cond, update, body } => {
            if let Some(i) = init {
                any_stmt(i, out);
            }
            cond.iter().chain(update.iter()).for_each(|e| any_expr(e, out));
            any_stmt(body, out);
        }
        StmtKind::Block(b) => b.stmts.iter().for_each(|s| any_stmt(s, out)),
        StmtKind::Component(c) => {
            c.args.iter().for_each(|e| any_expr(e, out));
            if let Some(b) = &c.children {
                b.stmts.iter().for_each(|s| any_stmt(s, out));
            }
            c.chain.iter().flat_map(|k| k.args.iter()).for_each(|e| any_expr(e, out));
        }
        _ => {}
    }
}

fn any_expr(e: &Expr, out: &mut Vec<Span>) {
    match &e.kind {
        ExprKind::Arrow { params, body } => {
            any_params(params, out);
            match body {
                ArrowBody::Expr(x) => any_expr(x, out),
                ArrowBody::Block(b) => b.stmts.iter().for_each(|s| any_stmt(s, out)),
            }
        }
        ExprKind::Function { params, ret, body, .. } => {
            any_params(params, out);
            any_type(ret, out);
            body.stmts.iter().for_each(|s| any_stmt(s, out));
        }
        ExprKind::Binary(_, a, b) | ExprKind::Logical(_, a, b) | ExprKind::Index { object: a, index: b } => {
            any_expr(a, out);
            any_expr(b, out);
        }
        ExprKind::Assign { target, value, .. } => {
            any_expr(target, out);
            any_expr(value, out);
        }
        ExprKind::Unary(_, a) | ExprKind::Update { target: a, .. } | ExprKind::Member { object: a, .. } => any_expr(a, out),
        ExprKind::Conditional(a, b, c) => {
            any_expr(a, out);
            any_expr(b, out);
            any_expr(c, out);
        }
        ExprKind::Call { callee, args } => {
            any_expr(callee, out);
            args.iter().for_each(|a| any_expr(a, out));
        }
        ExprKind::New { args, .. } | ExprKind::Array(args) => args.iter().for_each(|a| any_expr(a, out)),
        ExprKind::Object(props) => props.iter().for_each(|(_, v)| any_expr(v, out)),
        ExprKind::Template(segs) => {
            for s in segs {
                if let TemplateSegment::Expr(x) = s {
                    any_expr(x, out);
                }
            }
        }
        _ => {}
    }
}
