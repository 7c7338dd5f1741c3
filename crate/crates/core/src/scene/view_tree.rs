//! Component trees of `struct` build methods.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::frontend::ast::*;
use crate::frontend::Span;

/// Name of the root inserted when a build method has zero or several
/// top-level components.
pub const SYNTHETIC_ROOT: &str = "%root";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViewNodeKind {
    System,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViewNode {
    pub name: String,
    pub kind: ViewNodeKind,
    /// `@State` fields read via `this.` in the arguments or chained calls.
    #[serde(rename = "stateBindings")]
    pub state_bindings: Vec<String>,
    pub children: Vec<ViewNode>,
    #[serde(skip)]
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViewTree {
    pub root: ViewNode,
    /// True when `root` is [`SYNTHETIC_ROOT`] rather than a source component.
    pub synthetic_root: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("struct `{0}` has no build method")]
pub struct ViewTreeError(pub String);

impl ViewTree {
    /// Component names in preorder, without the synthetic root.
    pub fn preorder(&self) -> Vec<&str> {
        fn walk<'a>(n: &'a ViewNode, out: &mut Vec<&'a str>) {
            out.push(&n.name);
            n.children.iter().for_each(|c| walk(c, out));
        }
        let mut out = Vec::new();
        if self.synthetic_root {
            self.root.children.iter().for_each(|c| walk(c, &mut out));
        } else {
            walk(&self.root, &mut out);
        }
        out
    }
}

/// Builds the view tree of a struct from its `build` method.
pub fn build_view_tree(
    decl: &ClassDecl,
    state_fields: &BTreeSet<String>,
    is_custom: &dyn Fn(&str) -> bool,
) -> Result<ViewTree, ViewTreeError> {
    let build = decl
        .members
        .iter()
        .find_map(|m| match m {
            Member::Method(f) if f.name == "build" && f.body.is_some() => f.body.as_ref(),
            _ => None,
        })
        .ok_or_else(|| ViewTreeError(decl.name.clone()))?;
    let b = Builder { state_fields, is_custom };
    let mut roots = Vec::new();
    b.stmts(&build.stmts, &mut roots);
    Ok(if roots.len() == 1 {
        ViewTree { root: roots.pop().unwrap(), synthetic_root: false }
    } else {
        let root = ViewNode {
            name: SYNTHETIC_ROOT.into(),
            kind: ViewNodeKind::System,
            state_bindings: vec![],
            children: roots,
            span: build.span,
        };
        ViewTree { root, synthetic_root: true }
    })
}

/// Component names of all component blocks in a statement list, in preorder.
pub fn component_preorder(stmts: &[Stmt]) -> Vec<String> {
    let never = |_: &str| false;
    let none = BTreeSet::new();
    let b = Builder { state_fields: &none, is_custom: &never };
    let mut roots = Vec::new();
    b.stmts(stmts, &mut roots);
    let tree = ViewTree {
        root: ViewNode { name: SYNTHETIC_ROOT.into(), kind: ViewNodeKind::System, state_bindings: vec![], children: roots, span: Span::default() },
        synthetic_root: true,
    };
    tree.preorder().into_iter().map(str::to_string).collect()
}

struct Builder<'a> {
    state_fields: &'a BTreeSet<String>,
    is_custom: &'a dyn Fn(&str) -> bool,
}

impl Builder<'_> {
    fn stmts(&self, stmts: &[Stmt], out: &mut Vec<ViewNode>) {
        for s in stmts {
            self.stmt(s, out);
        }
    }

    fn stmt(&self, s: &Stmt, out: &mut Vec<ViewNode>) {
        match &s.kind {
            StmtKind::Component(c) => out.push(self.component(c)),
            StmtKind::Var(v) => {
                if let Some(e) = &v.init {
                    self.expr(e, out);
                }
            }
            StmtKind::Expr(e) | StmtKind::Return(Some(e)) => self.expr(e, out),
            StmtKind::If { cond, then, otherwise } => {
                self.expr(cond, out);
                self.stmt(then, out);
                if let Some(o) = otherwise {
                    self.stmt(o, out);
                }
            }
            StmtKind::While { cond, body } => {
                self.expr(cond, out);
                self.stmt(body, out);
            }
            StmtKind::For { init, cond, update, body } => {
                if let Some(i) = init {
                    self.stmt(i, out);
                }
                cond.iter().chain(update.iter()).for_each(|e| self.expr(e, out));
                self.stmt(body, out);
            }
            StmtKind::Block(b) => self.stmts(&b.stmts, out),
            _ => {}
        }
    }

    /// Component blocks nested in function bodies inside an expression.
    fn expr(&self, e: &Expr, out: &mut Vec<ViewNode>) {
        match &e.kind {
            ExprKind::Arrow { body: ArrowBody::Block(b), .. } | ExprKind::Function { body: b, .. } => self.stmts(&b.stmts, out),
            ExprKind::Arrow { body: ArrowBody::Expr(x), .. } => self.expr(x, out),
            ExprKind::Call { callee, args } => {
                self.expr(callee, out);
                args.iter().for_each(|a| self.expr(a, out));
            }
            ExprKind::New { args, .. } | ExprKind::Array(args) => args.iter().for_each(|a| self.expr(a, out)),
            ExprKind::Object(props) => props.iter().for_each(|(_, v)| self.expr(v, out)),
            ExprKind::Binary(_, a, b) | ExprKind::Logical(_, a, b) => {
                self.expr(a, out);
                self.expr(b, out);
            }
            ExprKind::Conditional(a, b, c) => {
                self.expr(a, out);
                self.expr(b, out);
                self.expr(c, out);
            }
            ExprKind::Assign { value, .. } => self.expr(value, out),
            ExprKind::Unary(_, a) => self.expr(a, out),
            _ => {}
        }
    }

    fn component(&self, c: &ComponentBlock) -> ViewNode {
        let mut bindings = Vec::new();
        for a in c.args.iter().chain(c.chain.iter().flat_map(|call| call.args.iter())) {
            self.reads(a, &mut bindings);
        }
        let mut children = Vec::new();
        c.args.iter().for_each(|a| self.expr(a, &mut children));
        if let Some(b) = &c.children {
            self.stmts(&b.stmts, &mut children);
        }
        for call in &c.chain {
            call.args.iter().for_each(|a| self.expr(a, &mut children));
        }
        let kind = if (self.is_custom)(&c.name) { ViewNodeKind::Custom } else { ViewNodeKind::System };
        ViewNode { name: c.name.clone(), kind, state_bindings: bindings, children, span: c.span }
    }

    fn reads(&self, e: &Expr, out: &mut Vec<String>) {
        let mut r = |x: &Expr| self.reads(x, out);
        match &e.kind {
            ExprKind::Member { object, property } => {
                if matches!(object.kind, ExprKind::This) {
                    if self.state_fields.contains(property) && !out.contains(property) {
                        out.push(property.clone());
                    }
                } else {
                    r(object);
                }
            }
            ExprKind::Assign { target, value, .. } => {
                match &target.kind {
                    ExprKind::Member { object, .. } if matches!(object.kind, ExprKind::This) => {}
                    _ => r(target),
                }
                r(value);
            }
            ExprKind::Update { target, .. } => match &target.kind {
                ExprKind::Member { object, .. } if matches!(object.kind, ExprKind::This) => {}
                _ => r(target),
            },
            ExprKind::Template(segs) => {
                for s in segs {
                    if let TemplateSegment::Expr(x) = s {
                        r(x);
                    }
                }
            }
            ExprKind::Binary(_, a, b) | ExprKind::Logical(_, a, b) | ExprKind::Index { object: a, index: b } => {
                r(a);
                r(b);
            }
            ExprKind::Unary(_, a) => r(a),
            ExprKind::Conditional(a, b, c) => {
                r(a);
                r(b);
                r(c);
            }
            ExprKind::Call { callee, args } => {
                r(callee);
                args.iter().for_each(r);
            }
            ExprKind::New { args, .. } | ExprKind::Array(args) => args.iter().for_each(r),
            ExprKind::Object(props) => props.iter().for_each(|(_, v)| r(v)),
            ExprKind::Arrow { body: ArrowBody::Expr(x), .. } => r(x),
            ExprKind::Arrow { body: ArrowBody::Block(b), .. } | ExprKind::Function { body: b, .. } => {
                for s in &b.stmts {
                    self.stmt_reads(s, out);
                }
            }
            _ => {}
        }
    }

    /// Reads inside a function body, skipping nested component blocks.
    fn stmt_reads(&self, s: &Stmt, out: &mut Vec<String>) {
        match &s.kind {
            StmtKind::Var(v) => {
                if let Some(e) = &v.init {
                    self.reads(e, out);
                }
            }
            StmtKind::Expr(e) | StmtKind::Return(Some(e)) => self.reads(e, out),
            StmtKind::If { cond, then, otherwise } => {
                self.reads(cond, out);
                self.stmt_reads(then, out);
                if let Some(o) = otherwise {
                    self.stmt_reads(o, out);
                }
            }
            StmtKind::While { cond, body } => {
                self.reads(cond, out);
                self.stmt_reads(body, out);
            }
            StmtKind::For { init, cond, update, body } => {
                if let Some(i) = init {
                    self.stmt_reads(i, out);
                }
                cond.iter().chain(update.iter()).for_each(|e| self.reads(e, out));
                self.stmt_reads(body, out);
            }
            StmtKind::Block(b) => b.stmts.iter().for_each(|s| self.stmt_reads(s, out)),
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse, SourceFile};

    fn struct_decl(src: &str) -> ClassDecl {
        let (m, d) = parse(&SourceFile::new("t.ets", src));
        assert!(d.is_empty(), "{d:?}");
        m.items
            .into_iter()
            .find_map(|i| match i {
                Item::Class(c) => Some(c),
                _ => None,
            })
            .unwrap()
    }

    #[test]
    fn nested_row_column() {
        let d = struct_decl("struct S { build() { Row() { Column() { } } } }");
        let t = build_view_tree(&d, &BTreeSet::new(), &|_| false).unwrap();
        assert!(!t.synthetic_root);
        assert_eq!(t.root.name, "Row");
        assert_eq!(t.root.children.len(), 1);
        assert_eq!(t.root.children[0].name, "Column");
    }

    #[test]
    fn empty_build_has_synthetic_root() {
        let d = struct_decl("struct S { build() { } }");
        let t = build_view_tree(&d, &BTreeSet::new(), &|_| false).unwrap();
        assert!(t.synthetic_root);
        assert!(t.root.children.is_empty());
        assert!(t.preorder().is_empty());
    }

    #[test]
    fn missing_build_is_an_error() {
        let d = struct_decl("struct S { x: number = 1 }");
        assert_eq!(build_view_tree(&d, &BTreeSet::new(), &|_| false), Err(ViewTreeError("S".into())));
    }

    #[test]
    fn state_reads_are_bindings_but_writes_are_not() {
        let d = struct_decl(
            "struct S {\n  @State message: string = 'a'\n  @State n: number = 0\n  build() {\n    Column() {\n      Text(this.message).fontSize(this.n)\n      Button('b').onClick(() => { this.message = 'c' })\n    }\n  }\n}",
        );
        let state: BTreeSet<String> = ["message".to_string(), "n".to_string()].into();
        let t = build_view_tree(&d, &state, &|_| false).unwrap();
        assert_eq!(t.preorder(), vec!["Column", "Text", "Button"]);
        assert_eq!(t.root.children[0].state_bindings, vec!["message", "n"]);
        assert!(t.root.children[1].state_bindings.is_empty());
    }
}
