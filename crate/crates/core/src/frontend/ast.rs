//! Syntax tree for ArkLang.
//!
//! `struct` declarations, decorators and component blocks are first-class
//! nodes. [`NodeKind`] and [`Module::node_tree`] give a uniform view over the
//! typed tree for generic traversals.

use super::source::Span;

#[derive(Debug, Clone, PartialEq)]
pub struct Module {
    pub items: Vec<Item>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Class(ClassDecl),
    Function(FunctionDecl),
    Namespace(NamespaceDecl),
    Var(VarDecl),
    Import(ImportDecl),
    Stmt(Stmt),
}

impl Item {
    pub fn span(&self) -> Span {
        match self {
            Item::Class(c) => c.span,
            Item::Function(f) => f.span,
            Item::Namespace(n) => n.span,
            Item::Var(v) => v.span,
            Item::Import(i) => i.span,
            Item::Stmt(s) => s.span,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decorator {
    pub name: String,
    pub args: Vec<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassKind {
    Class,
    Struct,
    Interface,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Modifiers {
    pub is_static: bool,
    pub is_abstract: bool,
    pub is_readonly: bool,
    pub is_export: bool,
    pub is_declare: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassDecl {
    pub decorators: Vec<Decorator>,
    pub modifiers: Modifiers,
    pub kind: ClassKind,
    pub name: String,
    pub extends: Option<TypeAnno>,
    pub implements: Vec<TypeAnno>,
    pub members: Vec<Member>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Member {
    Field(FieldDecl),
    Method(FunctionDecl),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub decorators: Vec<Decorator>,
    pub modifiers: Modifiers,
    pub name: String,
    pub optional: bool,
    pub ty: Option<TypeAnno>,
    pub init: Option<Expr>,
    pub span: Span,
}

/// Free function, class method or (with a `None` body) an abstract/stub signature.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDecl {
    pub decorators: Vec<Decorator>,
    pub modifiers: Modifiers,
    pub name: String,
    pub params: Vec<Param>,
    pub ret: Option<TypeAnno>,
    pub body: Option<Block>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: Option<TypeAnno>,
    pub rest: bool,
    pub optional: bool,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamespaceDecl {
    pub decorators: Vec<Decorator>,
    pub modifiers: Modifiers,
    pub name: String,
    pub items: Vec<Item>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportDecl {
    pub names: Vec<String>,
    pub from: String,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Let,
    Const,
    Var,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarDecl {
    pub decorators: Vec<Decorator>,
    pub modifiers: Modifiers,
    pub kind: VarKind,
    pub name: String,
    pub ty: Option<TypeAnno>,
    pub init: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeAnno {
    pub kind: TypeKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeKind {
    Named(String, Vec<TypeAnno>),
    Array(Box<TypeAnno>),
    Function(Vec<TypeAnno>, Box<TypeAnno>),
    Union(Vec<TypeAnno>),
}

impl TypeAnno {
    pub fn is_any(&self) -> bool {
        matches!(&self.kind, TypeKind::Named(n, _) if n == "any")
    }

    /// True when `any` appears anywhere inside this annotation.
    pub fn mentions_any(&self) -> bool {
        match &self.kind {
            TypeKind::Named(n, args) => n == "any" || args.iter().any(TypeAnno::mentions_any),
            TypeKind::Array(e) => e.mentions_any(),
            TypeKind::Function(ps, r) => ps.iter().any(TypeAnno::mentions_any) || r.mentions_any(),
            TypeKind::Union(ts) => ts.iter().any(TypeAnno::mentions_any),
        }
    }
}

impl std::fmt::Display for TypeAnno {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            TypeKind::Named(n, args) if args.is_empty() => write!(f, "{n}"),
            TypeKind::Named(n, args) => {
                write!(f, "{n}<")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(">")
            }
            TypeKind::Array(e) => write!(f, "{e}[]"),
            TypeKind::Function(ps, r) => {
                f.write_str("(")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ") => {r}")
            }
            TypeKind::Union(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    write!(f, "{t}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Var(VarDecl),
    Expr(Expr),
    If { cond: Expr, then: Box<Stmt>, otherwise: Option<Box<Stmt>> },
    While { cond: Expr, body: Box<Stmt> },
    For { init: Option<Box<Stmt>>, cond: Option<Expr>, update: Option<Expr>, body: Box<Stmt> },
    Return(Option<Expr>),
    Break,
    Continue,
    Block(Block),
    Component(ComponentBlock),
    Empty,
}

/// `Name(args) { children } .attr(args) ...`
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentBlock {
    pub name: String,
    pub args: Vec<Expr>,
    pub children: Option<Block>,
    pub chain: Vec<ChainCall>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainCall {
    pub name: String,
    pub args: Vec<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    NotEq,
    StrictEq,
    StrictNotEq,
    Lt,
    LtEq,
    Gt,
    GtEq,
    BitAnd,
    BitOr,
    BitXor,
    Shl,
    Shr,
    UShr,
    InstanceOf,
    In,
}

impl BinaryOp {
    pub fn as_str(self) -> &'static str {
        use BinaryOp::*;
        match self {
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Rem => "%",
            Eq => "==",
            NotEq => "!=",
            StrictEq => "===",
            StrictNotEq => "!==",
            Lt => "<",
            LtEq => "<=",
            Gt => ">",
            GtEq => ">=",
            BitAnd => "&",
            BitOr => "|",
            BitXor => "^",
            Shl => "<<",
            Shr => ">>",
            UShr => ">>>",
            InstanceOf => "instanceof",
            In => "in",
        }
    }

    /// Comparison-like operators: always produce a boolean.
    pub fn is_relational(self) -> bool {
        use BinaryOp::*;
        matches!(self, Eq | NotEq | StrictEq | StrictNotEq | Lt | LtEq | Gt | GtEq | InstanceOf | In)
    }

    pub fn is_arithmetic(self) -> bool {
        use BinaryOp::*;
        matches!(self, Add | Sub | Mul | Div | Rem)
    }

    pub fn from_symbol(s: &str) -> Option<BinaryOp> {
        use BinaryOp::*;
        Some(match s {
            "+" => Add,
            "-" => Sub,
            "*" => Mul,
            "/" => Div,
            "%" => Rem,
            "==" => Eq,
            "!=" => NotEq,
            "===" => StrictEq,
            "!==" => StrictNotEq,
            "<" => Lt,
            "<=" => LtEq,
            ">" => Gt,
            ">=" => GtEq,
            "&" => BitAnd,
            "|" => BitOr,
            "^" => BitXor,
            "<<" => Shl,
            ">>" => Shr,
            ">>>" => UShr,
            "instanceof" => InstanceOf,
            "in" => In,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Plus,
    Not,
    BitNot,
    TypeOf,
}

impl UnaryOp {
    pub fn as_str(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Plus => "+",
            UnaryOp::Not => "!",
            UnaryOp::BitNot => "~",
            UnaryOp::TypeOf => "typeof ",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicalOp {
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TemplateSegment {
    Str(String),
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArrowBody {
    Expr(Box<Expr>),
    Block(Block),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Ident(String),
    Number(f64),
    Str(String),
    Bool(bool),
    Null,
    Undefined,
    This,
    Super,
    Template(Vec<TemplateSegment>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Logical(LogicalOp, Box<Expr>, Box<Expr>),
    Unary(UnaryOp, Box<Expr>),
    /// `++`/`--`; `increment` is false for `--`.
    Update { increment: bool, prefix: bool, target: Box<Expr> },
    /// Plain (`op == None`) or compound assignment.
    Assign { op: Option<BinaryOp>, target: Box<Expr>, value: Box<Expr> },
    Conditional(Box<Expr>, Box<Expr>, Box<Expr>),
    Call { callee: Box<Expr>, args: Vec<Expr> },
    New { class: String, args: Vec<Expr> },
    Member { object: Box<Expr>, property: String },
    Index { object: Box<Expr>, index: Box<Expr> },
    Arrow { params: Vec<Param>, body: ArrowBody },
    Function { name: Option<String>, params: Vec<Param>, ret: Option<TypeAnno>, body: Block },
    Object(Vec<(String, Expr)>),
    Array(Vec<Expr>),
}

/// Uniform node-kind tag for generic traversals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Module,
    NamespaceDecl,
    ClassDecl,
    StructDecl,
    InterfaceDecl,
    MethodDecl,
    FunctionDecl,
    FieldDecl,
    DecoratorAnno,
    ParamDecl,
    ImportDecl,
    Block,
    If,
    While,
    For,
    Return,
    Break,
    Continue,
    ExprStmt,
    EmptyStmt,
    VarDecl,
    Assign,
    Binary,
    Logical,
    Unary,
    Update,
    Conditional,
    Call,
    New,
    Member,
    Index,
    ArrowFn,
    AnonFn,
    ObjectLiteral,
    ArrayLiteral,
    TemplateString,
    ComponentBlock,
    ComponentChain,
    Identifier,
    Literal,
    This,
    Super,
    TypeAnno,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AstNode {
    pub kind: NodeKind,
    pub span: Span,
    pub children: Vec<AstNode>,
}

impl AstNode {
    fn leaf(kind: NodeKind, span: Span) -> Self {
        AstNode { kind, span, children: Vec::new() }
    }

    /// Preorder iterator over this node and all descendants.
    pub fn preorder(&self) -> Vec<&AstNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(n.children.iter().rev());
        }
        out
    }
}

impl Module {
    pub fn node_tree(&self) -> AstNode {
        AstNode { kind: NodeKind::Module, span: self.span, children: self.items.iter().map(item_node).collect() }
    }
}

fn item_node(item: &Item) -> AstNode {
    match item {
        Item::Class(c) => class_node(c),
        Item::Function(f) => function_node(f, NodeKind::FunctionDecl),
        Item::Namespace(n) => {
            let mut children: Vec<AstNode> = n.decorators.iter().map(decorator_node).collect();
            children.extend(n.items.iter().map(item_node));
            AstNode { kind: NodeKind::NamespaceDecl, span: n.span, children }
        }
        Item::Var(v) => var_node(v),
        Item::Import(i) => AstNode::leaf(NodeKind::ImportDecl, i.span),
        Item::Stmt(s) => stmt_node(s),
    }
}

fn decorator_node(d: &Decorator) -> AstNode {
    AstNode { kind: NodeKind::DecoratorAnno, span: d.span, children: d.args.iter().map(expr_node).collect() }
}

fn type_node(t: &TypeAnno) -> AstNode {
    AstNode::leaf(NodeKind::TypeAnno, t.span)
}

fn class_node(c: &ClassDecl) -> AstNode {
    let kind = match c.kind {
        ClassKind::Class => NodeKind::ClassDecl,
        ClassKind::Struct => NodeKind::StructDecl,
        ClassKind::Interface => NodeKind::InterfaceDecl,
    };
    let mut children: Vec<AstNode> = c.decorators.iter().map(decorator_node).collect();
    children.extend(c.extends.iter().map(type_node));
    children.extend(c.implements.iter().map(type_node));
    for m in &c.members {
        children.push(match m {
            Member::Field(f) => {
                let mut ch: Vec<AstNode> = f.decorators.iter().map(decorator_node).collect();
                ch.extend(f.ty.iter().map(type_node));
                ch.extend(f.init.iter().map(expr_node));
                AstNode { kind: NodeKind::FieldDecl, span: f.span, children: ch }
            }
            Member::Method(m) => function_node(m, NodeKind::MethodDecl),
        });
    }
    AstNode { kind, span: c.span, children }
}

fn params_nodes(params: &[Param]) -> Vec<AstNode> {
    params
        .iter()
        .map(|p| AstNode { kind: NodeKind::ParamDecl, span: p.span, children: p.ty.iter().map(type_node).collect() })
        .collect()
}

fn function_node(f: &FunctionDecl, kind: NodeKind) -> AstNode {
    let mut children: Vec<AstNode> = f.decorators.iter().map(decorator_node).collect();
    children.extend(params_nodes(&f.params));
    children.extend(f.ret.iter().map(type_node));
    children.extend(f.body.iter().map(block_node));
    AstNode { kind, span: f.span, children }
}

fn var_node(v: &VarDecl) -> AstNode {
    let mut children: Vec<AstNode> = v.decorators.iter().map(decorator_node).collect();
    children.extend(v.ty.iter().map(type_node));
    children.extend(v.init.iter().map(expr_node));
    AstNode { kind: NodeKind::VarDecl, span: v.span, children }
}

fn block_node(b: &Block) -> AstNode {
    AstNode { kind: NodeKind::Block, span: b.span, children: b.stmts.iter().map(stmt_node).collect() }
}

fn stmt_node(s: &Stmt) -> AstNode {
    let (kind, children) = match &s.kind {
        StmtKind::Var(v) => return var_node(v),
        StmtKind::Expr(e) => (NodeKind::ExprStmt, vec![expr_node(e)]),
        StmtKind::If { cond, then, otherwise } => {
            let mut ch = vec![expr_node(cond), stmt_node(then)];
            ch.extend(otherwise.iter().map(|s| stmt_node(s)));
            (NodeKind::If, ch)
        }
        StmtKind::While { cond, body } => (NodeKind::While, vec![expr_node(cond), stmt_node(body)]),
        StmtKind::For { init, cond, update, body } => {
            let mut ch: Vec<AstNode> = init.iter().map(|s| stmt_node(s)).collect();
            ch.extend(cond.iter().map(expr_node));
            ch.extend(update.iter().map(expr_node));
            ch.push(stmt_node(body));
            (NodeKind::For, ch)
        }
        StmtKind::Return(e) => (NodeKind::Return, e.iter().map(expr_node).collect()),
        StmtKind::Break => (NodeKind::Break, vec![]),
        StmtKind::Continue => (NodeKind::Continue, vec![]),
        StmtKind::Block(b) => return block_node(b),
        StmtKind::Component(c) => return component_node(c),
        StmtKind::Empty => (NodeKind::EmptyStmt, vec![]),
    };
    AstNode { kind, span: s.span, children }
}

fn component_node(c: &ComponentBlock) -> AstNode {
    let mut children: Vec<AstNode> = c.args.iter().map(expr_node).collect();
    children.extend(c.children.iter().map(block_node));
    children.extend(c.chain.iter().map(|call| AstNode {
        kind: NodeKind::ComponentChain,
        span: call.span,
        children: call.args.iter().map(expr_node).collect(),
    }));
    AstNode { kind: NodeKind::ComponentBlock, span: c.span, children }
}

fn expr_node(e: &Expr) -> AstNode {
    use ExprKind::*;
    let (kind, children): (NodeKind, Vec<AstNode>) = match &e.kind {
        Ident(_) => (NodeKind::Identifier, vec![]),
        Number(_) | Str(_) | Bool(_) | Null | Undefined => (NodeKind::Literal, vec![]),
        This => (NodeKind::This, vec![]),
        Super => (NodeKind::Super, vec![]),
        Template(segs) => (
            NodeKind::TemplateString,
            segs.iter()
                .filter_map(|s| match s {
                    TemplateSegment::Expr(e) => Some(expr_node(e)),
                    TemplateSegment::Str(_) => None,
                })
                .collect(),
        ),
        Binary(_, l, r) => (NodeKind::Binary, vec![expr_node(l), expr_node(r)]),
        Logical(_, l, r) => (NodeKind::Logical, vec![expr_node(l), expr_node(r)]),
        Unary(_, x) => (NodeKind::Unary, vec![expr_node(x)]),
        Update { target, .. } => (NodeKind::Update, vec![expr_node(target)]),
        Assign { target, value, .. } => (NodeKind::Assign, vec![expr_node(target), expr_node(value)]),
        Conditional(c, a, b) => (NodeKind::Conditional, vec![expr_node(c), expr_node(a), expr_node(b)]),
        Call { callee, args } => {
            let mut ch = vec![expr_node(callee)];
            ch.extend(args.iter().map(expr_node));
            (NodeKind::Call, ch)
        }
        New { args, .. } => (NodeKind::New, args.iter().map(expr_node).collect()),
        Member { object, .. } => (NodeKind::Member, vec![expr_node(object)]),
        Index { object, index } => (NodeKind::Index, vec![expr_node(object), expr_node(index)]),
        Arrow { params, body } => {
            let mut ch = params_nodes(params);
            match body {
                ArrowBody::Expr(e) => ch.push(expr_node(e)),
                ArrowBody::Block(b) => ch.push(block_node(b)),
            }
            (NodeKind::ArrowFn, ch)
        }
        Function { params, ret, body, .. } => {
            let mut ch = params_nodes(params);
            ch.extend(ret.iter().map(type_node));
            ch.push(block_node(body));
            (NodeKind::AnonFn, ch)
        }
        Object(props) => (NodeKind::ObjectLiteral, props.iter().map(|(_, v)| expr_node(v)).collect()),
        Array(elems) => (NodeKind::ArrayLiteral, elems.iter().map(expr_node).collect()),
    };
    AstNode { kind, span: e.span, children }
}
