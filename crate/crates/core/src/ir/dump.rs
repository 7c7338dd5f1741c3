//! Deterministic text form of lowered bodies.
//!
//! ```text
//! method a.ets: %dflt.f/1 {
//!   locals: x, temp0
//!   bb0:
//!     x = @param0
//!     temp0 = x + 1
//!     return temp0
//! }
//! ```

use std::fmt::{self, Write};

use super::*;
use crate::frontend::ast::UnaryOp;

pub const HEADER: &str = "// arklight-ir v1";

/// Dumps the simplified CFG of a body.
pub fn dump_method(sig: &MethodSignature, body: &ArkBody) -> String {
    dump_cfg(sig, &body.locals, &body.cfg)
}

/// Dumps the simplified CFG without the method header (block lines only).
pub fn dump_body(body: &ArkBody) -> String {
    let mut out = String::new();
    write_blocks(&mut out, &body.cfg).unwrap();
    out
}

pub fn dump_cfg(sig: &MethodSignature, locals: &[LocalInfo], cfg: &Cfg) -> String {
    let mut out = String::new();
    writeln!(out, "method {sig} {{").unwrap();
    let names: Vec<&str> = locals.iter().map(|l| l.name.as_str()).collect();
    if names.is_empty() {
        out.push_str("  locals:\n");
    } else {
        writeln!(out, "  locals: {}", names.join(", ")).unwrap();
    }
    write_blocks(&mut out, cfg).unwrap();
    out.push_str("}\n");
    out
}

fn write_blocks(out: &mut String, cfg: &Cfg) -> fmt::Result {
    for b in &cfg.blocks {
        write!(out, "  bb{}:", b.id)?;
        if b.dead {
            out.push_str(" // dead");
        } else if !b.preds.is_empty() {
            let preds: Vec<String> = b.preds.iter().map(|p| format!("bb{p}")).collect();
            write!(out, " // preds: {}", preds.join(", "))?;
        }
        out.push('\n');
        for s in &b.stmts {
            writeln!(out, "    {}", StmtText(&s.stmt))?;
        }
    }
    Ok(())
}

pub fn format_number(n: f64) -> String {
    if n.is_finite() && n.fract() == 0.0 && n.abs() < 1e15 {
        format!("{}", n as i64)
    } else {
        format!("{n}")
    }
}

pub fn quote(s: &str, delim: char) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push(delim);
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if c == delim => {
                out.push('\\');
                out.push(c);
            }
            '$' if delim == '`' => out.push_str("\\$"),
            c => out.push(c),
        }
    }
    out.push(delim);
    out
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Number(n) => f.write_str(&format_number(*n)),
            Constant::String(s) => f.write_str(&quote(s, '\'')),
            Constant::Bool(b) => write!(f, "{b}"),
            Constant::Null => f.write_str("null"),
            Constant::Undefined => f.write_str("undefined"),
            Constant::FuncRef(m) => f.write_str(&m.name),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Local(l) => f.write_str(l),
            Atom::Const(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for ClassRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.sig {
            Some(s) => f.write_str(&s.qualified_name()),
            None => f.write_str(&self.name),
        }
    }
}

impl fmt::Display for FieldBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldBase::Local(l) => f.write_str(l),
            FieldBase::Class(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Local(l) => f.write_str(l),
            Place::Field { base, field } => write!(f, "{base}.{field}"),
            Place::Array { base, index } => write!(f, "{base}[{index}]"),
        }
    }
}

pub fn unary_text(op: UnaryOp) -> &'static str {
    op.as_str()
}

impl fmt::Display for Rvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rvalue::Atom(a) => write!(f, "{a}"),
            Rvalue::Field { base, field } => write!(f, "{base}.{field}"),
            Rvalue::Array { base, index } => write!(f, "{base}[{index}]"),
            Rvalue::Param(i) => write!(f, "@param{i}"),
            Rvalue::This => f.write_str("@this"),
            Rvalue::Binary(op, a, b) => write!(f, "{a} {} {b}", op.as_str()),
            Rvalue::Unary(op, a) => write!(f, "{}{a}", unary_text(*op)),
        }
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cond::Compare(op, a, b) => write!(f, "{a} {} {b}", op.as_str()),
            Cond::Truthy(a) => write!(f, "{a}"),
        }
    }
}

fn args(f: &mut fmt::Formatter<'_>, args: &[Atom]) -> fmt::Result {
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Invoke {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = &self.result {
            write!(f, "{r} = ")?;
        }
        match &self.kind {
            CallKind::Free(_) | CallKind::Pointer => f.write_str(&self.method)?,
            CallKind::Static(c) => write!(f, "{c}.{}", self.method)?,
            CallKind::Instance(b) => write!(f, "{b}.{}", self.method)?,
            CallKind::Special { base, class } => write!(f, "{base}.{class}::{}", self.method)?,
        }
        args(f, &self.args)
    }
}

struct StmtText<'a>(&'a Stmt);

impl fmt::Display for StmtText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Stmt::Assign { lhs, rhs } => write!(f, "{lhs} = {rhs}"),
            Stmt::Invoke(inv) => write!(f, "{inv}"),
            Stmt::New { result, class } => write!(f, "{result} = new {class}()"),
            Stmt::NewArray { result, len } => write!(f, "{result} = newarray({len})"),
            Stmt::If { cond, then, els } => write!(f, "if {cond} goto bb{then} else bb{els}"),
            Stmt::Goto(t) => write!(f, "goto bb{t}"),
            Stmt::Return(None) => f.write_str("return"),
            Stmt::Return(Some(a)) => write!(f, "return {a}"),
            Stmt::Label(l) => write!(f, "label{l}:"),
            Stmt::Nop => f.write_str("nop"),
            Stmt::Sugar(s) => match s {
                Sugar::Incr { target, increment } => write!(f, "{target}{}", if *increment { "++" } else { "--" }),
                Sugar::Compound { target, op, value } => write!(f, "{target} {}= {value}", op.as_str()),
                Sugar::Template { result, parts } => {
                    write!(f, "{result} = `")?;
                    for p in parts {
                        match p {
                            TemplatePiece::Str(s) => {
                                let q = quote(s, '`');
                                f.write_str(&q[1..q.len() - 1])?
                            }
                            TemplatePiece::Value(a) => write!(f, "${{{a}}}")?,
                        }
                    }
                    f.write_str("`")
                }
                Sugar::ObjectLiteral { result, class, fields } => {
                    write!(f, "{result} = {{")?;
                    for (i, (k, v)) in fields.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{k}: {v}")?;
                    }
                    write!(f, "}} as {class}")
                }
                Sugar::ComponentCreate { component, args: a, result } => {
                    write!(f, "{result} = component {component}")?;
                    args(f, a)
                }
                Sugar::ComponentAttr { base, name, args: a } => {
                    write!(f, "component {base}.{name}")?;
                    args(f, a)
                }
                Sugar::ComponentPop { component } => write!(f, "component end {component}"),
            },
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        StmtText(self).fmt(f)
    }
}
