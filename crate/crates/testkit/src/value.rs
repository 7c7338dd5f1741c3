//! Runtime values with JavaScript-like operator semantics, shared by both
//! reference interpreters.

use arklight::frontend::ast::{BinaryOp, UnaryOp};
use arklight::scene::MethodSignature;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Str(String),
    Bool(bool),
    Null,
    Undefined,
    /// Heap object or array, by index.
    Obj(usize),
    Func(MethodSignature),
}

impl Value {
    pub fn truthy(&self) -> bool {
        match self {
            Value::Num(n) => *n != 0.0 && !n.is_nan(),
            Value::Str(s) => !s.is_empty(),
            Value::Bool(b) => *b,
            Value::Null | Value::Undefined => false,
            Value::Obj(_) | Value::Func(_) => true,
        }
    }

    pub fn to_number(&self) -> f64 {
        match self {
            Value::Num(n) => *n,
            Value::Bool(b) => *b as i32 as f64,
            Value::Null => 0.0,
            Value::Str(s) => {
                let t = s.trim();
                if t.is_empty() {
                    0.0
                } else {
                    t.parse().unwrap_or(f64::NAN)
                }
            }
            _ => f64::NAN,
        }
    }

    fn to_int32(&self) -> i32 {
        let n = self.to_number();
        if !n.is_finite() {
            return 0;
        }
        (n.trunc().rem_euclid(4294967296.0) as u32) as i32
    }

    pub fn display(&self) -> String {
        match self {
            Value::Num(n) => fmt_number(*n),
            Value::Str(s) => s.clone(),
            Value::Bool(b) => b.to_string(),
            Value::Null => "null".into(),
            Value::Undefined => "undefined".into(),
            Value::Obj(_) => "[object Object]".into(),
            Value::Func(m) => format!("function {}", m.name),
        }
    }

    fn type_name(&self) -> &'static str {
        match self {
            Value::Num(_) => "number",
            Value::Str(_) => "string",
            Value::Bool(_) => "boolean",
            Value::Undefined => "undefined",
            Value::Null | Value::Obj(_) => "object",
            Value::Func(_) => "function",
        }
    }
}

pub fn fmt_number(n: f64) -> String {
    if n.is_nan() {
        "NaN".into()
    } else if n.is_infinite() {
        if n > 0.0 { "Infinity" } else { "-Infinity" }.into()
    } else if n.fract() == 0.0 && n.abs() < 1e21 {
        format!("{}", n as i64)
    } else {
        format!("{n}")
    }
}

fn strict_eq(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Num(x), Value::Num(y)) => x == y,
        _ => a == b,
    }
}

fn loose_eq(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Null | Value::Undefined, Value::Null | Value::Undefined) => true,
        (Value::Null | Value::Undefined, _) | (_, Value::Null | Value::Undefined) => false,
        _ if std::mem::discriminant(a) == std::mem::discriminant(b) => strict_eq(a, b),
        (Value::Obj(_) | Value::Func(_), _) | (_, Value::Obj(_) | Value::Func(_)) => false,
        _ => a.to_number() == b.to_number(),
    }
}

pub fn binary(op: BinaryOp, a: &Value, b: &Value) -> Result<Value, String> {
    use BinaryOp::*;
    let num = |f: fn(f64, f64) -> f64| Value::Num(f(a.to_number(), b.to_number()));
    let cmp = |f: fn(std::cmp::Ordering) -> bool| match (a, b) {
        (Value::Str(x), Value::Str(y)) => Value::Bool(f(x.cmp(y))),
        _ => Value::Bool(a.to_number().partial_cmp(&b.to_number()).is_some_and(f)),
    };
    Ok(match op {
        Add => match (a, b) {
            (Value::Str(_), _) | (_, Value::Str(_)) => Value::Str(a.display() + &b.display()),
            _ => num(|x, y| x + y),
        },
        Sub => num(|x, y| x - y),
        Mul => num(|x, y| x * y),
        Div => num(|x, y| x / y),
        Rem => num(|x, y| x % y),
        Eq => Value::Bool(loose_eq(a, b)),
        NotEq => Value::Bool(!loose_eq(a, b)),
        StrictEq => Value::Bool(strict_eq(a, b)),
        StrictNotEq => Value::Bool(!strict_eq(a, b)),
        Lt => cmp(|o| o.is_lt()),
        LtEq => cmp(|o| o.is_le()),
        Gt => cmp(|o| o.is_gt()),
        GtEq => cmp(|o| o.is_ge()),
        BitAnd => Value::Num((a.to_int32() & b.to_int32()) as f64),
        BitOr => Value::Num((a.to_int32() | b.to_int32()) as f64),
        BitXor => Value::Num((a.to_int32() ^ b.to_int32()) as f64),
        Shl => Value::Num(a.to_int32().wrapping_shl(b.to_int32() as u32 & 31) as f64),
        Shr => Value::Num(a.to_int32().wrapping_shr(b.to_int32() as u32 & 31) as f64),
        UShr => Value::Num(((a.to_int32() as u32) >> (b.to_int32() as u32 & 31)) as f64),
        InstanceOf | In => return Err(format!("operator `{}` is not supported", op.as_str())),
    })
}

pub fn unary(op: UnaryOp, a: &Value) -> Value {
    match op {
        UnaryOp::Neg => Value::Num(-a.to_number()),
        UnaryOp::Plus => Value::Num(a.to_number()),
        UnaryOp::Not => Value::Bool(!a.truthy()),
        UnaryOp::BitNot => Value::Num(!a.to_int32() as f64),
        UnaryOp::TypeOf => Value::Str(a.type_name().into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn js_like_arithmetic() {
        let n = |x: f64| Value::Num(x);
        assert_eq!(binary(BinaryOp::Add, &Value::Str("a".into()), &n(1.0)).unwrap(), Value::Str("a1".into()));
        assert_eq!(binary(BinaryOp::Rem, &n(-7.0), &n(3.0)).unwrap(), n(-1.0));
        assert_eq!(binary(BinaryOp::UShr, &n(-1.0), &n(28.0)).unwrap(), n(15.0));
        assert_eq!(binary(BinaryOp::Shl, &n(1.0), &n(33.0)).unwrap(), n(2.0));
        assert_eq!(binary(BinaryOp::Eq, &Value::Null, &Value::Undefined).unwrap(), Value::Bool(true));
        assert_eq!(binary(BinaryOp::StrictEq, &Value::Null, &Value::Undefined).unwrap(), Value::Bool(false));
        assert_eq!(fmt_number(3.0), "3");
        assert_eq!(fmt_number(0.5), "0.5");
    }
}
