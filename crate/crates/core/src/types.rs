//! Types used for declared annotations and inference results.

use std::fmt;

use crate::scene::ClassSignature;

/// Inference lattice: `Unknown ⊑ t ⊑ Any` for every concrete `t`; distinct
/// concrete types are incomparable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Unknown,
    Boolean,
    Number,
    String,
    Null,
    Undefined,
    Void,
    Any,
    Class(ClassSignature),
    Array(Box<Type>),
    Function(Vec<Type>, Box<Type>),
}

impl Type {
    pub fn is_concrete(&self) -> bool {
        !matches!(self, Type::Unknown | Type::Any)
    }

    pub fn join(&self, other: &Type) -> Type {
        match (self, other) {
            (Type::Unknown, t) | (t, Type::Unknown) => t.clone(),
            (a, b) if a == b => a.clone(),
            _ => Type::Any,
        }
    }

    pub fn class(&self) -> Option<&ClassSignature> {
        match self {
            Type::Class(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Unknown => f.write_str("unknown"),
            Type::Boolean => f.write_str("boolean"),
            Type::Number => f.write_str("number"),
            Type::String => f.write_str("string"),
            Type::Null => f.write_str("null"),
            Type::Undefined => f.write_str("undefined"),
            Type::Void => f.write_str("void"),
            Type::Any => f.write_str("any"),
            Type::Class(c) => f.write_str(&c.qualified_name()),
            Type::Array(e) => write!(f, "{e}[]"),
            Type::Function(ps, r) => {
                f.write_str("(")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ") => {r}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_type() -> impl Strategy<Value = Type> {
        prop_oneof![
            Just(Type::Unknown),
            Just(Type::Boolean),
            Just(Type::Number),
            Just(Type::String),
            Just(Type::Null),
            Just(Type::Any),
            "[A-C]".prop_map(|n| Type::Class(ClassSignature::new("a.ets", vec![], n))),
        ]
    }

    proptest! {
        #[test]
        fn join_is_a_semilattice(a in arb_type(), b in arb_type(), c in arb_type()) {
            prop_assert_eq!(a.join(&b), b.join(&a));
            prop_assert_eq!(a.join(&b).join(&c), a.join(&b.join(&c)));
            prop_assert_eq!(a.join(&a), a.clone());
            prop_assert_eq!(Type::Unknown.join(&a), a.clone());
            prop_assert_eq!(Type::Any.join(&a), Type::Any);
        }
    }

    #[test]
    fn distinct_concrete_types_join_to_any() {
        assert_eq!(Type::Number.join(&Type::String), Type::Any);
    }
}
