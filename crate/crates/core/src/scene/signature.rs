use std::fmt;

use serde::{Serialize, Serializer};

/// `(file, namespace path, class name)`. Text form: `file: ns.Class`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassSignature {
    pub file: String,
    pub namespace: Vec<String>,
    pub name: String,
}

/// A class signature plus method name and parameter count.
/// Text form: `file: ns.Class.method/arity`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MethodSignature {
    pub class: ClassSignature,
    pub name: String,
    pub arity: usize,
}

pub const DEFAULT_CLASS: &str = "%dflt";
pub const CONSTRUCTOR: &str = "constructor";

impl ClassSignature {
    pub fn new(file: impl Into<String>, namespace: Vec<String>, name: impl Into<String>) -> Self {
        ClassSignature { file: file.into(), namespace, name: name.into() }
    }

    /// Namespace-qualified name without the file part.
    pub fn qualified_name(&self) -> String {
        let mut s = String::new();
        for ns in &self.namespace {
            s.push_str(ns);
            s.push('.');
        }
        s.push_str(&self.name);
        s
    }

    pub fn is_default(&self) -> bool {
        self.name == DEFAULT_CLASS
    }

    pub fn method(&self, name: impl Into<String>, arity: usize) -> MethodSignature {
        MethodSignature { class: self.clone(), name: name.into(), arity }
    }
}

impl fmt::Display for ClassSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.file, self.qualified_name())
    }
}

impl MethodSignature {
    /// `ns.Class.method/arity`, the text form without the file.
    pub fn short(&self) -> String {
        format!("{}.{}/{}", self.class.qualified_name(), self.name, self.arity)
    }

    pub fn is_constructor(&self) -> bool {
        self.name == CONSTRUCTOR
    }

    /// Parses the canonical text form.
    pub fn parse(text: &str) -> Option<MethodSignature> {
        let (file, rest) = text.rsplit_once(": ")?;
        let (path, arity) = rest.rsplit_once('/')?;
        let arity = arity.trim().parse().ok()?;
        let mut parts: Vec<&str> = path.split('.').collect();
        if parts.len() < 2 || parts.iter().any(|p| p.is_empty()) {
            return None;
        }
        let name = parts.pop()?.to_string();
        let class = parts.pop()?.to_string();
        let namespace = parts.into_iter().map(str::to_string).collect();
        Some(MethodSignature { class: ClassSignature { file: file.trim().to_string(), namespace, name: class }, name, arity })
    }
}

impl fmt::Display for MethodSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.class.file, self.short())
    }
}

impl Serialize for ClassSignature {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for MethodSignature {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form_round_trips() {
        let c = ClassSignature::new("src/a.ets", vec!["ui".into(), "inner".into()], "Dog");
        let m = c.method("sound", 0);
        assert_eq!(m.to_string(), "src/a.ets: ui.inner.Dog.sound/0");
        assert_eq!(MethodSignature::parse(&m.to_string()), Some(m));
        let d = ClassSignature::new("a.ets", vec![], DEFAULT_CLASS).method("main", 0);
        assert_eq!(d.to_string(), "a.ets: %dflt.main/0");
        assert_eq!(MethodSignature::parse("a.ets: %dflt.main/0"), Some(d));
        assert_eq!(MethodSignature::parse("a.ets: main/0"), None);
        assert_eq!(MethodSignature::parse("nonsense"), None);
    }
}
