//! Project-wide name tables used while lowering bodies.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::{ClassSignature, MethodSignature, DEFAULT_CLASS};
use crate::frontend::ast::{TypeAnno, TypeKind};
use crate::ir::lower::{component_interface_name, Component, Resolver};
use crate::ir::ClassRef;
use crate::types::Type;

#[derive(Debug, Default)]
pub(crate) struct Names {
    /// (file, qualified name) to class.
    file_classes: HashMap<(String, String), ClassSignature>,
    /// Qualified name to classes in user files, then stub files.
    by_name: BTreeMap<String, Vec<ClassSignature>>,
    stub_by_name: BTreeMap<String, Vec<ClassSignature>>,
    /// Static fields and functions of each default class.
    globals: HashMap<ClassSignature, BTreeSet<String>>,
    functions: HashMap<ClassSignature, BTreeMap<String, MethodSignature>>,
    namespaces: HashMap<(String, String), ClassSignature>,
    pub(crate) supers: HashMap<ClassSignature, ClassRef>,
    pub(crate) with_ctor: HashSet<ClassSignature>,
    pub(crate) structs: HashSet<ClassSignature>,
    stub_files: HashSet<String>,
}

impl Names {
    pub(crate) fn add_class(&mut self, sig: &ClassSignature, is_stub: bool) {
        let qn = sig.qualified_name();
        self.file_classes.insert((sig.file.clone(), qn.clone()), sig.clone());
        if sig.is_default() {
            if !sig.namespace.is_empty() {
                self.namespaces.insert((sig.file.clone(), sig.namespace.join(".")), sig.clone());
            }
            return;
        }
        let map = if is_stub { &mut self.stub_by_name } else { &mut self.by_name };
        map.entry(qn).or_default().push(sig.clone());
        if is_stub {
            self.stub_files.insert(sig.file.clone());
        }
    }

    pub(crate) fn add_global(&mut self, dflt: &ClassSignature, name: &str) {
        self.globals.entry(dflt.clone()).or_default().insert(name.to_string());
    }

    pub(crate) fn add_function(&mut self, m: &MethodSignature) {
        self.functions.entry(m.class.clone()).or_default().entry(m.name.clone()).or_insert_with(|| m.clone());
    }

    /// Default classes visible from `scope`, innermost namespace first.
    fn scope_defaults(scope: &ClassSignature) -> impl Iterator<Item = ClassSignature> + '_ {
        (0..=scope.namespace.len()).rev().map(|n| ClassSignature::new(scope.file.clone(), scope.namespace[..n].to_vec(), DEFAULT_CLASS))
    }

    pub(crate) fn lookup_class(&self, name: &str, scope: &ClassSignature) -> Option<ClassSignature> {
        for n in (0..=scope.namespace.len()).rev() {
            let mut qn = scope.namespace[..n].join(".");
            if !qn.is_empty() {
                qn.push('.');
            }
            qn.push_str(name);
            if let Some(c) = self.file_classes.get(&(scope.file.clone(), qn)) {
                return Some(c.clone());
            }
        }
        self.by_name.get(name).or_else(|| self.stub_by_name.get(name)).and_then(|v| v.first()).cloned()
    }

    fn project_default<T>(&self, map: &HashMap<ClassSignature, T>, has: impl Fn(&T) -> bool) -> Option<ClassSignature> {
        let mut found: Vec<&ClassSignature> =
            map.iter().filter(|(c, t)| !self.stub_files.contains(&c.file) && has(t)).map(|(c, _)| c).collect();
        found.sort();
        found.first().map(|c| (*c).clone())
    }
}

impl Resolver for Names {
    fn class(&self, name: &str, scope: &ClassSignature) -> Option<ClassSignature> {
        self.lookup_class(name, scope)
    }

    fn global(&self, name: &str, scope: &ClassSignature) -> Option<ClassSignature> {
        for d in Names::scope_defaults(scope) {
            if self.globals.get(&d).is_some_and(|g| g.contains(name)) {
                return Some(d);
            }
        }
        // Imported top-level variables of other files.
        let local_fn = Names::scope_defaults(scope).any(|d| self.functions.get(&d).is_some_and(|f| f.contains_key(name)));
        if local_fn || self.lookup_class(name, scope).is_some() {
            return None;
        }
        self.project_default(&self.globals, |g| g.contains(name))
    }

    fn function(&self, name: &str, scope: &ClassSignature) -> Option<MethodSignature> {
        for d in Names::scope_defaults(scope) {
            if let Some(m) = self.functions.get(&d).and_then(|f| f.get(name)) {
                return Some(m.clone());
            }
        }
        let d = self.project_default(&self.functions, |f| f.contains_key(name))?;
        self.functions.get(&d).and_then(|f| f.get(name)).cloned()
    }

    fn namespace(&self, name: &str, scope: &ClassSignature) -> Option<ClassSignature> {
        for n in (0..=scope.namespace.len()).rev() {
            let mut qn = scope.namespace[..n].join(".");
            if !qn.is_empty() {
                qn.push('.');
            }
            qn.push_str(name);
            if let Some(c) = self.namespaces.get(&(scope.file.clone(), qn)) {
                return Some(c.clone());
            }
        }
        None
    }

    fn super_class(&self, class: &ClassSignature) -> Option<ClassRef> {
        self.supers.get(class).cloned()
    }

    fn has_constructor(&self, class: &ClassSignature) -> bool {
        self.with_ctor.contains(class)
    }

    fn component(&self, name: &str, scope: &ClassSignature) -> Component {
        if let Some(c) = self.lookup_class(name, scope) {
            if self.structs.contains(&c) {
                return Component::Custom(c);
            }
        }
        let iface = component_interface_name(name);
        match self.stub_by_name.get(&iface).and_then(|v| v.first()) {
            Some(c) => Component::System(c.clone()),
            None => Component::Unknown,
        }
    }

    fn resolve_type(&self, ty: &TypeAnno, scope: &ClassSignature) -> Type {
        match &ty.kind {
            TypeKind::Named(n, args) => match n.as_str() {
                "number" => Type::Number,
                "string" => Type::String,
                "boolean" => Type::Boolean,
                "void" => Type::Void,
                "any" => Type::Any,
                "null" => Type::Null,
                "undefined" => Type::Undefined,
                "Array" if args.len() == 1 => Type::Array(Box::new(self.resolve_type(&args[0], scope))),
                _ => self.lookup_class(n, scope).map(Type::Class).unwrap_or(Type::Unknown),
            },
            TypeKind::Array(e) => Type::Array(Box::new(self.resolve_type(e, scope))),
            TypeKind::Function(ps, r) => {
                Type::Function(ps.iter().map(|p| self.resolve_type(p, scope)).collect(), Box::new(self.resolve_type(r, scope)))
            }
            TypeKind::Union(ts) => {
                let resolved: Vec<Type> = ts.iter().map(|t| self.resolve_type(t, scope)).collect();
                let non_null: Vec<&Type> = resolved.iter().filter(|t| !matches!(t, Type::Null | Type::Undefined)).collect();
                match non_null.as_slice() {
                    [] => resolved[0].clone(),
                    [one] => (*one).clone(),
                    [first, rest @ ..] if rest.iter().all(|t| t == first) => (*first).clone(),
                    _ => Type::Any,
                }
            }
        }
    }
}
