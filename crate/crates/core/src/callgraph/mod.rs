//! Whole-program call graphs by class hierarchy analysis (CHA) and rapid
//! type analysis (RTA).
//!
//! Both algorithms run the same worklist from the entry points. A virtual
//! call on a receiver of static type `C` targets the resolved method of
//! every subtype of `C`; RTA keeps a target only when the subtype it was
//! resolved for is instantiated by a `new` in reachable code. Stub (SDK)
//! classes and the classes owning instance entry points count as
//! instantiated.

mod emit;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

pub use emit::{emit, Format};

use crate::ir::{Atom, CallKind, Constant, Invoke, Place, Rvalue, Stmt, StmtId};
use crate::scene::{ArkMethod, ClassKind, ClassSignature, MethodSignature, Scene};
use crate::types::Type;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Cha,
    Rta,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Cha => "CHA",
            Algorithm::Rta => "RTA",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "cha" => Ok(Algorithm::Cha),
            "rta" => Ok(Algorithm::Rta),
            _ => Err(format!("unknown call-graph algorithm `{s}` (expected cha or rta)")),
        }
    }
}

/// Index of a call site in [`all_call_sites`] order.
pub type CallSiteId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct CallSite {
    pub id: CallSiteId,
    pub stmt: StmtId,
    pub caller: MethodSignature,
    /// Inferred type of the receiver for instance calls.
    pub receiver: Option<Type>,
    pub callee_name: String,
    pub arg_count: usize,
    pub kind: CallKind,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub site: CallSiteId,
    pub caller: MethodSignature,
    pub callee: MethodSignature,
    pub line: u32,
    /// Found by name and arity only because the receiver type was unknown.
    pub low_confidence: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CallGraph {
    pub algorithm: Algorithm,
    pub entry_points: Vec<MethodSignature>,
    pub nodes: BTreeSet<MethodSignature>,
    pub edges: BTreeSet<Edge>,
    /// Sites of reachable methods that resolved to no target.
    pub unresolved: Vec<CallSite>,
    /// Every call site of every reachable method.
    pub sites: Vec<CallSite>,
    pub instantiated: BTreeSet<ClassSignature>,
}

impl CallGraph {
    pub fn callees(&self, caller: &MethodSignature) -> BTreeSet<&MethodSignature> {
        self.edges.iter().filter(|e| &e.caller == caller).map(|e| &e.callee).collect()
    }

    pub fn callers(&self, callee: &MethodSignature) -> BTreeSet<&MethodSignature> {
        self.edges.iter().filter(|e| &e.callee == callee).map(|e| &e.caller).collect()
    }

    /// Caller → callees, as a plain method-level map.
    pub fn dyn_edges(&self) -> BTreeMap<&MethodSignature, BTreeSet<&MethodSignature>> {
        let mut m: BTreeMap<_, BTreeSet<_>> = BTreeMap::new();
        for e in &self.edges {
            m.entry(&e.caller).or_default().insert(&e.callee);
        }
        m
    }

    /// Method-level `(caller, callee)` pairs.
    pub fn pairs(&self) -> BTreeSet<(MethodSignature, MethodSignature)> {
        self.edges.iter().map(|e| (e.caller.clone(), e.callee.clone())).collect()
    }

    pub fn edges_at(&self, site: CallSiteId) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.site == site)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CgError {
    #[error("no entry points given")]
    NoEntries,
    #[error("unknown entry point(s): {}", .0.join(", "))]
    UnknownEntries(Vec<String>),
}

/// Call sites of every method body in the scene, ordered by caller then
/// statement.
pub fn all_call_sites(scene: &Scene) -> Vec<CallSite> {
    let mut out = Vec::new();
    for (sig, _, body) in scene.bodies() {
        for st in body.cfg.stmts() {
            if let Stmt::Invoke(inv) = &st.stmt {
                let receiver = inv.base().map(|b| body.types.get(b).cloned().unwrap_or(Type::Unknown));
                out.push(CallSite {
                    id: out.len(),
                    stmt: st.id,
                    caller: sig.clone(),
                    receiver,
                    callee_name: inv.method.clone(),
                    arg_count: inv.args.len(),
                    kind: inv.kind.clone(),
                    line: st.span.line,
                });
            }
        }
    }
    out
}

fn stub_class_of(scene: &Scene, t: &Type) -> Option<ClassSignature> {
    let name = match t {
        Type::Class(c) => return Some(c.clone()),
        Type::String => "String",
        Type::Array(_) => "Array",
        _ => return None,
    };
    scene.classes_named(name).into_iter().find(|c| c.is_stub).map(|c| c.signature.clone())
}

/// The single method a call binds to without considering overriding: the
/// declaration for direct calls, and the nearest declaration in the
/// receiver's static class for instance calls.
pub fn resolve_static(scene: &Scene, inv: &Invoke, recv: Option<&Type>) -> Option<MethodSignature> {
    let argc = inv.args.len();
    let found = match &inv.kind {
        CallKind::Free(Some(sig)) => scene.declared_method(&sig.class, &sig.name, argc).or_else(|| scene.method(sig)),
        CallKind::Free(None) | CallKind::Pointer => None,
        CallKind::Static(c) | CallKind::Special { class: c, .. } => {
            c.sig.as_ref().and_then(|c| scene.lookup_method(c, &inv.method, argc))
        }
        CallKind::Instance(_) => {
            let class = stub_class_of(scene, recv?)?;
            scene.lookup_method(&class, &inv.method, argc)
        }
    };
    found.map(|m| m.signature.clone())
}

fn is_target(m: &ArkMethod) -> bool {
    !m.is_abstract
}

struct Builder<'s> {
    scene: &'s Scene,
    algorithm: Algorithm,
    instantiated: BTreeSet<ClassSignature>,
    /// Methods declaring `name/argc`-compatible members, for unknown receivers.
    by_name: BTreeMap<&'s str, Vec<&'s ArkMethod>>,
}

impl<'s> Builder<'s> {
    fn live(&self, class: &ClassSignature) -> bool {
        self.algorithm == Algorithm::Cha
            || self.instantiated.contains(class)
            || self.scene.class(class).is_some_and(|c| c.is_stub)
    }

    /// Targets of one site under the current instantiated set.
    fn targets(&self, site: &CallSite, body_defs: &BTreeMap<&str, Vec<&MethodSignature>>) -> Vec<(MethodSignature, bool)> {
        let scene = self.scene;
        let argc = site.arg_count;
        let name = site.callee_name.as_str();
        match &site.kind {
            CallKind::Free(Some(sig)) => {
                scene.declared_method(&sig.class, &sig.name, argc).map(|m| vec![(m.signature.clone(), false)]).unwrap_or_default()
            }
            CallKind::Free(None) => Vec::new(),
            CallKind::Pointer => body_defs
                .get(name)
                .into_iter()
                .flatten()
                .filter(|s| scene.method(s).is_some_and(|m| m.accepts(argc)))
                .map(|s| ((*s).clone(), false))
                .collect(),
            CallKind::Static(c) | CallKind::Special { class: c, .. } => c
                .sig
                .as_ref()
                .and_then(|c| scene.lookup_method(c, name, argc))
                .filter(|m| is_target(m))
                .map(|m| vec![(m.signature.clone(), false)])
                .unwrap_or_default(),
            CallKind::Instance(_) => {
                let recv = site.receiver.as_ref().and_then(|t| stub_class_of(scene, t));
                match recv {
                    Some(c) if scene.class(&c).is_some() => {
                        let mut out = BTreeSet::new();
                        for d in scene.hierarchy.subtypes(&c) {
                            if !self.live(&d) {
                                continue;
                            }
                            if let Some(m) = scene.lookup_method(&d, name, argc).filter(|m| is_target(m)) {
                                out.insert(m.signature.clone());
                            }
                        }
                        out.into_iter().map(|m| (m, false)).collect()
                    }
                    _ => {
                        let mut out = BTreeSet::new();
                        for m in self.by_name.get(name).into_iter().flatten() {
                            if m.accepts(argc) && self.live(&m.signature.class) {
                                out.insert(m.signature.clone());
                            }
                        }
                        out.into_iter().map(|m| (m, true)).collect()
                    }
                }
            }
        }
    }
}

/// Function references assigned to each local of `caller`'s body.
fn pointer_targets<'a>(scene: &'a Scene, caller: &MethodSignature) -> BTreeMap<&'a str, Vec<&'a MethodSignature>> {
    let mut out: BTreeMap<&str, Vec<&MethodSignature>> = BTreeMap::new();
    if let Some(body) = scene.method(caller).and_then(|m| m.body.as_ref()) {
        for st in body.cfg.stmts() {
            if let Stmt::Assign { lhs: Place::Local(l), rhs: Rvalue::Atom(Atom::Const(Constant::FuncRef(s))) } = &st.stmt {
                out.entry(l.as_str()).or_default().push(s);
            }
        }
    }
    out
}

pub fn build_cha(scene: &Scene, entries: &[MethodSignature]) -> Result<CallGraph, CgError> {
    build(scene, entries, Algorithm::Cha)
}

pub fn build_rta(scene: &Scene, entries: &[MethodSignature]) -> Result<CallGraph, CgError> {
    build(scene, entries, Algorithm::Rta)
}

pub fn build(scene: &Scene, entries: &[MethodSignature], algorithm: Algorithm) -> Result<CallGraph, CgError> {
    if entries.is_empty() {
        return Err(CgError::NoEntries);
    }
    let missing: Vec<String> = entries.iter().filter(|e| scene.method(e).is_none()).map(|e| e.to_string()).collect();
    if !missing.is_empty() {
        return Err(CgError::UnknownEntries(missing));
    }
    let mut entry_points: Vec<MethodSignature> = entries.to_vec();
    entry_points.sort();
    entry_points.dedup();

    let all_sites = all_call_sites(scene);
    let mut sites_of: BTreeMap<&MethodSignature, Vec<&CallSite>> = BTreeMap::new();
    for s in &all_sites {
        sites_of.entry(&s.caller).or_default().push(s);
    }
    let mut by_name: BTreeMap<&str, Vec<&ArkMethod>> = BTreeMap::new();
    for m in scene.methods.values() {
        let owner = scene.class(&m.signature.class);
        if is_target(m) && owner.is_some_and(|c| c.kind != ClassKind::Default) && !m.is_static {
            by_name.entry(m.signature.name.as_str()).or_default().push(m);
        }
    }
    let mut b = Builder { scene, algorithm, instantiated: BTreeSet::new(), by_name };
    for e in &entry_points {
        let m = scene.method(e).expect("checked above");
        if !m.is_static && !e.class.is_default() {
            b.instantiated.insert(e.class.clone());
        }
    }

    let mut nodes: BTreeSet<MethodSignature> = entry_points.iter().cloned().collect();
    let mut edges = BTreeSet::new();
    let mut processed: Vec<&MethodSignature> = Vec::new();
    let mut pointer_defs: BTreeMap<&MethodSignature, BTreeMap<&str, Vec<&MethodSignature>>> = BTreeMap::new();
    let mut work: VecDeque<MethodSignature> = entry_points.iter().cloned().collect();
    loop {
        while let Some(m) = work.pop_front() {
            let Some((sig, method)) = scene.methods.get_key_value(&m) else { continue };
            if pointer_defs.contains_key(sig) {
                continue;
            }
            pointer_defs.insert(sig, pointer_targets(scene, sig));
            processed.push(sig);
            if let Some(body) = &method.body {
                for st in body.cfg.stmts() {
                    if let Stmt::New { class, .. } = &st.stmt {
                        if let Some(c) = &class.sig {
                            b.instantiated.insert(c.clone());
                        }
                    }
                }
            }
        }
        for caller in &processed {
            for site in sites_of.get(caller).into_iter().flatten() {
                for (callee, low) in b.targets(site, &pointer_defs[caller]) {
                    if nodes.insert(callee.clone()) {
                        work.push_back(callee.clone());
                    }
                    edges.insert(Edge { site: site.id, caller: (*caller).clone(), callee, line: site.line, low_confidence: low });
                }
            }
        }
        if work.is_empty() {
            break;
        }
    }

    let mut sites = Vec::new();
    let mut unresolved = Vec::new();
    for caller in &nodes {
        for site in sites_of.get(caller).into_iter().flatten() {
            if !edges.iter().any(|e: &Edge| e.site == site.id) {
                unresolved.push((*site).clone());
            }
            sites.push((*site).clone());
        }
    }
    Ok(CallGraph { algorithm, entry_points, nodes, edges, unresolved, sites, instantiated: b.instantiated })
}

#[cfg(test)]
mod tests;
