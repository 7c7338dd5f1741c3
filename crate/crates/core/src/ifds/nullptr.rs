//! Possibly-undefined dereference detection.
//!
//! Facts are access paths of length at most two (`x` or `x.f`) meaning "may
//! hold undefined or null". `new C()` generates `x.f` for every instance
//! field of `C` without an initializer; field stores kill; reading a fact
//! path copies it to the target local. A field access or method call on a
//! local that may be undefined is reported.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use super::solver::{solve, FlowFunctions, IfdsResult, SolverOptions};
use super::supergraph::{NodeId, Supergraph, SupergraphError};
use crate::callgraph::CallGraph;
use crate::ir::{Atom, CallKind, Constant, FieldBase, Place, Rvalue, Stmt};
use crate::scene::Scene;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NpFact {
    Zero,
    Path(AccessPath),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AccessPath {
    pub base: String,
    pub field: Option<String>,
}

impl AccessPath {
    pub fn local(base: impl Into<String>) -> Self {
        AccessPath { base: base.into(), field: None }
    }

    pub fn field(base: impl Into<String>, field: impl Into<String>) -> Self {
        AccessPath { base: base.into(), field: Some(field.into()) }
    }
}

impl std::fmt::Display for AccessPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.field {
            Some(x) => write!(f, "{}.{x}", self.base),
            None => f.write_str(&self.base),
        }
    }
}

fn path(p: AccessPath) -> NpFact {
    NpFact::Path(p)
}

fn is_nullish(a: &Atom) -> bool {
    matches!(a, Atom::Const(Constant::Null | Constant::Undefined))
}

pub struct NullPointer<'a, 's> {
    pub sg: &'a Supergraph<'s>,
}

impl NullPointer<'_, '_> {
    fn scene(&self) -> &Scene {
        self.sg.scene
    }

    /// Instance fields of `class` and its ancestors with no initializer.
    fn uninitialized_fields(&self, class: &crate::scene::ClassSignature) -> BTreeSet<String> {
        let scene = self.scene();
        let mut out = BTreeSet::new();
        for c in scene.hierarchy.ancestors(class) {
            if let Some(k) = scene.class(&c) {
                if k.is_stub {
                    continue;
                }
                for f in &k.fields {
                    if !f.is_static && !f.has_initializer {
                        out.insert(f.name.clone());
                    }
                }
            }
        }
        out
    }

    /// Callee local bound to each argument position, with `None` for the
    /// receiver slot taken by `this`.
    fn callee_param_locals(&self, entry: NodeId) -> (Option<String>, Vec<Option<String>>) {
        let body = self.sg.body(self.sg.method_of(entry));
        let mut this = None;
        let mut params = Vec::new();
        for st in body.cfg.stmts() {
            match &st.stmt {
                Stmt::Assign { lhs: Place::Local(l), rhs: Rvalue::This } => this = Some(l.clone()),
                Stmt::Assign { lhs: Place::Local(l), rhs: Rvalue::Param(i) } => {
                    if params.len() <= *i {
                        params.resize(*i + 1, None);
                    }
                    params[*i] = Some(l.clone());
                }
                _ => {}
            }
        }
        (this, params)
    }

    fn call_parts(&self, call: NodeId) -> Option<(Option<&str>, &[Atom], Option<&str>)> {
        match self.sg.stmt(call) {
            Stmt::Invoke(inv) => Some((inv.base(), &inv.args, inv.result.as_deref())),
            _ => None,
        }
    }
}

impl FlowFunctions for NullPointer<'_, '_> {
    type Fact = NpFact;

    fn zero(&self) -> NpFact {
        NpFact::Zero
    }

    fn normal(&self, from: NodeId, _to: NodeId, fact: &NpFact) -> Vec<NpFact> {
        let stmt = self.sg.stmt(from);
        match stmt {
            Stmt::Assign { lhs: Place::Local(_), rhs: Rvalue::This | Rvalue::Param(_) } => vec![fact.clone()],
            Stmt::Assign { lhs: Place::Local(l), rhs } => {
                let mut out = Vec::new();
                match fact {
                    NpFact::Zero => {
                        if let Rvalue::Atom(a) = rhs {
                            if is_nullish(a) {
                                out.push(path(AccessPath::local(l)));
                            }
                        }
                    }
                    NpFact::Path(p) => {
                        if p.base != *l {
                            out.push(fact.clone());
                        }
                        match rhs {
                            Rvalue::Atom(Atom::Local(y)) if *y == p.base => {
                                out.push(path(AccessPath { base: l.clone(), field: p.field.clone() }));
                            }
                            Rvalue::Field { base: FieldBase::Local(b), field } if *b == p.base && p.field.as_ref() == Some(field) => {
                                out.push(path(AccessPath::local(l)));
                            }
                            _ => {}
                        }
                    }
                }
                out
            }
            Stmt::Assign { lhs: Place::Field { base: FieldBase::Local(b), field }, rhs } => {
                let target = AccessPath::field(b.clone(), field.clone());
                match fact {
                    NpFact::Zero => match rhs {
                        Rvalue::Atom(a) if is_nullish(a) => vec![path(target)],
                        _ => vec![],
                    },
                    NpFact::Path(p) => {
                        let mut out = Vec::new();
                        if *p != target {
                            out.push(fact.clone());
                        }
                        if let Rvalue::Atom(Atom::Local(y)) = rhs {
                            if *y == p.base && p.field.is_none() {
                                out.push(path(target));
                            }
                        }
                        out
                    }
                }
            }
            Stmt::New { result, class } => match fact {
                NpFact::Zero => class
                    .sig
                    .as_ref()
                    .map(|c| self.uninitialized_fields(c).into_iter().map(|f| path(AccessPath::field(result.clone(), f))).collect())
                    .unwrap_or_default(),
                NpFact::Path(p) if p.base == *result => vec![],
                _ => vec![fact.clone()],
            },
            Stmt::NewArray { result, .. } => match fact {
                NpFact::Path(p) if p.base == *result => vec![],
                NpFact::Zero => vec![],
                _ => vec![fact.clone()],
            },
            _ => match fact {
                NpFact::Zero => vec![],
                _ => vec![fact.clone()],
            },
        }
    }

    fn call(&self, call: NodeId, callee_entry: NodeId, fact: &NpFact) -> Vec<NpFact> {
        let NpFact::Path(p) = fact else { return vec![] };
        let Some((base, args, _)) = self.call_parts(call) else { return vec![] };
        let (this, params) = self.callee_param_locals(callee_entry);
        let mut out = Vec::new();
        if base == Some(p.base.as_str()) && p.field.is_some() {
            if let Some(t) = &this {
                out.push(path(AccessPath { base: t.clone(), field: p.field.clone() }));
            }
        }
        for (i, a) in args.iter().enumerate() {
            if a.local() == Some(p.base.as_str()) {
                if let Some(Some(l)) = params.get(i) {
                    out.push(path(AccessPath { base: l.clone(), field: p.field.clone() }));
                }
            }
        }
        out
    }

    fn return_flow(&self, call: NodeId, exit: NodeId, _return_site: NodeId, fact: &NpFact) -> Vec<NpFact> {
        let NpFact::Path(p) = fact else { return vec![] };
        let Some((base, args, result)) = self.call_parts(call) else { return vec![] };
        let entry = self.sg.entry_of(self.sg.method_of(exit));
        let (this, params) = self.callee_param_locals(entry);
        let mut out = Vec::new();
        if p.field.is_some() {
            if this.as_deref() == Some(p.base.as_str()) {
                if let Some(b) = base {
                    out.push(path(AccessPath { base: b.to_string(), field: p.field.clone() }));
                }
            }
            for (i, a) in args.iter().enumerate() {
                if let (Some(l), Some(Some(pl))) = (a.local(), params.get(i)) {
                    if *pl == p.base {
                        out.push(path(AccessPath { base: l.to_string(), field: p.field.clone() }));
                    }
                }
            }
        }
        if let (Stmt::Return(Some(Atom::Local(r))), Some(res)) = (self.sg.stmt(exit), result) {
            if *r == p.base {
                out.push(path(AccessPath { base: res.to_string(), field: p.field.clone() }));
            }
        }
        out
    }

    fn call_to_return(&self, call: NodeId, _return_site: NodeId, fact: &NpFact) -> Vec<NpFact> {
        let NpFact::Path(p) = fact else { return vec![] };
        let Some((base, args, result)) = self.call_parts(call) else { return vec![fact.clone()] };
        if result == Some(p.base.as_str()) {
            return vec![];
        }
        let enters_callee = !self.sg.callees(call).is_empty()
            && p.field.is_some()
            && (base == Some(p.base.as_str()) || args.iter().any(|a| a.local() == Some(p.base.as_str())));
        if enters_callee {
            vec![]
        } else {
            vec![fact.clone()]
        }
    }
}

/// Local dereferenced by a statement: field read or write through it, or a
/// method call on it.
pub fn dereferenced(stmt: &Stmt) -> Option<&str> {
    match stmt {
        Stmt::Assign { rhs: Rvalue::Field { base: FieldBase::Local(b), .. }, .. } => Some(b),
        Stmt::Assign { lhs: Place::Field { base: FieldBase::Local(b), .. }, .. } => Some(b),
        Stmt::Invoke(inv) => match &inv.kind {
            CallKind::Instance(b) => Some(b),
            _ => None,
        },
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TraceStep {
    pub method: String,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Finding {
    pub method: String,
    pub line: u32,
    pub col: u32,
    /// Access path whose value is dereferenced, as written before any copy
    /// through temporaries.
    pub path: String,
    pub trace: Vec<TraceStep>,
}

fn is_temp(name: &str) -> bool {
    name.starts_with(crate::ir::TEMP_PREFIX) || name.starts_with(crate::ir::RET_PREFIX)
}

/// Origin of a fact: the nearest step on its witness chain that is not a
/// compiler temporary.
fn origin(result: &IfdsResult<NpFact>, n: NodeId, f: &NpFact) -> String {
    let chain = result.trace(n, f);
    for (_, fact) in chain.iter().rev() {
        if let NpFact::Path(p) = fact {
            if !is_temp(&p.base) {
                return p.to_string();
            }
        }
    }
    match f {
        NpFact::Path(p) => p.to_string(),
        NpFact::Zero => String::new(),
    }
}

pub struct NullPointerReport {
    pub findings: Vec<Finding>,
    pub result: IfdsResult<NpFact>,
}

pub fn null_pointer_analysis(scene: &Scene, cg: &CallGraph) -> Result<Vec<Finding>, SupergraphError> {
    let sg = Supergraph::build(scene, cg)?;
    Ok(analyze(&sg, SolverOptions::default()).findings)
}

pub fn analyze(sg: &Supergraph, opts: SolverOptions) -> NullPointerReport {
    let np = NullPointer { sg };
    let result = solve(sg, &np, &[], opts);
    let mut findings = Vec::new();
    let mut seen = BTreeSet::new();
    for (&n, facts) in &result.facts {
        let Some(b) = dereferenced(sg.stmt(n)) else { continue };
        let fact = path(AccessPath::local(b));
        if !facts.contains(&fact) {
            continue;
        }
        let origin = origin(&result, n, &fact);
        let (line, col) = (sg.line(n), sg.col(n));
        if !seen.insert((sg.signature_of(n).to_string(), line, col, origin.clone())) {
            continue;
        }
        let mut trace: Vec<TraceStep> = Vec::new();
        for (m, _) in result.trace(n, &fact) {
            let step = TraceStep { method: sg.signature_of(m).to_string(), line: sg.line(m) };
            if trace.last() != Some(&step) {
                trace.push(step);
            }
        }
        findings.push(Finding { method: sg.signature_of(n).to_string(), line, col, path: origin, trace });
    }
    findings.sort();
    NullPointerReport { findings, result }
}

/// `{analysis, findings: [{method, line, col, path, trace: [{method, line}]}]}`
/// with sorted keys.
pub fn findings_json(findings: &[Finding]) -> String {
    let fs: Vec<Value> = findings
        .iter()
        .map(|f| {
            json!({
                "method": f.method,
                "line": f.line,
                "col": f.col,
                "path": f.path,
                "trace": f.trace.iter().map(|t| json!({"method": t.method, "line": t.line})).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&json!({"analysis": "nullptr", "findings": fs})).expect("json values always serialize");
    s.push('\n');
    s
}
