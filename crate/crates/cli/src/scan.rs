//! Sensitive-API scan: which methods call a given target.

use arklight::callgraph::{self, Algorithm, CallGraph, CgError};
use arklight::scene::{MethodSignature, Scene};
use serde_json::json;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    /// Canonical signature of the target, or the text given when it did not
    /// resolve.
    pub target: String,
    pub callers: Vec<(MethodSignature, u32)>,
}

/// Builds the call graph once, then collects the callers of every target
/// from its caller → callee map. Unresolvable targets yield a warning and an
/// empty report.
pub fn run_scan(
    scene: &Scene,
    entries: &[MethodSignature],
    targets: &[String],
    algorithm: Algorithm,
) -> Result<(Vec<ScanReport>, Vec<String>), CgError> {
    let cg = callgraph::build(scene, entries, algorithm)?;
    let mut warnings = Vec::new();
    let mut reports = Vec::new();
    for t in targets {
        match scene.resolve_method(t) {
            Ok(sig) => reports.push(ScanReport { target: sig.to_string(), callers: callers_of(&cg, &sig) }),
            Err(e) => {
                warnings.push(format!("warning: scan target {e}"));
                reports.push(ScanReport { target: t.clone(), callers: Vec::new() });
            }
        }
    }
    Ok((reports, warnings))
}

fn callers_of(cg: &CallGraph, target: &MethodSignature) -> Vec<(MethodSignature, u32)> {
    let mut out = Vec::new();
    for (caller, callees) in cg.dyn_edges() {
        if !callees.contains(target) {
            continue;
        }
        for e in cg.edges.iter().filter(|e| &e.caller == caller && &e.callee == target) {
            out.push((caller.clone(), e.line));
        }
    }
    out.sort();
    out.dedup();
    out
}

pub fn reports_json(reports: &[ScanReport]) -> String {
    let v: Vec<_> = reports
        .iter()
        .map(|r| {
            json!({
                "target": r.target,
                "callers": r.callers.iter().map(|(m, l)| json!({"method": m.to_string(), "line": l})).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&json!({"analysis": "scan", "reports": v})).expect("json values always serialize");
    s.push('\n');
    s
}

pub fn reports_text(reports: &[ScanReport]) -> String {
    let mut s = String::new();
    for r in reports {
        s.push_str(&format!("{} ({} callers)\n", r.target, r.callers.len()));
        for (m, l) in &r.callers {
            s.push_str(&format!("  {m} line {l}\n"));
        }
    }
    s
}
