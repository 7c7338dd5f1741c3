//! Oracle comparisons shared by the integration and acceptance tests.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use arklight::callgraph::{self, Algorithm};
use arklight::frontend::ast::Item;
use arklight::frontend::{parse, SourceFile};
use arklight::ifds::{self, NullPointer, SolverOptions, Supergraph};
use arklight::ir::{CallKind, Cfg, Invoke, Place, Rvalue, Stmt, StmtId};
use arklight::scene::{MethodSignature, Scene, SceneConfig};

use crate::ast_interp::AstInterp;
use crate::ifds_oracle::meet_over_valid_paths;
use crate::irtext::{alpha_eq, normalize, parse_ir};
use crate::ir_interp::IrInterp;
use crate::value::Value;

fn same(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Num(x), Value::Num(y)) => x == y || x.is_nan() && y.is_nan(),
        _ => a == b,
    }
}

/// Runs `main` of a single-file integer program through both interpreters
/// and compares the final value of every source variable.
pub fn semantics_preserved(src: &str) -> Result<(), String> {
    let file = SourceFile::new("main.ets", src);
    let (module, diags) = parse(&file);
    if let Some(d) = diags.first() {
        return Err(format!("parse error: {d:?}"));
    }
    let main = module
        .items
        .iter()
        .find_map(|i| match i {
            Item::Function(f) if f.name == "main" => Some(f),
            _ => None,
        })
        .ok_or("no main function")?;
    let expected = AstInterp::new(100_000).run(main, &[])?;
    let scene = Scene::from_sources(vec![("main.ets", src)], Default::default()).map_err(|e| e.to_string())?;
    let sig = scene.resolve_method("%dflt.main/0")?;
    let got = IrInterp::new(&scene, 100_000).call(&sig, Value::Undefined, vec![])?.locals;
    for (name, v) in &expected {
        match got.get(name) {
            Some(w) if same(v, w) => {}
            other => return Err(format!("`{name}`: source semantics give {v:?}, IR gives {other:?}")),
        }
    }
    Ok(())
}

/// Every edge of the RTA graph is an edge of the CHA graph.
pub fn rta_within_cha(scene: &Scene, entries: &[MethodSignature]) -> Result<(), String> {
    let cha = callgraph::build(scene, entries, Algorithm::Cha).map_err(|e| e.to_string())?;
    let rta = callgraph::build(scene, entries, Algorithm::Rta).map_err(|e| e.to_string())?;
    let extra: Vec<_> = rta.edges.difference(&cha.edges).collect();
    if !extra.is_empty() {
        return Err(format!("RTA edges missing from CHA: {extra:?}"));
    }
    if !rta.nodes.is_subset(&cha.nodes) {
        return Err("RTA reaches methods CHA does not".into());
    }
    Ok(())
}

/// Executes each entry point and checks that every observed call pair is a
/// CHA edge. Returns the number of observed pairs.
pub fn dynamic_edges_in_cha(scene: &Scene, entries: &[MethodSignature]) -> Result<usize, String> {
    let cha = callgraph::build(scene, entries, Algorithm::Cha).map_err(|e| e.to_string())?;
    let static_pairs: BTreeSet<(MethodSignature, MethodSignature)> =
        cha.edges.iter().map(|e| (e.caller.clone(), e.callee.clone())).collect();
    let mut it = IrInterp::new(scene, 1_000_000);
    for e in entries {
        let this = Value::Undefined;
        // Runtime errors end the run; edges observed so far still count.
        let _ = it.call(e, this, vec![]);
    }
    let missing: Vec<_> = it.edges.difference(&static_pairs).collect();
    if !missing.is_empty() {
        return Err(format!("dynamic call pairs absent from CHA: {missing:?}"));
    }
    Ok(it.edges.len())
}

/// Null-pointer tabulation, with and without summaries, against
/// enumeration of valid paths, node by node.
pub fn ifds_matches_oracle(scene: &Scene, entries: &[MethodSignature], max_depth: usize) -> Result<usize, String> {
    let cg = callgraph::build(scene, entries, Algorithm::Cha).map_err(|e| e.to_string())?;
    let sg = Supergraph::build(scene, &cg).map_err(|e| e.to_string())?;
    let np = NullPointer { sg: &sg };
    let oracle = meet_over_valid_paths(&sg, &np, &[], max_depth);
    for summaries in [true, false] {
        let res = ifds::solve(&sg, &np, &[], SolverOptions { summaries });
        if res.facts != oracle {
            for n in 0..sg.node_count() {
                let (a, b) = (res.at(n), oracle.get(&n));
                if a != b {
                    return Err(format!(
                        "summaries={summaries}: node {n} ({} line {}): tabulation {a:?}, enumeration {b:?}",
                        sg.signature_of(n),
                        sg.line(n)
                    ));
                }
            }
        }
    }
    Ok(sg.methods.len())
}

fn generated(name: &str) -> bool {
    [arklight::ir::TEMP_PREFIX, arklight::ir::RET_PREFIX]
        .iter()
        .any(|p| name.strip_prefix(p).is_some_and(|rest| rest.chars().all(|c| c.is_ascii_digit())))
}

/// Lowers `<stem>.ets` and compares each method listed in `<stem>.ir`
/// after normalization, up to renaming of generated locals and blocks.
/// Source-named locals must match exactly. Returns the scene for further
/// checks.
pub fn golden_case(ets: &Path) -> Result<Scene, String> {
    let src = std::fs::read_to_string(ets).map_err(|e| format!("{}: {e}", ets.display()))?;
    let ir_path = ets.with_extension("ir");
    let expected = std::fs::read_to_string(&ir_path).map_err(|e| format!("{}: {e}", ir_path.display()))?;
    let name = ets.file_name().unwrap().to_string_lossy().to_string();
    let scene = Scene::from_sources(vec![(name.clone(), src)], Default::default()).map_err(|e| e.to_string())?;
    if let Some(d) = scene.diagnostics.iter().find(|d| d.is_error()) {
        return Err(format!("{name}: {d}"));
    }
    for mut want in parse_ir(&expected).map_err(|e| format!("{}: {e}", ir_path.display()))? {
        let sig = scene.resolve_method(&want.signature)?;
        let body = scene.method(&sig).and_then(|m| m.body.as_ref()).ok_or_else(|| format!("{sig} has no body"))?;
        let text = arklight::ir::dump_method(&sig, body);
        let mut got = parse_ir(&text).map_err(|e| format!("reparsing dump of {sig}: {e}"))?.remove(0);
        let sources: BTreeSet<String> = got.locals.iter().filter(|l| !generated(l)).cloned().collect();
        normalize(&mut got);
        normalize(&mut want);
        alpha_eq(&got, &want, &|n| sources.contains(n)).map_err(|e| format!("{name} {sig}: {e}\nactual:\n{got}expected:\n{want}"))?;
    }
    Ok(scene)
}

/// All `*.ets` files of a golden directory, sorted.
pub fn golden_files(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .map(|rd| rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "ets")).collect())
        .unwrap_or_default();
    v.sort();
    v
}

/// Structural CFG invariants: block ids match positions, successor and
/// predecessor lists mirror each other, only the last statement of a block
/// is a terminator and successors agree with it, and `dead` is exactly
/// unreachability from block 0.
pub fn cfg_well_formed(cfg: &Cfg) -> Result<(), String> {
    if cfg.blocks.is_empty() {
        return Err("empty cfg".into());
    }
    let n = cfg.blocks.len();
    for (i, b) in cfg.blocks.iter().enumerate() {
        if b.id != i {
            return Err(format!("block at {i} has id {}", b.id));
        }
        for &s in &b.succs {
            if s >= n || !cfg.blocks[s].preds.contains(&i) {
                return Err(format!("bb{i} -> bb{s} missing from preds of bb{s}"));
            }
        }
        for &p in &b.preds {
            if p >= n || !cfg.blocks[p].succs.contains(&i) {
                return Err(format!("bb{p} listed as pred of bb{i} without the edge"));
            }
        }
        let k = b.stmts.len();
        for (j, s) in b.stmts.iter().enumerate() {
            if matches!(s.stmt, Stmt::Label(_)) {
                return Err(format!("label left in bb{i}"));
            }
            if s.stmt.is_terminator() && j + 1 != k {
                return Err(format!("terminator in the middle of bb{i}"));
            }
        }
        let targets: BTreeSet<usize> = b.succs.iter().copied().collect();
        match b.stmts.last().map(|s| &s.stmt) {
            Some(Stmt::Return(_)) if !b.succs.is_empty() => return Err(format!("bb{i} returns but has successors")),
            Some(Stmt::Goto(t)) if targets != BTreeSet::from([*t]) => return Err(format!("bb{i} goto disagrees with succs")),
            Some(Stmt::If { then, els, .. }) if targets != BTreeSet::from([*then, *els]) => {
                return Err(format!("bb{i} branch disagrees with succs"))
            }
            Some(s) if !s.is_terminator() && b.succs.len() > 1 => return Err(format!("bb{i} falls through to several blocks")),
            None if b.succs.len() > 1 => return Err(format!("empty bb{i} has several successors")),
            _ => {}
        }
    }
    let mut reach = vec![false; n];
    let mut work = vec![0];
    while let Some(b) = work.pop() {
        if !std::mem::replace(&mut reach[b], true) {
            work.extend(cfg.blocks[b].succs.iter().copied());
        }
    }
    for (i, b) in cfg.blocks.iter().enumerate() {
        if b.dead == reach[i] {
            return Err(format!("bb{i} dead flag is {} but reachability is {}", b.dead, reach[i]));
        }
    }
    Ok(())
}

/// Three-address shape of a simplified CFG: no sugar statements remain and
/// a memory store never reads memory on its right-hand side.
pub fn three_address_form(cfg: &Cfg) -> Result<(), String> {
    for s in cfg.stmts() {
        match &s.stmt {
            Stmt::Sugar(x) => return Err(format!("sugar left at line {}: {x:?}", s.span.line)),
            Stmt::Assign { lhs: Place::Field { .. } | Place::Array { .. }, rhs } if !matches!(rhs, Rvalue::Atom(_)) => {
                return Err(format!("store with a compound right-hand side at line {}", s.span.line))
            }
            _ => {}
        }
    }
    Ok(())
}

/// The calls on component interfaces of a build body, as `create X` /
/// `pop X` events in statement order.
pub fn component_events(cfg: &Cfg) -> Vec<(bool, String)> {
    let mut out = Vec::new();
    for s in cfg.stmts() {
        if let Stmt::Invoke(Invoke { kind: CallKind::Static(c), method, .. }) = &s.stmt {
            if let Some(comp) = c.name.strip_suffix("Interface") {
                match method.as_str() {
                    "create" => out.push((true, comp.to_string())),
                    "pop" => out.push((false, comp.to_string())),
                    _ => {}
                }
            }
        }
    }
    out
}

/// Create/pop events are balanced, properly nested, and creates appear in
/// the order `preorder`.
pub fn bracketing_matches(events: &[(bool, String)], preorder: &[&str]) -> Result<(), String> {
    let mut stack: Vec<&str> = Vec::new();
    let mut creates = Vec::new();
    for (create, name) in events {
        if *create {
            stack.push(name);
            creates.push(name.as_str());
        } else if stack.pop() != Some(name.as_str()) {
            return Err(format!("pop of {name} does not close the innermost component"));
        }
    }
    if !stack.is_empty() {
        return Err(format!("unclosed components {stack:?}"));
    }
    if creates != preorder {
        return Err(format!("create order {creates:?} differs from view tree {preorder:?}"));
    }
    Ok(())
}

/// Directory of the shipped fixtures.
pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Loads a fixture project by directory name.
pub fn load_fixture(name: &str) -> Scene {
    let root = fixtures_dir().join(name);
    Scene::load(SceneConfig { root: Some(root), ..Default::default() }).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

/// Outcome of one call-graph benchmark program against its ground truth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchScore {
    pub truth: usize,
    /// Ground-truth edges found by CHA.
    pub cha_found: usize,
    pub rta_edges: usize,
    /// RTA edges that are in the ground truth.
    pub rta_correct: usize,
    /// Ground truth disagrees with the pairs the interpreter observed.
    pub truth_mismatch: Option<String>,
}

fn user_pairs(scene: &Scene, pairs: impl IntoIterator<Item = (MethodSignature, MethodSignature)>) -> BTreeSet<(MethodSignature, MethodSignature)> {
    let user = |m: &MethodSignature| scene.method(m).is_some_and(|m| !m.is_stub);
    pairs.into_iter().filter(|(a, b)| user(a) && user(b)).collect()
}

/// Scores CHA recall and RTA precision on a benchmark directory holding
/// sources and `expected.json` (`{"edges": [[caller, callee], ...]}`, with
/// signatures in any form the scene resolves). Only edges between user
/// methods count. The ground truth is also checked against the pairs the
/// interpreter observes when running the default entries.
pub fn benchmark_case(dir: &Path) -> Result<BenchScore, String> {
    let text = std::fs::read_to_string(dir.join("expected.json")).map_err(|e| e.to_string())?;
    let json: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let scene = Scene::load(SceneConfig { root: Some(dir.to_path_buf()), ..Default::default() }).map_err(|e| e.to_string())?;
    if let Some(d) = scene.diagnostics.iter().find(|d| d.is_error()) {
        return Err(d.to_string());
    }
    let mut truth = BTreeSet::new();
    for e in json["edges"].as_array().ok_or("expected.json has no edges")? {
        let pair = e.as_array().filter(|p| p.len() == 2).ok_or("edge is not a pair")?;
        let side = |v: &serde_json::Value| scene.resolve_method(v.as_str().unwrap_or_default());
        truth.insert((side(&pair[0])?, side(&pair[1])?));
    }
    let entries = scene.default_entries();
    let cha = callgraph::build(&scene, &entries, Algorithm::Cha).map_err(|e| e.to_string())?;
    let rta = callgraph::build(&scene, &entries, Algorithm::Rta).map_err(|e| e.to_string())?;
    let cha_pairs = user_pairs(&scene, cha.pairs());
    let rta_pairs = user_pairs(&scene, rta.pairs());

    let mut it = IrInterp::new(&scene, 1_000_000);
    for e in &entries {
        it.call(e, Value::Undefined, vec![]).map_err(|err| format!("running {e}: {err}"))?;
    }
    let observed = user_pairs(&scene, it.edges.clone());
    let truth_mismatch = (observed != truth).then(|| {
        let show = |s: &BTreeSet<_>| s.iter().map(|(a, b): &(MethodSignature, MethodSignature)| format!("{} -> {}", a.short(), b.short())).collect::<Vec<_>>();
        format!(
            "observed only: {:?}; expected only: {:?}",
            show(&observed.difference(&truth).cloned().collect()),
            show(&truth.difference(&observed).cloned().collect())
        )
    });
    Ok(BenchScore {
        truth: truth.len(),
        cha_found: truth.intersection(&cha_pairs).count(),
        rta_edges: rta_pairs.len(),
        rta_correct: rta_pairs.intersection(&truth).count(),
        truth_mismatch,
    })
}

/// Benchmark program directories, sorted.
pub fn benchmark_dirs() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(fixtures_dir().join("bench"))
        .map(|rd| rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.join("expected.json").is_file()).collect())
        .unwrap_or_default();
    v.sort();
    v
}

/// `(local, def, use)` triples where a definition reaches a use, found by
/// walking statement successors from each definition until the local is
/// redefined. Statements in dead blocks are ignored.
pub fn reaching_links(cfg: &Cfg) -> BTreeSet<(String, StmtId, StmtId)> {
    let live = |id: StmtId| !cfg.blocks[cfg.position(id).0].dead;
    let mut out = BTreeSet::new();
    for d in cfg.stmts().filter(|s| live(s.id)) {
        let Some(v) = d.stmt.def() else { continue };
        let mut seen = BTreeSet::new();
        let mut work = cfg.stmt_succs(d.id);
        while let Some(s) = work.pop() {
            if !seen.insert(s) {
                continue;
            }
            let st = &cfg.stmt(s).stmt;
            if st.uses().contains(&v) {
                out.insert((v.to_string(), d.id, s));
            }
            if st.def() != Some(v) {
                work.extend(cfg.stmt_succs(s));
            }
        }
    }
    out
}
