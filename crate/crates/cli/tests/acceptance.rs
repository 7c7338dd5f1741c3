//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;

use arklight::scene::{Scene, SceneConfig};
use arklight::types::Type;
use arklight_testkit::checks::{
    benchmark_case, benchmark_dirs, dynamic_edges_in_cha, fixtures_dir, golden_case, golden_files, ifds_matches_oracle,
    rta_within_cha, semantics_preserved,
};
use arklight_testkit::gen;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn arklight(args: &[&str]) -> Run {
    let o = Command::new(env!("CARGO_BIN_EXE_arklight")).args(args).env_remove("ARKLIGHT_STUBS").output().expect("spawn arklight");
    Run {
        code: o.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&o.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&o.stderr).into_owned(),
    }
}

fn fixture(name: &str) -> String {
    fixtures_dir().join(name).to_string_lossy().into_owned()
}

fn parse_json(r: &Run) -> Result<Value, String> {
    if r.code != 0 {
        return Err(format!("exit {}: {}", r.code, r.stderr));
    }
    serde_json::from_str(&r.stdout).map_err(|e| e.to_string())
}

/// Edge set of `cg --format json`, with the file prefix dropped.
fn cg_edges(algo: &str, dir: &str) -> Result<BTreeSet<(String, String)>, String> {
    let v = parse_json(&arklight(&["cg", "--algo", algo, "--entry", "%dflt.main/0", "--format", "json", dir]))?;
    let short = |v: &Value| v.as_str().unwrap_or_default().rsplit(": ").next().unwrap_or_default().to_string();
    Ok(v["edges"].as_array().ok_or("no edges")?.iter().map(|e| (short(&e["caller"]), short(&e["callee"]))).collect())
}

fn edge_set(pairs: &[(&str, &str)]) -> BTreeSet<(String, String)> {
    pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

fn animals_call_graphs() -> Outcome {
    let dir = fixture("animals");
    let rta_expected = [
        ("%dflt.main/0", "%dflt.makeAnimalSound/1"),
        ("%dflt.makeAnimalSound/1", "Dog.sound/0"),
        ("%dflt.makeAnimalSound/1", "Cat.sound/0"),
    ];
    let mut cha_expected = rta_expected.to_vec();
    cha_expected.push(("%dflt.makeAnimalSound/1", "Cow.sound/0"));
    let cha = cg_edges("cha", &dir)?;
    let rta = cg_edges("rta", &dir)?;
    if cha != edge_set(&cha_expected) {
        return Err(format!("CHA edges {cha:?}"));
    }
    if rta != edge_set(&rta_expected) {
        return Err(format!("RTA edges {rta:?}"));
    }
    Ok("CHA 4 edges, RTA 3 edges (Cow.sound dropped)".into())
}

fn golden_dir(dir: &str, expected: usize, required: &[&str]) -> Outcome {
    let files = golden_files(&fixtures_dir().join("golden").join(dir));
    if files.len() != expected {
        return Err(format!("{} golden cases, expected {expected}", files.len()));
    }
    for r in required {
        if !files.iter().any(|f| f.file_stem().is_some_and(|s| s == *r)) {
            return Err(format!("missing golden case {r}"));
        }
    }
    for f in &files {
        golden_case(f)?;
    }
    Ok(format!("{} rules match", files.len()))
}

fn type_rules() -> Outcome {
    fn ty(src: &str, method: &str, local: &str, literal: bool) -> Result<Type, String> {
        let s = Scene::from_sources(vec![("t.ets", src)], SceneConfig { table3_literal: literal, ..Default::default() })
            .map_err(|e| e.to_string())?;
        let m = s.resolve_method(method)?;
        Ok(s.method(&m).and_then(|m| m.body.as_ref()).ok_or("no body")?.type_of(local))
    }
    fn class_named(src: &str, name: &str) -> Result<Type, String> {
        let s = Scene::from_sources(vec![("t.ets", src)], SceneConfig::default()).map_err(|e| e.to_string())?;
        Ok(Type::Class(s.classes_named(name).first().ok_or("no class")?.signature.clone()))
    }
    let compare = "function f(a: number, b: number) { let x = a < b; }";
    let binop = "function f(s: string, n: number, b: boolean) { let x = s * n; let y = b * n; }";
    let new = "class ClassA {}\nfunction f() { let x = new ClassA(); }";
    let call = "class Dog {}\nfunction funB(): Dog { return new Dog(); }\nfunction f() { let x = funB(); }";
    let field = "class ClassA { static field: string = 'a'; }\nfunction f() { let x = ClassA.field; }";
    let cases: Vec<(&str, Type, Type)> = vec![
        ("x = a < b", ty(compare, "%dflt.f/2", "x", true)?, Type::Boolean),
        ("x = string * number", ty(binop, "%dflt.f/3", "x", true)?, Type::String),
        ("x = bool * number", ty(binop, "%dflt.f/3", "y", true)?, Type::Boolean),
        ("x = string * number (flag off)", ty(binop, "%dflt.f/3", "x", false)?, Type::Number),
        ("x = new ClassA()", ty(new, "%dflt.f/0", "x", true)?, class_named(new, "ClassA")?),
        ("x = funB()", ty(call, "%dflt.f/0", "x", true)?, class_named(call, "Dog")?),
        ("x = ClassA.field", ty(field, "%dflt.f/0", "x", true)?, Type::String),
    ];
    for (rule, got, want) in &cases {
        if got != want {
            return Err(format!("{rule}: inferred {got:?}, expected {want:?}"));
        }
    }
    Ok(format!("{} rule cases", cases.len()))
}

fn null_pointer_listing() -> Outcome {
    let v = parse_json(&arklight(&["nullptr", &fixture("uninit_field")]))?;
    let findings = v["findings"].as_array().ok_or("no findings array")?;
    let [f] = findings.as_slice() else { return Err(format!("{} findings", findings.len())) };
    if f["path"] != "this.p" || !f["method"].as_str().unwrap_or_default().ends_with("T.printP/0") {
        return Err(format!("unexpected finding {f}"));
    }
    let trace: Vec<&str> = f["trace"].as_array().ok_or("no trace")?.iter().filter_map(|t| t["method"].as_str()).collect();
    let first_main = trace.iter().position(|m| m.ends_with("%dflt.Main/0"));
    let last_print = trace.iter().rposition(|m| m.ends_with("T.printP/0"));
    if !matches!((first_main, last_print), (Some(a), Some(b)) if a < b) {
        return Err(format!("trace {trace:?}"));
    }
    let fixed = parse_json(&arklight(&["nullptr", &fixture("uninit_field_fixed")]))?;
    let n = fixed["findings"].as_array().map_or(usize::MAX, Vec::len);
    if n != 0 {
        return Err(format!("{n} findings after initializing p"));
    }
    Ok("1 finding on this.p via Main -> printP; 0 after the fix".into())
}

const EXECUTABLE: [&str; 6] = ["animals", "uninit_field", "uninit_field_fixed", "two_callers", "branch_field", "scan_hilog"];

fn load(dir: &Path) -> Result<Scene, String> {
    Scene::load(SceneConfig { root: Some(dir.to_path_buf()), ..Default::default() }).map_err(|e| format!("{}: {e}", dir.display()))
}

fn call_graph_quality() -> Outcome {
    let dirs = benchmark_dirs();
    if dirs.len() != 20 {
        return Err(format!("{} benchmark programs", dirs.len()));
    }
    let (mut truth, mut found, mut rta, mut correct) = (0, 0, 0, 0);
    for d in &dirs {
        let s = benchmark_case(d).map_err(|e| format!("{}: {e}", d.display()))?;
        if let Some(m) = s.truth_mismatch {
            return Err(format!("{}: ground truth disagrees with execution: {m}", d.display()));
        }
        truth += s.truth;
        found += s.cha_found;
        rta += s.rta_edges;
        correct += s.rta_correct;
    }
    if found != truth || correct != rta {
        return Err(format!("CHA recall {found}/{truth}, RTA precision {correct}/{rta}"));
    }
    for seed in 0..500 {
        let src = gen::hierarchy_program(seed);
        let scene = Scene::from_sources(vec![("h.ets", src.as_str())], SceneConfig::default()).map_err(|e| e.to_string())?;
        rta_within_cha(&scene, &scene.default_entries()).map_err(|e| format!("hierarchy seed {seed}: {e}"))?;
    }
    let mut observed = 0;
    let dirs: Vec<PathBuf> = EXECUTABLE.iter().map(|n| fixtures_dir().join(n)).chain(benchmark_dirs()).collect();
    for d in &dirs {
        let scene = load(d)?;
        observed += dynamic_edges_in_cha(&scene, &scene.default_entries()).map_err(|e| format!("{}: {e}", d.display()))?;
    }
    Ok(format!(
        "CHA recall {found}/{truth}, RTA precision {correct}/{rta}; RTA within CHA on 500 hierarchies; {observed} executed calls on {} programs all in CHA",
        dirs.len()
    ))
}

fn stat(stderr: &str, key: &str) -> Result<f64, String> {
    stderr
        .lines()
        .find_map(|l| l.strip_prefix(key)?.strip_suffix(" ms")?.trim().parse().ok())
        .ok_or_else(|| format!("no `{key}` in --stats output: {stderr}"))
}

fn efficiency() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let files = gen::corpus(50, 2024);
    let mut lines = 0;
    for (path, text) in &files {
        lines += text.lines().count();
        let file = dir.path().join(path);
        if let Some(parent) = file.parent() {
            std::fs::create_dir_all(parent).map_err(|e| e.to_string())?;
        }
        std::fs::write(file, text).map_err(|e| e.to_string())?;
    }
    let root = dir.path().to_string_lossy().into_owned();
    let build = arklight(&["build", "--stats", &root]);
    let cha = arklight(&["cg", "--algo", "cha", "--stats", &root]);
    let rta = arklight(&["cg", "--algo", "rta", "--stats", &root]);
    for r in [&build, &cha, &rta] {
        if r.code != 0 {
            return Err(format!("exit {}: {}", r.code, r.stderr));
        }
    }
    let scene_ms = stat(&build.stderr, "scene-build:")?;
    let cha_ms = stat(&cha.stderr, "analysis:")?;
    let rta_ms = stat(&rta.stderr, "analysis:")?;
    let summary = format!(
        "{} files, {lines} lines: scene {scene_ms:.0} ms (limit 2000), CHA {cha_ms:.0} ms, RTA {rta_ms:.0} ms (limit 10000 each)",
        files.len()
    );
    // Limits carry the 2x allowance for hardware variance.
    if scene_ms < 4000.0 && cha_ms < 20000.0 && rta_ms < 20000.0 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn fixture_dirs() -> Vec<PathBuf> {
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(fixtures_dir())
        .map(|rd| rd.filter_map(|e| e.ok().map(|e| e.path())).collect())
        .unwrap_or_default();
    dirs.retain(|p| p.is_dir() && !p.ends_with("bench") && !p.ends_with("golden"));
    dirs.extend(benchmark_dirs());
    dirs.sort();
    dirs
}

fn ifds_equivalence() -> Outcome {
    let mut checked = 0;
    for d in fixture_dirs() {
        let scene = load(&d)?;
        let methods = scene.methods.values().filter(|m| !m.is_stub && m.body.is_some()).count();
        if methods > 10 {
            continue;
        }
        ifds_matches_oracle(&scene, &scene.default_entries(), 8).map_err(|e| format!("{}: {e}", d.display()))?;
        checked += 1;
    }
    if checked == 0 {
        return Err("no fixture small enough".into());
    }
    Ok(format!("{checked} fixtures with <= 10 methods match enumeration"))
}

fn semantics() -> Outcome {
    let n = 250;
    for seed in 0..n {
        semantics_preserved(&gen::int_program(seed)).map_err(|e| format!("seed {seed}: {e}"))?;
    }
    Ok(format!("{n} generated programs agree"))
}

fn determinism() -> Outcome {
    let mut runs = 0;
    for d in fixture_dirs().iter().chain([&fixtures_dir().join("golden/desugar"), &fixtures_dir().join("golden/three_address")]) {
        let dir = d.to_string_lossy();
        let commands: [&[&str]; 10] = [
            &["build"],
            &["build", "--format", "json", "--lint", "--analysis", "nullptr"],
            &["ir", "*"],
            &["lint"],
            &["lint", "--format", "json"],
            &["cg", "--algo", "cha"],
            &["cg", "--algo", "rta", "--format", "json"],
            &["scan", "--target", "hilog.info/1"],
            &["nullptr"],
            &["nullptr", "--format", "text"],
        ];
        for c in commands {
            let args: Vec<&str> = c.iter().copied().chain([dir.as_ref()]).collect();
            let (a, b) = (arklight(&args), arklight(&args));
            if (a.code, &a.stdout, &a.stderr) != (b.code, &b.stdout, &b.stderr) {
                return Err(format!("`arklight {}` differs between runs", args.join(" ")));
            }
            runs += 1;
        }
    }
    Ok(format!("{runs} command/fixture pairs byte-identical"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("animals call graph, CHA and RTA", animals_call_graphs),
        ("three-address golden suite", || golden_dir("three_address", 5, &[])),
        ("desugaring golden suite", || golden_dir("desugar", 9, &["system_component"])),
        ("type inference rules", type_rules),
        ("uninitialized field report", null_pointer_listing),
        ("call graph precision and recall substitute", call_graph_quality),
        ("efficiency on a synthetic corpus", efficiency),
        ("IFDS equals valid-path enumeration", ifds_equivalence),
        ("IR semantics preservation", semantics),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {e}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
