use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;

use arklight_cli::{run, Outcome};
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).to_string_lossy().into_owned()
}

fn arklight(args: &[&str]) -> Outcome {
    run(std::iter::once("arklight").chain(args.iter().copied()))
}

fn json(o: &Outcome) -> Value {
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{e}\n{}", o.stdout))
}

#[test]
fn cg_prints_dot_and_exits_zero() {
    let o = arklight(&["cg", "--algo", "cha", "--entry", "animals.ets: %dflt.main/0", &fixture("animals")]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.starts_with("digraph callgraph {"));
    assert_eq!(o.stdout.matches(" -> ").count(), 4);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = arklight(&["cg", "--bogus", &fixture("animals")]);
    assert_eq!(o.code, 2);
    assert!(o.stdout.is_empty());
    assert!(o.stderr.contains("Usage:"), "{}", o.stderr);
}

#[test]
fn help_goes_to_stdout() {
    let o = arklight(&["--help"]);
    assert_eq!(o.code, 0);
    for cmd in ["build", "ir", "lint", "cg", "scan", "nullptr"] {
        assert!(o.stdout.contains(cmd), "{cmd}");
    }
}

#[test]
fn nullptr_exit_code_follows_fail_on_findings() {
    let o = arklight(&["nullptr", &fixture("uninit_field")]);
    assert_eq!(o.code, 0);
    assert_eq!(json(&o)["findings"].as_array().unwrap().len(), 1);
    assert_eq!(arklight(&["nullptr", "--fail-on-findings", &fixture("uninit_field")]).code, 1);
    assert_eq!(arklight(&["nullptr", "--fail-on-findings", &fixture("uninit_field_fixed")]).code, 0);
}

#[test]
fn scan_callers_agree_with_the_call_graph() {
    let dir = fixture("scan_hilog");
    let scan = arklight(&["scan", "--target", "hilog.info/1", &dir]);
    assert_eq!(scan.code, 0, "{}", scan.stderr);
    let report = &json(&scan)["reports"][0];
    let target = report["target"].as_str().unwrap();
    let callers: BTreeSet<(String, u64)> = report["callers"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["method"].as_str().unwrap().to_string(), c["line"].as_u64().unwrap()))
        .collect();
    assert_eq!(callers.len(), 2);

    let cg = json(&arklight(&["cg", "--format", "json", &dir]));
    let from_cg: BTreeSet<(String, u64)> = cg["edges"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["callee"] == target)
        .map(|e| (e["caller"].as_str().unwrap().to_string(), e["line"].as_u64().unwrap()))
        .collect();
    assert_eq!(callers, from_cg);
}

#[test]
fn scan_of_uncalled_or_unknown_target_is_empty() {
    let o = arklight(&["scan", "--target", "hilog.warn/1", "--fail-on-findings", &fixture("scan_hilog")]);
    assert_eq!(o.code, 0);
    assert_eq!(json(&o)["reports"][0]["callers"], Value::Array(vec![]));

    let o = arklight(&["scan", "--target", "Nowhere.nothing/0", &fixture("scan_hilog")]);
    assert_eq!(o.code, 0);
    assert!(o.stderr.contains("warning"), "{}", o.stderr);
    assert_eq!(json(&o)["reports"][0]["callers"], Value::Array(vec![]));
}

#[test]
fn scan_needs_a_target_and_reports_hits_as_findings() {
    assert_eq!(arklight(&["scan", &fixture("scan_hilog")]).code, 2);
    let o = arklight(&["scan", "--target", "Dog.sound/0", "--fail-on-findings", "--format", "text", &fixture("animals")]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.contains("%dflt.makeAnimalSound/1 line"), "{}", o.stdout);
}

#[test]
fn out_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cg.dot");
    let o = arklight(&["cg", "--out", path.to_str().unwrap(), &fixture("animals")]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.is_empty());
    let direct = arklight(&["cg", &fixture("animals")]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct.stdout);
}

#[test]
fn config_root_is_relative_to_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("app");
    std::fs::create_dir(&src).unwrap();
    std::fs::write(src.join("a.ets"), "function boot() { helper(); }\nfunction helper() {}\nfunction other() {}\n").unwrap();
    let cfg = dir.path().join("arklight.json");
    std::fs::write(&cfg, r#"{"root": "app", "entryPoints": ["%dflt.boot/0"]}"#).unwrap();
    let o = arklight(&["cg", "--config", cfg.to_str().unwrap(), "--format", "text"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(o.stdout, "a.ets: %dflt.boot/0 -> a.ets: %dflt.helper/0\n");

    std::fs::write(&cfg, "{ not json").unwrap();
    assert_eq!(arklight(&["build", "--config", cfg.to_str().unwrap()]).code, 2);
}

#[test]
fn input_errors_exit_two() {
    let empty = tempfile::tempdir().unwrap();
    let o = arklight(&["build", empty.path().to_str().unwrap()]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("EMPTY_PROJECT"), "{}", o.stderr);
    assert_eq!(arklight(&["ir", "No.such/0", &fixture("animals")]).code, 2);
    assert_eq!(arklight(&["cg", "--entry", "No.such/0", &fixture("animals")]).code, 2);
    assert_eq!(arklight(&["lint", "--format", "dot", &fixture("animals")]).code, 2);
    assert_eq!(arklight(&["cg", "--algo", "vta", &fixture("animals")]).code, 2);
    assert_eq!(arklight(&["build", "--table3-literal", "maybe", &fixture("animals")]).code, 2);
}

#[test]
fn ir_prints_one_or_all_methods() {
    let one = arklight(&["ir", "Index.build/0", &fixture("hello_ui")]);
    assert_eq!(one.code, 0);
    assert!(one.stdout.contains("RowInterface.create()"));
    let all = arklight(&["ir", "*", &fixture("hello_ui")]);
    assert!(all.stdout.contains(&one.stdout));
    assert_eq!(all.stdout.matches("method ").count(), 3);
}

#[test]
fn lint_reports_in_text_and_json() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.ets"), "function f(): void {\n  let v: any = 1;\n}\n").unwrap();
    let d = dir.path().to_str().unwrap();
    let text = arklight(&["lint", "--fail-on-findings", d]);
    assert_eq!(text.code, 1);
    assert!(text.stdout.starts_with("a.ets:2:"), "{}", text.stdout);
    assert!(text.stdout.contains("[NO_ANY]"));
    let j = json(&arklight(&["lint", "--format", "json", d]));
    assert_eq!(j["diagnostics"][0]["code"], "NO_ANY");
    assert_eq!(arklight(&["lint", "--fail-on-findings", &fixture("uninit_field_fixed")]).code, 0);
}

#[test]
fn build_can_gate_lints_and_analyses() {
    let plain = arklight(&["build", "--format", "json", &fixture("uninit_field")]);
    let v = json(&plain);
    assert_eq!(v["files"], serde_json::json!(["main.ets"]));
    assert!(v.get("nullptr").is_none());
    let full = json(&arklight(&["build", "--format", "json", "--lint", "--analysis", "nullptr", &fixture("uninit_field")]));
    assert_eq!(full["nullptr"]["findings"].as_array().unwrap().len(), 1);
    assert!(full["lint"].is_array());
}

#[test]
fn stats_go_to_stderr_only() {
    let with = arklight(&["cg", "--stats", &fixture("animals")]);
    let without = arklight(&["cg", &fixture("animals")]);
    assert_eq!(with.stdout, without.stdout);
    assert!(with.stderr.contains("scene-build: ") && with.stderr.contains("analysis: "), "{}", with.stderr);
}

#[test]
fn literal_typing_flag_reaches_the_scene() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.ets"), "function main() {\n  let s = 'a';\n  let x = s * 2;\n  x.charAt(0);\n}\n").unwrap();
    let d = dir.path().to_str().unwrap();
    // Typed as a string, `x.charAt` resolves through String; typed as a
    // number it only matches by name.
    let confidence = |flag: &str| {
        let v = json(&arklight(&["cg", "--format", "json", "--table3-literal", flag, d]));
        assert_eq!(v["edges"][0]["callee"], "@stubs/platform.ets: String.charAt/1");
        v["edges"][0]["lowConfidence"].as_bool().unwrap()
    };
    assert!(!confidence("true"));
    assert!(confidence("false"));
}

#[test]
fn stub_directory_comes_from_the_environment() {
    let stubs = tempfile::tempdir().unwrap();
    std::fs::write(stubs.path().join("audit.ets"), "declare class audit {\n  static log(msg: string): void\n}\n").unwrap();
    let app = tempfile::tempdir().unwrap();
    std::fs::write(app.path().join("main.ets"), "function main() {\n  audit.log('x');\n}\n").unwrap();
    let bin = env!("CARGO_BIN_EXE_arklight");
    let args = ["scan", "--target", "audit.log/1", "--format", "text", app.path().to_str().unwrap()];
    let with = Command::new(bin).args(args).env("ARKLIGHT_STUBS", stubs.path()).output().unwrap();
    assert!(with.status.success(), "{}", String::from_utf8_lossy(&with.stderr));
    assert!(String::from_utf8_lossy(&with.stdout).contains("(1 callers)"));
    let without = Command::new(bin).args(args).env_remove("ARKLIGHT_STUBS").output().unwrap();
    assert!(String::from_utf8_lossy(&without.stdout).contains("(0 callers)"));
    assert!(String::from_utf8_lossy(&without.stderr).contains("warning"));
}
