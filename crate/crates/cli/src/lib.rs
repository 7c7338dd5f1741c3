//! The `arklight` command line. [`run`] does all the work and returns the
//! exit code with the text destined for stdout and stderr, so tests can
//! drive it in-process.
//!
//! Exit codes: 0 on success, 1 when `--fail-on-findings` is set and the
//! command reported something, 2 on usage, configuration or input errors.

mod scan;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use arklight::augment::lint::check_constraints;
use arklight::callgraph::{self, Algorithm};
use arklight::diag::Diagnostic;
use arklight::ifds::nullptr::{findings_json, null_pointer_analysis, Finding};
use arklight::ir::dump_method;
use arklight::scene::{MethodSignature, Scene, SceneConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

pub use scan::{reports_json, reports_text, run_scan, ScanReport};

pub const STUBS_ENV: &str = "ARKLIGHT_STUBS";

#[derive(Debug, Parser)]
#[command(name = "arklight", version, about = "Static analysis for ArkTS-like projects")]
pub struct Cli {
    /// Scene configuration file (JSON).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the report to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Print scene-build and analysis wall time to stderr.
    #[arg(long, global = true)]
    pub stats: bool,
    /// Exit with status 1 when the command reports findings.
    #[arg(long, global = true)]
    pub fail_on_findings: bool,
    /// Type `string * number` as string and `boolean * number` as boolean.
    #[arg(long, global = true, value_name = "BOOL")]
    pub table3_literal: Option<bool>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Dot,
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Analysis {
    Nullptr,
}

#[derive(Debug, Args)]
pub struct ProjectArg {
    /// Project root; defaults to the config's root, then the current directory.
    pub project: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long, default_value = "cha", value_parser = clap::value_parser!(Algorithm))]
    pub algo: Algorithm,
    /// Entry method signature; repeatable. Defaults to the config's entries,
    /// then to every `main/0` and `@Entry` build method.
    #[arg(long = "entry", value_name = "SIG")]
    pub entries: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the scene and summarize it.
    Build {
        #[command(flatten)]
        project: ProjectArg,
        /// Also run the constraint lints.
        #[arg(long)]
        lint: bool,
        /// Also run an analysis.
        #[arg(long, value_enum)]
        analysis: Option<Analysis>,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Print the three-address IR of a method.
    Ir {
        /// Method signature, or `*` for every user method.
        signature: String,
        #[command(flatten)]
        project: ProjectArg,
    },
    /// Check language constraints.
    Lint {
        #[command(flatten)]
        project: ProjectArg,
    },
    /// Build and print a call graph.
    Cg {
        #[command(flatten)]
        project: ProjectArg,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Report the callers of sensitive API methods.
    Scan {
        #[command(flatten)]
        project: ProjectArg,
        #[arg(long = "target", value_name = "SIG", required = true)]
        targets: Vec<String>,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Report dereferences of possibly undefined values.
    Nullptr {
        #[command(flatten)]
        project: ProjectArg,
        #[command(flatten)]
        graph: GraphArgs,
    },
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

#[derive(Default)]
struct Report {
    text: String,
    findings: usize,
    warnings: Vec<String>,
    build_time: Duration,
    analysis_time: Option<Duration>,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(&cli) {
        Ok(r) => {
            let mut out = Outcome::default();
            for w in &r.warnings {
                out.stderr.push_str(w);
                out.stderr.push('\n');
            }
            if cli.stats {
                out.stderr.push_str(&format!("scene-build: {:.3} ms\n", r.build_time.as_secs_f64() * 1e3));
                if let Some(t) = r.analysis_time {
                    out.stderr.push_str(&format!("analysis: {:.3} ms\n", t.as_secs_f64() * 1e3));
                }
            }
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &r.text) {
                        out.stderr.push_str(&format!("error: {}: {e}\n", path.display()));
                        out.code = 2;
                        return out;
                    }
                }
                None => out.stdout = r.text,
            }
            out.code = if cli.fail_on_findings && r.findings > 0 { 1 } else { 0 };
            out
        }
        Err(Failure(msg)) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") },
    }
}

fn scene_config(cli: &Cli, project: &ProjectArg) -> Result<SceneConfig, Failure> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            let mut c = SceneConfig::from_json(&text)?;
            let base = path.parent().unwrap_or(Path::new("."));
            c.root = c.root.map(|r| base.join(r));
            c.stubs = c.stubs.map(|s| base.join(s));
            c
        }
        None => SceneConfig::default(),
    };
    if let Some(p) = &project.project {
        config.root = Some(p.clone());
    }
    if config.root.is_none() {
        config.root = Some(PathBuf::from("."));
    }
    if let Some(dir) = std::env::var_os(STUBS_ENV).filter(|d| !d.is_empty()) {
        config.stubs = Some(PathBuf::from(dir));
    }
    if let Some(b) = cli.table3_literal {
        config.table3_literal = b;
    }
    Ok(config)
}

fn load(cli: &Cli, project: &ProjectArg, report: &mut Report) -> Result<Scene, Failure> {
    let config = scene_config(cli, project)?;
    let start = Instant::now();
    let scene = Scene::load(config)?;
    report.build_time = start.elapsed();
    Ok(scene)
}

fn entries(scene: &Scene, given: &[String]) -> Result<Vec<MethodSignature>, Failure> {
    let texts = if given.is_empty() { &scene.config.entry_points } else { given };
    if texts.is_empty() {
        let d = scene.default_entries();
        if d.is_empty() {
            return Err(Failure("no entry points found; pass --entry".into()));
        }
        return Ok(d);
    }
    texts.iter().map(|t| scene.resolve_method(t).map_err(|e| Failure(format!("entry point: {e}")))).collect()
}

fn format_of(cli: &Cli, default: OutputFormat, allowed: &[OutputFormat], command: &str) -> Result<OutputFormat, Failure> {
    let f = cli.format.unwrap_or(default);
    if !allowed.contains(&f) {
        return Err(Failure(format!("`{command}` does not support --format {}", format!("{f:?}").to_lowercase())));
    }
    Ok(f)
}

fn diagnostics_text(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("{d}\n")).collect()
}

fn findings_text(findings: &[Finding]) -> String {
    let mut s = String::new();
    for f in findings {
        s.push_str(&format!("{}:{}:{}: `{}` may be undefined here\n", f.method, f.line, f.col, f.path));
        for t in &f.trace {
            s.push_str(&format!("  via {} line {}\n", t.method, t.line));
        }
    }
    s
}

fn nullptr(scene: &Scene, graph: &GraphArgs) -> Result<Vec<Finding>, Failure> {
    let cg = callgraph::build(scene, &entries(scene, &graph.entries)?, graph.algo)?;
    Ok(null_pointer_analysis(scene, &cg)?)
}

fn timed<T>(report: &mut Report, f: impl FnOnce() -> Result<T, Failure>) -> Result<T, Failure> {
    let start = Instant::now();
    let r = f();
    report.analysis_time = Some(start.elapsed());
    r
}

fn execute(cli: &Cli) -> Result<Report, Failure> {
    use OutputFormat::*;
    let mut r = Report::default();
    match &cli.command {
        Command::Build { project, lint, analysis, graph } => {
            let format = format_of(cli, Text, &[Text, Json], "build")?;
            let scene = load(cli, project, &mut r)?;
            let lints = if *lint { Some(check_constraints(&scene)) } else { None };
            let findings = match analysis {
                Some(Analysis::Nullptr) => Some(timed(&mut r, || nullptr(&scene, graph))?),
                None => None,
            };
            let errors = scene.diagnostics.iter().filter(|d| d.is_error()).count();
            r.findings = errors + lints.as_ref().map_or(0, Vec::len) + findings.as_ref().map_or(0, Vec::len);
            let user_classes = scene.classes.values().filter(|c| !c.is_stub).count();
            let user_methods = scene.methods.values().filter(|m| !m.is_stub).count();
            let entry_points: Vec<String> = scene.default_entries().iter().map(|m| m.to_string()).collect();
            r.text = match format {
                Json => {
                    let mut v = json!({
                        "files": scene.files.iter().map(|f| f.path.clone()).collect::<Vec<_>>(),
                        "classes": user_classes,
                        "methods": user_methods,
                        "stubClasses": scene.classes.len() - user_classes,
                        "defaultEntryPoints": entry_points,
                        "diagnostics": scene.diagnostics.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                    });
                    if let Some(l) = &lints {
                        v["lint"] = json!(l.iter().map(|d| d.to_string()).collect::<Vec<_>>());
                    }
                    if let Some(f) = &findings {
                        v["nullptr"] = serde_json::from_str(&findings_json(f))?;
                    }
                    let mut s = serde_json::to_string_pretty(&v)?;
                    s.push('\n');
                    s
                }
                _ => {
                    let mut s = format!(
                        "files: {}\nclasses: {user_classes}\nmethods: {user_methods}\nstub classes: {}\n",
                        scene.files.len(),
                        scene.classes.len() - user_classes
                    );
                    for e in &entry_points {
                        s.push_str(&format!("entry: {e}\n"));
                    }
                    s.push_str(&diagnostics_text(&scene.diagnostics));
                    if let Some(l) = &lints {
                        s.push_str(&diagnostics_text(l));
                    }
                    if let Some(f) = &findings {
                        s.push_str(&findings_text(f));
                    }
                    s
                }
            };
        }
        Command::Ir { signature, project } => {
            format_of(cli, Text, &[Text], "ir")?;
            let scene = load(cli, project, &mut r)?;
            let sigs: Vec<MethodSignature> = match signature.as_str() {
                "*" => scene.methods.values().filter(|m| !m.is_stub && m.body.is_some()).map(|m| m.signature.clone()).collect(),
                t => vec![scene.resolve_method(t)?],
            };
            let mut parts = Vec::new();
            for sig in &sigs {
                let m = &scene.methods[sig];
                match &m.body {
                    Some(b) => {
                        let mut d = dump_method(sig, b);
                        if !d.ends_with('\n') {
                            d.push('\n');
                        }
                        parts.push(d)
                    }
                    None => return Err(Failure(format!("{sig} has no body"))),
                }
            }
            r.text = parts.join("\n");
        }
        Command::Lint { project } => {
            let format = format_of(cli, Text, &[Text, Json], "lint")?;
            let scene = load(cli, project, &mut r)?;
            let diags = timed(&mut r, || Ok(check_constraints(&scene)))?;
            r.findings = diags.len();
            r.text = match format {
                Json => {
                    let v: Vec<_> = diags
                        .iter()
                        .map(|d| {
                            json!({
                                "path": d.path,
                                "line": d.span.line,
                                "col": d.span.col,
                                "severity": d.severity.to_string(),
                                "code": d.code.as_str(),
                                "message": d.message,
                            })
                        })
                        .collect();
                    let mut s = serde_json::to_string_pretty(&json!({"analysis": "lint", "diagnostics": v}))?;
                    s.push('\n');
                    s
                }
                _ => diagnostics_text(&diags),
            };
        }
        Command::Cg { project, graph } => {
            let format = format_of(cli, Dot, &[Dot, Json, Text], "cg")?;
            let scene = load(cli, project, &mut r)?;
            let entries = entries(&scene, &graph.entries)?;
            let cg = timed(&mut r, || Ok(callgraph::build(&scene, &entries, graph.algo)?))?;
            r.text = match format {
                Dot => callgraph::emit(&cg, callgraph::Format::Dot),
                Json => callgraph::emit(&cg, callgraph::Format::Json),
                Text => cg.pairs().iter().map(|(a, b)| format!("{a} -> {b}\n")).collect(),
            };
        }
        Command::Scan { project, targets, graph } => {
            let format = format_of(cli, Json, &[Json, Text], "scan")?;
            let scene = load(cli, project, &mut r)?;
            let entries = entries(&scene, &graph.entries)?;
            let (reports, warnings) = timed(&mut r, || Ok(run_scan(&scene, &entries, targets, graph.algo)?))?;
            r.warnings = warnings;
            r.findings = reports.iter().map(|x| x.callers.len()).sum();
            r.text = match format {
                Json => reports_json(&reports),
                _ => reports_text(&reports),
            };
        }
        Command::Nullptr { project, graph } => {
            let format = format_of(cli, Json, &[Json, Text], "nullptr")?;
            let scene = load(cli, project, &mut r)?;
            let findings = timed(&mut r, || nullptr(&scene, graph))?;
            r.findings = findings.len();
            r.text = match format {
                Json => findings_json(&findings),
                _ => findings_text(&findings),
            };
        }
    }
    Ok(r)
}
