use serde_json::{json, Value};

use super::CallGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Dot,
    Json,
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Renders the graph as DOT or as JSON with sorted keys. Output depends only
/// on the graph contents.
pub fn emit(cg: &CallGraph, format: Format) -> String {
    match format {
        Format::Dot => {
            let mut out = format!("digraph callgraph {{\n  label={};\n  node [shape=box];\n", dot_quote(cg.algorithm.name()));
            for n in &cg.nodes {
                let entry = if cg.entry_points.contains(n) { " peripheries=2" } else { "" };
                out.push_str(&format!("  {} [label={}{entry}];\n", dot_quote(&n.to_string()), dot_quote(&n.to_string())));
            }
            for e in &cg.edges {
                let style = if e.low_confidence { " style=dashed" } else { "" };
                out.push_str(&format!(
                    "  {} -> {} [label=\"line {}\"{style}];\n",
                    dot_quote(&e.caller.to_string()),
                    dot_quote(&e.callee.to_string()),
                    e.line
                ));
            }
            out.push_str("}\n");
            out
        }
        Format::Json => {
            let edges: Vec<Value> = cg
                .edges
                .iter()
                .map(|e| {
                    json!({
                        "site": e.site,
                        "caller": e.caller.to_string(),
                        "callee": e.callee.to_string(),
                        "line": e.line,
                        "lowConfidence": e.low_confidence,
                    })
                })
                .collect();
            let unresolved: Vec<Value> = cg
                .unresolved
                .iter()
                .map(|s| {
                    json!({
                        "site": s.id,
                        "caller": s.caller.to_string(),
                        "callee": s.callee_name,
                        "argCount": s.arg_count,
                        "line": s.line,
                    })
                })
                .collect();
            let v = json!({
                "algorithm": cg.algorithm.name(),
                "entryPoints": cg.entry_points.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                "nodes": cg.nodes.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                "edges": edges,
                "unresolved": unresolved,
            });
            let mut s = serde_json::to_string_pretty(&v).expect("json values always serialize");
            s.push('\n');
            s
        }
    }
}
