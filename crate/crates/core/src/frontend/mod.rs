//! Lexing and parsing of ArkLang sources.

pub mod ast;
pub mod lexer;
pub mod parser;
mod source;

use std::path::Path;

use globset::{Glob, GlobSet, GlobSetBuilder};
use walkdir::WalkDir;

pub use ast::Module;
pub use lexer::lex;
pub use parser::parse;
pub use source::{SourceFile, Span};

use crate::diag::{Code, Diagnostic};

/// Default include globs for project discovery.
pub const DEFAULT_INCLUDE: &[&str] = &["**/*.ets", "**/*.ts"];

/// One parsed file of a project. Files with syntax errors keep their
/// diagnostics and whatever items the parser recovered.
#[derive(Debug, Clone)]
pub struct ParsedFile {
    pub source: SourceFile,
    pub module: Module,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParsedFile {
    pub fn from_source(source: SourceFile) -> Self {
        let (module, diagnostics) = parse(&source);
        ParsedFile { source, module, diagnostics }
    }

    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParsedProject {
    pub files: Vec<ParsedFile>,
    /// Diagnostics not tied to a parsed file, e.g. unreadable paths.
    pub diagnostics: Vec<Diagnostic>,
}

impl ParsedProject {
    pub fn all_diagnostics(&self) -> Vec<Diagnostic> {
        let mut out = self.diagnostics.clone();
        for f in &self.files {
            out.extend(f.diagnostics.iter().cloned());
        }
        crate::diag::sort_diagnostics(&mut out);
        out
    }
}

pub fn build_globset(patterns: &[String]) -> Result<GlobSet, globset::Error> {
    let mut b = GlobSetBuilder::new();
    for p in patterns {
        b.add(Glob::new(p)?);
    }
    b.build()
}

/// Parses every file under `root` matching `include`, ordered by relative path.
pub fn parse_project(root: &Path, include: &GlobSet) -> ParsedProject {
    let mut project = ParsedProject::default();
    let mut paths = Vec::new();
    for entry in WalkDir::new(root).follow_links(true) {
        let entry = match entry {
            Ok(e) => e,
            Err(err) => {
                let path = err.path().map(|p| rel_path(root, p)).unwrap_or_default();
                project.diagnostics.push(Diagnostic::error(path, Code::IoError, Span::new(0, 0, 1, 1), err.to_string()));
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = rel_path(root, entry.path());
        if include.is_match(&rel) {
            paths.push((rel, entry.into_path()));
        }
    }
    paths.sort();
    for (rel, path) in paths {
        match std::fs::read_to_string(&path) {
            Ok(text) => project.files.push(ParsedFile::from_source(SourceFile::new(rel, text))),
            Err(err) => project.diagnostics.push(Diagnostic::error(
                rel,
                Code::IoError,
                Span::new(0, 0, 1, 1),
                format!("cannot read file: {err}"),
            )),
        }
    }
    project
}

/// Parses in-memory sources; used by tests and generated corpora.
pub fn parse_sources<I, P, T>(sources: I) -> ParsedProject
where
    I: IntoIterator<Item = (P, T)>,
    P: Into<String>,
    T: Into<String>,
{
    let mut files: Vec<ParsedFile> =
        sources.into_iter().map(|(p, t)| ParsedFile::from_source(SourceFile::new(p, t))).collect();
    files.sort_by(|a, b| a.source.path.cmp(&b.source.path));
    ParsedProject { files, diagnostics: Vec::new() }
}

fn rel_path(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/")
}
