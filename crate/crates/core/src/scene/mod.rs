//! Whole-project model: files, namespaces, classes (including `struct`
//! components and SDK stubs), methods with lowered bodies, the class
//! hierarchy and view trees.

pub mod hierarchy;
mod names;
mod signature;
pub mod view_tree;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use hierarchy::Hierarchy;
pub use signature::{ClassSignature, MethodSignature, CONSTRUCTOR, DEFAULT_CLASS};
pub use view_tree::{build_view_tree, ViewNode, ViewNodeKind, ViewTree, ViewTreeError};

use crate::diag::{Code, Diagnostic};
use crate::frontend::ast::{self, Expr, ExprKind, Item, Member, Module, Param, Stmt, StmtKind, TypeKind};
use crate::frontend::{ParsedFile, ParsedProject, SourceFile, Span};
use crate::ir::lower::{Component, FileLowerer, MethodInput, Piece, Resolver, SYNTHESIZED_STUBS};
use crate::ir::{build_body, ArkBody, ANON_PREFIX};
use crate::types::Type;
use hierarchy::HierarchyInput;
use names::Names;

/// Method holding static field initializers of a class.
pub const STATIC_INIT: &str = "%statinit";
/// Path prefix of stub SDK files.
pub const STUB_PREFIX: &str = "@stubs/";

const EMBEDDED_STUBS: &[(&str, &str)] =
    &[("arkui.ets", include_str!("../../stubs/arkui.ets")), ("platform.ets", include_str!("../../stubs/platform.ets"))];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decorator {
    pub name: String,
    /// Argument source text.
    pub args: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    Class,
    Struct,
    Interface,
    Default,
}

#[derive(Debug, Clone)]
pub struct ArkField {
    pub name: String,
    pub declared: Option<Type>,
    pub decorators: Vec<Decorator>,
    pub is_static: bool,
    pub has_initializer: bool,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct ArkMethod {
    pub signature: MethodSignature,
    pub decorators: Vec<Decorator>,
    pub params: Vec<(String, Option<Type>)>,
    /// Last parameter is a rest parameter.
    pub has_rest: bool,
    pub declared_return: Option<Type>,
    pub is_static: bool,
    pub is_abstract: bool,
    pub is_stub: bool,
    /// Constructor or initializer created by the builder rather than declared.
    pub synthesized: bool,
    pub body: Option<ArkBody>,
    pub span: Span,
}

impl ArkMethod {
    /// Whether a call with `argc` arguments can bind to this method.
    pub fn accepts(&self, argc: usize) -> bool {
        let arity = self.signature.arity;
        argc == arity || (self.has_rest && argc + 1 >= arity)
    }

    pub fn is_hoisted(&self) -> bool {
        self.signature.name.starts_with(ANON_PREFIX)
    }
}

#[derive(Debug, Clone)]
pub struct ArkClass {
    pub signature: ClassSignature,
    pub kind: ClassKind,
    pub is_abstract: bool,
    pub is_stub: bool,
    pub super_class_name: Option<String>,
    pub implemented: Vec<String>,
    pub fields: Vec<ArkField>,
    pub methods: Vec<MethodSignature>,
    pub decorators: Vec<Decorator>,
    pub view_tree: Option<ViewTree>,
    pub span: Span,
}

impl ArkClass {
    pub fn field(&self, name: &str) -> Option<&ArkField> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn has_decorator(&self, name: &str) -> bool {
        self.decorators.iter().any(|d| d.name == name)
    }
}

#[derive(Debug, Clone)]
pub struct ArkNamespace {
    pub name: String,
    pub path: Vec<String>,
    pub decorators: Vec<Decorator>,
    pub classes: Vec<ClassSignature>,
    pub namespaces: Vec<ArkNamespace>,
    pub default_class: ClassSignature,
}

#[derive(Debug, Clone)]
pub struct ArkFile {
    pub path: String,
    pub source: SourceFile,
    pub module: Module,
    pub namespaces: Vec<ArkNamespace>,
    pub classes: Vec<ClassSignature>,
    pub default_class: ClassSignature,
    pub is_stub: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct SceneConfig {
    pub root: Option<PathBuf>,
    pub include: Vec<String>,
    /// Stub directory replacing the embedded stub SDK.
    pub stubs: Option<PathBuf>,
    pub entry_points: Vec<String>,
    /// Type `string * number` as string and `boolean * number` as boolean.
    #[serde(default = "default_true")]
    pub table3_literal: bool,
}

impl Default for SceneConfig {
    fn default() -> Self {
        SceneConfig { root: None, include: Vec::new(), stubs: None, entry_points: Vec::new(), table3_literal: true }
    }
}

impl SceneConfig {
    pub fn from_json(text: &str) -> Result<SceneConfig, SceneError> {
        serde_json::from_str(text).map_err(|e| SceneError::Config(e.to_string()))
    }

    pub fn include_globs(&self) -> Vec<String> {
        if self.include.is_empty() {
            crate::frontend::DEFAULT_INCLUDE.iter().map(|s| s.to_string()).collect()
        } else {
            self.include.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SceneError {
    #[error("EMPTY_PROJECT: no source files found")]
    EmptyProject,
    #[error("duplicate class `{class}` declared at {first} and {second}")]
    DuplicateClass { class: String, first: String, second: String },
    #[error("inheritance cycle: {}", .0.join(" -> "))]
    HierarchyCycle(Vec<String>),
    #[error("stub SDK: {0}")]
    Stubs(String),
    #[error("config: {0}")]
    Config(String),
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub files: Vec<ArkFile>,
    pub stub_files: Vec<ArkFile>,
    pub classes: BTreeMap<ClassSignature, ArkClass>,
    pub methods: BTreeMap<MethodSignature, ArkMethod>,
    pub sdk_stubs: Vec<ClassSignature>,
    pub hierarchy: Hierarchy,
    pub config: SceneConfig,
    /// Parse and lowering diagnostics, sorted.
    pub diagnostics: Vec<Diagnostic>,
}

/// Reads stub files from `dir`, or returns the embedded stub SDK.
pub fn stub_sources(dir: Option<&Path>) -> Result<Vec<(String, String)>, SceneError> {
    let Some(dir) = dir else {
        return Ok(EMBEDDED_STUBS.iter().map(|(n, t)| (format!("{STUB_PREFIX}{n}"), t.to_string())).collect());
    };
    let entries = std::fs::read_dir(dir).map_err(|e| SceneError::Stubs(format!("{}: {e}", dir.display())))?;
    let mut out = Vec::new();
    for e in entries {
        let e = e.map_err(|e| SceneError::Stubs(e.to_string()))?;
        let p = e.path();
        if p.extension().is_some_and(|x| x == "ets" || x == "ts") {
            let text = std::fs::read_to_string(&p).map_err(|e| SceneError::Stubs(format!("{}: {e}", p.display())))?;
            out.push((format!("{STUB_PREFIX}{}", e.file_name().to_string_lossy()), text));
        }
    }
    out.sort();
    Ok(out)
}

impl Scene {
    /// Parses every matching file under `config.root` and builds the scene.
    pub fn load(config: SceneConfig) -> Result<Scene, SceneError> {
        let root = config.root.clone().ok_or_else(|| SceneError::Config("no project root".into()))?;
        let globs = crate::frontend::build_globset(&config.include_globs()).map_err(|e| SceneError::Config(e.to_string()))?;
        let project = crate::frontend::parse_project(&root, &globs);
        Scene::build(project, config)
    }

    /// Builds a scene from in-memory `(path, text)` sources.
    pub fn from_sources<P: Into<String>, T: Into<String>>(
        sources: impl IntoIterator<Item = (P, T)>,
        config: SceneConfig,
    ) -> Result<Scene, SceneError> {
        Scene::build(crate::frontend::parse_sources(sources), config)
    }

    pub fn build(project: ParsedProject, config: SceneConfig) -> Result<Scene, SceneError> {
        if project.files.is_empty() {
            return Err(SceneError::EmptyProject);
        }
        let mut stub_parsed = Vec::new();
        for (path, text) in stub_sources(config.stubs.as_deref())? {
            let f = ParsedFile::from_source(SourceFile::new(path, text));
            if let Some(d) = f.diagnostics.iter().find(|d| d.is_error()) {
                return Err(SceneError::Stubs(d.to_string()));
            }
            stub_parsed.push(f);
        }
        let mut scene = build_scene(&project, &stub_parsed, config)?;
        let mut diags = project.all_diagnostics();
        diags.append(&mut scene.diagnostics);
        crate::diag::sort_diagnostics(&mut diags);
        scene.diagnostics = diags;
        let ParsedProject { files, .. } = project;
        for (af, pf) in scene.files.iter_mut().zip(files) {
            af.source = pf.source;
            af.module = pf.module;
        }
        for (af, pf) in scene.stub_files.iter_mut().zip(stub_parsed) {
            af.source = pf.source;
            af.module = pf.module;
        }
        crate::augment::annotate_scene(&mut scene);
        Ok(scene)
    }

    pub fn class(&self, sig: &ClassSignature) -> Option<&ArkClass> {
        self.classes.get(sig)
    }

    pub fn method(&self, sig: &MethodSignature) -> Option<&ArkMethod> {
        self.methods.get(sig)
    }

    /// Classes whose namespace-qualified name is `name`, user classes first.
    pub fn classes_named(&self, name: &str) -> Vec<&ArkClass> {
        let mut v: Vec<&ArkClass> = self.classes.values().filter(|c| c.signature.qualified_name() == name).collect();
        v.sort_by_key(|c| c.is_stub);
        v
    }

    pub fn methods_of<'a>(&'a self, class: &ClassSignature) -> impl Iterator<Item = &'a ArkMethod> + 'a {
        self.classes.get(class).into_iter().flat_map(move |c| c.methods.iter().filter_map(|m| self.methods.get(m)))
    }

    /// Method of `class` itself named `name` accepting `argc` arguments,
    /// preferring an exact arity match.
    pub fn declared_method(&self, class: &ClassSignature, name: &str, argc: usize) -> Option<&ArkMethod> {
        let mut best = None;
        for m in self.methods_of(class) {
            if m.signature.name == name && m.accepts(argc) {
                if m.signature.arity == argc {
                    return Some(m);
                }
                best.get_or_insert(m);
            }
        }
        best
    }

    /// Nearest declaration of `name/argc` in `class` or its superclasses,
    /// then in implemented interfaces.
    pub fn lookup_method(&self, class: &ClassSignature, name: &str, argc: usize) -> Option<&ArkMethod> {
        let chain = self.hierarchy.ancestors(class);
        for c in &chain {
            if let Some(m) = self.declared_method(c, name, argc) {
                return Some(m);
            }
        }
        for c in &chain {
            for i in self.hierarchy.interfaces(c) {
                if let Some(m) = self.lookup_method(i, name, argc) {
                    return Some(m);
                }
            }
        }
        None
    }

    /// Field `name` declared on `class` or its nearest superclass.
    pub fn lookup_field(&self, class: &ClassSignature, name: &str) -> Option<&ArkField> {
        self.hierarchy.ancestors(class).iter().find_map(|c| self.classes.get(c).and_then(|k| k.field(name)))
    }

    /// Resolves signature text: the exact canonical form, or a suffix that
    /// identifies exactly one method (e.g. `%dflt.main/0`).
    pub fn resolve_method(&self, text: &str) -> Result<MethodSignature, String> {
        let text = text.trim();
        if let Some(sig) = MethodSignature::parse(text) {
            if self.methods.contains_key(&sig) {
                return Ok(sig);
            }
        }
        let matches: Vec<&MethodSignature> = self
            .methods
            .keys()
            .filter(|m| {
                let full = m.to_string();
                full == text || full.ends_with(&format!(" {text}")) || full.ends_with(&format!(".{text}"))
            })
            .collect();
        match matches.as_slice() {
            [one] => Ok((*one).clone()),
            [] => Err(format!("no method matches `{text}`")),
            many => Err(format!(
                "`{text}` is ambiguous: {}",
                many.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(", ")
            )),
        }
    }

    /// `main/0` functions and the build methods of `@Entry` structs. When
    /// neither exists, every zero-argument top-level function.
    pub fn default_entries(&self) -> Vec<MethodSignature> {
        let user = |m: &&ArkMethod| !m.is_stub && m.body.is_some();
        let mut out: Vec<MethodSignature> = self
            .methods
            .values()
            .filter(user)
            .filter(|m| m.signature.class.is_default() && m.signature.name == "main" && m.signature.arity == 0)
            .map(|m| m.signature.clone())
            .collect();
        for c in self.classes.values().filter(|c| c.kind == ClassKind::Struct && c.has_decorator("Entry")) {
            if let Some(m) = self.declared_method(&c.signature, "build", 0) {
                out.push(m.signature.clone());
            }
        }
        if out.is_empty() {
            out = self
                .methods
                .values()
                .filter(user)
                .filter(|m| {
                    m.signature.class.is_default()
                        && m.signature.arity == 0
                        && m.signature.name != DEFAULT_CLASS
                        && !m.is_hoisted()
                })
                .map(|m| m.signature.clone())
                .collect();
        }
        out.sort();
        out.dedup();
        out
    }

    /// Methods with lowered bodies, in signature order.
    pub fn bodies(&self) -> impl Iterator<Item = (&MethodSignature, &ArkMethod, &ArkBody)> {
        self.methods.iter().filter_map(|(s, m)| m.body.as_ref().map(|b| (s, m, b)))
    }

    pub fn file(&self, path: &str) -> Option<&ArkFile> {
        self.files.iter().chain(self.stub_files.iter()).find(|f| f.path == path)
    }
}

// ---- building ------------------------------------------------------------

struct Pending<'a> {
    sig: ClassSignature,
    kind: ClassKind,
    decl: Option<&'a ast::ClassDecl>,
    items: Vec<&'a Item>,
    decorators: Vec<Decorator>,
    span: Span,
    file: usize,
    is_stub: bool,
}

struct Collector<'a> {
    pending: Vec<Pending<'a>>,
    defaults: HashMap<(usize, Vec<String>), usize>,
    seen: HashMap<ClassSignature, (String, Span)>,
}

fn decorators(src: &SourceFile, ds: &[ast::Decorator]) -> Vec<Decorator> {
    ds.iter().map(|d| Decorator { name: d.name.clone(), args: d.args.iter().map(|a| src.slice(a.span).to_string()).collect() }).collect()
}

fn loc(path: &str, span: Span) -> String {
    format!("{path}:{}:{}", span.line, span.col)
}

impl<'a> Collector<'a> {
    fn default_class(&mut self, file: usize, path: &str, ns: &[String], is_stub: bool, span: Span) -> usize {
        if let Some(&i) = self.defaults.get(&(file, ns.to_vec())) {
            return i;
        }
        let sig = ClassSignature::new(path, ns.to_vec(), DEFAULT_CLASS);
        self.pending.push(Pending {
            sig,
            kind: ClassKind::Default,
            decl: None,
            items: Vec::new(),
            decorators: Vec::new(),
            span,
            file,
            is_stub,
        });
        self.defaults.insert((file, ns.to_vec()), self.pending.len() - 1);
        self.pending.len() - 1
    }

    #[allow(clippy::too_many_arguments)]
    fn items(
        &mut self,
        pf: &'a ParsedFile,
        file: usize,
        is_stub: bool,
        items: &'a [Item],
        ns: &[String],
        classes: &mut Vec<ClassSignature>,
        namespaces: &mut Vec<ArkNamespace>,
    ) -> Result<(), SceneError> {
        let path = pf.source.path.as_str();
        let dflt = self.default_class(file, path, ns, is_stub, pf.module.span);
        for item in items {
            match item {
                Item::Class(c) => {
                    let sig = ClassSignature::new(path, ns.to_vec(), c.name.clone());
                    if let Some((p, s)) = self.seen.get(&sig) {
                        return Err(SceneError::DuplicateClass {
                            class: sig.to_string(),
                            first: loc(p, *s),
                            second: loc(path, c.span),
                        });
                    }
                    self.seen.insert(sig.clone(), (path.to_string(), c.span));
                    let kind = match c.kind {
                        ast::ClassKind::Class => ClassKind::Class,
                        ast::ClassKind::Struct => ClassKind::Struct,
                        ast::ClassKind::Interface => ClassKind::Interface,
                    };
                    classes.push(sig.clone());
                    self.pending.push(Pending {
                        sig,
                        kind,
                        decl: Some(c),
                        items: Vec::new(),
                        decorators: decorators(&pf.source, &c.decorators),
                        span: c.span,
                        file,
                        is_stub,
                    });
                }
                Item::Namespace(n) => {
                    let mut path_ns = ns.to_vec();
                    path_ns.push(n.name.clone());
                    let idx = match namespaces.iter().position(|x| x.name == n.name) {
                        Some(i) => i,
                        None => {
                            namespaces.push(ArkNamespace {
                                name: n.name.clone(),
                                path: path_ns.clone(),
                                decorators: decorators(&pf.source, &n.decorators),
                                classes: Vec::new(),
                                namespaces: Vec::new(),
                                default_class: ClassSignature::new(path, path_ns.clone(), DEFAULT_CLASS),
                            });
                            namespaces.len() - 1
                        }
                    };
                    let mut ns_classes = std::mem::take(&mut namespaces[idx].classes);
                    let mut ns_children = std::mem::take(&mut namespaces[idx].namespaces);
                    self.items(pf, file, is_stub, &n.items, &path_ns, &mut ns_classes, &mut ns_children)?;
                    namespaces[idx].classes = ns_classes;
                    namespaces[idx].namespaces = ns_children;
                }
                Item::Function(_) | Item::Var(_) | Item::Stmt(_) => self.pending[dflt].items.push(item),
                Item::Import(_) => {}
            }
        }
        Ok(())
    }
}

fn type_name(t: &ast::TypeAnno) -> String {
    match &t.kind {
        TypeKind::Named(n, _) => n.clone(),
        _ => t.to_string(),
    }
}

fn params_info(names: &Names, params: &[Param], scope: &ClassSignature) -> (Vec<(String, Option<Type>)>, bool) {
    let info = params
        .iter()
        .map(|p| {
            let t = p.ty.as_ref().map(|t| names.resolve_type(t, scope));
            let t = if p.rest { t.map(|t| if matches!(t, Type::Array(_)) { t } else { Type::Array(Box::new(t)) }) } else { t };
            (p.name.clone(), t)
        })
        .collect();
    (info, params.last().is_some_and(|p| p.rest))
}

fn is_super_call(s: &Stmt) -> bool {
    matches!(&s.kind, StmtKind::Expr(Expr { kind: ExprKind::Call { callee, .. }, .. }) if matches!(callee.kind, ExprKind::Super))
}

fn build_scene(project: &ParsedProject, stubs: &[ParsedFile], config: SceneConfig) -> Result<Scene, SceneError> {
    let all: Vec<(&ParsedFile, bool)> =
        project.files.iter().map(|f| (f, false)).chain(stubs.iter().map(|f| (f, true))).collect();
    let mut col = Collector { pending: Vec::new(), defaults: HashMap::new(), seen: HashMap::new() };
    let mut ark_files = Vec::new();
    for (i, (pf, is_stub)) in all.iter().enumerate() {
        let mut classes = Vec::new();
        let mut namespaces = Vec::new();
        col.items(pf, i, *is_stub, &pf.module.items, &[], &mut classes, &mut namespaces)?;
        let path = pf.source.path.clone();
        ark_files.push(ArkFile {
            default_class: ClassSignature::new(path.clone(), vec![], DEFAULT_CLASS),
            path,
            source: SourceFile::new("", ""),
            module: Module { items: Vec::new(), span: Span::default() },
            namespaces,
            classes,
            is_stub: *is_stub,
        });
    }
    let pending = col.pending;

    // Name tables.
    let mut names = Names::default();
    for p in &pending {
        names.add_class(&p.sig, p.is_stub);
        if p.kind == ClassKind::Struct {
            names.structs.insert(p.sig.clone());
        }
        for item in &p.items {
            match item {
                Item::Var(v) => names.add_global(&p.sig, &v.name),
                Item::Function(f) => names.add_function(&p.sig.method(f.name.clone(), f.params.len())),
                _ => {}
            }
        }
    }

    // Hierarchy.
    let mut inputs = Vec::new();
    for p in &pending {
        let Some(d) = p.decl else {
            inputs.push(HierarchyInput { class: p.sig.clone(), extends: None, implements: vec![] });
            continue;
        };
        let resolve = |t: &ast::TypeAnno| {
            let n = type_name(t);
            names.lookup_class(&n, &p.sig).filter(|c| c != &p.sig).ok_or(n)
        };
        let mut implements: Vec<ClassSignature> = d.implements.iter().filter_map(|t| resolve(t).ok()).collect();
        let extends = if p.kind == ClassKind::Interface {
            implements.extend(d.extends.iter().filter_map(|t| resolve(t).ok()));
            None
        } else {
            d.extends.as_ref().map(resolve)
        };
        inputs.push(HierarchyInput { class: p.sig.clone(), extends, implements });
    }
    for i in &inputs {
        if let Some(e) = &i.extends {
            let class = match e {
                Ok(s) => crate::ir::ClassRef { name: s.qualified_name(), sig: Some(s.clone()) },
                Err(n) => crate::ir::ClassRef { name: n.clone(), sig: None },
            };
            names.supers.insert(i.class.clone(), class);
        }
    }
    Hierarchy::build(&inputs).map_err(|cycle| SceneError::HierarchyCycle(cycle.iter().map(|c| c.to_string()).collect()))?;

    // Classes that run a constructor on `new`, directly or inherited.
    let mut declares_ctor = BTreeSet::new();
    for p in &pending {
        if let Some(d) = p.decl {
            let ctor = d.members.iter().any(|m| matches!(m, Member::Method(f) if f.name == CONSTRUCTOR));
            let inits = !p.is_stub
                && d.members.iter().any(|m| matches!(m, Member::Field(f) if !f.modifiers.is_static && f.init.is_some()));
            if ctor || inits {
                declares_ctor.insert(p.sig.clone());
            }
        }
    }
    for p in &pending {
        let mut cur = Some(p.sig.clone());
        let mut steps = 0;
        while let Some(c) = cur {
            if declares_ctor.contains(&c) {
                names.with_ctor.insert(p.sig.clone());
                break;
            }
            steps += 1;
            if steps > pending.len() {
                break;
            }
            cur = names.supers.get(&c).and_then(|r| r.sig.clone());
        }
    }
    // A subclass whose parent needs construction gets a constructor too.
    for p in &pending {
        if p.decl.is_some() && !p.is_stub && names.with_ctor.contains(&p.sig) {
            declares_ctor.insert(p.sig.clone());
        }
    }

    let mut classes: BTreeMap<ClassSignature, ArkClass> = BTreeMap::new();
    let mut methods: BTreeMap<MethodSignature, ArkMethod> = BTreeMap::new();
    let mut diagnostics = Vec::new();
    let mut unknown_components: BTreeMap<String, BTreeSet<(String, usize)>> = BTreeMap::new();

    let add_method = |methods: &mut BTreeMap<MethodSignature, ArkMethod>,
                          class: &mut ArkClass,
                          m: ArkMethod,
                          path: &str,
                          diagnostics: &mut Vec<Diagnostic>| {
        if methods.contains_key(&m.signature) {
            if !class.is_stub {
                diagnostics.push(Diagnostic::warning(
                    path,
                    Code::UnsupportedSyntax,
                    m.span,
                    format!("method `{}` redeclared with the same arity; keeping the first", m.signature.short()),
                ));
            }
            return;
        }
        class.methods.push(m.signature.clone());
        methods.insert(m.signature.clone(), m);
    };

    let body_of = |lowered: crate::ir::lower::LoweredMethod, path: &str, span: Span, diagnostics: &mut Vec<Diagnostic>| {
        match build_body(lowered.locals, &lowered.stmts) {
            Ok(b) => Some(b),
            Err(e) => {
                diagnostics.push(Diagnostic::error(path, Code::LoweringError, span, e.to_string()));
                None
            }
        }
    };

    for (fi, (pf, is_stub)) in all.iter().enumerate() {
        let path = pf.source.path.as_str();
        let src = &pf.source;
        let mut lowerer = FileLowerer::new(&names, path);
        for p in pending.iter().filter(|p| p.file == fi) {
            let scope = &p.sig;
            let mut class = ArkClass {
                signature: p.sig.clone(),
                kind: p.kind,
                is_abstract: p.decl.is_some_and(|d| d.modifiers.is_abstract),
                is_stub: *is_stub,
                super_class_name: p.decl.and_then(|d| d.extends.as_ref()).map(type_name),
                implemented: p.decl.map(|d| d.implements.iter().map(type_name).collect()).unwrap_or_default(),
                fields: Vec::new(),
                methods: Vec::new(),
                decorators: p.decorators.clone(),
                view_tree: None,
                span: p.span,
            };
            if let Some(d) = p.decl {
                let is_interface = p.kind == ClassKind::Interface;
                let mut field_inits = Vec::new();
                let mut static_inits = Vec::new();
                for m in &d.members {
                    let Member::Field(f) = m else { continue };
                    if class.field(&f.name).is_none() {
                        class.fields.push(ArkField {
                            name: f.name.clone(),
                            declared: f.ty.as_ref().map(|t| names.resolve_type(t, scope)),
                            decorators: decorators(src, &f.decorators),
                            is_static: f.modifiers.is_static,
                            has_initializer: f.init.is_some(),
                            span: f.span,
                        });
                    }
                    if let (Some(init), false) = (&f.init, *is_stub) {
                        if f.modifiers.is_static {
                            static_inits.push(Piece::StaticInit { class: scope, name: &f.name, init, span: f.span });
                        } else {
                            field_inits.push(Piece::FieldInit { name: &f.name, init, span: f.span });
                        }
                    }
                }
                let mut has_ctor = false;
                for m in &d.members {
                    let Member::Method(f) = m else { continue };
                    let sig = scope.method(f.name.clone(), f.params.len());
                    let (params, has_rest) = params_info(&names, &f.params, scope);
                    let is_ctor = f.name == CONSTRUCTOR;
                    has_ctor |= is_ctor;
                    let body = match (&f.body, *is_stub || is_interface) {
                        (Some(b), false) => {
                            let mut pieces = Vec::new();
                            let mut rest = b.stmts.as_slice();
                            if is_ctor {
                                if let Some(first) = rest.first().filter(|s| is_super_call(s)) {
                                    pieces.push(Piece::Stmt(first));
                                    rest = &rest[1..];
                                }
                                pieces.extend(field_inits.iter().copied());
                            }
                            pieces.extend(rest.iter().map(Piece::Stmt));
                            let input = MethodInput {
                                sig: sig.clone(),
                                is_static: f.modifiers.is_static,
                                params: &f.params,
                                body: pieces,
                                span: f.span,
                            };
                            let lowered = lowerer.lower_method(&input);
                            body_of(lowered, path, f.span, &mut diagnostics)
                        }
                        _ => None,
                    };
                    let m = ArkMethod {
                        signature: sig,
                        decorators: decorators(src, &f.decorators),
                        params,
                        has_rest,
                        declared_return: f.ret.as_ref().map(|t| names.resolve_type(t, scope)),
                        is_static: f.modifiers.is_static,
                        is_abstract: f.modifiers.is_abstract || (is_interface && f.body.is_none()) || (f.body.is_none() && !*is_stub),
                        is_stub: *is_stub,
                        synthesized: false,
                        body,
                        span: f.span,
                    };
                    add_method(&mut methods, &mut class, m, path, &mut diagnostics);
                }
                if !has_ctor && declares_ctor.contains(scope) && !*is_stub && !is_interface {
                    // Implicit constructor: `super()` when the parent constructs, then field initializers.
                    let super_stmt = Stmt {
                        kind: StmtKind::Expr(Expr {
                            kind: ExprKind::Call { callee: Box::new(Expr { kind: ExprKind::Super, span: d.span }), args: vec![] },
                            span: d.span,
                        }),
                        span: d.span,
                    };
                    let parent_constructs =
                        names.supers.get(scope).and_then(|r| r.sig.as_ref()).is_some_and(|s| names.with_ctor.contains(s));
                    let mut pieces = Vec::new();
                    if parent_constructs {
                        pieces.push(Piece::Stmt(&super_stmt));
                    }
                    pieces.extend(field_inits.iter().copied());
                    let sig = scope.method(CONSTRUCTOR, 0);
                    let input = MethodInput { sig: sig.clone(), is_static: false, params: &[], body: pieces, span: d.span };
                    let lowered = lowerer.lower_method(&input);
                    let body = body_of(lowered, path, d.span, &mut diagnostics);
                    let m = synthesized_method(sig, false, body, d.span);
                    add_method(&mut methods, &mut class, m, path, &mut diagnostics);
                }
                if !static_inits.is_empty() {
                    let sig = scope.method(STATIC_INIT, 0);
                    let input = MethodInput { sig: sig.clone(), is_static: true, params: &[], body: static_inits, span: d.span };
                    let lowered = lowerer.lower_method(&input);
                    let body = body_of(lowered, path, d.span, &mut diagnostics);
                    add_method(&mut methods, &mut class, synthesized_method(sig, true, body, d.span), path, &mut diagnostics);
                }
                if p.kind == ClassKind::Struct {
                    let state: BTreeSet<String> = class
                        .fields
                        .iter()
                        .filter(|f| f.decorators.iter().any(|d| d.name == "State"))
                        .map(|f| f.name.clone())
                        .collect();
                    let is_custom = |n: &str| matches!(names.component(n, scope), Component::Custom(_));
                    class.view_tree = build_view_tree(d, &state, &is_custom).ok();
                }
            } else {
                // Default class: top-level functions, variables and statements.
                let mut top = Vec::new();
                for item in &p.items {
                    match item {
                        Item::Function(f) => {
                            let sig = scope.method(f.name.clone(), f.params.len());
                            let (params, has_rest) = params_info(&names, &f.params, scope);
                            let body = match (&f.body, *is_stub) {
                                (Some(b), false) => {
                                    let input = MethodInput {
                                        sig: sig.clone(),
                                        is_static: true,
                                        params: &f.params,
                                        body: b.stmts.iter().map(Piece::Stmt).collect(),
                                        span: f.span,
                                    };
                                    let lowered = lowerer.lower_method(&input);
                                    body_of(lowered, path, f.span, &mut diagnostics)
                                }
                                _ => None,
                            };
                            let m = ArkMethod {
                                signature: sig,
                                decorators: decorators(src, &f.decorators),
                                params,
                                has_rest,
                                declared_return: f.ret.as_ref().map(|t| names.resolve_type(t, scope)),
                                is_static: true,
                                is_abstract: false,
                                is_stub: *is_stub,
                                synthesized: false,
                                body,
                                span: f.span,
                            };
                            add_method(&mut methods, &mut class, m, path, &mut diagnostics);
                        }
                        Item::Var(v) => {
                            if class.field(&v.name).is_none() {
                                class.fields.push(ArkField {
                                    name: v.name.clone(),
                                    declared: v.ty.as_ref().map(|t| names.resolve_type(t, scope)),
                                    decorators: decorators(src, &v.decorators),
                                    is_static: true,
                                    has_initializer: v.init.is_some(),
                                    span: v.span,
                                });
                            }
                            if let Some(init) = &v.init {
                                top.push(Piece::StaticInit { class: scope, name: &v.name, init, span: v.span });
                            }
                        }
                        Item::Stmt(s) => top.push(Piece::Stmt(s)),
                        _ => {}
                    }
                }
                if !top.is_empty() && !*is_stub {
                    let sig = scope.method(DEFAULT_CLASS, 0);
                    let input = MethodInput { sig: sig.clone(), is_static: true, params: &[], body: top, span: p.span };
                    let lowered = lowerer.lower_method(&input);
                    let body = body_of(lowered, path, p.span, &mut diagnostics);
                    add_method(&mut methods, &mut class, synthesized_method(sig, true, body, p.span), path, &mut diagnostics);
                }
            }
            classes.insert(p.sig.clone(), class);
        }

        for h in lowerer.take_hoisted() {
            let body = body_of(h.lowered, path, h.span, &mut diagnostics);
            let m = ArkMethod {
                signature: h.sig.clone(),
                decorators: Vec::new(),
                params: h.params,
                has_rest: false,
                declared_return: h.ret,
                is_static: h.is_static,
                is_abstract: false,
                is_stub: false,
                synthesized: true,
                body,
                span: h.span,
            };
            if let Some(class) = classes.get_mut(&h.sig.class) {
                add_method(&mut methods, class, m, path, &mut diagnostics);
            }
        }
        for a in std::mem::take(&mut lowerer.anon_classes) {
            let class = ArkClass {
                signature: a.sig.clone(),
                kind: ClassKind::Class,
                is_abstract: false,
                is_stub: false,
                super_class_name: None,
                implemented: Vec::new(),
                fields: a
                    .fields
                    .into_iter()
                    .map(|(name, declared)| ArkField { name, declared, decorators: vec![], is_static: false, has_initializer: true, span: a.span })
                    .collect(),
                methods: Vec::new(),
                decorators: Vec::new(),
                view_tree: None,
                span: a.span,
            };
            ark_files[fi].classes.push(a.sig.clone());
            classes.insert(a.sig, class);
        }
        for (k, v) in std::mem::take(&mut lowerer.unknown_components) {
            unknown_components.entry(k).or_default().extend(v);
        }
        diagnostics.append(&mut lowerer.diagnostics);
    }

    // Interfaces synthesized for components without a stub.
    let common = names.lookup_class("CommonMethod", &ClassSignature::new(SYNTHESIZED_STUBS, vec![], DEFAULT_CLASS));
    let mut synthesized = Vec::new();
    for (component, attrs) in unknown_components {
        let sig = ClassSignature::new(SYNTHESIZED_STUBS, vec![], crate::ir::lower::component_interface_name(&component));
        let mut class = ArkClass {
            signature: sig.clone(),
            kind: ClassKind::Class,
            is_abstract: false,
            is_stub: true,
            super_class_name: common.as_ref().map(|c| c.name.clone()),
            implemented: Vec::new(),
            fields: Vec::new(),
            methods: Vec::new(),
            decorators: Vec::new(),
            view_tree: None,
            span: Span::default(),
        };
        let rest = vec![("args".to_string(), Some(Type::Array(Box::new(Type::Any))))];
        let stub = |name: &str, is_static: bool, params: Vec<(String, Option<Type>)>| ArkMethod {
            signature: sig.method(name, params.len()),
            decorators: Vec::new(),
            has_rest: !params.is_empty(),
            params,
            declared_return: None,
            is_static,
            is_abstract: false,
            is_stub: true,
            synthesized: true,
            body: None,
            span: Span::default(),
        };
        let mut ms = vec![stub("create", true, rest.clone()), stub("pop", true, vec![])];
        for (name, _) in attrs.iter().map(|(n, a)| (n.clone(), *a)).collect::<BTreeMap<_, _>>() {
            let inherited = common.as_ref().is_some_and(|c| methods.keys().any(|m| &m.class == c && m.name == name));
            if !inherited {
                ms.push(stub(&name, false, rest.clone()));
            }
        }
        for m in ms {
            add_method(&mut methods, &mut class, m, SYNTHESIZED_STUBS, &mut diagnostics);
        }
        synthesized.push(sig.clone());
        classes.insert(sig, class);
    }

    // Final hierarchy over all classes, including synthesized ones.
    for sig in &synthesized {
        inputs.push(HierarchyInput { class: sig.clone(), extends: common.clone().map(Ok), implements: vec![] });
    }
    for c in classes.values() {
        if !inputs.iter().any(|i| i.class == c.signature) {
            inputs.push(HierarchyInput { class: c.signature.clone(), extends: None, implements: vec![] });
        }
    }
    let hierarchy =
        Hierarchy::build(&inputs).map_err(|cycle| SceneError::HierarchyCycle(cycle.iter().map(|c| c.to_string()).collect()))?;

    let n_user = project.files.len();
    let stub_files = ark_files.split_off(n_user);
    let mut sdk_stubs: Vec<ClassSignature> = classes.values().filter(|c| c.is_stub).map(|c| c.signature.clone()).collect();
    sdk_stubs.sort();
    Ok(Scene { files: ark_files, stub_files, classes, methods, sdk_stubs, hierarchy, config, diagnostics })
}

fn synthesized_method(sig: MethodSignature, is_static: bool, body: Option<ArkBody>, span: Span) -> ArkMethod {
    ArkMethod {
        signature: sig,
        decorators: Vec::new(),
        params: Vec::new(),
        has_rest: false,
        declared_return: None,
        is_static,
        is_abstract: false,
        is_stub: false,
        synthesized: true,
        body,
        span,
    }
}
