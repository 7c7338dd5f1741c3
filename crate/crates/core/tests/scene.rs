use std::collections::BTreeSet;

use arklight::scene::{ClassKind, MethodSignature, Scene, SceneConfig, SceneError, ViewNode, ViewNodeKind};
use arklight_testkit::checks::{bracketing_matches, component_events, fixtures_dir, golden_case, load_fixture};
use proptest::prelude::*;

fn names(n: &ViewNode) -> Vec<&str> {
    n.children.iter().map(|c| c.name.as_str()).collect()
}

#[test]
fn hello_ui_struct_model() {
    let scene = load_fixture("hello_ui");
    let index = scene.classes_named("Index");
    assert_eq!(index.len(), 1);
    let c = index[0];
    assert_eq!(c.kind, ClassKind::Struct);
    assert_eq!(c.decorators.iter().map(|d| d.name.as_str()).collect::<Vec<_>>(), ["Entry", "Component"]);
    let msg = c.field("message").unwrap();
    assert_eq!(msg.decorators.iter().map(|d| d.name.as_str()).collect::<Vec<_>>(), ["State"]);
    let declared: BTreeSet<&str> =
        scene.methods_of(&c.signature).filter(|m| !m.is_hoisted()).map(|m| m.signature.name.as_str()).collect();
    assert_eq!(declared, ["build", "constructor"].into());
}

#[test]
fn hello_ui_view_tree() {
    let scene = load_fixture("hello_ui");
    let tree = scene.classes_named("Index")[0].view_tree.as_ref().unwrap();
    assert!(!tree.synthetic_root);
    assert_eq!(tree.root.name, "Row");
    assert_eq!(names(&tree.root), ["Column"]);
    let column = &tree.root.children[0];
    assert_eq!(names(column), ["Text", "Divider", "Button"]);
    assert_eq!(column.children[0].state_bindings, ["message"]);
    assert!(column.children[1..].iter().all(|c| c.state_bindings.is_empty()));
    fn all_system(n: &ViewNode) -> bool {
        n.kind == ViewNodeKind::System && n.children.iter().all(all_system)
    }
    assert!(all_system(&tree.root));
}

#[test]
fn hello_ui_build_golden() {
    let scene = golden_case(&fixtures_dir().join("hello_ui/index.ets")).unwrap();
    let build = scene.resolve_method("Index.build/0").unwrap();
    let body = scene.method(&build).unwrap().body.as_ref().unwrap();
    let tree = scene.classes_named("Index")[0].view_tree.as_ref().unwrap();
    bracketing_matches(&component_events(&body.cfg), &tree.preorder()).unwrap();
}

#[test]
fn animals_scene_counts() {
    let scene = load_fixture("animals");
    assert_eq!(scene.files.len(), 1);
    let user: Vec<&str> = scene.classes.values().filter(|c| !c.is_stub).map(|c| c.signature.name.as_str()).collect();
    assert_eq!(user.len(), 5, "{user:?}");
    assert_eq!(user.iter().filter(|n| **n == "%dflt").count(), 1);
    assert!(scene.resolve_method("%dflt.main/0").is_ok());
    assert_eq!(scene.default_entries(), vec![scene.resolve_method("%dflt.main/0").unwrap()]);
}

#[test]
fn empty_project_is_an_error() {
    let none: Vec<(String, String)> = Vec::new();
    assert_eq!(Scene::from_sources(none, SceneConfig::default()).unwrap_err(), SceneError::EmptyProject);
    let dir = tempfile::tempdir().unwrap();
    let r = Scene::load(SceneConfig { root: Some(dir.path().to_path_buf()), ..Default::default() });
    assert_eq!(r.unwrap_err(), SceneError::EmptyProject);
}

#[test]
fn duplicate_class_lists_both_locations() {
    let r = Scene::from_sources(vec![("a.ets", "class A {}\nclass A {}")], SceneConfig::default());
    let Err(SceneError::DuplicateClass { class, first, second }) = r else { panic!("{r:?}") };
    assert!(class.ends_with(": A"), "{class}");
    assert_ne!(first, second);
}

#[test]
fn inheritance_cycle_is_an_error() {
    let r = Scene::from_sources(vec![("a.ets", "class A extends B {}\nclass B extends A {}")], SceneConfig::default());
    let Err(SceneError::HierarchyCycle(names)) = r else { panic!("{r:?}") };
    assert!(names.iter().any(|n| n.contains('A')) && names.iter().any(|n| n.contains('B')));
}

#[test]
fn unresolved_superclass_becomes_a_flagged_root() {
    let scene = Scene::from_sources(vec![("a.ets", "class A extends Missing {}")], SceneConfig::default()).unwrap();
    let a = &scene.classes_named("A")[0].signature;
    assert!(scene.hierarchy.roots().contains(a));
    assert_eq!(scene.hierarchy.unresolved_super(a), Some("Missing"));
}

fn every_scene() -> Vec<Scene> {
    let mut v: Vec<Scene> =
        ["hello_ui", "animals", "uninit_field", "two_callers", "branch_field", "scan_hilog"].iter().map(|n| load_fixture(n)).collect();
    v.push(Scene::from_sources(arklight_testkit::gen::corpus(6, 1), SceneConfig::default()).unwrap());
    v
}

#[test]
fn indexes_cover_exactly_the_declarations() {
    for scene in every_scene() {
        let mut classes = BTreeSet::new();
        fn walk(ns: &[arklight::scene::ArkNamespace], out: &mut BTreeSet<arklight::scene::ClassSignature>) {
            for n in ns {
                out.extend(n.classes.iter().cloned());
                out.insert(n.default_class.clone());
                walk(&n.namespaces, out);
            }
        }
        for f in scene.files.iter().chain(&scene.stub_files) {
            classes.extend(f.classes.iter().cloned());
            classes.insert(f.default_class.clone());
            walk(&f.namespaces, &mut classes);
        }
        let indexed: BTreeSet<_> = scene.classes.keys().cloned().collect();
        let synthesized: BTreeSet<_> = indexed.difference(&classes).filter(|c| !c.file.starts_with("@stubs/")).collect();
        assert!(synthesized.is_empty(), "classes indexed but not declared: {synthesized:?}");
        let methods: BTreeSet<MethodSignature> = scene.classes.values().flat_map(|c| c.methods.iter().cloned()).collect();
        assert_eq!(methods, scene.methods.keys().cloned().collect::<BTreeSet<_>>());
        for (sig, m) in &scene.methods {
            assert_eq!(&m.signature, sig);
            if let Some(b) = &m.body {
                assert!(!b.cfg.is_empty(), "{sig}");
            }
        }
    }
}

#[test]
fn signature_text_is_injective() {
    for scene in every_scene() {
        let texts: BTreeSet<String> = scene.methods.keys().map(|m| m.to_string()).collect();
        assert_eq!(texts.len(), scene.methods.len());
        for m in scene.methods.keys() {
            assert_eq!(MethodSignature::parse(&m.to_string()).as_ref(), Some(m));
            assert_eq!(scene.resolve_method(&m.to_string()).as_ref(), Ok(m));
        }
    }
}

#[test]
fn config_json_uses_camel_case() {
    let c = SceneConfig::from_json(r#"{"root": "app", "include": ["**/*.ets"], "entryPoints": ["%dflt.main/0"], "table3Literal": false}"#).unwrap();
    assert_eq!(c.entry_points, ["%dflt.main/0"]);
    assert!(!c.table3_literal);
    assert!(SceneConfig::from_json("{}").unwrap().table3_literal);
    assert!(SceneConfig::from_json("[").is_err());
}

// ---- generated component trees ----

#[derive(Debug, Clone)]
struct Comp {
    name: &'static str,
    state: bool,
    children: Vec<Comp>,
}

const CONTAINERS: [&str; 4] = ["Row", "Column", "Stack", "List"];
const LEAVES: [&str; 4] = ["Text", "Button", "Divider", "Image"];

fn comp() -> impl Strategy<Value = Comp> {
    let leaf = (0..LEAVES.len(), any::<bool>()).prop_map(|(i, state)| Comp { name: LEAVES[i], state, children: vec![] });
    leaf.prop_recursive(4, 24, 4, |inner| {
        (0..CONTAINERS.len(), any::<bool>(), proptest::collection::vec(inner, 0..4))
            .prop_map(|(i, state, children)| Comp { name: CONTAINERS[i], state, children })
    })
}

fn render(c: &Comp, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let arg = if c.state { "this.label" } else if c.name == "Text" { "'t'" } else { "" };
    out.push_str(&format!("{pad}{}({arg})", c.name));
    if !c.children.is_empty() || CONTAINERS.contains(&c.name) {
        out.push_str(" {\n");
        for ch in &c.children {
            render(ch, depth + 1, out);
        }
        out.push_str(&format!("{pad}}}"));
    }
    out.push_str(&format!("\n{pad}.width(100)\n"));
}

fn preorder<'a>(c: &'a Comp, out: &mut Vec<&'a str>) {
    out.push(c.name);
    c.children.iter().for_each(|x| preorder(x, out));
}

fn check_node(c: &Comp, n: &ViewNode) -> Result<(), TestCaseError> {
    prop_assert_eq!(c.name, n.name.as_str());
    prop_assert_eq!(c.state, n.state_bindings == ["label"]);
    prop_assert_eq!(c.children.len(), n.children.len());
    for (a, b) in c.children.iter().zip(&n.children) {
        check_node(a, b)?;
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn view_tree_mirrors_component_nesting(roots in proptest::collection::vec(comp(), 0..3)) {
        let mut body = String::new();
        for r in &roots {
            render(r, 2, &mut body);
        }
        let src = format!("@Component\nstruct Gen {{\n  @State label: string = 'x'\n  build() {{\n{body}  }}\n}}\n");
        let scene = Scene::from_sources(vec![("gen.ets", src.as_str())], SceneConfig::default()).unwrap();
        prop_assert!(scene.diagnostics.iter().all(|d| !d.is_error()), "{}\n{:?}", src, scene.diagnostics);
        let class = scene.classes_named("Gen")[0];
        let tree = class.view_tree.as_ref().unwrap();
        let mut want = Vec::new();
        roots.iter().for_each(|r| preorder(r, &mut want));
        prop_assert_eq!(tree.preorder(), want.clone());
        prop_assert_eq!(tree.synthetic_root, roots.len() != 1);
        let top: Vec<&ViewNode> = if tree.synthetic_root { tree.root.children.iter().collect() } else { vec![&tree.root] };
        for (c, n) in roots.iter().zip(top) {
            check_node(c, n)?;
        }
        let build = scene.resolve_method("Gen.build/0").unwrap();
        let cfg = &scene.method(&build).unwrap().body.as_ref().unwrap().cfg;
        let r = bracketing_matches(&component_events(cfg), &want);
        prop_assert!(r.is_ok(), "{:?}\n{}", r, src);
    }
}
