use super::*;
use crate::scene::SceneConfig;

fn scene(src: &str) -> Scene {
    let s = Scene::from_sources(vec![("t.ets", src)], SceneConfig::default()).unwrap();
    assert!(s.diagnostics.iter().all(|d| !d.is_error()), "{:?}", s.diagnostics);
    s
}

fn sig(s: &Scene, text: &str) -> MethodSignature {
    s.resolve_method(text).unwrap()
}

fn pairs(cg: &CallGraph) -> BTreeSet<(String, String)> {
    cg.pairs().into_iter().map(|(a, b)| (a.short(), b.short())).collect()
}

fn set(items: &[(&str, &str)]) -> BTreeSet<(String, String)> {
    items.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

const CHAIN: &str = "
class A { f(): number { return 1; } }
class B extends A { f(): number { return 2; } }
class C extends B { f(): number { return 3; } }
function use(a: A): number { return a.f(); }
function main() { use(new C()); }
";

#[test]
fn two_level_overrides_give_three_cha_edges() {
    let s = scene(CHAIN);
    let cg = build_cha(&s, &[sig(&s, "%dflt.main/0")]).unwrap();
    let from_use: BTreeSet<String> = cg.callees(&sig(&s, "%dflt.use/1")).into_iter().map(|m| m.short()).collect();
    assert_eq!(from_use, ["A.f/0", "B.f/0", "C.f/0"].map(String::from).into());
    let rta = build_rta(&s, &[sig(&s, "%dflt.main/0")]).unwrap();
    let from_use: BTreeSet<String> = rta.callees(&sig(&s, "%dflt.use/1")).into_iter().map(|m| m.short()).collect();
    assert_eq!(from_use, ["C.f/0"].map(String::from).into());
}

#[test]
fn without_subclassing_cha_is_direct_resolution() {
    let s = scene("class K { g(): void {} }\nfunction h(): void {}\nfunction main() { let k = new K(); k.g(); h(); }");
    let cg = build_cha(&s, &[sig(&s, "%dflt.main/0")]).unwrap();
    assert_eq!(pairs(&cg), set(&[("%dflt.main/0", "K.g/0"), ("%dflt.main/0", "%dflt.h/0")]));
    assert!(cg.edges.iter().all(|e| !e.low_confidence));
}

#[test]
fn rta_equals_cha_when_every_class_is_instantiated() {
    let src = format!("{CHAIN}\nfunction all() {{ new A(); new B(); new C(); }}\nfunction main2() {{ all(); use(new A()); }}");
    let s = scene(&src);
    let e = [sig(&s, "%dflt.main2/0")];
    assert_eq!(build_cha(&s, &e).unwrap().edges, build_rta(&s, &e).unwrap().edges);
}

#[test]
fn instantiation_behind_a_filtered_edge_stays_unreached() {
    // Only `X` is created directly. `Y` is created inside `Y.m`, which is
    // reachable solely through the edge RTA filters, so the fixpoint never
    // admits it.
    let s = scene(
        "class X { m(): void {} }\nclass Y extends X { m(): void { new Z(); } }\nclass Z extends X { m(): void { new Y(); } }\nfunction main() { let x: X = new X(); x.m(); }",
    );
    let e = [sig(&s, "%dflt.main/0")];
    let rta = build_rta(&s, &e).unwrap();
    assert_eq!(pairs(&rta), set(&[("%dflt.main/0", "X.m/0")]));
    assert!(!rta.instantiated.iter().any(|c| c.name == "Y" || c.name == "Z"));
    let cha = build_cha(&s, &e).unwrap();
    assert_eq!(cha.callees(&e[0]).len(), 3);
}

#[test]
fn undeclared_callee_is_recorded_unresolved() {
    let s = scene("function main() { mystery(); }");
    let cg = build_cha(&s, &[sig(&s, "%dflt.main/0")]).unwrap();
    assert!(cg.edges.is_empty());
    assert_eq!(cg.unresolved.len(), 1);
    assert_eq!(cg.unresolved[0].callee_name, "mystery");
}

#[test]
fn entry_errors() {
    let s = scene("function main() {}");
    assert_eq!(build_cha(&s, &[]), Err(CgError::NoEntries));
    let bogus = ClassSignature::new("t.ets", vec![], "%dflt").method("nope", 0);
    assert!(matches!(build_rta(&s, &[bogus]), Err(CgError::UnknownEntries(v)) if v.len() == 1));
}

#[test]
fn resolve_static_free_and_stub_chain_calls() {
    let s = scene("struct S { build() { Column() { }.height(100) } }\nfunction f(a: number) {}\nfunction main() { f(1); }");
    let main = s.method(&sig(&s, "%dflt.main/0")).unwrap().body.as_ref().unwrap();
    let inv = main.cfg.stmts().find_map(|st| st.stmt.invoke()).unwrap();
    assert_eq!(resolve_static(&s, inv, None).unwrap().short(), "%dflt.f/1");

    let build = s.method(&sig(&s, "S.build/0")).unwrap().body.as_ref().unwrap();
    let height = build.cfg.stmts().filter_map(|st| st.stmt.invoke()).find(|i| i.method == "height").unwrap();
    let recv = build.type_of(height.base().unwrap());
    let target = resolve_static(&s, height, Some(&recv)).unwrap();
    assert_eq!(target.name, "height");
    assert_eq!(target.arity, 1);
    assert!(s.method(&target).unwrap().is_stub);
}

#[test]
fn unknown_receiver_falls_back_to_name_matching() {
    let s = scene("class P { q(): void {} }\nclass R { q(): void {} }\nfunction call(o) { o.q(); }\nfunction main() { call(new P()); }");
    let cg = build_cha(&s, &[sig(&s, "%dflt.main/0")]).unwrap();
    let low: Vec<String> = cg.edges.iter().filter(|e| e.low_confidence).map(|e| e.callee.short()).collect();
    assert_eq!(low, vec!["P.q/0", "R.q/0"]);
    let rta = build_rta(&s, &[sig(&s, "%dflt.main/0")]).unwrap();
    let low: Vec<String> = rta.edges.iter().filter(|e| e.low_confidence).map(|e| e.callee.short()).collect();
    assert_eq!(low, vec!["P.q/0"]);
}

#[test]
fn entry_order_does_not_matter() {
    let s = scene(&format!("{CHAIN}\nfunction other() {{ let b: B = new B(); b.f(); }}"));
    let a = sig(&s, "%dflt.main/0");
    let b = sig(&s, "%dflt.other/0");
    for algo in [Algorithm::Cha, Algorithm::Rta] {
        let x = build(&s, &[a.clone(), b.clone()], algo).unwrap();
        let y = build(&s, &[b.clone(), a.clone(), b.clone()], algo).unwrap();
        assert_eq!(emit(&x, Format::Json), emit(&y, Format::Json));
        assert_eq!(emit(&x, Format::Dot), emit(&y, Format::Dot));
    }
}

#[test]
fn json_has_sorted_keys_and_the_documented_shape() {
    let s = scene(CHAIN);
    let cg = build_cha(&s, &[sig(&s, "%dflt.main/0")]).unwrap();
    let text = emit(&cg, Format::Json);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["algorithm", "edges", "entryPoints", "nodes", "unresolved"]);
    let first = text.find("\"algorithm\"").unwrap();
    assert!(first < text.find("\"edges\"").unwrap());
    let e = &v["edges"][0];
    for k in ["caller", "callee", "line", "site"] {
        assert!(e.get(k).is_some(), "edge lacks {k}");
    }
}
