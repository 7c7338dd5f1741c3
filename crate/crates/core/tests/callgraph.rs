use std::collections::BTreeSet;

use arklight::callgraph::{build, emit, Algorithm, Format};
use arklight::scene::{Scene, SceneConfig};
use arklight_testkit::checks::{benchmark_case, benchmark_dirs, dynamic_edges_in_cha, load_fixture, rta_within_cha};
use arklight_testkit::gen::hierarchy_program;
use proptest::prelude::*;

fn short_pairs(scene: &Scene, algo: Algorithm) -> BTreeSet<(String, String)> {
    let cg = build(scene, &scene.default_entries(), algo).unwrap();
    cg.pairs().into_iter().map(|(a, b)| (a.short(), b.short())).collect()
}

fn pairs(items: &[(&str, &str)]) -> BTreeSet<(String, String)> {
    items.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

#[test]
fn animals_cha_adds_all_three_overrides() {
    let scene = load_fixture("animals");
    assert_eq!(scene.default_entries().len(), 1);
    let want = pairs(&[
        ("%dflt.main/0", "%dflt.makeAnimalSound/1"),
        ("%dflt.makeAnimalSound/1", "Dog.sound/0"),
        ("%dflt.makeAnimalSound/1", "Cat.sound/0"),
        ("%dflt.makeAnimalSound/1", "Cow.sound/0"),
    ]);
    assert_eq!(short_pairs(&scene, Algorithm::Cha), want);
}

#[test]
fn animals_rta_drops_the_uninstantiated_cow() {
    let scene = load_fixture("animals");
    let want = pairs(&[
        ("%dflt.main/0", "%dflt.makeAnimalSound/1"),
        ("%dflt.makeAnimalSound/1", "Dog.sound/0"),
        ("%dflt.makeAnimalSound/1", "Cat.sound/0"),
    ]);
    assert_eq!(short_pairs(&scene, Algorithm::Rta), want);
}

#[test]
fn animals_dot_has_five_nodes_and_four_edges() {
    let scene = load_fixture("animals");
    let cg = build(&scene, &scene.default_entries(), Algorithm::Cha).unwrap();
    let dot = emit(&cg, Format::Dot);
    assert_eq!(dot.lines().filter(|l| l.contains("[label=\"") && !l.contains("->")).count(), 5);
    assert_eq!(dot.lines().filter(|l| l.contains(" -> ")).count(), 4);
    assert!(dot.contains("label=\"line "));
    let again = build(&load_fixture("animals"), &scene.default_entries(), Algorithm::Cha).unwrap();
    assert_eq!(emit(&again, Format::Dot), dot);
}

#[test]
fn animal_hierarchy() {
    let scene = load_fixture("animals");
    let animal = &scene.classes_named("Animal")[0].signature;
    let kids: BTreeSet<&str> = scene.hierarchy.children(animal).iter().map(|c| c.name.as_str()).collect();
    assert_eq!(kids, ["Cat", "Cow", "Dog"].into());
}

#[test]
fn benchmark_cha_recall_and_rta_precision() {
    let dirs = benchmark_dirs();
    assert_eq!(dirs.len(), 20);
    let mut problems = Vec::new();
    let (mut truth, mut found, mut rta, mut correct) = (0, 0, 0, 0);
    for d in &dirs {
        let name = d.file_name().unwrap().to_string_lossy().to_string();
        match benchmark_case(d) {
            Ok(s) => {
                if let Some(m) = &s.truth_mismatch {
                    problems.push(format!("{name}: ground truth disagrees with execution: {m}"));
                }
                truth += s.truth;
                found += s.cha_found;
                rta += s.rta_edges;
                correct += s.rta_correct;
            }
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }
    assert!(problems.is_empty(), "{}", problems.join("\n"));
    assert_eq!(found, truth, "CHA recall");
    assert_eq!(correct, rta, "RTA precision");
}

#[test]
fn dynamic_calls_of_fixtures_are_in_cha() {
    for name in ["animals", "uninit_field", "uninit_field_fixed", "two_callers", "branch_field", "scan_hilog"] {
        let scene = load_fixture(name);
        dynamic_edges_in_cha(&scene, &scene.default_entries()).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for d in benchmark_dirs() {
        let scene = Scene::load(SceneConfig { root: Some(d.clone()), ..Default::default() }).unwrap();
        let n = dynamic_edges_in_cha(&scene, &scene.default_entries()).unwrap_or_else(|e| panic!("{}: {e}", d.display()));
        assert!(n > 0);
    }
}

fn hierarchy_scene(seed: u64) -> Scene {
    let src = hierarchy_program(seed);
    let scene = Scene::from_sources(vec![("h.ets", src.as_str())], SceneConfig::default()).unwrap();
    assert!(scene.diagnostics.iter().all(|d| !d.is_error()), "{src}\n{:?}", scene.diagnostics);
    scene
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn rta_is_a_subgraph_of_cha(seed in any::<u64>()) {
        let scene = hierarchy_scene(seed);
        let entries = scene.default_entries();
        prop_assert!(rta_within_cha(&scene, &entries).is_ok(), "{}", hierarchy_program(seed));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn executed_calls_are_cha_edges(seed in any::<u64>()) {
        let scene = hierarchy_scene(seed);
        let entries = scene.default_entries();
        let r = dynamic_edges_in_cha(&scene, &entries);
        prop_assert!(r.is_ok(), "{:?}\n{}", r, hierarchy_program(seed));
    }
}
