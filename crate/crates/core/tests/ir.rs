use arklight::ir::{dump_method, Stmt};
use arklight::scene::{Scene, SceneConfig};
use arklight_testkit::checks::{benchmark_dirs, cfg_well_formed, fixtures_dir, three_address_form};
use arklight_testkit::gen;
use proptest::prelude::*;

fn check_scene(scene: &Scene) -> Result<usize, String> {
    let mut n = 0;
    for (sig, m) in &scene.methods {
        let Some(body) = &m.body else { continue };
        cfg_well_formed(&body.cfg).map_err(|e| format!("{sig} (cfg): {e}"))?;
        cfg_well_formed(&body.original_cfg).map_err(|e| format!("{sig} (original): {e}"))?;
        three_address_form(&body.cfg).map_err(|e| format!("{sig}: {e}"))?;
        n += 1;
    }
    Ok(n)
}

#[test]
fn fixture_bodies_are_well_formed_three_address_code() {
    let mut dirs: Vec<_> = std::fs::read_dir(fixtures_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_dir() && p.file_name().unwrap() != "bench")
        .collect();
    dirs.extend(benchmark_dirs());
    let mut bodies = 0;
    for d in dirs {
        let scene = Scene::load(SceneConfig { root: Some(d.clone()), ..Default::default() }).unwrap();
        bodies += check_scene(&scene).unwrap_or_else(|e| panic!("{}: {e}", d.display()));
    }
    assert!(bodies > 100, "{bodies}");
}

#[test]
fn sugar_appears_only_in_the_original_cfg() {
    let src = "class P { v: number = 0 }\nfunction f(p: P, s: string): string {\n  p.v += 2;\n  p.v++;\n  let o = { a: 1 };\n  return `x${s}y`;\n}";
    let scene = Scene::from_sources(vec![("a.ets", src)], SceneConfig::default()).unwrap();
    let body = scene.method(&scene.resolve_method("%dflt.f/2").unwrap()).unwrap().body.as_ref().unwrap();
    let sugar = |c: &arklight::ir::Cfg| c.stmts().filter(|s| matches!(s.stmt, Stmt::Sugar(_))).count();
    assert_eq!(sugar(&body.original_cfg), 4);
    assert_eq!(sugar(&body.cfg), 0);
}

#[test]
fn lowering_is_deterministic() {
    let files = gen::corpus(8, 7);
    let dump = || {
        let scene = Scene::from_sources(files.clone(), SceneConfig::default()).unwrap();
        scene.methods.iter().filter_map(|(s, m)| m.body.as_ref().map(|b| dump_method(s, b))).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(dump(), dump());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn generated_programs_lower_to_well_formed_cfgs(seed in any::<u64>()) {
        for src in [gen::int_program(seed), gen::hierarchy_program(seed)] {
            let scene = Scene::from_sources(vec![("g.ets", src.as_str())], SceneConfig::default()).unwrap();
            let r = check_scene(&scene);
            prop_assert!(r.is_ok(), "{:?}\n{}", r, src);
        }
    }
}
