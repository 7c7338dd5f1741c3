use std::path::PathBuf;

use arklight::types::Type;
use arklight_testkit::checks::{golden_case, golden_files};

fn dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/golden").join(name)
}

fn run_all(name: &str, expected: usize) {
    let files = golden_files(&dir(name));
    assert_eq!(files.len(), expected, "golden files in {name}");
    let errors: Vec<String> = files.iter().filter_map(|f| golden_case(f).err()).collect();
    assert!(errors.is_empty(), "{}", errors.join("\n\n"));
}

#[test]
fn three_address_rules() {
    run_all("three_address", 5);
}

#[test]
fn desugaring_rules() {
    run_all("desugar", 9);
}

#[test]
fn object_literal_becomes_a_class() {
    let scene = golden_case(&dir("desugar").join("anonymous_class.ets")).unwrap();
    let class = scene.classes_named("Anonymous_1");
    assert_eq!(class.len(), 1);
    let field = class[0].field("name").expect("field `name`");
    assert_eq!(field.declared, Some(Type::String));
}
