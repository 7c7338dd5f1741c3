use arklight_testkit::checks::semantics_preserved;
use arklight_testkit::gen::int_program;

#[test]
fn lowering_preserves_integer_semantics() {
    let mut failures = Vec::new();
    for seed in 0..300 {
        let src = int_program(seed);
        if let Err(e) = semantics_preserved(&src) {
            failures.push(format!("seed {seed}: {e}\n{src}"));
        }
    }
    assert!(failures.is_empty(), "{} of 300 programs differ:\n{}", failures.len(), failures.iter().take(3).cloned().collect::<Vec<_>>().join("\n"));
}

#[test]
fn hand_written_programs() {
    let cases = [
        "function main(): void {\n  let a = 1;\n  let b = a++ + ++a;\n  let c = (a > 2 && b) || 7;\n  a += b * 2;\n}\n",
        "function main(): void {\n  let s = 0;\n  for (let i = 0; i < 5; i++) {\n    if (i == 3) {\n      continue;\n    }\n    s += i;\n  }\n  let t = 'x' + s;\n}\n",
        "function main(): void {\n  let n = 10;\n  let steps = 0;\n  while (n != 1) {\n    n = n % 2 == 0 ? n / 2 : 3 * n + 1;\n    steps++;\n  }\n}\n",
    ];
    for c in cases {
        semantics_preserved(c).unwrap_or_else(|e| panic!("{e}\n{c}"));
    }
}
