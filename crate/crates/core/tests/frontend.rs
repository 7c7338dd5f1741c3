use std::mem::discriminant;

use arklight::frontend::ast::{Item, Member};
use arklight::frontend::{build_globset, parse, parse_project, SourceFile, DEFAULT_INCLUDE};
use arklight_testkit::checks::fixtures_dir;
use arklight_testkit::gen::{corpus, hierarchy_program};

fn globs() -> globset::GlobSet {
    build_globset(&DEFAULT_INCLUDE.iter().map(|s| s.to_string()).collect::<Vec<_>>()).unwrap()
}

fn all_fixture_sources() -> Vec<SourceFile> {
    let mut out = Vec::new();
    for e in walkdir::WalkDir::new(fixtures_dir()) {
        let e = e.unwrap();
        if e.path().extension().is_some_and(|x| x == "ets") {
            out.push(SourceFile::new(e.path().display().to_string(), std::fs::read_to_string(e.path()).unwrap()));
        }
    }
    out
}

#[test]
fn project_files_are_ordered_by_path() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("b.ets"), "function b() {}").unwrap();
    std::fs::write(dir.path().join("a.ets"), "function a() {}").unwrap();
    std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let p = parse_project(dir.path(), &globs());
    let paths: Vec<&str> = p.files.iter().map(|f| f.source.path.as_str()).collect();
    assert_eq!(paths, ["a.ets", "b.ets"]);
}

#[test]
fn malformed_file_is_kept_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("good.ets"), "function ok(): number { return 1; }").unwrap();
    std::fs::write(dir.path().join("bad.ets"), "function broken( { let = ; }\nfunction fine() {}").unwrap();
    let p = parse_project(dir.path(), &globs());
    assert_eq!(p.files.len(), 2);
    let bad = &p.files[0];
    assert_eq!(bad.source.path, "bad.ets");
    assert!(bad.has_errors());
    assert!(!p.files[1].has_errors());
}

#[test]
fn animals_fixture_is_one_clean_file() {
    let p = parse_project(&fixtures_dir().join("animals"), &globs());
    assert_eq!(p.files.len(), 1);
    assert!(p.all_diagnostics().is_empty());
}

#[test]
fn hello_ui_parses_to_a_decorated_struct() {
    let p = parse_project(&fixtures_dir().join("hello_ui"), &globs());
    let m = &p.files[0].module;
    assert!(p.files[0].diagnostics.is_empty());
    let [Item::Class(c)] = m.items.as_slice() else { panic!("expected one declaration") };
    assert_eq!(c.name, "Index");
    let decos: Vec<&str> = c.decorators.iter().map(|d| d.name.as_str()).collect();
    assert_eq!(decos, ["Entry", "Component"]);
    let Member::Field(f) = &c.members[0] else { panic!("field first") };
    assert_eq!(f.name, "message");
    assert_eq!(f.decorators.len(), 1);
    assert_eq!(f.decorators[0].name, "State");
    assert!(matches!(&c.members[1], Member::Method(b) if b.name == "build"));
}

fn items_of(items: &[Item], out: &mut Vec<Item>) {
    for i in items {
        out.push(i.clone());
        if let Item::Namespace(n) = i {
            items_of(&n.items, out);
        }
    }
}

#[test]
fn declaration_spans_reparse_to_the_same_kind() {
    let mut sources = all_fixture_sources();
    for (p, t) in corpus(5, 3) {
        sources.push(SourceFile::new(p, t));
    }
    for seed in 0..20 {
        sources.push(SourceFile::new(format!("h{seed}.ets"), hierarchy_program(seed)));
    }
    let mut checked = 0;
    for src in &sources {
        let (m, _) = parse(src);
        let mut items = Vec::new();
        items_of(&m.items, &mut items);
        for it in items.iter().filter(|i| !matches!(i, Item::Stmt(_))) {
            let sp = it.span();
            assert!(sp.lo <= sp.hi && sp.hi as usize <= src.text.len());
            let slice = &src.text[sp.lo as usize..sp.hi as usize];
            let (again, diags) = parse(&SourceFile::new("slice.ets", slice));
            assert!(diags.iter().all(|d| !d.is_error()), "{}: {slice}\n{diags:?}", src.path);
            assert_eq!(again.items.len(), 1, "{}: {slice}", src.path);
            assert_eq!(discriminant(&again.items[0]), discriminant(it), "{}: {slice}", src.path);
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn decorators_attach_to_the_next_declaration_in_order() {
    let src = SourceFile::new(
        "d.ets",
        "@A\nclass X {\n  @B f: number = 1\n  @C @D\n  m() {}\n}\n@E\nfunction g() {}\n@F(1, 'x')\nstruct S { build() {} }",
    );
    let (m, d) = parse(&src);
    assert!(d.is_empty(), "{d:?}");
    let Item::Class(x) = &m.items[0] else { panic!() };
    assert_eq!(x.decorators.iter().map(|d| &d.name[..]).collect::<Vec<_>>(), ["A"]);
    let Member::Field(f) = &x.members[0] else { panic!() };
    assert_eq!(f.decorators[0].name, "B");
    let Member::Method(mm) = &x.members[1] else { panic!() };
    assert_eq!(mm.decorators.iter().map(|d| &d.name[..]).collect::<Vec<_>>(), ["C", "D"]);
    let Item::Function(g) = &m.items[1] else { panic!() };
    assert_eq!(g.decorators[0].name, "E");
    let Item::Class(s) = &m.items[2] else { panic!() };
    assert_eq!(s.decorators[0].name, "F");
    assert_eq!(s.decorators[0].args.len(), 2);
}

#[test]
fn parsing_is_deterministic() {
    for src in all_fixture_sources() {
        assert_eq!(parse(&src), parse(&src), "{}", src.path);
    }
}
