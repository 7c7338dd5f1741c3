use std::collections::BTreeSet;

use arklight::callgraph::{build, Algorithm};
use arklight::ifds::{self, analyze, null_pointer_analysis, EdgeKind, FlowFunctions, NodeId, NpFact, SolverOptions, Supergraph};
use arklight::scene::{Scene, SceneConfig};
use arklight_testkit::checks::{ifds_matches_oracle, load_fixture};
use arklight_testkit::ifds_oracle::meet_over_valid_paths;
use proptest::prelude::*;

const FIXTURES: [&str; 6] = ["animals", "uninit_field", "uninit_field_fixed", "two_callers", "branch_field", "scan_hilog"];

fn findings(name: &str) -> Vec<ifds::Finding> {
    let scene = load_fixture(name);
    let cg = build(&scene, &scene.default_entries(), Algorithm::Cha).unwrap();
    null_pointer_analysis(&scene, &cg).unwrap()
}

#[test]
fn uninitialized_field_is_reported_once() {
    let f = findings("uninit_field");
    assert_eq!(f.len(), 1, "{f:?}");
    let f = &f[0];
    assert!(f.method.ends_with("T.printP/0"));
    assert_eq!(f.path, "this.p");
    assert_eq!(f.line, 4);
    let methods: Vec<&str> = f.trace.iter().map(|t| t.method.rsplit(' ').next().unwrap()).collect();
    assert_eq!(methods.first(), Some(&"%dflt.Main/0"));
    assert_eq!(methods.last(), Some(&"T.printP/0"));
    assert!(f.trace.iter().any(|t| t.line == 8), "trace passes the call site: {:?}", f.trace);
}

#[test]
fn constructor_initialization_removes_the_finding() {
    assert!(findings("uninit_field_fixed").is_empty());
}

#[test]
fn one_branch_assignment_still_may_be_undefined() {
    let f = findings("branch_field");
    assert_eq!(f.len(), 1, "{f:?}");
    assert_eq!(f[0].path, "this.config");
    assert!(f[0].method.ends_with("Service.level/0"));
}

#[test]
fn facts_do_not_leak_between_callers() {
    let f = findings("two_callers");
    assert_eq!(f.len(), 1, "{f:?}");
    assert!(f[0].method.ends_with("%dflt.first/0"));
    assert_eq!(f[0].line, 16);
}

#[test]
fn uninit_field_supergraph_edges() {
    let scene = load_fixture("uninit_field");
    let cg = build(&scene, &scene.default_entries(), Algorithm::Cha).unwrap();
    let sg = Supergraph::build(&scene, &cg).unwrap();
    let print_p = sg.method_id(&scene.resolve_method("T.printP/0").unwrap()).unwrap();
    let main = sg.method_id(&scene.resolve_method("%dflt.Main/0").unwrap()).unwrap();
    let calls: Vec<_> = sg.edges.iter().filter(|e| e.kind == EdgeKind::Call).collect();
    assert_eq!(calls.len(), 1);
    assert_eq!(sg.method_of(calls[0].from), main);
    assert_eq!(sg.line(calls[0].from), 8);
    assert_eq!(calls[0].to, sg.entry_of(print_p));
    let rets: Vec<_> = sg.edges.iter().filter(|e| e.kind == EdgeKind::ReturnToExit).collect();
    assert_eq!(rets.len(), sg.exits_of(print_p).len());
    assert!(rets.iter().all(|e| sg.method_of(e.from) == print_p && sg.method_of(e.to) == main));
    assert!(sg.edges.iter().any(|e| e.kind == EdgeKind::CallToReturn && e.from == calls[0].from));
    // console.log is a stub: its call site gets only a CallToReturn edge.
    let log_site = sg.edges.iter().find(|e| e.kind == EdgeKind::CallToReturn && sg.method_of(e.from) == print_p).unwrap();
    assert!(sg.out_edges(log_site.from).all(|e| e.kind == EdgeKind::CallToReturn));
}

#[test]
fn edge_kind_counts_follow_call_sites() {
    for name in FIXTURES {
        let scene = load_fixture(name);
        let cg = build(&scene, &scene.default_entries(), Algorithm::Cha).unwrap();
        let sg = Supergraph::build(&scene, &cg).unwrap();
        for n in 0..sg.node_count() {
            let is_call = sg.stmt(n).invoke().is_some();
            let succs = sg.return_sites(n).len();
            let kinds: Vec<EdgeKind> = sg.out_edges(n).map(|e| e.kind).collect();
            let count = |k| kinds.iter().filter(|x| **x == k).count();
            if is_call {
                assert_eq!(count(EdgeKind::Call), sg.callees(n).len(), "{name} node {n}");
                assert_eq!(count(EdgeKind::CallToReturn), succs, "{name} node {n}");
                assert_eq!(count(EdgeKind::Normal), 0);
            } else {
                assert_eq!(count(EdgeKind::Call) + count(EdgeKind::CallToReturn), 0);
            }
        }
        for m in 0..sg.methods.len() {
            let exits = sg.exits_of(m).len();
            let returns: usize = sg.callers(m).iter().map(|&c| sg.return_sites(c).len()).sum();
            let got = sg.edges.iter().filter(|e| e.kind == EdgeKind::ReturnToExit && sg.method_of(e.from) == m).count();
            assert_eq!(got, exits * returns, "{name} method {m}");
        }
    }
}

#[test]
fn single_method_has_normal_edges_only() {
    let scene = Scene::from_sources(vec![("a.ets", "function main() { let x = 1; if (x > 0) { x = 2; } }")], SceneConfig::default()).unwrap();
    let cg = build(&scene, &scene.default_entries(), Algorithm::Cha).unwrap();
    let sg = Supergraph::build(&scene, &cg).unwrap();
    assert!(sg.edges.iter().all(|e| e.kind == EdgeKind::Normal));
    assert!(!sg.edges.is_empty());
}

#[test]
fn tabulation_matches_valid_path_enumeration() {
    for name in FIXTURES {
        let scene = load_fixture(name);
        let methods = ifds_matches_oracle(&scene, &scene.default_entries(), 8).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(methods <= 10, "{name} has {methods} methods");
    }
}

#[test]
fn zero_holds_at_every_reachable_node() {
    for name in FIXTURES {
        let scene = load_fixture(name);
        let cg = build(&scene, &scene.default_entries(), Algorithm::Cha).unwrap();
        let sg = Supergraph::build(&scene, &cg).unwrap();
        let report = analyze(&sg, SolverOptions::default());
        for (n, facts) in &report.result.facts {
            assert!(facts.contains(&NpFact::Zero), "{name}: node {n}");
        }
        // Every node of a method reached from an entry is reached.
        let reached: BTreeSet<usize> = report.result.facts.keys().map(|&n| sg.method_of(n)).collect();
        for &e in &sg.entry_points {
            assert!(reached.contains(&e));
        }
    }
}

#[test]
fn witness_chains_follow_supergraph_edges() {
    for name in FIXTURES {
        let scene = load_fixture(name);
        let cg = build(&scene, &scene.default_entries(), Algorithm::Cha).unwrap();
        let sg = Supergraph::build(&scene, &cg).unwrap();
        let report = analyze(&sg, SolverOptions::default());
        for (n, facts) in &report.result.facts {
            for f in facts {
                let chain = report.result.trace(*n, f);
                let (start, _) = &chain[0];
                assert!(sg.entry_points.iter().any(|&e| sg.entry_of(e) == *start), "{name}: chain starts at node {start}");
                for w in chain.windows(2) {
                    let (a, b) = (w[0].0, w[1].0);
                    assert!(sg.out_edges(a).any(|e| e.to == b), "{name}: no edge {a} -> {b}");
                }
            }
        }
    }
}

#[test]
fn summaries_do_not_change_the_result() {
    for name in FIXTURES {
        let scene = load_fixture(name);
        let cg = build(&scene, &scene.default_entries(), Algorithm::Cha).unwrap();
        let sg = Supergraph::build(&scene, &cg).unwrap();
        let a = analyze(&sg, SolverOptions { summaries: true });
        let b = analyze(&sg, SolverOptions { summaries: false });
        assert_eq!(a.result.facts, b.result.facts, "{name}");
        assert_eq!(a.findings.len(), b.findings.len(), "{name}");
    }
}

/// Client with integer facts: each node generates and kills facts picked
/// by a hash of its id, calls pass only even facts into callees, and
/// call-to-return edges pass only odd ones.
struct Parity {
    salt: u64,
}

impl Parity {
    fn pick(&self, n: NodeId, k: u64) -> u32 {
        let mut h = (n as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ self.salt.wrapping_add(k);
        h ^= h >> 29;
        h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        (h >> 40) as u32 % 6 + 1
    }
}

impl FlowFunctions for Parity {
    type Fact = u32;

    fn zero(&self) -> u32 {
        0
    }

    fn normal(&self, from: NodeId, _to: NodeId, f: &u32) -> Vec<u32> {
        if *f == 0 {
            return if self.pick(from, 0) % 3 == 0 { vec![self.pick(from, 1)] } else { vec![] };
        }
        if *f == self.pick(from, 2) {
            vec![]
        } else {
            vec![*f]
        }
    }

    fn call(&self, _c: NodeId, _e: NodeId, f: &u32) -> Vec<u32> {
        if f % 2 == 0 {
            vec![*f]
        } else {
            vec![]
        }
    }

    fn return_flow(&self, _c: NodeId, exit: NodeId, _r: NodeId, f: &u32) -> Vec<u32> {
        if *f == 0 {
            vec![self.pick(exit, 3)]
        } else {
            vec![*f]
        }
    }

    fn call_to_return(&self, _c: NodeId, _r: NodeId, f: &u32) -> Vec<u32> {
        if f % 2 == 1 {
            vec![*f]
        } else {
            vec![]
        }
    }
}

#[test]
fn no_seeds_and_no_generation_leaves_only_zero() {
    struct Nothing;
    impl FlowFunctions for Nothing {
        type Fact = u8;
        fn zero(&self) -> u8 {
            0
        }
        fn normal(&self, _: NodeId, _: NodeId, f: &u8) -> Vec<u8> {
            vec![*f]
        }
        fn call(&self, _: NodeId, _: NodeId, f: &u8) -> Vec<u8> {
            vec![*f]
        }
        fn return_flow(&self, _: NodeId, _: NodeId, _: NodeId, f: &u8) -> Vec<u8> {
            vec![*f]
        }
        fn call_to_return(&self, _: NodeId, _: NodeId, f: &u8) -> Vec<u8> {
            vec![*f]
        }
    }
    let scene = load_fixture("two_callers");
    let cg = build(&scene, &scene.default_entries(), Algorithm::Cha).unwrap();
    let sg = Supergraph::build(&scene, &cg).unwrap();
    let r = ifds::solve(&sg, &Nothing, &[], SolverOptions::default());
    assert!(!r.facts.is_empty());
    assert!(r.facts.values().all(|s| s.len() == 1 && s.contains(&0)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generic_client_matches_enumeration(salt in any::<u64>(), fixture in 0..FIXTURES.len(), seed_nodes in proptest::collection::vec((any::<usize>(), 1u32..7), 0..4)) {
        let scene = load_fixture(FIXTURES[fixture]);
        let cg = build(&scene, &scene.default_entries(), Algorithm::Cha).unwrap();
        let sg = Supergraph::build(&scene, &cg).unwrap();
        let ff = Parity { salt };
        let seeds: Vec<(NodeId, u32)> = seed_nodes.iter().map(|(n, f)| (n % sg.node_count(), *f)).collect();
        let want = meet_over_valid_paths(&sg, &ff, &seeds, 8);
        for summaries in [true, false] {
            let got = ifds::solve(&sg, &ff, &seeds, SolverOptions { summaries });
            prop_assert_eq!(&got.facts, &want, "summaries={}", summaries);
        }
    }
}
