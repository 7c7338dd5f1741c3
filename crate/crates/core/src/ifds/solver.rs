use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use super::supergraph::{NodeId, Supergraph};

/// A supergraph node paired with a fact.
type Exploded<F> = (NodeId, F);
/// `(method, entry fact)` to a set of exploded nodes.
type ByEntry<F> = HashMap<(usize, F), BTreeSet<Exploded<F>>>;

/// Flow functions of an IFDS problem, one per supergraph edge kind, each
/// defined on a single fact. The solver adds the zero fact to every output
/// produced from zero, so implementations need not.
pub trait FlowFunctions {
    type Fact: Clone + Eq + Ord + Hash + Debug;

    fn zero(&self) -> Self::Fact;
    fn normal(&self, from: NodeId, to: NodeId, fact: &Self::Fact) -> Vec<Self::Fact>;
    fn call(&self, call: NodeId, callee_entry: NodeId, fact: &Self::Fact) -> Vec<Self::Fact>;
    fn return_flow(&self, call: NodeId, exit: NodeId, return_site: NodeId, fact: &Self::Fact) -> Vec<Self::Fact>;
    fn call_to_return(&self, call: NodeId, return_site: NodeId, fact: &Self::Fact) -> Vec<Self::Fact>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    /// Keep end summaries per callee context. When off, a new calling
    /// context recomputes the callee's exit facts from the path-edge table.
    pub summaries: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { summaries: true }
    }
}

#[derive(Debug, Clone)]
pub struct IfdsResult<F> {
    /// Facts holding before each reached node.
    pub facts: BTreeMap<NodeId, BTreeSet<F>>,
    /// First `(node, fact)` that produced each `(node, fact)`; seeds have none.
    pub witness: HashMap<(NodeId, F), Option<(NodeId, F)>>,
    pub path_edges: usize,
}

impl<F: Clone + Eq + Ord + Hash> IfdsResult<F> {
    pub fn at(&self, n: NodeId) -> Option<&BTreeSet<F>> {
        self.facts.get(&n)
    }

    pub fn holds(&self, n: NodeId, f: &F) -> bool {
        self.facts.get(&n).is_some_and(|s| s.contains(f))
    }

    /// Witness chain ending at `(n, f)`, seed first.
    pub fn trace(&self, n: NodeId, f: &F) -> Vec<(NodeId, F)> {
        let mut out = vec![(n, f.clone())];
        let mut cur = (n, f.clone());
        while let Some(Some(p)) = self.witness.get(&cur) {
            out.push(p.clone());
            cur = p.clone();
        }
        out.reverse();
        out
    }
}

struct Tab<'a, 'g, P: FlowFunctions> {
    sg: &'a Supergraph<'g>,
    ff: &'a P,
    zero: P::Fact,
    opts: SolverOptions,
    /// `(n, d2)` → entry facts `d1` with a path edge `<s, d1> → <n, d2>`.
    path: HashMap<(NodeId, P::Fact), BTreeSet<P::Fact>>,
    work: VecDeque<(P::Fact, NodeId, P::Fact)>,
    /// `(method, d1)` → call contexts `(c, d2)` entering it with `d1`.
    incoming: ByEntry<P::Fact>,
    end_summary: ByEntry<P::Fact>,
    witness: HashMap<Exploded<P::Fact>, Option<Exploded<P::Fact>>>,
    edges: usize,
}

impl<P: FlowFunctions> Tab<'_, '_, P> {
    fn propagate(&mut self, d1: P::Fact, n: NodeId, d2: P::Fact, pred: Option<(NodeId, P::Fact)>) {
        let set = self.path.entry((n, d2.clone())).or_default();
        if set.insert(d1.clone()) {
            self.edges += 1;
            self.witness.entry((n, d2.clone())).or_insert(pred);
            self.work.push_back((d1, n, d2));
        }
    }

    fn with_zero(&self, from_zero: bool, mut v: Vec<P::Fact>) -> Vec<P::Fact> {
        if from_zero && !v.contains(&self.zero) {
            v.push(self.zero.clone());
        }
        v
    }

    fn exit_facts(&self, method: usize, d1: &P::Fact) -> Vec<(NodeId, P::Fact)> {
        if self.opts.summaries {
            return self.end_summary.get(&(method, d1.clone())).map(|s| s.iter().cloned().collect()).unwrap_or_default();
        }
        let mut out = Vec::new();
        for e in self.sg.exits_of(method) {
            for ((n, d2), d1s) in &self.path {
                if *n == e && d1s.contains(d1) {
                    out.push((e, d2.clone()));
                }
            }
        }
        out.sort();
        out
    }

    fn apply_return(&mut self, call: NodeId, d_call: &P::Fact, exit: NodeId, d_exit: &P::Fact) {
        let callers_d1: Vec<P::Fact> =
            self.path.get(&(call, d_call.clone())).map(|s| s.iter().cloned().collect()).unwrap_or_default();
        for r in self.sg.return_sites(call) {
            let outs = self.ff.return_flow(call, exit, r, d_exit);
            let outs = self.with_zero(*d_exit == self.zero, outs);
            for d5 in outs {
                for d1 in &callers_d1 {
                    self.propagate(d1.clone(), r, d5.clone(), Some((exit, d_exit.clone())));
                }
            }
        }
    }

    fn run(&mut self) {
        while let Some((d1, n, d2)) = self.work.pop_front() {
            let m = self.sg.method_of(n);
            let callees = self.sg.callees(n);
            if !callees.is_empty() || matches!(self.sg.stmt(n), crate::ir::Stmt::Invoke(_)) {
                for &q in callees {
                    let entry = self.sg.entry_of(q);
                    let outs = self.ff.call(n, entry, &d2);
                    for d3 in self.with_zero(d2 == self.zero, outs) {
                        self.propagate(d3.clone(), entry, d3.clone(), Some((n, d2.clone())));
                        self.incoming.entry((q, d3.clone())).or_default().insert((n, d2.clone()));
                        for (e, d4) in self.exit_facts(q, &d3) {
                            self.apply_return(n, &d2, e, &d4);
                        }
                    }
                }
                for r in self.sg.return_sites(n) {
                    let outs = self.ff.call_to_return(n, r, &d2);
                    for d3 in self.with_zero(d2 == self.zero, outs) {
                        self.propagate(d1.clone(), r, d3, Some((n, d2.clone())));
                    }
                }
            } else if self.sg.is_exit(n) {
                if self.opts.summaries {
                    self.end_summary.entry((m, d1.clone())).or_default().insert((n, d2.clone()));
                }
                let ctx: Vec<(NodeId, P::Fact)> =
                    self.incoming.get(&(m, d1.clone())).map(|s| s.iter().cloned().collect()).unwrap_or_default();
                for (c, d_call) in ctx {
                    self.apply_return(c, &d_call, n, &d2);
                }
            } else {
                let succs: Vec<NodeId> = self.sg.succs(n, super::EdgeKind::Normal).collect();
                for s in succs {
                    let outs = self.ff.normal(n, s, &d2);
                    for d3 in self.with_zero(d2 == self.zero, outs) {
                        self.propagate(d1.clone(), s, d3, Some((n, d2.clone())));
                    }
                }
            }
        }
    }
}

/// Tabulation over `sg`. The zero fact is seeded at the entry of every
/// entry point; each extra seed `(n, d)` is generated from zero at `n`.
pub fn solve<P: FlowFunctions>(sg: &Supergraph, ff: &P, seeds: &[(NodeId, P::Fact)], opts: SolverOptions) -> IfdsResult<P::Fact> {
    let zero = ff.zero();
    let mut t = Tab {
        sg,
        ff,
        zero: zero.clone(),
        opts,
        path: HashMap::new(),
        work: VecDeque::new(),
        incoming: HashMap::new(),
        end_summary: HashMap::new(),
        witness: HashMap::new(),
        edges: 0,
    };
    for &m in &sg.entry_points {
        t.propagate(zero.clone(), sg.entry_of(m), zero.clone(), None);
    }
    for (n, d) in seeds {
        t.propagate(zero.clone(), *n, d.clone(), None);
    }
    t.run();
    let mut facts: BTreeMap<NodeId, BTreeSet<P::Fact>> = BTreeMap::new();
    for (n, d2) in t.path.keys() {
        facts.entry(*n).or_default().insert(d2.clone());
    }
    IfdsResult { facts, witness: t.witness, path_edges: t.edges }
}
