//! Meet-over-valid-paths by explicit enumeration.
//!
//! Explores states `(node, fact, call stack)` of the exploded supergraph
//! using only its edge list: a ReturnToExit edge may be taken only when the
//! top of the stack is a call site that called the exiting method and
//! returns to the edge's target. Stacks deeper than `max_depth` are cut off,
//! so results are exact only for programs whose valid paths never need more.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use arklight::ifds::{EdgeKind, FlowFunctions, NodeId, Supergraph};

type State<F> = (NodeId, F, Vec<NodeId>);

pub fn meet_over_valid_paths<P: FlowFunctions>(
    sg: &Supergraph,
    ff: &P,
    seeds: &[(NodeId, P::Fact)],
    max_depth: usize,
) -> BTreeMap<NodeId, BTreeSet<P::Fact>> {
    let zero = ff.zero();
    let mut seen: HashSet<State<P::Fact>> = HashSet::new();
    let mut queue: VecDeque<State<P::Fact>> = VecDeque::new();
    let mut push = |s: State<P::Fact>, queue: &mut VecDeque<State<P::Fact>>| {
        if seen.insert(s.clone()) {
            queue.push_back(s);
        }
    };
    for &m in &sg.entry_points {
        push((sg.entry_of(m), zero.clone(), Vec::new()), &mut queue);
    }
    for (n, d) in seeds {
        push((*n, d.clone(), Vec::new()), &mut queue);
    }
    let mut out: BTreeMap<NodeId, BTreeSet<P::Fact>> = BTreeMap::new();
    while let Some((n, d, stack)) = queue.pop_front() {
        out.entry(n).or_default().insert(d.clone());
        let m = sg.method_of(n);
        // A seed holds in every context in which its method is entered.
        if d == zero && n == sg.entry_of(m) {
            for (sn, sd) in seeds {
                if sg.method_of(*sn) == m {
                    push((*sn, sd.clone(), stack.clone()), &mut queue);
                }
            }
        }
        for e in sg.out_edges(n) {
            let mut outs = match e.kind {
                EdgeKind::Normal => ff.normal(n, e.to, &d),
                EdgeKind::CallToReturn => ff.call_to_return(n, e.to, &d),
                EdgeKind::Call => {
                    if stack.len() >= max_depth {
                        continue;
                    }
                    ff.call(n, e.to, &d)
                }
                EdgeKind::ReturnToExit => {
                    let Some(&c) = stack.last() else { continue };
                    let called = sg.out_edges(c).any(|x| x.kind == EdgeKind::Call && x.to == sg.entry_of(m));
                    let returns_here = sg.out_edges(c).any(|x| x.kind == EdgeKind::CallToReturn && x.to == e.to);
                    if !called || !returns_here {
                        continue;
                    }
                    ff.return_flow(c, n, e.to, &d)
                }
            };
            if d == zero && !outs.contains(&zero) {
                outs.push(zero.clone());
            }
            for d2 in outs {
                let st = match e.kind {
                    EdgeKind::Call => {
                        let mut s = stack.clone();
                        s.push(n);
                        s
                    }
                    EdgeKind::ReturnToExit => stack[..stack.len() - 1].to_vec(),
                    _ => stack.clone(),
                };
                push((e.to, d2, st), &mut queue);
            }
        }
    }
    out
}
