use std::collections::{BTreeMap, HashMap};

use crate::callgraph::CallGraph;
use crate::ir::{ArkBody, Stmt, StmtId};
use crate::scene::{MethodSignature, Scene};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Normal,
    /// Call site to callee entry.
    Call,
    /// Callee exit to the caller's return site.
    ReturnToExit,
    /// Call site to return site, bypassing the callee.
    CallToReturn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SgEdge {
    pub from: NodeId,
    pub to: NodeId,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SupergraphError {
    #[error("method {0} is in the call graph but has no body and is not a stub")]
    NoBody(String),
}

/// Per-method CFGs stitched together by call-graph edges. Nodes are
/// statements; a node is `(method, statement)`.
#[derive(Debug)]
pub struct Supergraph<'s> {
    pub scene: &'s Scene,
    pub methods: Vec<&'s MethodSignature>,
    method_index: HashMap<&'s MethodSignature, usize>,
    bodies: Vec<&'s ArkBody>,
    /// First node of each method.
    offsets: Vec<NodeId>,
    node_method: Vec<usize>,
    pub edges: Vec<SgEdge>,
    out: Vec<Vec<usize>>,
    /// Call node → callee method indices.
    callees: BTreeMap<NodeId, Vec<usize>>,
    /// Method index → call nodes targeting it.
    callers: Vec<Vec<NodeId>>,
    pub entry_points: Vec<usize>,
}

impl<'s> Supergraph<'s> {
    pub fn build(scene: &'s Scene, cg: &CallGraph) -> Result<Supergraph<'s>, SupergraphError> {
        let mut methods = Vec::new();
        let mut bodies = Vec::new();
        for sig in &cg.nodes {
            let (key, m) = scene.methods.get_key_value(sig).ok_or_else(|| SupergraphError::NoBody(sig.to_string()))?;
            match &m.body {
                Some(b) => {
                    methods.push(key);
                    bodies.push(b);
                }
                None if m.is_stub => {}
                None => return Err(SupergraphError::NoBody(sig.to_string())),
            }
        }
        let method_index: HashMap<&MethodSignature, usize> = methods.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let mut offsets = Vec::new();
        let mut node_method = Vec::new();
        for (i, b) in bodies.iter().enumerate() {
            offsets.push(node_method.len());
            node_method.extend(std::iter::repeat_n(i, b.cfg.stmt_count()));
        }
        let site_stmt: HashMap<usize, StmtId> = cg.sites.iter().map(|s| (s.id, s.stmt)).collect();
        let mut callees: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
        for e in &cg.edges {
            let (Some(&caller), Some(&callee)) = (method_index.get(&e.caller), method_index.get(&e.callee)) else { continue };
            let node = offsets[caller] + site_stmt[&e.site] as usize;
            let v = callees.entry(node).or_default();
            if !v.contains(&callee) {
                v.push(callee);
            }
        }
        let mut sg = Supergraph {
            scene,
            callers: vec![Vec::new(); methods.len()],
            entry_points: cg.entry_points.iter().filter_map(|e| method_index.get(e).copied()).collect(),
            methods,
            method_index,
            bodies,
            offsets,
            out: vec![Vec::new(); node_method.len()],
            node_method,
            edges: Vec::new(),
            callees,
        };
        for (&c, qs) in &sg.callees {
            for &q in qs {
                sg.callers[q].push(c);
            }
        }
        for m in 0..sg.methods.len() {
            let cfg = &sg.bodies[m].cfg;
            for st in cfg.stmts() {
                let n = sg.offsets[m] + st.id as usize;
                let succs: Vec<NodeId> = cfg.stmt_succs(st.id).into_iter().map(|s| sg.offsets[m] + s as usize).collect();
                if matches!(st.stmt, Stmt::Invoke(_)) {
                    let targets = sg.callees.get(&n).cloned().unwrap_or_default();
                    for &q in &targets {
                        sg.push(n, sg.entry_of(q), EdgeKind::Call);
                        for e in sg.exits_of(q) {
                            for &r in &succs {
                                sg.push(e, r, EdgeKind::ReturnToExit);
                            }
                        }
                    }
                    for &r in &succs {
                        sg.push(n, r, EdgeKind::CallToReturn);
                    }
                } else {
                    for &r in &succs {
                        sg.push(n, r, EdgeKind::Normal);
                    }
                }
            }
        }
        Ok(sg)
    }

    fn push(&mut self, from: NodeId, to: NodeId, kind: EdgeKind) {
        self.out[from].push(self.edges.len());
        self.edges.push(SgEdge { from, to, kind });
    }

    pub fn node_count(&self) -> usize {
        self.node_method.len()
    }

    pub fn method_of(&self, n: NodeId) -> usize {
        self.node_method[n]
    }

    pub fn signature_of(&self, n: NodeId) -> &'s MethodSignature {
        self.methods[self.node_method[n]]
    }

    pub fn method_id(&self, sig: &MethodSignature) -> Option<usize> {
        self.method_index.get(sig).copied()
    }

    pub fn body(&self, method: usize) -> &'s ArkBody {
        self.bodies[method]
    }

    pub fn stmt_id(&self, n: NodeId) -> StmtId {
        (n - self.offsets[self.node_method[n]]) as StmtId
    }

    pub fn stmt(&self, n: NodeId) -> &'s Stmt {
        &self.bodies[self.node_method[n]].cfg.stmt(self.stmt_id(n)).stmt
    }

    pub fn node(&self, method: usize, stmt: StmtId) -> NodeId {
        self.offsets[method] + stmt as usize
    }

    pub fn line(&self, n: NodeId) -> u32 {
        self.bodies[self.node_method[n]].cfg.stmt(self.stmt_id(n)).span.line
    }

    pub fn col(&self, n: NodeId) -> u32 {
        self.bodies[self.node_method[n]].cfg.stmt(self.stmt_id(n)).span.col
    }

    pub fn entry_of(&self, method: usize) -> NodeId {
        let cfg = &self.bodies[method].cfg;
        self.offsets[method] + cfg.entry().stmts.first().map(|s| s.id as usize).unwrap_or(0)
    }

    pub fn exits_of(&self, method: usize) -> Vec<NodeId> {
        self.bodies[method].cfg.exit_stmts().into_iter().map(|s| self.offsets[method] + s as usize).collect()
    }

    pub fn is_exit(&self, n: NodeId) -> bool {
        matches!(self.stmt(n), Stmt::Return(_))
    }

    /// Outgoing edges of `n`.
    pub fn out_edges(&self, n: NodeId) -> impl Iterator<Item = &SgEdge> {
        self.out[n].iter().map(move |&i| &self.edges[i])
    }

    pub fn succs(&self, n: NodeId, kind: EdgeKind) -> impl Iterator<Item = NodeId> + '_ {
        self.out_edges(n).filter(move |e| e.kind == kind).map(|e| e.to)
    }

    /// Callee methods of a call node that have bodies.
    pub fn callees(&self, n: NodeId) -> &[usize] {
        self.callees.get(&n).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn callers(&self, method: usize) -> &[NodeId] {
        &self.callers[method]
    }

    pub fn return_sites(&self, call: NodeId) -> Vec<NodeId> {
        self.succs(call, EdgeKind::CallToReturn).collect()
    }

    pub fn count(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }
}
