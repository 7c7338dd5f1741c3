//! Reaching definitions and def-use chains over a method's CFG.

use std::collections::{BTreeMap, BTreeSet};

use crate::ir::{Cfg, StmtId};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LocalChain {
    pub defs: Vec<StmtId>,
    pub uses: Vec<StmtId>,
    /// `(def, use)` pairs where the def reaches the use.
    pub links: Vec<(StmtId, StmtId)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DefUse {
    pub chains: BTreeMap<String, LocalChain>,
}

type Reaching = BTreeMap<String, BTreeSet<StmtId>>;

fn join_into(dst: &mut Reaching, src: &Reaching) -> bool {
    let mut changed = false;
    for (k, v) in src {
        let e = dst.entry(k.clone()).or_default();
        for d in v {
            changed |= e.insert(*d);
        }
    }
    changed
}

impl DefUse {
    pub fn chain(&self, local: &str) -> Option<&LocalChain> {
        self.chains.get(local)
    }

    /// Definitions of `local` reaching statement `use_stmt`.
    pub fn reaching(&self, local: &str, use_stmt: StmtId) -> Vec<StmtId> {
        self.chains
            .get(local)
            .map(|c| c.links.iter().filter(|(_, u)| *u == use_stmt).map(|(d, _)| *d).collect())
            .unwrap_or_default()
    }

    /// Uses reached by no definition at all.
    pub fn undefined_uses(&self) -> Vec<(&str, StmtId)> {
        let mut out = Vec::new();
        for (name, c) in &self.chains {
            for u in &c.uses {
                if !c.links.iter().any(|(_, x)| x == u) {
                    out.push((name.as_str(), *u));
                }
            }
        }
        out
    }
}

/// Reaching-definitions fixpoint over `cfg`. Statements in dead blocks get
/// no chains.
pub fn build_def_use(cfg: &Cfg) -> DefUse {
    let n = cfg.blocks.len();
    let mut inn: Vec<Reaching> = vec![Reaching::new(); n];
    let mut out: Vec<Reaching> = vec![Reaching::new(); n];
    let transfer = |b: usize, state: &Reaching| -> Reaching {
        let mut s = state.clone();
        for st in &cfg.blocks[b].stmts {
            if let Some(d) = st.stmt.def() {
                s.insert(d.to_string(), BTreeSet::from([st.id]));
            }
        }
        s
    };
    let mut changed = true;
    while changed {
        changed = false;
        for b in 0..n {
            if cfg.blocks[b].dead {
                continue;
            }
            let mut acc = Reaching::new();
            for &p in &cfg.blocks[b].preds {
                join_into(&mut acc, &out[p]);
            }
            inn[b] = acc;
            let o = transfer(b, &inn[b]);
            if o != out[b] {
                out[b] = o;
                changed = true;
            }
        }
    }

    let mut du = DefUse::default();
    for (b, block) in cfg.blocks.iter().enumerate() {
        if block.dead {
            continue;
        }
        let mut s = inn[b].clone();
        for st in &block.stmts {
            let mut seen = BTreeSet::new();
            for u in st.stmt.uses() {
                if !seen.insert(u) {
                    continue;
                }
                let c = du.chains.entry(u.to_string()).or_default();
                c.uses.push(st.id);
                for d in s.get(u).into_iter().flatten() {
                    c.links.push((*d, st.id));
                }
            }
            if let Some(d) = st.stmt.def() {
                du.chains.entry(d.to_string()).or_default().defs.push(st.id);
                s.insert(d.to_string(), BTreeSet::from([st.id]));
            }
        }
    }
    for c in du.chains.values_mut() {
        c.defs.sort();
        c.defs.dedup();
        c.uses.sort();
        c.uses.dedup();
        c.links.sort();
        c.links.dedup();
    }
    du
}
