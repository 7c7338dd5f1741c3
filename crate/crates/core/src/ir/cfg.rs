//! Basic blocks and control-flow graph construction (leader algorithm).

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use super::Stmt;
use crate::frontend::Span;

pub type BlockId = usize;
/// Index of a statement in block order within one CFG.
pub type StmtId = u32;

#[derive(Debug, Clone, PartialEq)]
pub struct StmtNode {
    pub id: StmtId,
    pub stmt: Stmt,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasicBlock {
    pub id: BlockId,
    pub stmts: Vec<StmtNode>,
    pub succs: Vec<BlockId>,
    pub preds: Vec<BlockId>,
    /// Not reachable from the entry block.
    pub dead: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Cfg {
    pub blocks: Vec<BasicBlock>,
    stmt_index: Vec<(BlockId, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CfgError {
    #[error("jump to undefined label {0}")]
    UndefinedLabel(usize),
}

impl Cfg {
    pub const ENTRY: BlockId = 0;

    pub fn entry(&self) -> &BasicBlock {
        &self.blocks[Self::ENTRY]
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn stmt_count(&self) -> usize {
        self.stmt_index.len()
    }

    /// `(block, offset)` of a statement id.
    pub fn position(&self, id: StmtId) -> (BlockId, usize) {
        self.stmt_index[id as usize]
    }

    pub fn stmt(&self, id: StmtId) -> &StmtNode {
        let (b, o) = self.position(id);
        &self.blocks[b].stmts[o]
    }

    pub fn stmts(&self) -> impl Iterator<Item = &StmtNode> {
        self.blocks.iter().flat_map(|b| b.stmts.iter())
    }

    /// Statement-level successors: the next statement in the block, or the
    /// first statement of each successor block (skipping empty blocks).
    pub fn stmt_succs(&self, id: StmtId) -> Vec<StmtId> {
        let (b, o) = self.position(id);
        let block = &self.blocks[b];
        if o + 1 < block.stmts.len() {
            return vec![block.stmts[o + 1].id];
        }
        let mut out = Vec::new();
        let mut seen = vec![false; self.blocks.len()];
        let mut work: Vec<BlockId> = block.succs.iter().rev().copied().collect();
        while let Some(s) = work.pop() {
            if std::mem::replace(&mut seen[s], true) {
                continue;
            }
            match self.blocks[s].stmts.first() {
                Some(first) => {
                    if !out.contains(&first.id) {
                        out.push(first.id)
                    }
                }
                None => work.extend(self.blocks[s].succs.iter().rev().copied()),
            }
        }
        out
    }

    /// Statements with no successors (returns and dangling ends).
    pub fn exit_stmts(&self) -> Vec<StmtId> {
        self.stmts().filter(|s| self.stmt_succs(s.id).is_empty()).map(|s| s.id).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.blocks.iter().map(|b| b.succs.len()).sum()
    }
}

/// Builds a CFG from statements in label/goto form. Leaders are the first
/// statement, every label, and every statement following a terminator.
/// Labels dissolve into block boundaries; consecutive labels share a block.
pub fn build_cfg(stmts: Vec<(Stmt, Span)>) -> Result<Cfg, CfgError> {
    let mut raw: Vec<Vec<(Stmt, Span)>> = Vec::new();
    let mut label_block: BTreeMap<usize, BlockId> = BTreeMap::new();
    let mut cur: Vec<(Stmt, Span)> = Vec::new();
    let mut pending_label = false;
    for (stmt, span) in stmts {
        match stmt {
            Stmt::Label(l) => {
                if !cur.is_empty() {
                    raw.push(std::mem::take(&mut cur));
                }
                label_block.insert(l, raw.len());
                pending_label = true;
            }
            s => {
                let term = s.is_terminator();
                cur.push((s, span));
                pending_label = false;
                if term {
                    raw.push(std::mem::take(&mut cur));
                }
            }
        }
    }
    if !cur.is_empty() || pending_label || raw.is_empty() {
        raw.push(cur);
    }

    let target = |l: usize| label_block.get(&l).copied().ok_or(CfgError::UndefinedLabel(l));
    let n = raw.len();
    let mut blocks = Vec::with_capacity(n);
    let mut stmt_index = Vec::new();
    for (id, stmts) in raw.into_iter().enumerate() {
        let mut nodes = Vec::with_capacity(stmts.len());
        for (off, (stmt, span)) in stmts.into_iter().enumerate() {
            let stmt = match stmt {
                Stmt::If { cond, then, els } => Stmt::If { cond, then: target(then)?, els: target(els)? },
                Stmt::Goto(l) => Stmt::Goto(target(l)?),
                s => s,
            };
            nodes.push(StmtNode { id: stmt_index.len() as StmtId, stmt, span });
            stmt_index.push((id, off));
        }
        let succs = match nodes.last().map(|s| &s.stmt) {
            Some(Stmt::If { then, els, .. }) if then == els => vec![*then],
            Some(Stmt::If { then, els, .. }) => vec![*then, *els],
            Some(Stmt::Goto(t)) => vec![*t],
            Some(Stmt::Return(_)) => vec![],
            _ if id + 1 < n => vec![id + 1],
            _ => vec![],
        };
        blocks.push(BasicBlock { id, stmts: nodes, succs, preds: Vec::new(), dead: false });
    }
    for b in 0..n {
        for s in blocks[b].succs.clone() {
            if !blocks[s].preds.contains(&b) {
                blocks[s].preds.push(b);
            }
        }
    }
    for b in &mut blocks {
        b.preds.sort_unstable();
    }
    let mut reached = vec![false; n];
    let mut queue = VecDeque::from([0]);
    reached[0] = true;
    while let Some(b) = queue.pop_front() {
        for &s in &blocks[b].succs {
            if !reached[s] {
                reached[s] = true;
                queue.push_back(s);
            }
        }
    }
    for (b, r) in blocks.iter_mut().zip(reached) {
        b.dead = !r;
    }
    Ok(Cfg { blocks, stmt_index })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::ast::BinaryOp;
    use crate::ir::{Atom, Cond, Constant, Place, Rvalue};

    fn s(stmt: Stmt) -> (Stmt, Span) {
        (stmt, Span::default())
    }

    fn x_gt_0() -> Cond {
        Cond::Compare(BinaryOp::Gt, Atom::Local("x".into()), Atom::Const(Constant::Number(0.0)))
    }

    fn assign() -> Stmt {
        Stmt::Assign { lhs: Place::Local("x".into()), rhs: Rvalue::Atom(Atom::Const(Constant::Number(1.0))) }
    }

    #[test]
    fn if_else_gives_diamond() {
        let cfg = build_cfg(vec![
            s(Stmt::Label(1)),
            s(Stmt::If { cond: x_gt_0(), then: 2, els: 3 }),
            s(Stmt::Label(2)),
            s(assign()),
            s(Stmt::Goto(4)),
            s(Stmt::Label(3)),
            s(assign()),
            s(Stmt::Goto(4)),
            s(Stmt::Label(4)),
            s(Stmt::Return(None)),
        ])
        .unwrap();
        assert_eq!(cfg.blocks.len(), 4);
        assert_eq!(cfg.blocks[0].succs, [1, 2]);
        assert_eq!(cfg.blocks[1].succs, [3]);
        assert_eq!(cfg.blocks[2].succs, [3]);
        assert_eq!(cfg.blocks[3].preds, [1, 2]);
    }

    #[test]
    fn single_return_is_one_block() {
        let cfg = build_cfg(vec![s(Stmt::Return(None))]).unwrap();
        assert_eq!(cfg.blocks.len(), 1);
        assert_eq!(cfg.edge_count(), 0);
    }

    #[test]
    fn while_loop_has_back_edge() {
        let cfg = build_cfg(vec![
            s(Stmt::Label(1)),
            s(Stmt::If { cond: x_gt_0(), then: 2, els: 3 }),
            s(Stmt::Label(2)),
            s(assign()),
            s(Stmt::Goto(1)),
            s(Stmt::Label(3)),
            s(Stmt::Return(None)),
        ])
        .unwrap();
        assert_eq!(cfg.blocks.len(), 3);
        assert_eq!(cfg.blocks[1].succs, [0]);
        assert_eq!(cfg.blocks[0].preds, [1]);
    }

    #[test]
    fn undefined_label_is_an_error() {
        assert_eq!(build_cfg(vec![s(Stmt::Goto(9))]), Err(CfgError::UndefinedLabel(9)));
    }

    #[test]
    fn code_after_return_is_dead() {
        let cfg = build_cfg(vec![s(Stmt::Return(None)), s(assign()), s(Stmt::Return(None))]).unwrap();
        assert_eq!(cfg.blocks.len(), 2);
        assert!(cfg.blocks[1].dead);
        assert_eq!(cfg.stmt_succs(0), Vec::<StmtId>::new());
        assert_eq!(cfg.stmt_succs(1), vec![2]);
    }
}
