//! Per-method def-use chains, type inference and ArkTS constraint lints.

pub mod defuse;
pub mod infer;
pub mod lint;

use std::collections::BTreeMap;

pub use defuse::{build_def_use, DefUse, LocalChain};
pub use infer::{binop_type, Inference};
pub use lint::check_constraints;

use crate::scene::{MethodSignature, Scene};
use crate::types::Type;

const MAX_ROUNDS: usize = 8;

/// Infers local types for every body in the scene and stores them on the
/// bodies. Return types of undeclared methods are refined across rounds so
/// call results see their callee's inferred return type.
pub fn annotate_scene(scene: &mut Scene) {
    let mut returns: BTreeMap<MethodSignature, Type> = BTreeMap::new();
    let mut all: BTreeMap<MethodSignature, BTreeMap<String, Type>> = BTreeMap::new();
    for _ in 0..MAX_ROUNDS {
        let inf = Inference { scene, table3_literal: scene.config.table3_literal, returns: &returns };
        let mut next_returns = BTreeMap::new();
        all.clear();
        for (sig, _, body) in scene.bodies() {
            let types = inf.infer(sig, body);
            let r = infer::body_return_type(body, &types, scene, &returns);
            if r != Type::Unknown {
                next_returns.insert(sig.clone(), r);
            }
            all.insert(sig.clone(), types);
        }
        if next_returns == returns {
            break;
        }
        returns = next_returns;
    }
    for (sig, types) in all {
        if let Some(b) = scene.methods.get_mut(&sig).and_then(|m| m.body.as_mut()) {
            b.types = types;
        }
    }
}
