//! IFDS dataflow over the interprocedural supergraph, and the
//! possibly-undefined dereference client.

pub mod nullptr;
pub mod solver;
pub mod supergraph;

pub use nullptr::{analyze, findings_json, null_pointer_analysis, AccessPath, Finding, NpFact, NullPointer, TraceStep};
pub use solver::{solve, FlowFunctions, IfdsResult, SolverOptions};
pub use supergraph::{EdgeKind, NodeId, SgEdge, Supergraph, SupergraphError};
