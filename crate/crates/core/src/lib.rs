//! Static analysis for ArkLang, an ArkTS-like language with `struct`
//! declarations, decorators and declarative UI component blocks.
pub mod augment;
pub mod callgraph;
pub mod diag;
pub mod frontend;
pub mod ifds;
pub mod ir;
pub mod scene;
pub mod types;
