//! Oracles and generators used by the arklight test suites.

pub mod ast_interp;
pub mod checks;
pub mod gen;
pub mod ifds_oracle;
pub mod ir_interp;
pub mod irtext;
pub mod value;
