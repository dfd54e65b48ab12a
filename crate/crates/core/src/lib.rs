// Negated float comparisons are used on purpose so that NaN takes the failure branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod cli;
pub mod error;
pub mod forms;
pub mod mesh;
pub mod model;
pub mod problem;
pub mod solver;
pub mod tdc;
pub mod oracles;
