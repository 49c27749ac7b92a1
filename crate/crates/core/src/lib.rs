//! Computational workbench for fibered Dehn twists.

pub mod lambda;
pub mod pl_formula;
pub mod holonomy;
pub mod homalg;
pub mod linalg;
pub mod twist_local;
