//! Exact linear algebra used by the complex and monodromy code.

pub mod matrix;
pub mod modp;
pub mod qrank;
pub mod snf;

pub use matrix::{Matrix, Ring};
