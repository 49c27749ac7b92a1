//! `SU(2)` holonomy calculus on marked spheres: alcove coordinates, representation varieties,
//! full and half twists, coisotropic fibers, and `SU(r)` alcove arithmetic.

mod fibers;
mod instance;
mod su2;
mod sur;
mod tuple;

use thiserror::Error;

pub use fibers::{coisotropic_fiber_dim, FiberCase};
pub use instance::{LabelRecord, RepInstance, Solution};
pub use su2::{alcove, product, sample_class, AlcoveValue, Su2};
pub use sur::{
    alcove_point, class_one_representative, class_square_segment_check, kr_labels, random_unitary, segment_distance,
    su3_segment, sur_weights, torus_element, WeightVector,
};
pub use tuple::{
    braid, full_twist, h_y, half_twist, half_twist_ad_sqrt_check, half_twist_inverse, rho_y, solve_rep_variety,
    stabilizer_dimension, tangent_dimension, HolonomyTuple, SolveOptions, Target, RANK_CUTOFF,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HolonomyError {
    #[error("quaternion has norm {0}, not 1")]
    NotUnit(f64),
    #[error("invalid label: {0}")]
    Label(String),
    #[error("index out of range: {0}")]
    Range(String),
    #[error("no solution after {restarts} restarts (best residual {best_residual:e})")]
    NoSolution { restarts: usize, best_residual: f64 },
    #[error("tuple is not a solution (residual {0:e})")]
    NotSolved(f64),
    #[error("square root of -g_i g_j is undefined at -I")]
    Singular,
    #[error("eigenvalue computation failed")]
    Eigen,
    #[error("invalid instance: {0}")]
    Schema(String),
}
