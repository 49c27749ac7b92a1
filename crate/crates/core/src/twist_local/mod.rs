//! Model Dehn twist on `T*S^c`, its fibered version over a flat torus, intersection counts for
//! twisted cotangent fibers and Maslov indices of Lagrangian loops.

mod intersections;
mod maslov;
mod model;
mod profile;

use thiserror::Error;

pub use intersections::{count_twisted_intersections, threshold_delta, IntersectionPoint, Intersections, ROOT_RESIDUAL};
pub use maslov::{boundary_tangent_frame, det_squared, maslov_index_loop, section_index, sqrt_z_frame};
pub use model::{
    equivariance_check, fibered_twist, model_twist, model_twist_inverse, random_rotation, symplectic_check,
    symplectic_defect_at, CotangentPoint, EquivarianceDefect, FiberedPoint,
};
pub use profile::AngleProfile;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwistError {
    #[error("invalid angle profile: {0}")]
    Profile(String),
    #[error("invalid point: {0}")]
    Point(String),
    #[error("fibers are not transverse: {0}")]
    Transversality(String),
    #[error("ill-conditioned input: {0}")]
    IllConditioned(String),
    #[error("not a Lagrangian frame: {0}")]
    NotLagrangian(String),
    #[error("adaptive refinement failed: {0}")]
    Refinement(String),
}
