//! Graded free cochain complexes over the energy ring, their cones, and
//! matrix factorizations.
//!
//! Differentials are stored as matrices over [`LambdaElement`](crate::lambda::LambdaElement);
//! integer complexes are the special case where every entry is constant.
//! Cohomology is computed by linear algebra over one of three targets: the
//! fraction field of `q^(1/N)`, the integers after `q = 1`, or a prime field.

mod cohomology;
mod complex;
mod cone;
mod lemma;
mod mf;
pub mod random;

use thiserror::Error;

use crate::lambda::LambdaError;

pub use cohomology::{cohomology_ranks, is_prime, Cohomology, CohomologyMode, DegreeCohomology};
pub use complex::{
    map_from_json, map_to_json, reweight, reweight_map, verify_complex, CoefficientRing, Generator,
    GradedComplex, Grading, Verification, Violation,
};
pub use cone::{check_cochain_map, cone, double_cone, ConeData};
pub use lemma::{double_cone_lemma_check, filtration_page_one, leading_split, HypothesesReport, LemmaReport};
pub use mf::{mf_cohomology, mf_morphism_check, mf_verify, MatrixFactorization, MfCohomology, TorsionModule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomalgError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("coefficient ring error: {0}")]
    Ring(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("not a cochain complex: {0}")]
    NotAComplex(String),
    #[error("not a cochain map: {0}")]
    NotCochainMap(String),
    #[error("homotopy relation fails: {0}")]
    Homotopy(String),
    #[error("entry ({row}, {col}) has negative order {order}")]
    NegativeOrder { row: usize, col: usize, order: String },
    #[error("invalid modulus: {0}")]
    Modulus(String),
    #[error(transparent)]
    Lambda(#[from] LambdaError),
}
