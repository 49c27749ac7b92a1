use rand::Rng;
use serde::{Deserialize, Serialize};

use super::su2::{sample_class, AlcoveValue, Su2};
use super::tuple::stabilizer_dimension;
use super::HolonomyError;

/// Position of the coisotropic level set `rho_Y = lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiberCase {
    /// Separating curve, `lambda` in `(0, 1/2)`: fiber `U(1) \ U(1)^2 / (Z2 x Z2) = S^1`.
    SeparatingGeneric,
    /// Non-separating curve, `lambda = 1/2`: fiber `SU(2) \ SU(2)^2 / Z2 = S^3`.
    NonseparatingCentral,
    /// Curve around two markings labelled `1/4`, `lambda = 0`: fiber `SU(2) / (Z2 x U(1)) = S^2`.
    HalftwistPair,
}

/// Dimension of `G_{exp lambda} \ G_{exp lambda}^2 / H`, i.e. `2 dim G_lambda - dim G_lambda - dim H`,
/// which is the codimension of the coisotropic.
///
/// `dim G_lambda` is the stabilizer dimension of `exp(lambda)`. `H` is the generic stabilizer
/// of the cut surface: finite for the two single-curve cases (no reducibles on either side),
/// and the stabilizer of a sampled pair `(g, g^{-1})` in `C_{1/4}` for the half-twist case.
pub fn coisotropic_fiber_dim(lambda: AlcoveValue, case: FiberCase, rng: &mut impl Rng) -> Result<usize, HolonomyError> {
    let l = lambda.value();
    let consistent = match case {
        FiberCase::SeparatingGeneric => l > 0.0 && l < 0.5,
        FiberCase::NonseparatingCentral => l == 0.5,
        FiberCase::HalftwistPair => l == 0.0,
    };
    if !consistent {
        return Err(HolonomyError::Label(format!("lambda = {l} does not fit {case:?}")));
    }
    let axis = [0.0, 0.0, 1.0];
    let g_lambda = stabilizer_dimension(&[Su2::in_class(l, axis)]);
    let h = match case {
        FiberCase::SeparatingGeneric | FiberCase::NonseparatingCentral => 0,
        FiberCase::HalftwistPair => {
            let g = sample_class(AlcoveValue::new(0.25)?, rng);
            stabilizer_dimension(&[g, g.inverse()])
        }
    };
    Ok(2 * g_lambda - g_lambda - h)
}
