use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{cohomology_ranks, double_cone, CoefficientRing, CohomologyMode, ConeData, GradedComplex, HomalgError};
use crate::lambda::{Exponent, LambdaElement, Order};
use crate::linalg::snf::smith_normal_form;
use crate::linalg::Matrix;

/// Splits `m = m0 + m1` into its `q^0` coefficients and a positive-order remainder.
pub fn leading_split(m: &Matrix<LambdaElement>) -> Result<(Matrix<BigInt>, Matrix<LambdaElement>), HomalgError> {
    if let Some((row, col, x)) = m.iter().find(|(_, _, x)| !x.order().is_nonnegative()) {
        return Err(HomalgError::NegativeOrder { row, col, order: x.order().to_string() });
    }
    let m0 = m.map(|x| x.split_constant().0);
    let m1 = m.map(|x| x.split_constant().1);
    Ok((m0, m1))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HypothesesReport {
    /// Why the data fails to be a pair of cochain maps with a homotopy, if it does.
    pub structure_error: Option<String>,
    pub differentials_positive: bool,
    pub homotopy_nonnegative: bool,
    pub maps_nonnegative: bool,
    pub f0_injective: bool,
    pub f0_cokernel_free: bool,
    pub k0_surjective: bool,
    pub k0_f0_zero: bool,
    pub middle_exact: bool,
}

impl HypothesesReport {
    pub fn positivity_holds(&self) -> bool {
        self.differentials_positive && self.homotopy_nonnegative
    }

    pub fn leading_sequence_exact(&self) -> bool {
        self.maps_nonnegative
            && self.f0_injective
            && self.f0_cokernel_free
            && self.k0_surjective
            && self.k0_f0_zero
            && self.middle_exact
    }

    pub fn all_hold(&self) -> bool {
        self.structure_error.is_none() && self.positivity_holds() && self.leading_sequence_exact()
    }

    /// Human-readable list of failed hypotheses.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(e) = &self.structure_error {
            out.push(format!("structure: {e}"));
        }
        let checks = [
            (self.differentials_positive, "differentials have an entry of order <= 0"),
            (self.homotopy_nonnegative, "homotopy h has an entry of negative order"),
            (self.maps_nonnegative, "f or k has an entry of negative order"),
            (self.f0_injective, "leading part f0 is not injective"),
            (self.f0_cokernel_free, "cokernel of f0 has torsion"),
            (self.k0_surjective, "leading part k0 is not surjective"),
            (self.k0_f0_zero, "k0 f0 is nonzero"),
            (self.middle_exact, "ker k0 differs from im f0"),
        ];
        out.extend(checks.iter().filter(|(ok, _)| !ok).map(|(_, msg)| msg.to_string()));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub hypotheses: HypothesesReport,
    /// `None` when the data does not define a double cone.
    pub acyclic_rational: Option<bool>,
    pub acyclic_integer: Option<bool>,
}

impl LemmaReport {
    pub fn acyclic(&self) -> bool {
        self.acyclic_rational == Some(true) && self.acyclic_integer == Some(true)
    }

    /// Hypotheses imply the conclusion on this instance.
    pub fn consistent(&self) -> bool {
        !self.hypotheses.all_hold() || self.acyclic()
    }
}

fn all_positive(m: &Matrix<LambdaElement>) -> bool {
    m.iter().all(|(_, _, x)| x.order().is_positive())
}

fn all_nonnegative(m: &Matrix<LambdaElement>) -> bool {
    m.iter().all(|(_, _, x)| x.order().is_nonnegative())
}

pub fn double_cone_lemma_check(d: &ConeData) -> LemmaReport {
    let mut hyp = HypothesesReport {
        structure_error: d.validate().err().map(|e| e.to_string()),
        differentials_positive: [&d.c0, &d.c1, &d.c2].iter().all(|c| all_positive(c.differential())),
        homotopy_nonnegative: all_nonnegative(&d.h),
        ..Default::default()
    };
    if let (Ok((f0, _)), Ok((k0, _))) = (leading_split(&d.f), leading_split(&d.k)) {
        hyp.maps_nonnegative = true;
        let (n0, n1, n2) = (d.c0.len(), d.c1.len(), d.c2.len());
        let sf = smith_normal_form(&f0);
        let sk = smith_normal_form(&k0);
        hyp.f0_injective = sf.rank() == n0;
        hyp.f0_cokernel_free = sf.invariant_factors.iter().all(One::is_one);
        hyp.k0_surjective = sk.rank() == n2 && sk.invariant_factors.iter().all(One::is_one);
        hyp.k0_f0_zero = k0.matmul(&f0).is_zero();
        // With f0 saturated and k0 f0 = 0, im f0 and ker k0 are saturated, nested, and equal iff of equal rank.
        hyp.middle_exact = hyp.k0_f0_zero && hyp.f0_cokernel_free && sf.rank() + sk.rank() == n1;
    }
    let (acyclic_rational, acyclic_integer) = match double_cone(d) {
        Ok(dc) => (
            cohomology_ranks(&dc, CohomologyMode::RationalU).ok().map(|h| h.is_acyclic()),
            cohomology_ranks(&dc, CohomologyMode::IntegerAtOne).ok().map(|h| h.is_acyclic()),
        ),
        Err(_) => (None, None),
    };
    LemmaReport { hypotheses: hyp, acyclic_rational, acyclic_integer }
}

/// Integer complex formed by the coefficients of weighted order zero.
///
/// Entry `(j, i)` has weighted order `order + w_j - w_i`. All weighted orders
/// must be non-negative; entries of positive weighted order lie at least one
/// filtration step deeper and vanish on the first page.
pub fn filtration_page_one(c: &GradedComplex, eps: Exponent) -> Result<GradedComplex, HomalgError> {
    if eps <= Exponent::zero() {
        return Err(HomalgError::Shape(format!("filtration step must be positive, got {eps}")));
    }
    let w = c.weights();
    let d = c.differential();
    let mut page = Matrix::<LambdaElement>::zeros(c.len(), c.len());
    for (j, i, x) in d.iter() {
        let shift = w[j] - w[i];
        if let Order::Finite(o) = x.order() {
            if o + shift < Exponent::zero() {
                return Err(HomalgError::NegativeOrder { row: j, col: i, order: (o + shift).to_string() });
            }
        }
        page[(j, i)] = LambdaElement::constant(x.coeff(&-shift));
    }
    let gens = c.generators().to_vec();
    GradedComplex::with_grading(gens, page, CoefficientRing::Int, c.grading())
}
