use serde_json::{json, Value};

use super::complex::{map_from_json, map_to_json};
use super::{CoefficientRing, Generator, GradedComplex, HomalgError};
use crate::lambda::LambdaElement;
use crate::linalg::Matrix;

/// Nonzero entries of `m: A -> B` that do not shift degree by `shift`.
fn degree_violations(m: &Matrix<LambdaElement>, a: &GradedComplex, b: &GradedComplex, shift: i64) -> Vec<(usize, usize)> {
    let g = b.grading();
    m.iter()
        .filter(|(j, i, x)| !x.is_zero() && !g.same(b.degree(*j), a.degree(*i) + shift))
        .map(|(j, i, _)| (j, i))
        .collect()
}

fn check_shape(m: &Matrix<LambdaElement>, a: &GradedComplex, b: &GradedComplex, name: &str) -> Result<(), HomalgError> {
    if m.shape() != (b.len(), a.len()) {
        return Err(HomalgError::Shape(format!("{name} is {:?}, expected {:?}", m.shape(), (b.len(), a.len()))));
    }
    if a.grading() != b.grading() {
        return Err(HomalgError::Shape(format!("{name} joins complexes with different gradings")));
    }
    Ok(())
}

/// Checks that `f: a -> b` has degree zero and commutes with the differentials.
pub fn check_cochain_map(f: &Matrix<LambdaElement>, a: &GradedComplex, b: &GradedComplex) -> Result<(), HomalgError> {
    check_shape(f, a, b, "map")?;
    if let Some((j, i)) = degree_violations(f, a, b, 0).first() {
        return Err(HomalgError::NotCochainMap(format!("entry ({j}, {i}) changes degree")));
    }
    let lhs = b.differential().matmul(f);
    let rhs = f.matmul(a.differential());
    if lhs != rhs {
        let (j, i, _) = lhs.sub(&rhs).iter().find(|(_, _, x)| !x.is_zero()).expect("matrices differ");
        return Err(HomalgError::NotCochainMap(format!("d f - f d is nonzero at ({j}, {i})")));
    }
    Ok(())
}

fn join_ring(a: CoefficientRing, b: CoefficientRing) -> CoefficientRing {
    if a == CoefficientRing::Int && b == CoefficientRing::Int {
        CoefficientRing::Int
    } else {
        CoefficientRing::Lambda
    }
}

fn shifted(c: &GradedComplex, by: i64) -> Vec<Generator> {
    c.generators()
        .iter()
        .map(|g| Generator::weighted(format!("{}[{by}]", g.label), g.degree - by, g.weight))
        .collect()
}

/// Cone on `C0[1] ⊕ C1` with `d(c0, c1) = (-d0 c0, f c0 + d1 c1)`.
pub fn cone(f: &Matrix<LambdaElement>, c0: &GradedComplex, c1: &GradedComplex) -> Result<GradedComplex, HomalgError> {
    check_cochain_map(f, c0, c1)?;
    let (n0, n1) = (c0.len(), c1.len());
    let neg = c0.differential().neg();
    let d = Matrix::from_blocks(&[n0, n1], &[n0, n1], &[vec![Some(&neg), None], vec![Some(f), Some(c1.differential())]]);
    let mut gens = shifted(c0, 1);
    gens.extend(c1.generators().iter().cloned());
    GradedComplex::with_grading(gens, d, join_ring(c0.ring(), c1.ring()), c0.grading())
}

/// Maps `f: C0 -> C1`, `k: C1 -> C2` and a homotopy `h: C0 -> C2` with `d2 h + h d0 = k f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeData {
    pub c0: GradedComplex,
    pub c1: GradedComplex,
    pub c2: GradedComplex,
    pub f: Matrix<LambdaElement>,
    pub k: Matrix<LambdaElement>,
    pub h: Matrix<LambdaElement>,
}

impl ConeData {
    pub fn new(
        c0: GradedComplex,
        c1: GradedComplex,
        c2: GradedComplex,
        f: Matrix<LambdaElement>,
        k: Matrix<LambdaElement>,
        h: Matrix<LambdaElement>,
    ) -> Result<Self, HomalgError> {
        let d = Self { c0, c1, c2, f, k, h };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), HomalgError> {
        for (name, c) in [("C0", &self.c0), ("C1", &self.c1), ("C2", &self.c2)] {
            if !c.is_complex() {
                return Err(HomalgError::NotAComplex(name.into()));
            }
        }
        check_cochain_map(&self.f, &self.c0, &self.c1).map_err(|e| HomalgError::NotCochainMap(format!("f: {e}")))?;
        check_cochain_map(&self.k, &self.c1, &self.c2).map_err(|e| HomalgError::NotCochainMap(format!("k: {e}")))?;
        check_shape(&self.h, &self.c0, &self.c2, "h")?;
        if let Some((j, i)) = degree_violations(&self.h, &self.c0, &self.c2, -1).first() {
            return Err(HomalgError::Homotopy(format!("h entry ({j}, {i}) does not lower degree by one")));
        }
        let lhs = self.c2.differential().matmul(&self.h).add(&self.h.matmul(self.c0.differential()));
        if lhs != self.k.matmul(&self.f) {
            return Err(HomalgError::Homotopy("d2 h + h d0 != k f".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "c0": self.c0.to_json(),
            "c1": self.c1.to_json(),
            "c2": self.c2.to_json(),
            "f": map_to_json(&self.f),
            "k": map_to_json(&self.k),
            "h": map_to_json(&self.h),
        })
    }

    /// Parses without validating, so hypothesis failures can be reported.
    pub fn from_json(v: &Value) -> Result<Self, HomalgError> {
        let field = |name: &str| v.get(name).ok_or_else(|| HomalgError::Schema(format!("missing field {name:?}")));
        let c0 = GradedComplex::from_json(field("c0")?)?;
        let c1 = GradedComplex::from_json(field("c1")?)?;
        let c2 = GradedComplex::from_json(field("c2")?)?;
        let f = map_from_json(field("f")?, c1.len(), c0.len())?;
        let k = map_from_json(field("k")?, c2.len(), c1.len())?;
        let h = map_from_json(field("h")?, c2.len(), c0.len())?;
        Ok(Self { c0, c1, c2, f, k, h })
    }
}

/// Cone of `(h, k): Cone(f) -> C2`, on `C0[2] ⊕ C1[1] ⊕ C2` with
/// `d = [[d0, 0, 0], [-f, -d1, 0], [h, k, d2]]`.
pub fn double_cone(d: &ConeData) -> Result<GradedComplex, HomalgError> {
    d.validate()?;
    let (n0, n1, n2) = (d.c0.len(), d.c1.len(), d.c2.len());
    let nf = d.f.neg();
    let nd1 = d.c1.differential().neg();
    let m = Matrix::from_blocks(
        &[n0, n1, n2],
        &[n0, n1, n2],
        &[
            vec![Some(d.c0.differential()), None, None],
            vec![Some(&nf), Some(&nd1), None],
            vec![Some(&d.h), Some(&d.k), Some(d.c2.differential())],
        ],
    );
    let mut gens = shifted(&d.c0, 2);
    gens.extend(shifted(&d.c1, 1));
    gens.extend(d.c2.generators().iter().cloned());
    let ring = join_ring(join_ring(d.c0.ring(), d.c1.ring()), d.c2.ring());
    GradedComplex::with_grading(gens, m, ring, d.c0.grading())
}
