use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::HomalgError;
use crate::lambda::{Exponent, LambdaElement, Order};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientRing {
    Lambda,
    Int,
}

/// Degrees live in `Z` or in `Z/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Grading {
    #[default]
    Integer,
    Periodic(u32),
}

impl Grading {
    pub fn normalize(&self, d: i64) -> i64 {
        match self {
            Grading::Integer => d,
            Grading::Periodic(n) => d.rem_euclid(*n as i64),
        }
    }

    pub fn same(&self, a: i64, b: i64) -> bool {
        self.normalize(a) == self.normalize(b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    pub degree: i64,
    /// Energy weight of the generator (its position in the real grading).
    pub weight: Exponent,
}

impl Generator {
    pub fn new(label: impl Into<String>, degree: i64) -> Self {
        Self { label: label.into(), degree, weight: Exponent::zero() }
    }

    pub fn weighted(label: impl Into<String>, degree: i64, weight: Exponent) -> Self {
        Self { label: label.into(), degree, weight }
    }
}

/// Free, finitely generated cochain complex.
///
/// `differential[(j, i)]` is the coefficient of generator `j` in the
/// coboundary of generator `i`; columns are sources.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedComplex {
    generators: Vec<Generator>,
    differential: Matrix<LambdaElement>,
    ring: CoefficientRing,
    grading: Grading,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Nonzero entry between generators whose degrees do not differ by one.
    Degree { target: usize, source: usize },
    /// Nonzero entry of the square of the differential.
    SquareNonzero { target: usize, source: usize, entry: LambdaElement },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub violations: Vec<Violation>,
}

impl Verification {
    pub fn is_complex(&self) -> bool {
        self.violations.is_empty()
    }
}

impl GradedComplex {
    pub fn new(
        generators: Vec<Generator>,
        differential: Matrix<LambdaElement>,
        ring: CoefficientRing,
    ) -> Result<Self, HomalgError> {
        Self::with_grading(generators, differential, ring, Grading::Integer)
    }

    pub fn with_grading(
        mut generators: Vec<Generator>,
        differential: Matrix<LambdaElement>,
        ring: CoefficientRing,
        grading: Grading,
    ) -> Result<Self, HomalgError> {
        let n = generators.len();
        if differential.shape() != (n, n) {
            return Err(HomalgError::Shape(format!(
                "differential is {:?} but there are {n} generators",
                differential.shape()
            )));
        }
        if let Grading::Periodic(0) = grading {
            return Err(HomalgError::Shape("period must be positive".into()));
        }
        if ring == CoefficientRing::Int && differential.iter().any(|(_, _, x)| x.as_integer().is_none()) {
            return Err(HomalgError::Ring("integer complex with a non-constant entry".into()));
        }
        if let Some(g) = generators.iter().find(|g| g.weight < Exponent::zero()) {
            return Err(HomalgError::Shape(format!("generator {} has negative weight", g.label)));
        }
        for g in &mut generators {
            g.degree = grading.normalize(g.degree);
        }
        Ok(Self { generators, differential, ring, grading })
    }

    /// Integer complex from an integer matrix.
    pub fn integer(generators: Vec<Generator>, differential: &Matrix<BigInt>) -> Result<Self, HomalgError> {
        Self::new(generators, differential.map(|x| LambdaElement::constant(x.clone())), CoefficientRing::Int)
    }

    pub fn zero(generators: Vec<Generator>, ring: CoefficientRing) -> Self {
        let n = generators.len();
        Self::new(generators, Matrix::zeros(n, n), ring).expect("zero differential is valid")
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn differential(&self) -> &Matrix<LambdaElement> {
        &self.differential
    }

    pub fn ring(&self) -> CoefficientRing {
        self.ring
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.generators[i].degree
    }

    pub fn weights(&self) -> Vec<Exponent> {
        self.generators.iter().map(|g| g.weight).collect()
    }

    /// Generator indices grouped by degree.
    pub fn degree_classes(&self) -> BTreeMap<i64, Vec<usize>> {
        let mut out: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, g) in self.generators.iter().enumerate() {
            out.entry(g.degree).or_default().push(i);
        }
        out
    }

    /// Indices of generators of degree `d` (normalized for periodic gradings).
    pub fn indices_in_degree(&self, d: i64) -> Vec<usize> {
        let d = self.grading.normalize(d);
        (0..self.len()).filter(|&i| self.generators[i].degree == d).collect()
    }

    /// Block of the differential from degree `d` to degree `d + 1`.
    pub fn block(&self, d: i64) -> Matrix<LambdaElement> {
        let src = self.indices_in_degree(d);
        let dst = self.indices_in_degree(d + 1);
        self.differential.select(&dst, &src)
    }

    pub fn verify(&self) -> Verification {
        verify_complex(self)
    }

    pub fn is_complex(&self) -> bool {
        verify_complex(self).is_complex()
    }

    /// Every nonzero entry has strictly positive order.
    pub fn has_positive_order(&self) -> bool {
        self.differential.iter().all(|(_, _, x)| x.order().is_positive())
    }

    pub fn min_order(&self) -> Order {
        self.differential.iter().map(|(_, _, x)| x.order()).min().unwrap_or(Order::Infinite)
    }

    /// Alternating count of generators (the Euler characteristic for `Z` gradings).
    pub fn euler_characteristic_chain(&self) -> i64 {
        self.generators.iter().map(|g| if g.degree.rem_euclid(2) == 0 { 1 } else { -1 }).sum()
    }
}

/// Checks degree compatibility and `d^2 = 0` exactly.
pub fn verify_complex(c: &GradedComplex) -> Verification {
    let mut violations = Vec::new();
    let d = c.differential();
    for (j, i, x) in d.iter() {
        if !x.is_zero() && !c.grading.same(c.degree(j), c.degree(i) + 1) {
            violations.push(Violation::Degree { target: j, source: i });
        }
    }
    let sq = d.matmul(d);
    for (j, i, x) in sq.iter() {
        if !x.is_zero() {
            violations.push(Violation::SquareNonzero { target: j, source: i, entry: x.clone() });
        }
    }
    Verification { violations }
}

/// Conjugates the differential by `diag(q^w)`, i.e. rescales generator `i` to `q^{w_i} x_i`.
///
/// The stored generator weights move with the basis, shifted globally so
/// that they stay non-negative; weighted orders are unchanged.
pub fn reweight(c: &GradedComplex, weights: &[Exponent]) -> Result<GradedComplex, HomalgError> {
    if weights.len() != c.len() {
        return Err(HomalgError::Shape(format!("{} weights for {} generators", weights.len(), c.len())));
    }
    let d = c.differential();
    let nd = Matrix::from_fn(c.len(), c.len(), |j, i| d[(j, i)].shift(weights[i] - weights[j]));
    let mut gens: Vec<Generator> = c.generators().to_vec();
    for (g, w) in gens.iter_mut().zip(weights) {
        g.weight += *w;
    }
    let floor = gens.iter().map(|g| g.weight).min().unwrap_or_else(Exponent::zero).min(Exponent::zero());
    for g in &mut gens {
        g.weight -= floor;
    }
    let ring = if weights.iter().all(|w| w.is_zero()) { c.ring() } else { CoefficientRing::Lambda };
    Ok(GradedComplex { generators: gens, differential: nd, ring, grading: c.grading() })
}

/// Transports a map `A -> B` through the basis rescalings of [`reweight`].
pub fn reweight_map(m: &Matrix<LambdaElement>, source: &[Exponent], target: &[Exponent]) -> Matrix<LambdaElement> {
    Matrix::from_fn(m.rows(), m.cols(), |j, i| m[(j, i)].shift(source[i] - target[j]))
}

// ---- JSON -----------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RationalRecord {
    pub num: i64,
    pub den: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GeneratorRecord {
    label: String,
    degree: i64,
    #[serde(default = "zero_weight")]
    weight: RationalRecord,
}

fn zero_weight() -> RationalRecord {
    RationalRecord { num: 0, den: 1 }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ComplexRecord {
    generators: Vec<GeneratorRecord>,
    ring: CoefficientRing,
    differential: Vec<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    period: Option<u32>,
}

fn entry_to_json(x: &LambdaElement, ring: CoefficientRing) -> Value {
    match ring {
        CoefficientRing::Int => {
            let c = x.as_integer().expect("integer ring entry");
            match c.to_i64() {
                Some(v) => Value::from(v),
                None => Value::from(c.to_string()),
            }
        }
        CoefficientRing::Lambda => serde_json::to_value(x).expect("serializable"),
    }
}

fn entry_from_json(v: &Value, ring: CoefficientRing) -> Result<LambdaElement, HomalgError> {
    match (ring, v) {
        (CoefficientRing::Int, Value::Number(n)) => n
            .as_i64()
            .map(LambdaElement::constant)
            .ok_or_else(|| HomalgError::Schema(format!("integer entry expected, got {n}"))),
        (CoefficientRing::Int, Value::String(s)) => s
            .parse::<BigInt>()
            .map(LambdaElement::constant)
            .map_err(|_| HomalgError::Schema(format!("bad integer entry {s:?}"))),
        (CoefficientRing::Lambda, Value::Number(n)) => n
            .as_i64()
            .map(LambdaElement::constant)
            .ok_or_else(|| HomalgError::Schema(format!("integer entry expected, got {n}"))),
        (CoefficientRing::Lambda, v @ Value::Array(_)) => {
            serde_json::from_value(v.clone()).map_err(|e| HomalgError::Schema(e.to_string()))
        }
        (_, other) => Err(HomalgError::Schema(format!("unexpected differential entry {other}"))),
    }
}

/// Map matrix as nested rows of term lists.
pub fn map_to_json(m: &Matrix<LambdaElement>) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|row| Value::Array(row.iter().map(|x| entry_to_json(x, CoefficientRing::Lambda)).collect()))
            .collect(),
    )
}

/// Parses a `rows x cols` map; entries may be term lists or plain integers.
pub fn map_from_json(v: &Value, rows: usize, cols: usize) -> Result<Matrix<LambdaElement>, HomalgError> {
    let Value::Array(rs) = v else {
        return Err(HomalgError::Schema("map must be an array of rows".into()));
    };
    if rs.len() != rows {
        return Err(HomalgError::Schema(format!("map has {} rows, expected {rows}", rs.len())));
    }
    let parsed = rs
        .iter()
        .map(|row| match row {
            Value::Array(xs) => xs.iter().map(|x| entry_from_json(x, CoefficientRing::Lambda)).collect(),
            _ => Err(HomalgError::Schema("map row must be an array".into())),
        })
        .collect::<Result<Vec<Vec<_>>, _>>()?;
    Matrix::try_from_rows(parsed, cols).ok_or_else(|| HomalgError::Schema(format!("map rows must have {cols} entries")))
}

impl GradedComplex {
    pub fn to_json(&self) -> Value {
        let rec = ComplexRecord {
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorRecord {
                    label: g.label.clone(),
                    degree: g.degree,
                    weight: RationalRecord { num: *g.weight.numer(), den: *g.weight.denom() },
                })
                .collect(),
            ring: self.ring,
            differential: self
                .differential
                .to_rows()
                .iter()
                .map(|row| row.iter().map(|x| entry_to_json(x, self.ring)).collect())
                .collect(),
            period: match self.grading {
                Grading::Integer => None,
                Grading::Periodic(n) => Some(n),
            },
        };
        serde_json::to_value(rec).expect("serializable")
    }

    pub fn from_json(v: &Value) -> Result<Self, HomalgError> {
        let rec: ComplexRecord = serde_json::from_value(v.clone()).map_err(|e| HomalgError::Schema(e.to_string()))?;
        let gens = rec
            .generators
            .into_iter()
            .map(|g| {
                if g.weight.den == 0 {
                    return Err(HomalgError::Schema(format!("generator {} has zero weight denominator", g.label)));
                }
                Ok(Generator::weighted(g.label, g.degree, Exponent::new(g.weight.num, g.weight.den)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let n = gens.len();
        let rows = rec
            .differential
            .iter()
            .map(|row| row.iter().map(|x| entry_from_json(x, rec.ring)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let m = Matrix::try_from_rows(rows, n)
            .ok_or_else(|| HomalgError::Schema(format!("differential rows must have {n} entries")))?;
        let grading = rec.period.map_or(Grading::Integer, Grading::Periodic);
        Self::with_grading(gens, m, rec.ring, grading)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::exponent;

    fn gens(degrees: &[i64]) -> Vec<Generator> {
        degrees.iter().enumerate().map(|(i, &d)| Generator::new(format!("x{i}"), d)).collect()
    }

    fn lam(rows: Vec<Vec<LambdaElement>>) -> Matrix<LambdaElement> {
        Matrix::from_rows(rows)
    }

    #[test]
    fn zero_differential_is_a_complex() {
        let c = GradedComplex::zero(gens(&[0, 0, 1, 3]), CoefficientRing::Lambda);
        assert!(c.is_complex());
    }

    #[test]
    fn single_positive_entry_is_a_complex() {
        let z = LambdaElement::zero();
        let m = lam(vec![vec![z.clone(), z.clone()], vec![LambdaElement::q_pow(1, 2), z]]);
        let c = GradedComplex::new(gens(&[0, 1]), m, CoefficientRing::Lambda).unwrap();
        assert!(c.is_complex());
        assert!(c.has_positive_order());
    }

    #[test]
    fn nonzero_square_is_reported() {
        let o = LambdaElement::one();
        let z = LambdaElement::zero();
        let m = lam(vec![
            vec![z.clone(), z.clone(), z.clone()],
            vec![o.clone(), z.clone(), z.clone()],
            vec![z.clone(), o, z],
        ]);
        let c = GradedComplex::new(gens(&[0, 1, 2]), m, CoefficientRing::Int).unwrap();
        let v = c.verify();
        assert!(!v.is_complex());
        assert!(v.violations.iter().any(|x| matches!(x, Violation::SquareNonzero { target: 2, source: 0, .. })));
    }

    #[test]
    fn wrong_degree_is_reported() {
        let z = LambdaElement::zero();
        let m = lam(vec![vec![z.clone(), z.clone()], vec![LambdaElement::one(), z]]);
        let c = GradedComplex::new(gens(&[0, 2]), m, CoefficientRing::Int).unwrap();
        assert_eq!(c.verify().violations, vec![Violation::Degree { target: 1, source: 0 }]);
    }

    #[test]
    fn periodic_degrees_wrap() {
        let z = LambdaElement::zero();
        let m = lam(vec![vec![z.clone(), LambdaElement::one()], vec![z.clone(), z]]);
        let c = GradedComplex::with_grading(gens(&[0, 1]), m, CoefficientRing::Int, Grading::Periodic(2)).unwrap();
        assert!(c.is_complex());
    }

    #[test]
    fn zero_weights_leave_complex_unchanged() {
        let z = LambdaElement::zero();
        let m = lam(vec![vec![z.clone(), z.clone()], vec![LambdaElement::q_pow(1, 3), z]]);
        let c = GradedComplex::new(gens(&[0, 1]), m, CoefficientRing::Lambda).unwrap();
        let r = reweight(&c, &[Exponent::zero(), Exponent::zero()]).unwrap();
        assert_eq!(r, c);
    }

    #[test]
    fn reweight_can_clear_negative_orders() {
        let z = LambdaElement::zero();
        let m = lam(vec![vec![z.clone(), z.clone()], vec![LambdaElement::q_pow(-3, 2), z]]);
        let c = GradedComplex::new(gens(&[0, 1]), m, CoefficientRing::Lambda).unwrap();
        assert_eq!(c.min_order(), Order::Finite(exponent(-3, 2)));
        let r = reweight(&c, &[exponent(3, 2), Exponent::zero()]).unwrap();
        assert_eq!(r.differential()[(1, 0)], LambdaElement::one());
        assert!(r.generators().iter().all(|g| g.weight >= Exponent::zero()));
    }

    #[test]
    fn json_round_trip_lambda_and_int() {
        let z = LambdaElement::zero();
        let m = lam(vec![vec![z.clone(), z.clone()], vec![&LambdaElement::q_pow(1, 2) - &LambdaElement::one(), z]]);
        let c = GradedComplex::new(
            vec![Generator::weighted("x", 0, exponent(1, 4)), Generator::new("y", 1)],
            m,
            CoefficientRing::Lambda,
        )
        .unwrap();
        assert_eq!(GradedComplex::from_json(&c.to_json()).unwrap(), c);

        let v: Value = serde_json::from_str(
            r#"{"generators":[{"label":"a","degree":0,"weight":{"num":0,"den":1}},{"label":"b","degree":1,"weight":{"num":0,"den":1}}],
                "ring":"int","differential":[[0,0],[2,0]]}"#,
        )
        .unwrap();
        let ci = GradedComplex::from_json(&v).unwrap();
        assert_eq!(ci.ring(), CoefficientRing::Int);
        assert_eq!(ci.differential()[(1, 0)], LambdaElement::constant(2));
        assert_eq!(GradedComplex::from_json(&ci.to_json()).unwrap(), ci);
    }

    #[test]
    fn schema_violations_are_errors() {
        let v: Value = serde_json::from_str(r#"{"generators":[{"label":"a","degree":0}],"ring":"int","differential":[[0,1]]}"#).unwrap();
        assert!(matches!(GradedComplex::from_json(&v), Err(HomalgError::Schema(_))));
        let v: Value = serde_json::from_str(r#"{"generators":[],"ring":"complex","differential":[]}"#).unwrap();
        assert!(GradedComplex::from_json(&v).is_err());
    }
}
