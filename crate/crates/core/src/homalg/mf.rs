use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::HomalgError;
use crate::linalg::snf::{invariant_factors, smith_normal_form};
use crate::linalg::Matrix;

/// Two-periodic free abelian group with `d1 d0 = w` and `d0 d1 = w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFactorization {
    /// `C0 -> C1`.
    pub d0: Matrix<BigInt>,
    /// `C1 -> C0`.
    pub d1: Matrix<BigInt>,
    pub w: BigInt,
}

#[derive(Serialize, Deserialize)]
struct MfRecord {
    c0_rank: usize,
    c1_rank: usize,
    d0: Vec<Vec<i64>>,
    d1: Vec<Vec<i64>>,
    w: i64,
}

impl MatrixFactorization {
    pub fn new(d0: Matrix<BigInt>, d1: Matrix<BigInt>, w: impl Into<BigInt>) -> Result<Self, HomalgError> {
        if d0.rows() != d1.cols() || d0.cols() != d1.rows() {
            return Err(HomalgError::Shape(format!("d0 is {:?} but d1 is {:?}", d0.shape(), d1.shape())));
        }
        Ok(Self { d0, d1, w: w.into() })
    }

    pub fn c0_rank(&self) -> usize {
        self.d0.cols()
    }

    pub fn c1_rank(&self) -> usize {
        self.d0.rows()
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, HomalgError> {
        let r: MfRecord = serde_json::from_value(v.clone()).map_err(|e| HomalgError::Schema(e.to_string()))?;
        let to = |rows: Vec<Vec<i64>>, cols: usize| {
            Matrix::try_from_rows(rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect(), cols)
                .ok_or_else(|| HomalgError::Schema("ragged matrix".into()))
        };
        let d0 = to(r.d0, r.c0_rank)?;
        let d1 = to(r.d1, r.c1_rank)?;
        if d0.rows() != r.c1_rank || d1.rows() != r.c0_rank {
            return Err(HomalgError::Schema("matrix shapes disagree with the declared ranks".into()));
        }
        Self::new(d0, d1, r.w)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows = |m: &Matrix<BigInt>| -> Vec<Vec<i64>> {
            m.to_rows().iter().map(|r| r.iter().map(|x| x.to_i64().expect("entry fits in i64")).collect()).collect()
        };
        let r = MfRecord {
            c0_rank: self.c0_rank(),
            c1_rank: self.c1_rank(),
            d0: rows(&self.d0),
            d1: rows(&self.d1),
            w: self.w.to_i64().expect("w fits in i64"),
        };
        serde_json::to_value(r).expect("serializable")
    }
}

pub fn mf_verify(m: &MatrixFactorization) -> bool {
    let w0 = Matrix::<BigInt>::identity(m.c0_rank()).scale(&m.w);
    let w1 = Matrix::<BigInt>::identity(m.c1_rank()).scale(&m.w);
    m.d1.matmul(&m.d0) == w0 && m.d0.matmul(&m.d1) == w1
}

/// Finite abelian group `⊕ Z/e_i` with `e_1 | e_2 | ...`, all `e_i > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TorsionModule {
    pub invariant_factors: Vec<BigInt>,
}

impl TorsionModule {
    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn is_zero(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// Number of cyclic summands of full order `w`: the rank as a `Z/w`-module.
    pub fn free_rank(&self, w: &BigInt) -> usize {
        self.invariant_factors.iter().filter(|e| *e == w).count()
    }

    /// Size of the `k`-torsion subgroup.
    pub fn torsion_count(&self, k: &BigInt) -> BigInt {
        self.invariant_factors.iter().map(|e| e.gcd(k)).product()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MfCohomology {
    pub h0: TorsionModule,
    pub h1: TorsionModule,
}

/// `ker(a mod w) / im(b mod w)` on `Z^n`, where `a b ≡ 0 (mod w)`.
fn quotient_mod_w(a: &Matrix<BigInt>, b: &Matrix<BigInt>, w: &BigInt) -> TorsionModule {
    let n = a.cols();
    let s = smith_normal_form(a);
    // x ∈ ker ⇔ y = V^{-1} x has d_i y_i ≡ 0, i.e. y_i ∈ m_i Z.
    let m: Vec<BigInt> = (0..n)
        .map(|i| match s.invariant_factors.get(i) {
            Some(d) => w / d.gcd(w),
            None => BigInt::one(),
        })
        .collect();
    // Relations [b | wI] in kernel coordinates z = diag(m)^{-1} V^{-1} x.
    let gens = Matrix::from_fn(n, b.cols() + n, |i, j| {
        if j < b.cols() {
            b[(i, j)].clone()
        } else if j - b.cols() == i {
            w.clone()
        } else {
            BigInt::zero()
        }
    });
    let y = s.right_inverse.matmul(&gens);
    let rel = Matrix::from_fn(n, y.cols(), |i, j| {
        let (q, r) = y[(i, j)].div_rem(&m[i]);
        debug_assert!(r.is_zero(), "relation outside the kernel lattice");
        q
    });
    let invariant_factors = invariant_factors(&rel).into_iter().filter(|e| !e.is_one()).collect();
    TorsionModule { invariant_factors }
}

/// Cohomology of the two-periodic complex reduced mod `w`.
///
/// Over `Z` this always vanishes: Smith form splits a factorization into
/// blocks `a * b = w`, and `ker(a mod ab) = im(b)`.
pub fn mf_cohomology(m: &MatrixFactorization) -> Result<MfCohomology, HomalgError> {
    if m.w < BigInt::from(2) {
        return Err(HomalgError::Modulus(format!("w must be at least 2, got {}", m.w)));
    }
    if !mf_verify(m) {
        return Err(HomalgError::NotAComplex("composites are not w times the identity".into()));
    }
    Ok(MfCohomology { h0: quotient_mod_w(&m.d0, &m.d1, &m.w), h1: quotient_mod_w(&m.d1, &m.d0, &m.w) })
}

/// Whether `(f0, f1)` intertwines the differentials of `m` and `m2`.
pub fn mf_morphism_check(
    m: &MatrixFactorization,
    m2: &MatrixFactorization,
    f0: &Matrix<BigInt>,
    f1: &Matrix<BigInt>,
) -> Result<bool, HomalgError> {
    if m.w != m2.w {
        return Err(HomalgError::Modulus(format!("mismatched w: {} and {}", m.w, m2.w)));
    }
    if f0.shape() != (m2.c0_rank(), m.c0_rank()) || f1.shape() != (m2.c1_rank(), m.c1_rank()) {
        return Err(HomalgError::Shape("morphism components have the wrong shape".into()));
    }
    Ok(f1.matmul(&m.d0) == m2.d0.matmul(f0) && f0.matmul(&m.d1) == m2.d1.matmul(f1))
}

impl MfCohomology {
    pub fn is_zero(&self) -> bool {
        self.h0.is_zero() && self.h1.is_zero()
    }
}

impl TorsionModule {
    pub fn describe(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.invariant_factors.iter().map(|e| format!("Z/{}", e.abs())).collect::<Vec<_>>().join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::int_matrix;

    /// Exhaustive `|H[k]|` for each `k | w`, straight from the definition.
    fn brute_force(a: &Matrix<BigInt>, b: &Matrix<BigInt>, w: i64) -> Vec<(i64, usize)> {
        let n = a.cols();
        let vectors = |len: usize| -> Vec<Vec<i64>> {
            let mut out = vec![Vec::new()];
            for _ in 0..len {
                out = out.into_iter().flat_map(|v| (0..w).map(move |x| [v.clone(), vec![x]].concat())).collect();
            }
            out
        };
        let apply = |m: &Matrix<BigInt>, x: &[i64]| -> Vec<i64> {
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m[(i, j)].to_i64().unwrap() * x[j]).sum::<i64>().rem_euclid(w))
                .collect()
        };
        let kernel: Vec<Vec<i64>> = vectors(n).into_iter().filter(|x| apply(a, x).iter().all(|v| *v == 0)).collect();
        let image: std::collections::BTreeSet<Vec<i64>> = vectors(b.cols()).iter().map(|y| apply(b, y)).collect();
        (1..=w)
            .filter(|k| w % k == 0)
            .map(|k| {
                let hits = kernel.iter().filter(|x| image.contains(&x.iter().map(|v| (k * v).rem_euclid(w)).collect::<Vec<_>>())).count();
                (k, hits / image.len())
            })
            .collect()
    }

    fn check_against_oracle(m: &MatrixFactorization) {
        let h = mf_cohomology(m).unwrap();
        let w = m.w.to_i64().unwrap();
        for (module, (a, b)) in [(&h.h0, (&m.d0, &m.d1)), (&h.h1, (&m.d1, &m.d0))] {
            for (k, count) in brute_force(a, b, w) {
                assert_eq!(module.torsion_count(&BigInt::from(k)), BigInt::from(count), "k = {k} for {m:?}");
            }
        }
    }

    #[test]
    fn verify_examples() {
        assert!(mf_verify(&MatrixFactorization::new(int_matrix(&[&[1]]), int_matrix(&[&[2]]), 2).unwrap()));
        assert!(!mf_verify(&MatrixFactorization::new(int_matrix(&[&[2]]), int_matrix(&[&[2]]), 2).unwrap()));
        // w = 0 is an ordinary two-periodic complex.
        assert!(mf_verify(&MatrixFactorization::new(int_matrix(&[&[0, 1], &[0, 0]]), int_matrix(&[&[0, 0], &[0, 0]]), 0).unwrap()));
    }

    #[test]
    fn unit_factor_has_no_cohomology() {
        for w in 2..8 {
            let m = MatrixFactorization::new(int_matrix(&[&[1]]), int_matrix(&[&[w]]), w).unwrap();
            assert!(mf_cohomology(&m).unwrap().is_zero());
        }
    }

    #[test]
    fn two_times_three_mod_six_is_acyclic() {
        // ker(2) = {0, 3} = im(3) and ker(3) = {0, 2, 4} = im(2) in Z/6.
        let m = MatrixFactorization::new(int_matrix(&[&[2]]), int_matrix(&[&[3]]), 6).unwrap();
        let h = mf_cohomology(&m).unwrap();
        assert!(h.is_zero());
        check_against_oracle(&m);
    }

    #[test]
    fn zero_factorization_is_excluded() {
        let m = MatrixFactorization::new(int_matrix(&[&[0]]), int_matrix(&[&[0]]), 0).unwrap();
        assert!(matches!(mf_cohomology(&m), Err(HomalgError::Modulus(_))));
    }

    #[test]
    fn conjugated_factorization_matches_oracle() {
        let m = MatrixFactorization::new(int_matrix(&[&[2, 0], &[0, 1]]), int_matrix(&[&[2, 0], &[0, 4]]), 4).unwrap();
        let p = int_matrix(&[&[1, 1], &[0, 1]]);
        let pinv = int_matrix(&[&[1, -1], &[0, 1]]);
        let c = MatrixFactorization::new(p.matmul(&m.d0).matmul(&pinv), p.matmul(&m.d1).matmul(&pinv), 4).unwrap();
        assert!(mf_verify(&c));
        assert_eq!(mf_cohomology(&c).unwrap(), mf_cohomology(&m).unwrap());
        check_against_oracle(&m);
        check_against_oracle(&c);
    }

    #[test]
    fn quotient_matches_oracle_on_reduced_complexes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut nonzero = 0;
        for w in [2i64, 3, 4, 6, 8] {
            for _ in 0..30 {
                let a = Matrix::from_fn(2, 2, |_, _| BigInt::from(rng.random_range(0..w)));
                // Columns of b drawn from ker(a mod w), so a b ≡ 0.
                let kernel: Vec<[i64; 2]> = (0..w * w)
                    .map(|t| [t / w, t % w])
                    .filter(|x| (0..2).all(|i| (0..2).map(|j| a[(i, j)].to_i64().unwrap() * x[j]).sum::<i64>() % w == 0))
                    .collect();
                let cols: Vec<[i64; 2]> = (0..rng.random_range(0..3)).map(|_| kernel[rng.random_range(0..kernel.len())]).collect();
                let b = Matrix::from_fn(2, cols.len(), |i, j| BigInt::from(cols[j][i]));
                let q = quotient_mod_w(&a, &b, &BigInt::from(w));
                nonzero += usize::from(!q.is_zero());
                for (k, count) in brute_force(&a, &b, w) {
                    assert_eq!(q.torsion_count(&BigInt::from(k)), BigInt::from(count), "w = {w}, k = {k}, a = {a:?}, b = {b:?}");
                }
            }
        }
        assert!(nonzero > 20);
    }

    #[test]
    fn morphism_examples() {
        let m = MatrixFactorization::new(int_matrix(&[&[2, 0], &[0, 1]]), int_matrix(&[&[3, 0], &[0, 6]]), 6).unwrap();
        let id = Matrix::<BigInt>::identity(2);
        assert!(mf_morphism_check(&m, &m, &id, &id).unwrap());
        assert!(mf_morphism_check(&m, &m, &Matrix::zeros(2, 2), &Matrix::zeros(2, 2)).unwrap());
        assert!(!mf_morphism_check(&m, &m, &int_matrix(&[&[0, 1], &[1, 0]]), &id).unwrap());
        let other = MatrixFactorization::new(int_matrix(&[&[1]]), int_matrix(&[&[2]]), 2).unwrap();
        assert!(mf_morphism_check(&m, &other, &Matrix::zeros(1, 2), &Matrix::zeros(1, 2)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = MatrixFactorization::new(int_matrix(&[&[2, 0], &[0, 1]]), int_matrix(&[&[3, 0], &[0, 6]]), 6).unwrap();
        assert_eq!(MatrixFactorization::from_json(&m.to_json()).unwrap(), m);
    }
}
