//! Rank over the fraction field `Q(u)`, with `u = q^(1/N)`.
//!
//! Two routes: a cheap lower bound from evaluating at points modulo a large
//! prime (specialization can only lose rank), and exact fraction-free
//! elimination over `Z[u]`. Callers that can certify an upper bound (for
//! example from `d^2 = 0`) skip the exact route when the bounds meet.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::modp::{rank_mod, MERSENNE_61};
use super::Matrix;
use crate::lambda::{LambdaElement, LaurentPoly};

/// Evaluation points for the modular lower bound.
const EVAL_POINTS: [u64; 3] = [1_000_003, 77_777_777_777, 2_305_843_009_213_693_000];

/// Common denominator of every exponent in the matrix.
pub fn common_denominator(m: &Matrix<LambdaElement>) -> i64 {
    m.iter().fold(1, |acc, (_, _, x)| acc.lcm(&x.denominator_lcm()))
}

pub fn to_laurent(m: &Matrix<LambdaElement>, n: i64) -> Matrix<LaurentPoly> {
    m.map(|x| x.to_single_variable(n).expect("n is a common denominator"))
}

pub fn rank_lower_bound(m: &Matrix<LaurentPoly>) -> usize {
    let full = m.rows().min(m.cols());
    let mut best = 0;
    for &u0 in &EVAL_POINTS {
        let ev = m.map(|x| x.eval_mod(u0, MERSENNE_61));
        best = best.max(rank_mod(&ev, MERSENNE_61));
        if best == full {
            break;
        }
    }
    best
}

type Poly = Vec<BigInt>;

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: Poly, b: &Poly) -> Poly {
    let mut out = a;
    if out.len() < b.len() {
        out.resize(b.len(), BigInt::zero());
    }
    for (x, y) in out.iter_mut().zip(b) {
        *x -= y;
    }
    trim(out)
}

/// Exact division in `Z[u]`; panics if the division is not exact.
fn poly_div_exact(a: Poly, b: &Poly) -> Poly {
    if a.is_empty() {
        return a;
    }
    let db = b.len() - 1;
    let lead = &b[db];
    let mut rem = a;
    let mut quot = vec![BigInt::zero(); rem.len() - db];
    while rem.len() > db && !rem.is_empty() {
        let k = rem.len() - 1 - db;
        let (q, r) = rem.last().unwrap().div_rem(lead);
        assert!(r.is_zero(), "inexact polynomial division");
        for (i, c) in b.iter().enumerate() {
            rem[k + i] -= &q * c;
        }
        quot[k] = q;
        rem = trim(rem);
    }
    assert!(rem.is_empty(), "inexact polynomial division");
    trim(quot)
}

/// Rank over `Q(u)` by Bareiss elimination on row-normalized polynomials.
pub fn rank_exact(m: &Matrix<LaurentPoly>) -> usize {
    let (rows, cols) = m.shape();
    // Multiplying a row by a power of u does not change the rank.
    let mut a: Vec<Vec<Poly>> = (0..rows)
        .map(|i| {
            let shift = m.row(i).iter().filter_map(LaurentPoly::min_exponent).min().unwrap_or(0);
            m.row(i).iter().map(|x| x.to_dense(shift)).collect()
        })
        .collect();
    let mut prev: Poly = vec![BigInt::from(1)];
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !a[i][c].is_empty()) else { continue };
        a.swap(rank, p);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let t = poly_sub(poly_mul(&a[rank][c], &a[i][j]), &poly_mul(&a[i][c], &a[rank][j]));
                a[i][j] = poly_div_exact(t, &prev);
            }
            a[i][c] = Vec::new();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

/// Rank over `Q(u)`, exact.
pub fn fraction_field_rank(m: &Matrix<LambdaElement>) -> usize {
    let lm = to_laurent(m, common_denominator(m));
    let lower = rank_lower_bound(&lm);
    if lower == m.rows().min(m.cols()) {
        return lower;
    }
    rank_exact(&lm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::exponent;

    fn q(num: i64, den: i64) -> LambdaElement {
        LambdaElement::q_pow(num, den)
    }

    #[test]
    fn polynomial_division_is_exact() {
        let a: Poly = vec![(-1).into(), 0.into(), 1.into()];
        let b: Poly = vec![(-1).into(), 1.into()];
        assert_eq!(poly_div_exact(a, &b), vec![BigInt::from(1), BigInt::from(1)]);
    }

    #[test]
    fn singular_over_fraction_field() {
        // [[1, q^(1/2)], [q^(1/2), q]] has rank 1 but generic-looking entries.
        let m = Matrix::from_rows(vec![vec![LambdaElement::one(), q(1, 2)], vec![q(1, 2), q(1, 1)]]);
        assert_eq!(fraction_field_rank(&m), 1);
        let lm = to_laurent(&m, 2);
        assert_eq!(rank_exact(&lm), 1);
        assert_eq!(rank_lower_bound(&lm), 1);
    }

    #[test]
    fn rank_drops_only_at_special_points() {
        // det = q - 1 vanishes at q = 1 but not over Q(u).
        let m = Matrix::from_rows(vec![vec![LambdaElement::one(), LambdaElement::one()], vec![LambdaElement::one(), q(1, 1)]]);
        assert_eq!(fraction_field_rank(&m), 2);
        assert_eq!(rank_exact(&to_laurent(&m, 1)), 2);
    }

    #[test]
    fn negative_exponents_are_normalized() {
        let a = LambdaElement::monomial(3, exponent(-5, 3));
        let m = Matrix::from_rows(vec![vec![a.clone(), q(1, 3)], vec![a.scale(&BigInt::from(2)), q(1, 3).scale(&BigInt::from(2))]]);
        assert_eq!(rank_exact(&to_laurent(&m, 3)), 1);
    }
}
