//! Smith normal form over the integers.
//!
//! For an integer matrix `A` we compute unimodular `U`, `V` with `U A V = D`
//! diagonal, `d_1 | d_2 | ... | d_r` positive. `V^{-1}` is tracked alongside
//! `V` so lattice coordinates can be recovered without a second inversion.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Matrix;

#[derive(Debug, Clone)]
pub struct Smith {
    /// Nonzero diagonal entries, positive and dividing each other in order.
    pub invariant_factors: Vec<BigInt>,
    pub left: Matrix<BigInt>,
    pub right: Matrix<BigInt>,
    pub right_inverse: Matrix<BigInt>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    /// Invariant factors greater than one: the torsion of the cokernel.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.invariant_factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

struct Work {
    a: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    vinv: Vec<Vec<BigInt>>,
    track: bool,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if self.track {
            self.u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in &mut self.a {
            row.swap(i, j);
        }
        if self.track {
            for row in &mut self.v {
                row.swap(i, j);
            }
            self.vinv.swap(i, j);
        }
    }

    /// row_i += k * row_j
    fn add_row(&mut self, i: usize, j: usize, k: &BigInt) {
        let src = self.a[j].clone();
        for (x, s) in self.a[i].iter_mut().zip(&src) {
            *x += k * s;
        }
        if self.track {
            let src = self.u[j].clone();
            for (x, s) in self.u[i].iter_mut().zip(&src) {
                *x += k * s;
            }
        }
    }

    /// col_i += k * col_j
    fn add_col(&mut self, i: usize, j: usize, k: &BigInt) {
        for row in &mut self.a {
            let s = row[j].clone();
            row[i] += k * s;
        }
        if self.track {
            for row in &mut self.v {
                let s = row[j].clone();
                row[i] += k * s;
            }
            // V' = V E with E = I + k e_j e_i^T, so V'^{-1} = (I - k e_j e_i^T) V^{-1}: row_j -= k row_i.
            let src = self.vinv[i].clone();
            for (x, s) in self.vinv[j].iter_mut().zip(&src) {
                *x -= k * s;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -&*x;
        }
        if self.track {
            for x in &mut self.u[i] {
                *x = -&*x;
            }
        }
    }
}

fn identity_rows(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

fn to_matrix(rows: Vec<Vec<BigInt>>, cols: usize) -> Matrix<BigInt> {
    Matrix::try_from_rows(rows, cols).expect("rectangular")
}

/// Quotient rounded to the nearest integer, so remainders are at most half the divisor.
fn nearest_quotient(a: &BigInt, p: &BigInt) -> BigInt {
    // Floor division leaves r with the sign of p; r - p has the opposite sign.
    let (q, r) = a.div_mod_floor(p);
    if (&r + &r).abs() > p.abs() {
        q + 1
    } else {
        q
    }
}

pub fn smith_normal_form(m: &Matrix<BigInt>) -> Smith {
    smith_impl(m, true)
}

/// Invariant factors only; skips the transform bookkeeping.
pub fn invariant_factors(m: &Matrix<BigInt>) -> Vec<BigInt> {
    smith_impl(m, false).invariant_factors
}

fn smith_impl(m: &Matrix<BigInt>, track: bool) -> Smith {
    let (rows, cols) = m.shape();
    let mut w = Work {
        a: m.to_rows(),
        u: if track { identity_rows(rows) } else { Vec::new() },
        v: if track { identity_rows(cols) } else { Vec::new() },
        vinv: if track { identity_rows(cols) } else { Vec::new() },
        track,
    };
    let mut factors = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Smallest nonzero entry in the trailing block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !w.a[i][j].is_zero() && best.is_none_or(|(bi, bj)| w.a[i][j].abs() < w.a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if w.a[i][t].is_zero() {
                    continue;
                }
                let q = nearest_quotient(&w.a[i][t], &w.a[t][t]);
                w.add_row(i, t, &-q);
                if !w.a[i][t].is_zero() {
                    w.swap_rows(t, i);
                    dirty = true;
                }
            }
            if !dirty {
                // Column t is clear below the pivot, so column operations only touch row t.
                for j in t + 1..cols {
                    if w.a[t][j].is_zero() {
                        continue;
                    }
                    let q = nearest_quotient(&w.a[t][j], &w.a[t][t]);
                    w.add_col(j, t, &-q);
                    if !w.a[t][j].is_zero() {
                        // The new pivot column is not clear; go back to row operations.
                        w.swap_cols(t, j);
                        dirty = true;
                        break;
                    }
                }
            }
            if dirty {
                continue;
            }
            // Row and column cleared; enforce divisibility of the trailing block.
            let mut offender = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !w.a[i][j].is_multiple_of(&w.a[t][t]) {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => w.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
        factors.push(w.a[t][t].clone());
        t += 1;
    }
    let (left, right, right_inverse) = if track {
        (to_matrix(w.u, rows), to_matrix(w.v, cols), to_matrix(w.vinv, cols))
    } else {
        (Matrix::zeros(0, 0), Matrix::zeros(0, 0), Matrix::zeros(0, 0))
    };
    Smith { invariant_factors: factors, left, right, right_inverse }
}

/// Exact determinant by fraction-free elimination.
pub fn determinant(m: &Matrix<BigInt>) -> BigInt {
    let n = m.rows();
    assert_eq!(n, m.cols(), "determinant of a non-square matrix");
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_rows();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else { return BigInt::zero() };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}
