use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use super::{GradedComplex, HomalgError};
use crate::linalg::modp::{mul_mod, pow_mod, rank_mod_int};
use crate::linalg::qrank::{common_denominator, rank_exact, rank_lower_bound, to_laurent};
use crate::linalg::snf::invariant_factors;
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CohomologyMode {
    /// Over the fraction field of `u = q^(1/N)`.
    RationalU,
    /// Over `Z` after setting `q = 1`.
    IntegerAtOne,
    /// Over `F_p` after setting `q = 1`.
    ModP(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DegreeCohomology {
    pub rank: usize,
    /// Invariant factors greater than one; only populated in integer mode.
    pub torsion: Vec<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cohomology {
    pub degrees: BTreeMap<i64, DegreeCohomology>,
}

impl Cohomology {
    pub fn rank(&self, d: i64) -> usize {
        self.degrees.get(&d).map_or(0, |h| h.rank)
    }

    pub fn ranks(&self) -> BTreeMap<i64, usize> {
        self.degrees.iter().map(|(d, h)| (*d, h.rank)).collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.degrees.values().all(|h| h.rank == 0 && h.torsion.is_empty())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees.iter().map(|(d, h)| if d.rem_euclid(2) == 0 { h.rank as i64 } else { -(h.rank as i64) }).sum()
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn cohomology_ranks(c: &GradedComplex, mode: CohomologyMode) -> Result<Cohomology, HomalgError> {
    let v = c.verify();
    if !v.is_complex() {
        return Err(HomalgError::NotAComplex(format!("{} violating entries", v.violations.len())));
    }
    if let CohomologyMode::ModP(p) = mode {
        if !is_prime(p) {
            return Err(HomalgError::Modulus(format!("{p} is not prime")));
        }
    }
    let grading = c.grading();
    let classes = c.degree_classes();
    let dim = |d: i64| classes.get(&grading.normalize(d)).map_or(0, Vec::len);

    // rank[d] = rank of the block from degree d to d + 1.
    let mut rank: BTreeMap<i64, usize> = BTreeMap::new();
    let mut torsion: BTreeMap<i64, Vec<BigInt>> = BTreeMap::new();
    match mode {
        CohomologyMode::RationalU => {
            let n = common_denominator(c.differential());
            let blocks: BTreeMap<i64, _> = classes.keys().map(|&d| (d, to_laurent(&c.block(d), n))).collect();
            let lower: BTreeMap<i64, usize> = blocks.iter().map(|(&d, b)| (d, rank_lower_bound(b))).collect();
            let low = |d: i64| lower.get(&grading.normalize(d)).copied().unwrap_or(0);
            for (&d, b) in &blocks {
                // d^2 = 0 gives rank(d_d) + rank(d_{d-1}) <= dim C^d, and likewise one degree up.
                let upper = b
                    .rows()
                    .min(b.cols())
                    .min(dim(d).saturating_sub(low(d - 1)))
                    .min(dim(d + 1).saturating_sub(low(d + 1)));
                let r = if low(d) >= upper { low(d) } else { rank_exact(b) };
                rank.insert(d, r);
            }
        }
        CohomologyMode::IntegerAtOne => {
            for &d in classes.keys() {
                let b: Matrix<BigInt> = c.block(d).map(|x| x.at_one());
                let f = invariant_factors(&b);
                rank.insert(d, f.len());
                torsion.insert(grading.normalize(d + 1), f.into_iter().filter(|x| !x.is_one()).collect());
            }
        }
        CohomologyMode::ModP(p) => {
            for &d in classes.keys() {
                let b: Matrix<BigInt> = c.block(d).map(|x| x.at_one());
                rank.insert(d, rank_mod_int(&b, p));
            }
        }
    }
    let r = |d: i64| rank.get(&grading.normalize(d)).copied().unwrap_or(0);
    let degrees = classes
        .keys()
        .map(|&d| {
            let free = dim(d) - r(d) - r(d - 1);
            (d, DegreeCohomology { rank: free, torsion: torsion.remove(&d).unwrap_or_default() })
        })
        .collect();
    Ok(Cohomology { degrees })
}
