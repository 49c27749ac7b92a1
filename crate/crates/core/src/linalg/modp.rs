//! Arithmetic and Gaussian elimination modulo a word-size prime.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::Matrix;

/// The Mersenne prime 2^61 - 1.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + p as u128 - b as u128 % p as u128) % p as u128) as u64
}

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of a unit modulo the prime `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(!a.is_multiple_of(p), "{a} is not invertible mod {p}");
    pow_mod(a, p - 2, p)
}

pub fn bigint_mod(c: &BigInt, p: u64) -> u64 {
    c.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits in u64")
}

/// Rank over the prime field `F_p`.
pub fn rank_mod(m: &Matrix<u64>, p: u64) -> usize {
    let (rows, cols) = m.shape();
    let mut a: Vec<Vec<u64>> = (0..rows).map(|i| m.row(i).iter().map(|x| x % p).collect()).collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, piv);
        let inv = inv_mod(a[rank][c], p);
        let (top, below) = a.split_at_mut(rank + 1);
        let pivot = &top[rank];
        for row in below.iter_mut().filter(|r| r[c] != 0) {
            let factor = mul_mod(row[c], inv, p);
            for (x, &y) in row[c..].iter_mut().zip(&pivot[c..]) {
                *x = sub_mod(*x, mul_mod(factor, y, p), p);
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Rank over `F_p` of an integer matrix.
pub fn rank_mod_int(m: &Matrix<BigInt>, p: u64) -> usize {
    rank_mod(&m.map(|x| bigint_mod(x, p)), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::int_matrix;

    #[test]
    fn inverse_and_power() {
        let p = 101;
        for a in 1..p {
            assert_eq!(mul_mod(a, inv_mod(a, p), p), 1);
        }
        assert_eq!(pow_mod(3, 4, 1000), 81);
    }

    #[test]
    fn rank_depends_on_characteristic() {
        let m = int_matrix(&[&[2, 0], &[0, 3]]);
        assert_eq!(rank_mod_int(&m, 2), 1);
        assert_eq!(rank_mod_int(&m, 3), 1);
        assert_eq!(rank_mod_int(&m, 5), 2);
        assert_eq!(rank_mod_int(&m, MERSENNE_61), 2);
    }

    #[test]
    fn negative_entries_reduce() {
        assert_eq!(bigint_mod(&BigInt::from(-1), 7), 6);
    }
}
