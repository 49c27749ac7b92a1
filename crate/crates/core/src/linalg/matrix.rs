use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::lambda::LambdaElement;

/// Commutative ring with reference arithmetic.
pub trait Ring: Clone + PartialEq + Zero + One
where
    for<'a> &'a Self: Add<&'a Self, Output = Self>
        + Sub<&'a Self, Output = Self>
        + Mul<&'a Self, Output = Self>
        + Neg<Output = Self>,
{
}

impl Ring for BigInt {}
impl Ring for LambdaElement {}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Matrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds from nested rows; panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Like `from_rows`, with an explicit column count for the zero-row case.
    pub fn try_from_rows(rows: Vec<Vec<T>>, cols: usize) -> Option<Self> {
        if rows.iter().any(|row| row.len() != cols) {
            return None;
        }
        Some(Self { rows: rows.len(), cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        let cols = self.cols.max(1);
        self.data.iter().enumerate().map(move |(k, v)| (k / cols, k % cols, v))
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<U, E>(&self, f: impl Fn(&T) -> Result<U, E>) -> Result<Matrix<U>, E> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn to_rows(&self) -> Vec<Vec<T>>
    where
        T: Clone,
    {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl<T: Clone> Matrix<T> {
    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Restriction to the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }
}

impl<T: Zero + Clone> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Block matrix from a grid of optional blocks; `None` is a zero block.
    pub fn from_blocks(row_sizes: &[usize], col_sizes: &[usize], blocks: &[Vec<Option<&Matrix<T>>>]) -> Self {
        let rows: usize = row_sizes.iter().sum();
        let cols: usize = col_sizes.iter().sum();
        let mut out = Self::zeros(rows, cols);
        let mut r0 = 0;
        for (bi, &rs) in row_sizes.iter().enumerate() {
            let mut c0 = 0;
            for (bj, &cs) in col_sizes.iter().enumerate() {
                if let Some(b) = blocks[bi][bj] {
                    assert_eq!(b.shape(), (rs, cs), "block ({bi}, {bj}) has the wrong shape");
                    for i in 0..rs {
                        for j in 0..cs {
                            out[(r0 + i, c0 + j)] = b[(i, j)].clone();
                        }
                    }
                }
                c0 += cs;
            }
            r0 += rs;
        }
        out
    }
}

impl<T: Zero + One + Clone> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }
}

impl<T: Ring> Matrix<T>
where
    for<'a> &'a T: Add<&'a T, Output = T> + Sub<&'a T, Output = T> + Mul<&'a T, Output = T> + Neg<Output = T>,
{
    pub fn matmul(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch {:?} x {:?}", self.shape(), rhs.shape());
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a * b;
                    let cur = &out[(i, j)] + &prod;
                    out[(i, j)] = cur;
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape());
        Matrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] + &rhs[(i, j)])
    }

    pub fn sub(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape());
        Matrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &rhs[(i, j)])
    }

    pub fn neg(&self) -> Matrix<T> {
        self.map(|x| -x)
    }

    pub fn scale(&self, k: &T) -> Matrix<T> {
        self.map(|x| x * k)
    }

    /// Inverse of a unipotent upper-triangular matrix, by back substitution.
    pub fn unipotent_upper_inverse(&self) -> Matrix<T> {
        let n = self.rows;
        assert_eq!(n, self.cols);
        let mut inv = Matrix::<T>::identity(n);
        // Solve self * inv = I column by column from the bottom up.
        for col in 0..n {
            for i in (0..n).rev() {
                debug_assert!(self[(i, i)].is_one());
                let mut acc = if i == col { T::one() } else { T::zero() };
                for k in i + 1..n {
                    let a = &self[(i, k)];
                    if a.is_zero() {
                        continue;
                    }
                    acc = &acc - &(a * &inv[(k, col)]);
                }
                inv[(i, col)] = acc;
            }
        }
        inv
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of {}x{}", self.rows, self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of {}x{}", self.rows, self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.data[i * self.cols + j].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub fn int_matrix(rows: &[&[i64]]) -> Matrix<BigInt> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unipotent_inverse_round_trip() {
        let m = int_matrix(&[&[1, 2, -3], &[0, 1, 5], &[0, 0, 1]]);
        let inv = m.unipotent_upper_inverse();
        assert_eq!(m.matmul(&inv), Matrix::identity(3));
        assert_eq!(inv.matmul(&m), Matrix::identity(3));
    }

    #[test]
    fn blocks_assemble() {
        let a = int_matrix(&[&[1]]);
        let b = int_matrix(&[&[2, 3]]);
        let m = Matrix::from_blocks(&[1, 1], &[1, 2], &[vec![Some(&a), None], vec![None, Some(&b)]]);
        assert_eq!(m, int_matrix(&[&[1, 0, 0], &[0, 2, 3]]));
    }
}
