use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::TwistError;

const LAGRANGIAN_TOL: f64 = 1e-9;
/// Largest phase increment of `det^2` accepted between neighbouring samples.
const MAX_STEP: f64 = PI / 8.0;
const MAX_DEPTH: u32 = 40;
/// Base grid; loops oscillating faster than this can still alias and are the caller's responsibility.
const MIN_SAMPLES: usize = 64;

/// `det^2` of the unitary representative of the Lagrangian `A R^n`, i.e. `(det A / |det A|)^2`.
///
/// `A = X + iY` spans a Lagrangian iff `X^T Y` is symmetric and `A` is invertible; then
/// `A (A* A)^{-1/2}` is unitary with the same real span.
pub fn det_squared(a: &DMatrix<Complex64>) -> Result<Complex64, TwistError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(TwistError::NotLagrangian(format!("frame is {}x{}", n, a.ncols())));
    }
    let x = a.map(|z| z.re);
    let y = a.map(|z| z.im);
    let s = x.transpose() * &y;
    let scale = 1.0 + a.map(|z| z.norm()).amax().powi(2);
    if (&s - s.transpose()).amax() > LAGRANGIAN_TOL * scale {
        return Err(TwistError::NotLagrangian("frame spans a non-isotropic subspace".into()));
    }
    let det = a.determinant();
    if det.norm() < LAGRANGIAN_TOL * scale.powf(n as f64 / 2.0) {
        return Err(TwistError::NotLagrangian("frame is degenerate".into()));
    }
    let phase = det / det.norm();
    Ok(phase * phase)
}

fn increment(a: Complex64, b: Complex64) -> f64 {
    (b / a).arg()
}

fn winding(
    path: &dyn Fn(f64) -> DMatrix<Complex64>,
    reference: Complex64,
    (t0, t1): (f64, f64),
    (z0, z1): (Complex64, Complex64),
    depth: u32,
) -> Result<f64, TwistError> {
    let tm = 0.5 * (t0 + t1);
    let zm = det_squared(&path(tm))? / reference;
    let (left, right) = (increment(z0, zm), increment(zm, z1));
    // Accept an interval only when both halves are small and agree with the whole, which
    // guards against phases that alias to the same value at both ends.
    if left.abs() <= MAX_STEP && right.abs() <= MAX_STEP && (left + right - increment(z0, z1)).abs() < 1e-9 {
        return Ok(left + right);
    }
    if depth == 0 {
        return Err(TwistError::Refinement(format!("winding unresolved near t = {t0}")));
    }
    Ok(winding(path, reference, (t0, tm), (z0, zm), depth - 1)? + winding(path, reference, (tm, t1), (zm, z1), depth - 1)?)
}

/// Maslov index of a closed path `t in [0, 1] -> A(t)` of Lagrangian frames, relative to the
/// reference frame: the winding number of `det^2(U_ref^* U(t))`. At least `MIN_SAMPLES` base
/// intervals are used, each refined adaptively until its phase increments stay below `pi / 8`.
pub fn maslov_index_loop(
    path: impl Fn(f64) -> DMatrix<Complex64>,
    reference: &DMatrix<Complex64>,
    samples: usize,
) -> Result<i64, TwistError> {
    let r = det_squared(reference)?;
    let start = det_squared(&path(0.0))?;
    let end = det_squared(&path(1.0))?;
    if (start - end).norm() > 1e-9 {
        return Err(TwistError::NotLagrangian("path is not closed".into()));
    }
    let samples = samples.max(MIN_SAMPLES);
    let mut total = 0.0;
    let mut prev = start / r;
    for k in 1..=samples {
        let t = k as f64 / samples as f64;
        let z = det_squared(&path(t))? / r;
        total += winding(&path, r, ((k - 1) as f64 / samples as f64, t), (prev, z), MAX_DEPTH)?;
        prev = z;
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// `e^{i theta/2} R^{c+1}` for `theta = 2 pi t`: the boundary condition `sqrt(z) R^{c+1}` over the unit circle.
pub fn sqrt_z_frame(c: usize, t: f64) -> DMatrix<Complex64> {
    DMatrix::identity(c + 1, c + 1) * Complex64::from_polar(1.0, PI * t)
}

/// `T(partial D) = i z R` over the unit circle `z = e^{2 pi i t}`.
pub fn boundary_tangent_frame(t: f64) -> DMatrix<Complex64> {
    DMatrix::from_element(1, 1, Complex64::i() * Complex64::from_polar(1.0, 2.0 * PI * t))
}

/// Maslov index of the vertical problem for the lowest-area sections: the index of
/// `(C^{c+1}, sqrt(z) R^{c+1})` minus that of `(TD, T(partial D))`.
pub fn section_index(c: usize) -> Result<i64, TwistError> {
    if c == 0 {
        return Err(TwistError::Profile("codimension must be at least 1".into()));
    }
    let full = maslov_index_loop(|t| sqrt_z_frame(c, t), &DMatrix::identity(c + 1, c + 1), 16)?;
    let disk = maslov_index_loop(boundary_tangent_frame, &DMatrix::identity(1, 1), 16)?;
    Ok(full - disk)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real_identity(n: usize) -> DMatrix<Complex64> {
        DMatrix::identity(n, n)
    }

    /// Phase increments of `det` itself on a dense uniform grid, doubled.
    fn dense_det_winding(path: impl Fn(f64) -> DMatrix<Complex64>, n: usize) -> i64 {
        let vals: Vec<Complex64> = (0..=n).map(|k| path(k as f64 / n as f64).determinant()).collect();
        let total: f64 = vals.windows(2).map(|w| (w[1] / w[0]).arg()).sum();
        (2.0 * total / (2.0 * PI)).round() as i64
    }

    #[test]
    fn sqrt_z_loop_has_index_c_plus_one() {
        for c in [1, 2, 3, 5] {
            assert_eq!(maslov_index_loop(|t| sqrt_z_frame(c, t), &real_identity(c + 1), 4).unwrap(), c as i64 + 1);
        }
    }

    #[test]
    fn section_index_is_c_minus_one() {
        for c in [1, 2, 3, 5] {
            assert_eq!(section_index(c).unwrap(), c as i64 - 1);
        }
    }

    #[test]
    fn full_rotation_of_a_line() {
        let path = |t: f64| DMatrix::from_element(1, 1, Complex64::from_polar(1.0, 2.0 * PI * t));
        assert_eq!(maslov_index_loop(path, &real_identity(1), 3).unwrap(), 2);
        assert_eq!(dense_det_winding(path, 10_000), 2);
    }

    #[test]
    fn constant_loop_is_zero() {
        let frame = DMatrix::from_row_slice(2, 2, &[Complex64::new(1.0, 1.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(2.0, -1.0)]);
        assert_eq!(maslov_index_loop(|_| frame.clone(), &real_identity(2), 5).unwrap(), 0);
    }

    #[test]
    fn non_unitary_frames_and_reference_changes() {
        // A frame rescaled by a real, non-orthogonal matrix spans the same Lagrangian.
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0]).map(Complex64::from);
        let path = |t: f64| sqrt_z_frame(2, t) * &m;
        let reference = DMatrix::from_diagonal_element(3, 3, Complex64::from_polar(1.0, 0.4));
        assert_eq!(maslov_index_loop(path, &reference, 2).unwrap(), 3);
        assert_eq!(dense_det_winding(path, 10_000), 3);
    }

    #[test]
    fn mixed_rotation_speeds() {
        // Rotating axes at speeds 3 and -1 winds det^2 by 2 (3 - 1).
        let path = |t: f64| {
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                Complex64::from_polar(1.0, 3.0 * PI * t),
                Complex64::from_polar(1.0, -PI * t),
            ]))
        };
        assert_eq!(maslov_index_loop(path, &real_identity(2), 1).unwrap(), 2);
        assert_eq!(dense_det_winding(path, 10_000), 2);
    }

    #[test]
    fn non_lagrangian_frames_are_rejected() {
        let bad = DMatrix::from_row_slice(2, 2, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert!(det_squared(&bad).is_err());
        assert!(det_squared(&DMatrix::zeros(2, 2)).is_err());
        let open = |t: f64| DMatrix::from_element(1, 1, Complex64::from_polar(1.0, PI * t / 2.0));
        assert!(maslov_index_loop(open, &real_identity(1), 4).is_err());
    }
}
