//! Independent cross-checks used by the suites. None of them calls the routine it checks.

use dehnforge::linalg::Matrix;
use dehnforge::twist_local::{model_twist, AngleProfile, CotangentPoint};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

/// Number of `x in (Z/w)^n` with `a x = 0` and `k x in im(b)`, divided by `|im(b)|`: the size of
/// the `k`-torsion of `ker(a) / im(b)` over `Z/w`, for every divisor `k` of `w`.
pub fn mf_torsion_counts(a: &Matrix<BigInt>, b: &Matrix<BigInt>, w: i64) -> Vec<(i64, usize)> {
    let cube = |len: usize| -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            out = out.into_iter().flat_map(|v| (0..w).map(move |x| [v.clone(), vec![x]].concat())).collect();
        }
        out
    };
    let apply = |m: &Matrix<BigInt>, x: &[i64]| -> Vec<i64> {
        (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| (m[(i, j)].to_i64().expect("small entry") % w) * x[j]).sum::<i64>().rem_euclid(w))
            .collect()
    };
    let kernel: Vec<Vec<i64>> = cube(a.cols()).into_iter().filter(|x| apply(a, x).iter().all(|v| *v == 0)).collect();
    let image: std::collections::BTreeSet<Vec<i64>> = cube(b.cols()).iter().map(|y| apply(b, y)).collect();
    (1..=w)
        .filter(|k| w % k == 0)
        .map(|k| {
            let hits = kernel.iter().filter(|x| image.contains(&x.iter().map(|v| (k * v).rem_euclid(w)).collect::<Vec<_>>())).count();
            (k, hits / image.len())
        })
        .collect()
}

/// Right-handed PL twist of `R^2 / Z^2` along a horizontal circle, `(x, y) -> (x + F(y), y)`,
/// with `F` rising by one across `0.4 <= y <= 0.6` in each unit band.
fn pl_twist(x: f64, y: f64) -> (f64, f64) {
    let band = y.floor();
    let f = band + ((y - band - 0.4) / 0.2).clamp(0.0, 1.0);
    ((x + f).rem_euclid(1.0), y.rem_euclid(1.0))
}

/// Image of the class `(a, b)` under the PL twist: the straight loop is pushed through the
/// twist on the torus and the image path is unwrapped in the universal cover.
pub fn torus_twist_action(a: i64, b: i64) -> (i64, i64) {
    let steps = 10_000;
    let point = |s: f64| pl_twist((s * a as f64).rem_euclid(1.0), (s * b as f64 + 0.1).rem_euclid(1.0));
    let (mut px, mut py) = point(0.0);
    let (mut dx, mut dy) = (0.0, 0.0);
    for i in 1..=steps {
        let (qx, qy) = point(i as f64 / steps as f64);
        let wrap = |d: f64| d - d.round();
        dx += wrap(qx - px);
        dy += wrap(qy - py);
        (px, py) = (qx, qy);
    }
    (dx.round() as i64, dy.round() as i64)
}

/// Matrix of the twist on `H_1(T^2)` in the basis `(1, 0), (0, 1)`.
pub fn torus_twist_matrix() -> Matrix<BigInt> {
    let (e1, e2) = (torus_twist_action(1, 0), torus_twist_action(0, 1));
    Matrix::from_rows(vec![vec![BigInt::from(e1.0), BigInt::from(e2.0)], vec![BigInt::from(e1.1), BigInt::from(e2.1)]])
}

/// Zeros of the landing error `|x(tau(v0, s u)) - v1|` on a dense grid of `s in [-R, R]`,
/// where `u` is the unit tangent at `v0` towards `v1`.
pub fn dense_intersection_count(v0: &[f64], v1: &[f64], a: &AngleProfile, radius: f64) -> usize {
    let c: f64 = v0.iter().zip(v1).map(|(p, q)| p * q).sum();
    let t: Vec<f64> = v1.iter().zip(v0).map(|(q, p)| q - c * p).collect();
    let tn = t.iter().map(|x| x * x).sum::<f64>().sqrt();
    let u: Vec<f64> = t.iter().map(|x| x / tn).collect();
    let n = 20_000;
    let err = |s: f64| {
        let y: Vec<f64> = u.iter().map(|v| s * v).collect();
        let x = model_twist(&CotangentPoint::project(v0, &y), a);
        x.x().iter().zip(v1).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
    };
    let vals: Vec<f64> = (0..=2 * n).map(|k| err(radius * (k as f64 - n as f64) / n as f64)).collect();
    (1..2 * n).filter(|&k| vals[k] < vals[k - 1] && vals[k] <= vals[k + 1] && vals[k] < 1e-3).count()
}
