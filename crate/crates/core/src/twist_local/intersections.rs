use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::model::{dot, norm};
use super::{model_twist, AngleProfile, CotangentPoint, TwistError};

/// Grid resolution for bracketing sign changes of the angle equation.
const SCAN_POINTS: usize = 4096;
pub const ROOT_RESIDUAL: f64 = 1e-10;

/// A point `(v0, y)` of the fiber over `v0` whose twist lies in the fiber over `v1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionPoint {
    pub y: Vec<f64>,
    pub fiber_norm: f64,
    /// `|x(tau(v0, y)) - v1|`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Intersections {
    pub count: usize,
    pub points: Vec<IntersectionPoint>,
    /// Geodesic distance between the two base points.
    pub distance: f64,
}

/// Unit `v1`-direction in the tangent space at `v0` and the distance `d(v0, v1)`.
fn geodesic(v0: &[f64], v1: &[f64]) -> Result<(Vec<f64>, f64), TwistError> {
    if v0.len() != v1.len() || v0.len() < 2 {
        return Err(TwistError::Point("base points must lie on the same sphere S^c, c >= 1".into()));
    }
    for v in [v0, v1] {
        if (norm(v) - 1.0).abs() > 1e-12 {
            return Err(TwistError::Point(format!("|v| = {} is not 1", norm(v))));
        }
    }
    let cos = dot(v0, v1).clamp(-1.0, 1.0);
    if cos > 1.0 - 1e-12 {
        return Err(TwistError::Transversality("the two fibers coincide".into()));
    }
    if cos < -1.0 + 1e-8 {
        return Err(TwistError::IllConditioned("base points are (nearly) antipodal".into()));
    }
    let t: Vec<f64> = v1.iter().zip(v0).map(|(a, b)| a - cos * b).collect();
    let n = norm(&t);
    Ok((t.iter().map(|v| v / n).collect(), cos.acos()))
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Points of `L0 ∩ tau^{-1} L1` for the cotangent fibers `L_k` over `v_k`, within the chart
/// `|y| <= chart_radius`.
///
/// Along the direction `+u` towards `v1` the twist lands in `L1` iff the rotation angle equals
/// `d(v0, v1)`; along `-u` it must equal `2 pi - d(v0, v1)`. Both equations are bracketed on a
/// grid and refined by bisection.
pub fn count_twisted_intersections(
    v0: &[f64],
    v1: &[f64],
    a: &AngleProfile,
    chart_radius: f64,
) -> Result<Intersections, TwistError> {
    let (u, dist) = geodesic(v0, v1)?;
    let mut points = Vec::new();
    for (sign, target) in [(1.0, dist), (-1.0, 2.0 * PI - dist)] {
        let g = |r: f64| a.angle(r) - target;
        let grid: Vec<f64> = (1..=SCAN_POINTS).map(|k| chart_radius * k as f64 / SCAN_POINTS as f64).collect();
        let mut prev = (0.0, g(0.0));
        for &r in &grid {
            let cur = (r, g(r));
            if cur.1 == 0.0 || (prev.1 != 0.0 && (prev.1 > 0.0) != (cur.1 > 0.0)) {
                let root = if cur.1 == 0.0 { r } else { bisect(g, prev.0, r) };
                let y: Vec<f64> = u.iter().map(|v| sign * root * v).collect();
                let image = model_twist(&CotangentPoint::project(v0, &y), a);
                let residual = norm(&image.x().iter().zip(v1).map(|(p, q)| p - q).collect::<Vec<_>>());
                if residual < ROOT_RESIDUAL {
                    points.push(IntersectionPoint { y, fiber_norm: root, residual });
                }
            }
            prev = cur;
        }
    }
    Ok(Intersections { count: points.len(), points, distance: dist })
}

/// Rescaling beyond which the angle equation has a unique, simple root inside a chart of
/// radius `chart_radius`.
///
/// The profile has `zeta'' < 0` on `(0, eps)`, so the angle is strictly decreasing from `pi`
/// to `0` on `(0, eps / delta)` and every `d in (0, pi)` has exactly one preimage. For
/// `delta > eps / chart_radius` the whole support, and with it the root, lies in the chart.
/// The interior sign of `zeta''` is confirmed on a grid before the bound is returned.
pub fn threshold_delta(a: &AngleProfile, v0: &[f64], v1: &[f64], chart_radius: f64) -> Result<f64, TwistError> {
    geodesic(v0, v1)?;
    // Written to also reject NaN.
    if chart_radius.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(TwistError::Profile(format!("chart radius must be positive, got {chart_radius}")));
    }
    let n = 1000;
    let eps = a.eps();
    if (1..n).any(|k| a.zeta_second(eps * k as f64 / n as f64) >= 0.0) {
        return Err(TwistError::Profile("angle function is not strictly decreasing on its support".into()));
    }
    Ok(eps / chart_radius)
}
