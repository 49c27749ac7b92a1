use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{AngleProfile, TwistError};

const POINT_TOL: f64 = 1e-12;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpby(a: f64, x: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(u, v)| a * u + b * v).collect()
}

/// Point `(x, y)` of `T*S^c` inside `R^(c+1) x R^(c+1)`: `|x| = 1` and `x . y = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CotangentPoint {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl CotangentPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, TwistError> {
        if x.len() < 2 || x.len() != y.len() {
            return Err(TwistError::Point(format!("need x, y in R^(c+1) with c >= 1, got {} and {}", x.len(), y.len())));
        }
        if (norm(&x) - 1.0).abs() > POINT_TOL {
            return Err(TwistError::Point(format!("|x| = {} is not 1", norm(&x))));
        }
        if dot(&x, &y).abs() > POINT_TOL * (1.0 + norm(&y)) {
            return Err(TwistError::Point(format!("x . y = {} is not 0", dot(&x, &y))));
        }
        Ok(Self { x, y })
    }

    /// Projects arbitrary vectors onto `T*S^c`; `x` must be nonzero.
    pub fn project(x: &[f64], y: &[f64]) -> Self {
        let n = norm(x);
        let x: Vec<f64> = x.iter().map(|v| v / n).collect();
        let y = axpby(1.0, y, -dot(&x, y), &x);
        Self { x, y }
    }

    pub fn on_zero_section(x: Vec<f64>) -> Result<Self, TwistError> {
        let y = vec![0.0; x.len()];
        Self::new(x, y)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Codimension `c` of the zero section `S^c`.
    pub fn codim(&self) -> usize {
        self.x.len() - 1
    }

    pub fn fiber_norm(&self) -> f64 {
        norm(&self.y)
    }

    /// `(x, s y)`: the fiberwise scalar action.
    pub fn scaled(&self, s: f64) -> Self {
        Self { x: self.x.clone(), y: self.y.iter().map(|v| s * v).collect() }
    }

    /// Ambient coordinates `(x, y)` in `R^(2c+2)`.
    pub fn ambient(&self) -> Vec<f64> {
        self.x.iter().chain(&self.y).copied().collect()
    }

    pub fn rotated(&self, r: &DMatrix<f64>) -> Self {
        let apply = |v: &[f64]| (r * nalgebra::DVector::from_column_slice(v)).as_slice().to_vec();
        Self { x: apply(&self.x), y: apply(&self.y) }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let a = self.ambient();
        let b = other.ambient();
        norm(&axpby(1.0, &a, -1.0, &b))
    }

    /// Uniform `x` on the sphere, uniform direction of `y` in `x^perp`, `|y|` uniform in `(0, r_max)`.
    pub fn random(rng: &mut impl Rng, c: usize, r_max: f64) -> Self {
        let gauss = |rng: &mut dyn rand::RngCore| -> Vec<f64> { (0..=c).map(|_| StandardNormal.sample(rng)).collect() };
        let x = gauss(rng);
        let mut p = Self::project(&x, &gauss(rng));
        let r = r_max * rng.random_range(f64::EPSILON..1.0);
        let n = p.fiber_norm();
        p.y.iter_mut().for_each(|v| *v *= r / n);
        p
    }
}

/// Rotation by `sigma` in the plane of `(x, y/|y|)`, preserving `|y|`.
fn rotate(p: &CotangentPoint, sigma: f64) -> CotangentPoint {
    let r = p.fiber_norm();
    if r == 0.0 {
        // The rotation degenerates to the antipodal map on the zero section.
        return CotangentPoint { x: p.x.iter().map(|v| -v).collect(), y: p.y.clone() };
    }
    let (s, c) = sigma.sin_cos();
    CotangentPoint { x: axpby(c, &p.x, s / r, &p.y), y: axpby(-r * s, &p.x, c, &p.y) }
}

/// Time `2 pi` flow of `zeta(|y|)`: normalized geodesic flow by `2 pi zeta'(delta |y|)`.
pub fn model_twist(p: &CotangentPoint, a: &AngleProfile) -> CotangentPoint {
    rotate(p, a.angle(p.fiber_norm()))
}

pub fn model_twist_inverse(p: &CotangentPoint, a: &AngleProfile) -> CotangentPoint {
    rotate(p, -a.angle(p.fiber_norm()))
}

/// Point of the trivial bundle `T^k x T*S^c`; base coordinates live in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberedPoint {
    b: Vec<f64>,
    p: CotangentPoint,
}

impl FiberedPoint {
    pub fn new(b: Vec<f64>, p: CotangentPoint) -> Self {
        Self { b: b.into_iter().map(|t| t.rem_euclid(1.0)).collect(), p }
    }

    pub fn base(&self) -> &[f64] {
        &self.b
    }

    pub fn fiber(&self) -> &CotangentPoint {
        &self.p
    }
}

/// Fiberwise model twist over the trivial base.
pub fn fibered_twist(fp: &FiberedPoint, a: &AngleProfile) -> FiberedPoint {
    FiberedPoint { b: fp.b.clone(), p: model_twist(&fp.p, a) }
}

/// Chart of `T*S^c` around `p` whose differential at `0` is a Darboux basis
/// `(u_k, -(y . u_k) x), (0, u_k)` with `u_k` an orthonormal basis of `x^perp`.
fn darboux_chart(p: &CotangentPoint) -> impl Fn(&[f64]) -> CotangentPoint + '_ {
    let n = p.x.len();
    let basis = orthonormal_complement(&p.x);
    move |s: &[f64]| {
        let c = n - 1;
        let mut x = p.x.clone();
        let mut y = p.y.clone();
        for k in 0..c {
            for i in 0..n {
                x[i] += s[k] * basis[k][i];
                y[i] += s[c + k] * basis[k][i];
            }
        }
        CotangentPoint::project(&x, &y)
    }
}

/// Orthonormal basis of `x^perp` for a unit vector `x`, by Gram-Schmidt on the standard basis.
fn orthonormal_complement(x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut out: Vec<Vec<f64>> = vec![x.to_vec()];
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        for b in &out {
            let d = dot(&e, b);
            e = axpby(1.0, &e, -d, b);
        }
        let m = norm(&e);
        if m > 1e-6 {
            out.push(e.iter().map(|v| v / m).collect());
        }
        if out.len() == n {
            break;
        }
    }
    out.remove(0);
    out
}

/// `|W^T Omega0 W - Omega|` where `W` is the central-difference Jacobian of `f` in a Darboux
/// chart at `p`, `Omega0` the ambient form `sum dx_i ^ dy_i` and `Omega` the standard form.
pub fn symplectic_defect_at(f: impl Fn(&CotangentPoint) -> CotangentPoint, p: &CotangentPoint, h: f64) -> f64 {
    let c = p.codim();
    let n = c + 1;
    let chart = darboux_chart(p);
    let mut w = DMatrix::<f64>::zeros(2 * n, 2 * c);
    for k in 0..2 * c {
        let mut s = vec![0.0; 2 * c];
        s[k] = h;
        let plus = f(&chart(&s)).ambient();
        s[k] = -h;
        let minus = f(&chart(&s)).ambient();
        for i in 0..2 * n {
            w[(i, k)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    let mut omega0 = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        omega0[(i, n + i)] = 1.0;
        omega0[(n + i, i)] = -1.0;
    }
    let mut omega = DMatrix::<f64>::zeros(2 * c, 2 * c);
    for i in 0..c {
        omega[(i, c + i)] = 1.0;
        omega[(c + i, i)] = -1.0;
    }
    (w.transpose() * omega0 * w - omega).amax()
}

/// Largest symplectic defect of the model twist over random points with `|y|` in `(0, 2 eps / delta)`.
pub fn symplectic_check(a: &AngleProfile, c: usize, samples: usize, h: f64, rng: &mut impl Rng) -> f64 {
    (0..samples)
        .map(|_| {
            let p = CotangentPoint::random(rng, c, 2.0 * a.support_radius());
            symplectic_defect_at(|q| model_twist(q, a), &p, h)
        })
        .fold(0.0, f64::max)
}

/// Haar-random element of `SO(n)` from the QR decomposition of a Gaussian matrix.
pub fn random_rotation(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceDefect {
    /// `max |tau(R p) - R tau(p)|`.
    pub rotation: f64,
    /// `max ||y(tau(p))| - |y(p)||`.
    pub moment: f64,
}

pub fn equivariance_check(a: &AngleProfile, c: usize, samples: usize, rng: &mut impl Rng) -> EquivarianceDefect {
    let mut out = EquivarianceDefect { rotation: 0.0, moment: 0.0 };
    for _ in 0..samples {
        let r = random_rotation(rng, c + 1);
        let p = CotangentPoint::random(rng, c, 2.0 * a.support_radius());
        let lhs = model_twist(&p.rotated(&r), a);
        let rhs = model_twist(&p, a).rotated(&r);
        out.rotation = out.rotation.max(lhs.distance(&rhs));
        out.moment = out.moment.max((model_twist(&p, a).fiber_norm() - p.fiber_norm()).abs());
    }
    out
}
