use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::su2::{alcove, product, sample_class, AlcoveValue, Su2};
use super::HolonomyError;

/// Singular values below this count as zero in every rank decision.
pub const RANK_CUTOFF: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    #[serde(rename = "+I")]
    PlusIdentity,
    #[serde(rename = "-I")]
    MinusIdentity,
}

impl Target {
    pub fn element(&self) -> Su2 {
        match self {
            Target::PlusIdentity => Su2::IDENTITY,
            Target::MinusIdentity => Su2::MINUS_IDENTITY,
        }
    }
}

/// Holonomies `(g_1, ..., g_n)` around the markings of a sphere, `g_i` in the class of `labels[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolonomyTuple {
    pub elements: Vec<Su2>,
    pub labels: Vec<AlcoveValue>,
    pub target: Target,
}

impl HolonomyTuple {
    /// `|g_1 ... g_n - target|` as quaternions.
    pub fn residual(&self) -> f64 {
        product(&self.elements).distance(&self.target.element())
    }

    /// Largest deviation of `tr g_i` from `2 cos(2 pi mu_i)`.
    pub fn label_defect(&self) -> f64 {
        self.elements
            .iter()
            .zip(&self.labels)
            .map(|(g, mu)| (g.trace() - 2.0 * (2.0 * std::f64::consts::PI * mu.value()).cos()).abs())
            .fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.elements.iter().zip(&other.elements).map(|(g, h)| g.distance(h)).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub restarts: usize,
    pub iterations: usize,
    /// Restart when the solution is within `1e-6` of the reducible locus.
    pub reject_reducible: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-10, restarts: 64, iterations: 200, reject_reducible: false }
    }
}

fn cross(u: [f64; 3], v: [f64; 3]) -> [f64; 3] {
    [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
}

/// Orthonormal basis of the plane orthogonal to the unit vector `n`.
fn plane_basis(n: [f64; 3]) -> [[f64; 3]; 2] {
    let seed = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = cross(n, seed);
    let m = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    let e1 = e1.map(|x| x / m);
    [e1, cross(n, e1)]
}

fn axis(g: &Su2) -> [f64; 3] {
    let v = g.imag();
    let m = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.map(|x| x / m)
}

fn pure(v: [f64; 3]) -> Su2 {
    Su2::normalized([0.0, v[0], v[1], v[2]])
}

fn quat_sub(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

/// Tangent directions at each interior element: `(i, xi)` where moving `g_i` along
/// `Ad(exp(t xi)) g_i` changes the product. Central elements contribute nothing.
fn class_directions(t: &HolonomyTuple) -> Vec<(usize, [f64; 3])> {
    let mut dirs = Vec::new();
    for (i, (g, mu)) in t.elements.iter().zip(&t.labels).enumerate() {
        if !mu.is_central() {
            for e in plane_basis(axis(g)) {
                dirs.push((i, e));
            }
        }
    }
    dirs
}

/// Derivative of the product along `Ad(exp(t xi)) g_i`, as a raw quaternion:
/// `g_1 ... g_{i-1} (xi g_i - g_i xi) g_{i+1} ... g_n`.
fn product_derivative(elements: &[Su2], i: usize, xi: [f64; 3]) -> [f64; 4] {
    let left = product(&elements[..i]);
    let right = product(&elements[i + 1..]);
    let x = [0.0, xi[0], xi[1], xi[2]];
    let g = elements[i].quaternion();
    let mul = |a: [f64; 4], b: [f64; 4]| -> [f64; 4] {
        // Hamilton product on raw quaternions.
        let [a1, b1, c1, d1] = a;
        let [a2, b2, c2, d2] = b;
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ]
    };
    let comm = quat_sub(&mul(x, g), &mul(g, x));
    mul(mul(left.quaternion(), comm), right.quaternion())
}

fn jacobian(elements: &[Su2], dirs: &[(usize, [f64; 3])]) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(4, dirs.len());
    for (col, &(i, xi)) in dirs.iter().enumerate() {
        let d = product_derivative(elements, i, xi);
        for r in 0..4 {
            j[(r, col)] = d[r];
        }
    }
    j
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    m.clone().svd(false, false).singular_values.iter().filter(|&&s| s > RANK_CUTOFF).count()
}

/// Projected Gauss-Newton on `|g_1 ... g_n - target|^2`. Each step is the minimum-norm
/// least-squares update in the tangent directions of the classes, applied by conjugation, so
/// iterates stay on their classes up to rounding; each `g_i` is re-projected onto its class
/// afterwards. Steps that do not decrease the residual are halved.
pub fn solve_rep_variety(
    labels: &[AlcoveValue],
    target: Target,
    rng: &mut impl Rng,
    opts: SolveOptions,
) -> Result<HolonomyTuple, HolonomyError> {
    if labels.is_empty() {
        return Err(HolonomyError::Label("no markings".into()));
    }
    let mut best = f64::INFINITY;
    for _ in 0..opts.restarts.max(1) {
        let mut t = HolonomyTuple {
            elements: labels.iter().map(|mu| sample_class(*mu, rng)).collect(),
            labels: labels.to_vec(),
            target,
        };
        let mut res = t.residual();
        for _ in 0..opts.iterations {
            if res < opts.tol * 1e-3 {
                break;
            }
            let dirs = class_directions(&t);
            if dirs.is_empty() {
                break;
            }
            let j = jacobian(&t.elements, &dirs);
            let f = DVector::from_column_slice(&quat_sub(&product(&t.elements).quaternion(), &target.element().quaternion()));
            let Ok(step) = j.svd(true, true).solve(&f, 1e-12) else { break };
            let mut scale = 1.0;
            let mut improved = false;
            while scale > 1e-6 {
                let cand = apply_step(&t, &dirs, &step, -scale);
                let r = cand.residual();
                if r < res {
                    t = cand;
                    res = r;
                    improved = true;
                    break;
                }
                scale *= 0.5;
            }
            if !improved {
                break;
            }
        }
        best = best.min(res);
        if res < opts.tol && t.label_defect() < opts.tol {
            if opts.reject_reducible && smallest_stabilizer_singular_value(&t.elements) < 1e-6 {
                continue;
            }
            return Ok(t);
        }
    }
    Err(HolonomyError::NoSolution { restarts: opts.restarts, best_residual: best })
}

fn apply_step(t: &HolonomyTuple, dirs: &[(usize, [f64; 3])], step: &DVector<f64>, scale: f64) -> HolonomyTuple {
    let mut xi = vec![[0.0; 3]; t.len()];
    for (k, &(i, d)) in dirs.iter().enumerate() {
        for a in 0..3 {
            xi[i][a] += scale * step[k] * d[a];
        }
    }
    let elements = t
        .elements
        .iter()
        .zip(&t.labels)
        .zip(&xi)
        .map(|((g, mu), v)| {
            if mu.is_central() {
                return *g;
            }
            let moved = g.conjugate_by(&Su2::exp(*v));
            Su2::in_class(mu.value(), axis(&moved))
        })
        .collect();
    HolonomyTuple { elements, labels: t.labels.clone(), target: t.target }
}

/// Stacked map `xi -> ([xi, g_i])_i` from `su(2)` as a `4n x 3` matrix.
fn stabilizer_operator(elements: &[Su2]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(4 * elements.len(), 3);
    for (i, g) in elements.iter().enumerate() {
        for a in 0..3 {
            let mut e = [0.0; 3];
            e[a] = 1.0;
            let x = pure(e);
            let c = quat_sub(&(x * *g).quaternion(), &(*g * x).quaternion());
            for r in 0..4 {
                m[(4 * i + r, a)] = c[r];
            }
        }
    }
    m
}

fn smallest_stabilizer_singular_value(elements: &[Su2]) -> f64 {
    stabilizer_operator(elements).svd(false, false).singular_values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Dimension of the common centralizer in `su(2)`: 3 central, 1 abelian, 0 irreducible.
pub fn stabilizer_dimension(elements: &[Su2]) -> usize {
    3 - numerical_rank(&stabilizer_operator(elements))
}

/// Local dimension of the moduli space at `t`: `dim ker D mu` minus the dimension of the
/// conjugation orbit, `3 - dim stabilizer`. At irreducible points this is `dim ker D mu - 3`.
pub fn tangent_dimension(t: &HolonomyTuple) -> Result<i64, HolonomyError> {
    if t.residual() > 1e-8 {
        return Err(HolonomyError::NotSolved(t.residual()));
    }
    let dirs = class_directions(t);
    let rank = numerical_rank(&jacobian(&t.elements, &dirs));
    let kernel = (dirs.len() - rank) as i64;
    let orbit = 3 - stabilizer_dimension(&t.elements) as i64;
    Ok(kernel - orbit)
}

fn check_range(t: &HolonomyTuple, r: &Range<usize>) -> Result<(), HolonomyError> {
    if r.is_empty() || r.end > t.len() {
        return Err(HolonomyError::Range(format!("{r:?} in a tuple of length {}", t.len())));
    }
    Ok(())
}

/// Alcove value of the holonomy `prod_{i in range} g_i` around a curve enclosing `range`.
pub fn rho_y(t: &HolonomyTuple, range: Range<usize>) -> Result<AlcoveValue, HolonomyError> {
    check_range(t, &range)?;
    Ok(alcove(&product(&t.elements[range])))
}

/// `(rho_Y, rho_Y) / 2` with the coroot normalized to norm square 2.
pub fn h_y(t: &HolonomyTuple, range: Range<usize>) -> Result<f64, HolonomyError> {
    let r = rho_y(t, range)?.value();
    Ok(r * r / 2.0)
}

/// Framing change by the enclosed holonomy `h`: `g_i -> h g_i h^{-1}` inside `range`.
/// A central `h` (imaginary part at rounding level) acts as the identity, exactly.
pub fn full_twist(t: &HolonomyTuple, range: Range<usize>) -> Result<HolonomyTuple, HolonomyError> {
    check_range(t, &range)?;
    let h = product(&t.elements[range.clone()]);
    let mut out = t.clone();
    if h.imag().iter().all(|x| x.abs() < 1e-12) {
        return Ok(out);
    }
    for g in &mut out.elements[range] {
        *g = g.conjugate_by(&h);
    }
    Ok(out)
}

/// `(.., g_i, g_{i+1}, ..) -> (.., g_i g_{i+1} g_i^{-1}, g_i, ..)`.
pub fn half_twist(t: &HolonomyTuple, i: usize) -> Result<HolonomyTuple, HolonomyError> {
    if i + 1 >= t.len() {
        return Err(HolonomyError::Range(format!("half twist at {i} in a tuple of length {}", t.len())));
    }
    if t.labels[i] != t.labels[i + 1] {
        return Err(HolonomyError::Label(format!("labels {} and {} differ", t.labels[i].value(), t.labels[i + 1].value())));
    }
    let mut out = t.clone();
    let (a, b) = (t.elements[i], t.elements[i + 1]);
    out.elements[i] = b.conjugate_by(&a);
    out.elements[i + 1] = a;
    Ok(out)
}

/// `(.., a, b, ..) -> (.., b, b^{-1} a b, ..)`.
pub fn half_twist_inverse(t: &HolonomyTuple, i: usize) -> Result<HolonomyTuple, HolonomyError> {
    if i + 1 >= t.len() {
        return Err(HolonomyError::Range(format!("half twist at {i} in a tuple of length {}", t.len())));
    }
    let mut out = t.clone();
    let (a, b) = (t.elements[i], t.elements[i + 1]);
    out.elements[i] = b;
    out.elements[i + 1] = a.conjugate_by(&b.inverse());
    Ok(out)
}

/// Applies half twists at the given (zero-based) positions from left to right.
pub fn braid(t: &HolonomyTuple, word: &[usize]) -> Result<HolonomyTuple, HolonomyError> {
    word.iter().try_fold(t.clone(), |acc, &i| half_twist(&acc, i))
}

/// Distance between the half twist of `(g_i, g_j)` and conjugation of the pair by a square
/// root of `-g_i g_j`, minimized over both roots.
pub fn half_twist_ad_sqrt_check(gi: &Su2, gj: &Su2) -> Result<f64, HolonomyError> {
    for g in [gi, gj] {
        if g.trace().abs() > 1e-9 {
            return Err(HolonomyError::Label(format!("trace {} is not zero", g.trace())));
        }
    }
    let m = (*gi * *gj).neg();
    let (s, t) = m.sqrt().ok_or(HolonomyError::Singular)?;
    let twisted = [gj.conjugate_by(gi), *gi];
    let defect = |s: &Su2| twisted[0].distance(&gi.conjugate_by(s)).max(twisted[1].distance(&gj.conjugate_by(s)));
    Ok(defect(&s).min(defect(&t)))
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn quarter(n: usize) -> Vec<AlcoveValue> {
        vec![AlcoveValue::new(0.25).unwrap(); n]
    }

    fn random_tuple(rng: &mut ChaCha8Rng, n: usize) -> HolonomyTuple {
        let labels: Vec<AlcoveValue> = (0..n).map(|_| AlcoveValue::new(rng.random_range(0.05..0.45)).unwrap()).collect();
        let elements: Vec<Su2> = labels.iter().map(|mu| sample_class(*mu, rng)).collect();
        HolonomyTuple { elements, labels, target: Target::PlusIdentity }
    }

    #[test]
    fn two_point_case() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = solve_rep_variety(&quarter(2), Target::PlusIdentity, &mut rng, SolveOptions::default()).unwrap();
        assert!(t.residual() < 1e-10);
        assert!(t.elements[1].distance(&t.elements[0].inverse()) < 1e-10);
        assert!(t.elements[1].trace().abs() < 1e-12);
        assert_eq!(stabilizer_dimension(&t.elements), 1);
        assert_eq!(tangent_dimension(&t).unwrap(), 0);
    }

    #[test]
    fn five_quarter_labels_give_a_four_manifold() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let opts = SolveOptions { reject_reducible: true, ..SolveOptions::default() };
        for _ in 0..5 {
            let t = solve_rep_variety(&quarter(5), Target::PlusIdentity, &mut rng, opts).unwrap();
            assert!(t.residual() < 1e-10 && t.label_defect() < 1e-10);
            assert_eq!(stabilizer_dimension(&t.elements), 0);
            assert_eq!(tangent_dimension(&t).unwrap(), 4);
        }
    }

    #[test]
    fn three_quarter_labels_are_rigid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = solve_rep_variety(&quarter(3), Target::PlusIdentity, &mut rng, SolveOptions::default()).unwrap();
        assert_eq!(stabilizer_dimension(&t.elements), 0);
        assert_eq!(tangent_dimension(&t).unwrap(), 0);
    }

    #[test]
    fn minus_identity_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = solve_rep_variety(&quarter(4), Target::MinusIdentity, &mut rng, SolveOptions::default()).unwrap();
        assert!(t.residual() < 1e-10);
    }

    #[test]
    fn central_label_blocks_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let labels = [AlcoveValue::new(0.0).unwrap(), AlcoveValue::new(0.25).unwrap()];
        let opts = SolveOptions { restarts: 4, ..SolveOptions::default() };
        match solve_rep_variety(&labels, Target::PlusIdentity, &mut rng, opts) {
            Err(HolonomyError::NoSolution { best_residual, .. }) => assert!(best_residual > 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stabilizer_examples() {
        assert_eq!(stabilizer_dimension(&[Su2::IDENTITY, Su2::MINUS_IDENTITY]), 3);
        let d1 = Su2::in_class(0.1, [1.0, 0.0, 0.0]);
        let d2 = Su2::in_class(0.3, [1.0, 0.0, 0.0]);
        assert_eq!(stabilizer_dimension(&[d1, d2, Su2::IDENTITY]), 1);
        assert_eq!(stabilizer_dimension(&[d1, Su2::in_class(0.3, [0.0, 1.0, 0.0])]), 0);
    }

    #[test]
    fn rho_and_h() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let t = solve_rep_variety(&quarter(5), Target::PlusIdentity, &mut rng, SolveOptions::default()).unwrap();
        assert!(rho_y(&t, 0..5).unwrap().value() < 1e-5);
        assert!((rho_y(&t, 2..3).unwrap().value() - 0.25).abs() < 1e-12);
        let r = rho_y(&t, 0..2).unwrap().value();
        assert!((0.0..=0.5).contains(&r));
        assert_eq!(r, alcove(&(t.elements[0] * t.elements[1])).value());
        assert!((h_y(&t, 0..2).unwrap() - r * r / 2.0).abs() < 1e-15);
        assert!(rho_y(&t, 3..3).is_err() && rho_y(&t, 4..6).is_err());
    }

    #[test]
    fn twists_preserve_relation_and_labels() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = solve_rep_variety(&quarter(5), Target::PlusIdentity, &mut rng, SolveOptions::default()).unwrap();
        for range in [0..2, 1..4, 2..5] {
            let f = full_twist(&t, range.clone()).unwrap();
            assert!(f.residual() < 1e-10 && f.label_defect() < 1e-12);
            assert!((rho_y(&f, range.clone()).unwrap().value() - rho_y(&t, range).unwrap().value()).abs() < 1e-12);
        }
        for i in 0..4 {
            let h = half_twist(&t, i).unwrap();
            assert!(h.residual() < 1e-10 && h.label_defect() < 1e-12);
            assert!(half_twist_inverse(&h, i).unwrap().distance(&t) < 1e-12);
            let twice = half_twist(&h, i).unwrap();
            assert!(twice.distance(&full_twist(&t, i..i + 2).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn braid_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let mut t = random_tuple(&mut rng, 5);
            t.labels = vec![t.labels[0]; 5];
            t.elements = t.labels.iter().map(|mu| sample_class(*mu, &mut rng)).collect();
            assert!(braid(&t, &[0, 1, 0]).unwrap().distance(&braid(&t, &[1, 0, 1]).unwrap()) < 1e-12);
            assert!(braid(&t, &[0, 2]).unwrap().distance(&braid(&t, &[2, 0]).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn central_enclosed_holonomy_is_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = sample_class(AlcoveValue::new(0.25).unwrap(), &mut rng);
        let h = sample_class(AlcoveValue::new(0.2).unwrap(), &mut rng);
        // (g, g^{-1}) encloses I; (g, g) encloses g^2 = -I.
        for pair in [[g, g.inverse()], [g, g]] {
            let elements = vec![pair[0], pair[1], h, h.inverse()];
            let labels = elements.iter().map(alcove).collect();
            let t = HolonomyTuple { elements, labels, target: Target::PlusIdentity };
            assert_eq!(full_twist(&t, 0..2).unwrap(), t);
        }
    }

    #[test]
    fn half_twist_is_an_ad_sqrt_conjugation() {
        let n = Su2::WEYL;
        let tt = Su2::in_class(0.13, [1.0, 0.0, 0.0]);
        let gj = tt * n;
        // g_i g_j g_i^{-1} = n t = t^{-1} n.
        assert!(gj.conjugate_by(&n).distance(&(n * tt)) < 1e-15);
        assert!((n * tt).distance(&(tt.inverse() * n)) < 1e-15);
        assert!(half_twist_ad_sqrt_check(&n, &gj).unwrap() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let q = AlcoveValue::new(0.25).unwrap();
        for _ in 0..100 {
            let (a, b) = (sample_class(q, &mut rng), sample_class(q, &mut rng));
            assert!(half_twist_ad_sqrt_check(&a, &b).unwrap() < 1e-10);
        }
        assert!(matches!(half_twist_ad_sqrt_check(&n, &n.inverse()), Err(HolonomyError::Singular)));
        assert!(half_twist_ad_sqrt_check(&Su2::IDENTITY, &n).is_err());
    }

    #[test]
    fn half_twist_requires_equal_labels() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = random_tuple(&mut rng, 3);
        assert!(matches!(half_twist(&t, 0), Err(HolonomyError::Label(_))));
        assert!(half_twist(&t, 2).is_err());
    }
}
