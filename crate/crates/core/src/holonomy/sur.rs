use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::Ratio;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::{json, Value};

use super::HolonomyError;

/// Point of the Cartan subalgebra of `SU(r)` in coordinates summing to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector {
    coords: Vec<Ratio<i64>>,
}

impl WeightVector {
    pub fn new(coords: Vec<Ratio<i64>>) -> Result<Self, HolonomyError> {
        if coords.len() < 2 {
            return Err(HolonomyError::Range(format!("rank parameter {} < 2", coords.len())));
        }
        if coords.iter().sum::<Ratio<i64>>() != Ratio::from_integer(0) {
            return Err(HolonomyError::Label("coordinates do not sum to zero".into()));
        }
        Ok(Self { coords })
    }

    pub fn r(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Ratio<i64>] {
        &self.coords
    }

    pub fn midpoint(&self, other: &Self) -> Self {
        let half = Ratio::new(1, 2);
        Self { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| (a + b) * half).collect() }
    }

    pub fn scaled(&self, s: Ratio<i64>) -> Self {
        Self { coords: self.coords.iter().map(|a| a * s).collect() }
    }

    /// `mu` with `xi = (mu, -mu)` when `r = 2`.
    pub fn rank_one(&self) -> Option<Ratio<i64>> {
        (self.r() == 2).then(|| self.coords[0])
    }

    /// Coordinates as `{"num", "den"}` records.
    pub fn to_json(&self) -> Value {
        Value::Array(self.coords.iter().map(|c| json!({"num": c.numer(), "den": c.denom()})).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(|c| *c.numer() as f64 / *c.denom() as f64).collect()
    }
}

/// Alcove vertex `omega_k`: `k` entries `(r - k)/r` followed by `r - k` entries `-k/r`.
pub fn sur_weights(r: usize, k: usize) -> Result<WeightVector, HolonomyError> {
    if r < 2 || k > r {
        return Err(HolonomyError::Range(format!("need r >= 2 and 0 <= k <= r, got r = {r}, k = {k}")));
    }
    let (ri, ki) = (r as i64, k as i64);
    let coords = (0..r).map(|i| if i < k { Ratio::new(ri - ki, ri) } else { Ratio::new(-ki, ri) }).collect();
    WeightVector::new(coords)
}

/// `(nu_k^1, nu_k^2) = ((omega_k + omega_{k+1}) / 2, (omega_k + omega_{k+2}) / 2)`.
pub fn kr_labels(r: usize, k: usize) -> Result<(WeightVector, WeightVector), HolonomyError> {
    if k + 2 > r {
        return Err(HolonomyError::Range(format!("need k + 2 <= r, got r = {r}, k = {k}")));
    }
    let w = |j| sur_weights(r, j);
    Ok((w(k)?.midpoint(&w(k + 1)?), w(k)?.midpoint(&w(k + 2)?)))
}

/// `exp(xi) = diag(e^{2 pi i xi_j})`.
pub fn torus_element(xi: &[f64]) -> DMatrix<Complex64> {
    DMatrix::from_diagonal(&DVector::from_iterator(xi.len(), xi.iter().map(|x| Complex64::from_polar(1.0, 2.0 * PI * x))))
}

/// Haar-random unitary from the QR decomposition of a complex Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> DMatrix<Complex64> {
    let mut gauss = || -> f64 { StandardNormal.sample(rng) };
    let g = DMatrix::<Complex64>::from_fn(n, n, |_, _| Complex64::new(gauss(), gauss()));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { d / d.norm() };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Alcove point of a special unitary `g`: eigenvalue phases `t_j in [0, 1)` sum to an integer
/// `s`; subtracting 1 from the `s` largest and sorting decreasingly gives the representative with
/// zero sum and `xi_1 - xi_r <= 1`.
pub fn alcove_point(g: &DMatrix<Complex64>) -> Result<Vec<f64>, HolonomyError> {
    let eig = g.clone().schur().eigenvalues().ok_or(HolonomyError::Eigen)?;
    let mut t: Vec<f64> = eig.iter().map(|z| (z.arg() / (2.0 * PI)).rem_euclid(1.0)).collect();
    t.iter_mut().for_each(|x| {
        // Phases of 1 - tiny land on 1.0 after rem_euclid rounding.
        if *x >= 1.0 {
            *x = 0.0;
        }
    });
    t.sort_by(|a, b| b.total_cmp(a));
    let s = t.iter().sum::<f64>().round() as usize;
    for x in t.iter_mut().take(s) {
        *x -= 1.0;
    }
    t.sort_by(|a, b| b.total_cmp(a));
    Ok(t)
}

fn distance_to_segment(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let ap: Vec<f64> = a.iter().zip(p).map(|(x, y)| y - x).collect();
    let len2: f64 = ab.iter().map(|x| x * x).sum();
    let s = (ap.iter().zip(&ab).map(|(x, y)| x * y).sum::<f64>() / len2).clamp(0.0, 1.0);
    a.iter().zip(&ab).zip(p).map(|((x, d), y)| (x + s * d - y).powi(2)).sum::<f64>().sqrt()
}

/// Segment `omega_1 + eps alpha_1`, `eps in [-1/2, 0]`, in the `SU(3)` alcove.
pub fn su3_segment() -> (Vec<f64>, Vec<f64>) {
    let w1 = sur_weights(3, 1).expect("valid").to_f64();
    let end = vec![w1[0] - 0.5, w1[1] + 0.5, w1[2]];
    (w1, end)
}

/// Distance from the alcove point of `g h` to the segment.
pub fn segment_distance(g: &DMatrix<Complex64>, h: &DMatrix<Complex64>) -> Result<f64, HolonomyError> {
    let (a, b) = su3_segment();
    Ok(distance_to_segment(&alcove_point(&(g * h))?, &a, &b))
}

/// The class `C_1` of `exp(omega_1 / 2)` in `SU(3)`.
pub fn class_one_representative() -> DMatrix<Complex64> {
    let w = sur_weights(3, 1).expect("valid").scaled(Ratio::new(1, 2));
    torus_element(&w.to_f64())
}

/// Largest distance over `samples` random products of two elements of `C_1`.
pub fn class_square_segment_check(samples: usize, rng: &mut impl Rng) -> Result<f64, HolonomyError> {
    let d = class_one_representative();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let u = random_unitary(rng, 3);
        let v = random_unitary(rng, 3);
        let g = &u * &d * u.adjoint();
        let h = &v * &d * v.adjoint();
        worst = worst.max(segment_distance(&g, &h)?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn r(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn weights() {
        assert_eq!(sur_weights(2, 1).unwrap().coords(), &[r(1, 2), r(-1, 2)]);
        assert_eq!(sur_weights(3, 1).unwrap().coords(), &[r(2, 3), r(-1, 3), r(-1, 3)]);
        for n in 2..6 {
            assert!(sur_weights(n, 0).unwrap().coords().iter().all(|c| *c == r(0, 1)));
            assert!(sur_weights(n, n).unwrap().coords().iter().all(|c| *c == r(0, 1)));
        }
        assert!(sur_weights(3, 4).is_err() && sur_weights(1, 0).is_err());
        assert!(WeightVector::new(vec![r(1, 2), r(1, 2)]).is_err());
    }

    #[test]
    fn kr_label_examples() {
        let (n1, n2) = kr_labels(2, 0).unwrap();
        assert_eq!(n1.rank_one(), Some(r(1, 4)));
        assert_eq!(n2.rank_one(), Some(r(0, 1)));
        let (n1, n2) = kr_labels(3, 0).unwrap();
        assert_eq!(n1, sur_weights(3, 1).unwrap().scaled(r(1, 2)));
        assert_eq!(n2, sur_weights(3, 2).unwrap().scaled(r(1, 2)));
        let (n1, n2) = kr_labels(4, 1).unwrap();
        assert_eq!(n1.coords(), &[r(5, 8), r(1, 8), r(-3, 8), r(-3, 8)]);
        assert_eq!(n2.coords(), &[r(1, 2), r(0, 1), r(0, 1), r(-1, 2)]);
        assert!(kr_labels(3, 2).is_err());
    }

    #[test]
    fn segment_endpoints() {
        let g = class_one_representative();
        let (a, b) = su3_segment();
        // omega_1 - alpha_1 / 2 = omega_2 / 2.
        let half_w2 = sur_weights(3, 2).unwrap().scaled(r(1, 2)).to_f64();
        assert!(b.iter().zip(&half_w2).all(|(x, y)| (x - y).abs() < 1e-15));
        // h = g^{-1} exp(omega_1) = g, landing on omega_1.
        let exp_w1 = torus_element(&sur_weights(3, 1).unwrap().to_f64());
        let h = g.adjoint() * exp_w1;
        let p = alcove_point(&(&g * &h)).unwrap();
        assert!(p.iter().zip(&a).all(|(x, y)| (x - y).abs() < 1e-10));
        assert!(segment_distance(&g, &h).unwrap() < 1e-10);
        // exp(omega_1 / 2) exp(s_1 omega_1 / 2) = exp(omega_2 / 2).
        let s1 = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0]).map(Complex64::from);
        let h = &s1 * &g * s1.adjoint();
        let prod = &g * &h;
        assert!((&prod - torus_element(&half_w2)).norm() < 1e-14);
        let p = alcove_point(&prod).unwrap();
        assert!(p.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-10));
        assert!(segment_distance(&g, &h).unwrap() < 1e-10);
    }

    #[test]
    fn random_products_lie_on_the_segment() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(class_square_segment_check(200, &mut rng).unwrap() < 1e-8);
    }

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random_unitary(&mut rng, 3);
        assert!((u.adjoint() * &u - DMatrix::identity(3, 3)).norm() < 1e-13);
    }

    #[test]
    fn generic_torus_points_are_recovered() {
        let xi = [0.4, -0.1, -0.3];
        let p = alcove_point(&torus_element(&xi)).unwrap();
        assert!(p.iter().zip(&xi).all(|(x, y)| (x - y).abs() < 1e-12));
        // A point off the segment is detected.
        let (a, b) = su3_segment();
        assert!(distance_to_segment(&[0.1, 0.0, -0.1], &a, &b) > 0.2);
    }
}
