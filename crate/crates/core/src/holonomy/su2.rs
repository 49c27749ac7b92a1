use std::f64::consts::PI;
use std::ops::Mul;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, UnitSphere};
use serde::{Deserialize, Serialize};

use super::HolonomyError;

/// Unit quaternion `a + b i + c j + d k`, identified with
/// `[[a + b i, c + d i], [-c + d i, a - b i]]` in `SU(2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Su2 {
    q: [f64; 4],
}

impl Su2 {
    pub const IDENTITY: Su2 = Su2 { q: [1.0, 0.0, 0.0, 0.0] };
    pub const MINUS_IDENTITY: Su2 = Su2 { q: [-1.0, 0.0, 0.0, 0.0] };
    /// `[[0, i], [i, 0]]`, a representative of the nontrivial Weyl group element.
    pub const WEYL: Su2 = Su2 { q: [0.0, 0.0, 0.0, 1.0] };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, HolonomyError> {
        let n = (a * a + b * b + c * c + d * d).sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(HolonomyError::NotUnit(n));
        }
        Ok(Self { q: [a, b, c, d] })
    }

    /// Rescales a nonzero quaternion to unit length.
    pub fn normalized(q: [f64; 4]) -> Self {
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        Self { q: q.map(|x| x / n) }
    }

    pub fn quaternion(&self) -> [f64; 4] {
        self.q
    }

    pub fn real(&self) -> f64 {
        self.q[0]
    }

    pub fn imag(&self) -> [f64; 3] {
        [self.q[1], self.q[2], self.q[3]]
    }

    pub fn trace(&self) -> f64 {
        2.0 * self.q[0]
    }

    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = self.q;
        Self { q: [a, -b, -c, -d] }
    }

    pub fn neg(&self) -> Self {
        Self { q: self.q.map(|x| -x) }
    }

    pub fn conjugate_by(&self, h: &Su2) -> Self {
        *h * *self * h.inverse()
    }

    pub fn matrix(&self) -> Matrix2<Complex64> {
        let [a, b, c, d] = self.q;
        Matrix2::new(Complex64::new(a, b), Complex64::new(c, d), Complex64::new(-c, d), Complex64::new(a, -b))
    }

    /// Euclidean distance of quaternions; the Frobenius distance of matrices is `sqrt 2` times this.
    pub fn distance(&self, other: &Su2) -> f64 {
        self.q.iter().zip(&other.q).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    }

    /// `exp(v_1 i + v_2 j + v_3 k)`.
    pub fn exp(v: [f64; 3]) -> Self {
        let t = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if t == 0.0 {
            return Self::IDENTITY;
        }
        let s = t.sin() / t;
        Self { q: [t.cos(), s * v[0], s * v[1], s * v[2]] }
    }

    /// The element `cos(2 pi mu) + sin(2 pi mu) n` of the class `C_mu` with axis `n`.
    pub fn in_class(mu: f64, axis: [f64; 3]) -> Self {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let (s, c) = (2.0 * PI * mu).sin_cos();
        Self { q: [c, s * axis[0] / n, s * axis[1] / n, s * axis[2] / n] }
    }

    /// Both square roots `+-s`, or `None` at `-I` where the axis is undefined.
    pub fn sqrt(&self) -> Option<(Su2, Su2)> {
        let v = self.imag();
        let s = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if s < 1e-12 && self.q[0] < 0.0 {
            return None;
        }
        let phi = s.atan2(self.q[0]);
        let root = if s == 0.0 { Self::IDENTITY } else { Self::exp(v.map(|x| 0.5 * phi * x / s)) };
        Some((root, root.neg()))
    }
}

impl Mul for Su2 {
    type Output = Su2;

    fn mul(self, o: Su2) -> Su2 {
        let [a1, b1, c1, d1] = self.q;
        let [a2, b2, c2, d2] = o.q;
        Su2 {
            q: [
                a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
                a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
                a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
                a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
            ],
        }
    }
}

pub fn product(elements: &[Su2]) -> Su2 {
    elements.iter().fold(Su2::IDENTITY, |acc, g| acc * *g)
}

/// Point `mu` of the alcove `[0, 1/2]`, with `tr = 2 cos(2 pi mu)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct AlcoveValue(f64);

impl AlcoveValue {
    pub fn new(mu: f64) -> Result<Self, HolonomyError> {
        if !(0.0..=0.5).contains(&mu) {
            return Err(HolonomyError::Label(format!("{mu} is outside the alcove [0, 1/2]")));
        }
        Ok(Self(mu))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn is_central(&self) -> bool {
        self.0 == 0.0 || self.0 == 0.5
    }
}

pub fn alcove(g: &Su2) -> AlcoveValue {
    AlcoveValue((g.trace() / 2.0).clamp(-1.0, 1.0).acos() / (2.0 * PI))
}

/// Haar-random conjugate of `diag(e^{2 pi i mu}, e^{-2 pi i mu})`: a uniform axis on the sphere.
pub fn sample_class(mu: AlcoveValue, rng: &mut impl Rng) -> Su2 {
    let axis: [f64; 3] = UnitSphere.sample(rng);
    match mu.0 {
        0.0 => Su2::IDENTITY,
        0.5 => Su2::MINUS_IDENTITY,
        m => Su2::in_class(m, axis),
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn product_matches_matrix_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let g = sample_class(AlcoveValue(rng.random_range(0.0..0.5)), &mut rng);
            let h = sample_class(AlcoveValue(rng.random_range(0.0..0.5)), &mut rng);
            assert!(((g * h).matrix() - g.matrix() * h.matrix()).norm() < 1e-14);
            let m = g.matrix();
            assert!((m.adjoint() * m - Matrix2::identity()).norm() < 1e-14);
            assert!((m.determinant() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn alcove_examples() {
        assert_eq!(alcove(&Su2::IDENTITY).value(), 0.0);
        assert_eq!(alcove(&Su2::MINUS_IDENTITY).value(), 0.5);
        assert_eq!(alcove(&Su2::WEYL).value(), 0.25);
        assert_eq!(Su2::WEYL.matrix(), Matrix2::new(Complex64::new(0.0, 0.0), Complex64::i(), Complex64::i(), Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn sampled_classes_have_the_requested_label() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(sample_class(AlcoveValue(0.0), &mut rng), Su2::IDENTITY);
        assert_eq!(sample_class(AlcoveValue(0.5), &mut rng), Su2::MINUS_IDENTITY);
        for _ in 0..100 {
            assert!(sample_class(AlcoveValue(0.25), &mut rng).trace().abs() < 1e-12);
            let mu = rng.random_range(0.0..=0.5);
            let g = sample_class(AlcoveValue(mu), &mut rng);
            // acos loses half the digits near the ends of the alcove.
            assert!((alcove(&g).value() - mu).abs() < 1e-7);
            assert!((g.trace() - 2.0 * (2.0 * PI * mu).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn alcove_is_conjugation_and_inversion_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let g = sample_class(AlcoveValue(rng.random_range(0.0..0.5)), &mut rng);
            let h = sample_class(AlcoveValue(rng.random_range(0.0..0.5)), &mut rng);
            assert!((g.conjugate_by(&h).trace() - g.trace()).abs() < 1e-12);
            assert!((alcove(&g.inverse()).value() - alcove(&g).value()).abs() < 1e-12);
        }
    }

    #[test]
    fn square_roots_square_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let g = sample_class(AlcoveValue(rng.random_range(0.0..0.5)), &mut rng);
            let (s, t) = g.sqrt().unwrap();
            assert!((s * s).distance(&g) < 1e-12 && (t * t).distance(&g) < 1e-12);
        }
        assert!(Su2::MINUS_IDENTITY.sqrt().is_none());
        assert_eq!(Su2::IDENTITY.sqrt().unwrap().0, Su2::IDENTITY);
    }

    #[test]
    fn exp_of_half_turn() {
        let g = Su2::exp([0.0, 0.0, PI / 2.0]);
        assert!(g.distance(&Su2::WEYL) < 1e-15);
        assert!(Su2::new(0.5, 0.5, 0.5, 0.5).is_ok());
        assert!(Su2::new(1.0, 1.0, 0.0, 0.0).is_err());
    }
}
