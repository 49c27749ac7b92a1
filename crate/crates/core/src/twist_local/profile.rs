use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::TwistError;

/// Angle profile of a model twist.
///
/// `zeta'` is `(1 - S(t / eps)) / 2` on `[0, eps]` with `S` the quintic smootherstep, and
/// zero beyond `eps`. Negative arguments are defined by `zeta(-t) = zeta(t) - t`, so
/// `zeta'(0) = 1/2` and `zeta` is `C^3`. The rescaled profile is `theta(delta t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleProfile {
    eps: f64,
    delta: f64,
}

fn smootherstep(u: f64) -> f64 {
    u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
}

fn smootherstep_prime(u: f64) -> f64 {
    30.0 * u * u * (1.0 - u) * (1.0 - u)
}

/// Antiderivative of the smootherstep, zero at the origin.
fn smootherstep_integral(u: f64) -> f64 {
    u.powi(4) * (2.5 + u * (-3.0 + u))
}

impl AngleProfile {
    pub fn new(eps: f64, delta: f64) -> Result<Self, TwistError> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(TwistError::Profile(format!("support radius must be positive, got {eps}")));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(TwistError::Profile(format!("rescaling must be positive, got {delta}")));
        }
        Ok(Self { eps, delta })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self, TwistError> {
        Self::new(self.eps, delta)
    }

    /// Fiber norm beyond which the twist is the identity.
    pub fn support_radius(&self) -> f64 {
        self.eps / self.delta
    }

    pub fn zeta(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.zeta(-t) + t;
        }
        if t >= self.eps {
            return 0.0;
        }
        let u = t / self.eps;
        -0.5 * ((self.eps - t) - self.eps * (0.5 - smootherstep_integral(u)))
    }

    pub fn zeta_prime(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 1.0 - self.zeta_prime(-t);
        }
        if t >= self.eps {
            return 0.0;
        }
        0.5 * (1.0 - smootherstep(t / self.eps))
    }

    pub fn zeta_second(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.zeta_second(-t);
        }
        if t >= self.eps {
            return 0.0;
        }
        -0.5 * smootherstep_prime(t / self.eps) / self.eps
    }

    /// Rotation angle `2 pi zeta'(delta r)` at fiber norm `r >= 0`; `pi` on the zero section.
    pub fn angle(&self, r: f64) -> f64 {
        2.0 * PI * self.zeta_prime(self.delta * r)
    }

    pub fn angle_derivative(&self, r: f64) -> f64 {
        2.0 * PI * self.delta * self.zeta_second(self.delta * r)
    }

    /// Largest violation of the defining relations on a grid of `n` points in `[-2 eps, 2 eps]`:
    /// support, the reflection identity, `zeta'(0) = 1/2`, and monotonicity of `zeta'` on `[0, inf)`.
    pub fn invariant_defect(&self, n: usize) -> f64 {
        let mut worst = (self.zeta_prime(0.0) - 0.5).abs();
        let mut prev = self.zeta_prime(0.0);
        for k in 0..=n {
            let t = 2.0 * self.eps * k as f64 / n as f64;
            worst = worst.max((self.zeta(-t) - (self.zeta(t) - t)).abs());
            if t >= self.eps {
                worst = worst.max(self.zeta(t).abs());
            }
            let z = self.zeta_prime(t);
            worst = worst.max(z - prev);
            prev = z;
        }
        worst
    }
}

impl Default for AngleProfile {
    fn default() -> Self {
        Self { eps: 1.0, delta: 1.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central_difference(f: impl Fn(f64) -> f64, t: f64) -> f64 {
        let h = 1e-6;
        (f(t + h) - f(t - h)) / (2.0 * h)
    }

    #[test]
    fn defining_relations_hold_on_a_grid() {
        for eps in [0.25, 1.0, 3.0] {
            let a = AngleProfile::new(eps, 1.0).unwrap();
            assert!(a.invariant_defect(4000) < 1e-12, "eps = {eps}");
            assert_eq!(a.zeta_prime(0.0), 0.5);
            assert_eq!(a.zeta(eps), 0.0);
            assert_eq!(a.zeta(10.0 * eps), 0.0);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let a = AngleProfile::new(0.7, 1.0).unwrap();
        for k in -30..=30 {
            let t = 0.031 * k as f64;
            assert!((central_difference(|s| a.zeta(s), t) - a.zeta_prime(t)).abs() < 1e-8, "t = {t}");
            assert!((central_difference(|s| a.zeta_prime(s), t) - a.zeta_second(t)).abs() < 1e-6, "t = {t}");
        }
    }

    #[test]
    fn smoothness_at_the_knots() {
        let a = AngleProfile::new(1.0, 1.0).unwrap();
        for t in [0.0, 1.0, -1.0] {
            let h = 1e-9;
            assert!((a.zeta_prime(t + h) - a.zeta_prime(t - h)).abs() < 1e-8);
            assert!((a.zeta_second(t + h) - a.zeta_second(t - h)).abs() < 1e-8);
        }
    }

    #[test]
    fn angle_runs_from_pi_to_zero() {
        let a = AngleProfile::new(1.0, 4.0).unwrap();
        assert_eq!(a.angle(0.0), PI);
        assert_eq!(a.angle(0.25), 0.0);
        assert!((a.angle(0.125) - PI / 2.0).abs() < 1e-12);
        assert_eq!(a.support_radius(), 0.25);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(AngleProfile::new(0.0, 1.0).is_err());
        assert!(AngleProfile::new(1.0, -2.0).is_err());
        assert!(AngleProfile::new(f64::NAN, 1.0).is_err());
    }
}
