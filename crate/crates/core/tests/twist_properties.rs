use std::f64::consts::PI;

use dehnforge::twist_local::{
    maslov_index_loop, model_twist, model_twist_inverse, random_rotation, symplectic_defect_at, AngleProfile,
    CotangentPoint,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `W diag(e^{i pi k_j t}) Q`: a closed Lagrangian loop with index `sum k_j`.
fn loop_frame(w: &DMatrix<Complex64>, speeds: &[i64], q: &DMatrix<f64>, t: f64) -> DMatrix<Complex64> {
    let d = DVector::from_iterator(speeds.len(), speeds.iter().map(|&k| Complex64::from_polar(1.0, PI * k as f64 * t)));
    w * DMatrix::from_diagonal(&d) * q.map(Complex64::from)
}

/// Random unitary as `exp(i S)` of a real symmetric `S` composed with a rotation.
fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    let r = random_rotation(rng, n);
    let eig: Vec<f64> = (0..n).map(|j| 0.7 * j as f64 + 0.3).collect();
    let phases = DMatrix::from_diagonal(&DVector::from_iterator(n, eig.iter().map(|&a| Complex64::from_polar(1.0, a))));
    let rc = r.map(Complex64::from);
    &rc * phases * rc.transpose()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn maslov_index_is_additive_and_odd(seed in any::<u64>(), a in prop::collection::vec(-3i64..=3, 1..=4), b_shift in -3i64..=3) {
        let n = a.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_unitary(&mut rng, n);
        let q = random_rotation(&mut rng, n);
        let mut b = a.clone();
        b[0] += b_shift;
        let id = DMatrix::<Complex64>::identity(n, n);
        let ia = maslov_index_loop(|t| loop_frame(&w, &a, &q, t), &id, 8).unwrap();
        let ib = maslov_index_loop(|t| loop_frame(&w, &b, &q, t), &id, 8).unwrap();
        prop_assert_eq!(ia, a.iter().sum::<i64>());
        // Both loops start and end at the same Lagrangian, so they concatenate.
        let concat = |t: f64| if t <= 0.5 { loop_frame(&w, &a, &q, 2.0 * t) } else { loop_frame(&w, &b, &q, 2.0 * t - 1.0) };
        prop_assert_eq!(maslov_index_loop(concat, &id, 8).unwrap(), ia + ib);
        prop_assert_eq!(maslov_index_loop(|t| loop_frame(&w, &a, &q, 1.0 - t), &id, 8).unwrap(), -ia);
    }

    #[test]
    fn model_twist_is_an_invertible_symplectic_equivariant_map(seed in any::<u64>(), c in 1usize..=3, eps in 0.2f64..2.0, delta in 0.5f64..4.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = AngleProfile::new(eps, delta).unwrap();
        let p = CotangentPoint::random(&mut rng, c, 2.0 * a.support_radius());
        let q = model_twist(&p, &a);
        prop_assert!((q.fiber_norm() - p.fiber_norm()).abs() < 1e-12);
        prop_assert!(model_twist_inverse(&q, &a).distance(&p) < 1e-9);
        let r = random_rotation(&mut rng, c + 1);
        prop_assert!(model_twist(&p.rotated(&r), &a).distance(&q.rotated(&r)) < 1e-9);
        // Keep the finite-difference step well inside the scale of the profile.
        let h = 1e-5 * a.support_radius().min(1.0);
        prop_assert!(symplectic_defect_at(|x| model_twist(x, &a), &p, h) < 1e-6);
    }
}
