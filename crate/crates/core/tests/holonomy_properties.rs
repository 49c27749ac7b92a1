use dehnforge::holonomy::{
    alcove, braid, class_square_segment_check, full_twist, half_twist, half_twist_inverse, product, rho_y, sample_class,
    solve_rep_variety, stabilizer_dimension, tangent_dimension, AlcoveValue, HolonomyTuple, SolveOptions, Su2, Target,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quarter(n: usize) -> Vec<AlcoveValue> {
    vec![AlcoveValue::new(0.25).unwrap(); n]
}

/// Local dimension by finite differences: each traceless `g_i = cos(a) + sin(a) n_i` is moved
/// through spherical coordinates of `n_i`, the product's right-translated differential is
/// estimated by central differences, and the quotient by the free `SO(3)` action is taken.
fn finite_difference_dimension(t: &HolonomyTuple) -> i64 {
    let n = t.elements.len();
    let angles: Vec<(f64, f64)> = t
        .elements
        .iter()
        .map(|g| {
            let v = g.imag();
            let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            ((v[2] / r).acos(), v[1].atan2(v[0]))
        })
        .collect();
    let mu = t.labels[0].value();
    let build = |ang: &[(f64, f64)]| -> Su2 {
        product(&ang.iter().map(|&(th, ph)| Su2::in_class(mu, [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()])).collect::<Vec<_>>())
    };
    let base = build(&angles).inverse();
    let h = 1e-6;
    let mut jac = DMatrix::<f64>::zeros(3, 2 * n);
    for k in 0..2 * n {
        let mut plus = angles.clone();
        let mut minus = angles.clone();
        if k % 2 == 0 {
            plus[k / 2].0 += h;
            minus[k / 2].0 -= h;
        } else {
            plus[k / 2].1 += h;
            minus[k / 2].1 -= h;
        }
        let (p, m) = ((build(&plus) * base).imag(), (build(&minus) * base).imag());
        for r in 0..3 {
            jac[(r, k)] = (p[r] - m[r]) / (2.0 * h);
        }
    }
    let rank = jac.svd(false, false).singular_values.iter().filter(|&&s| s > 1e-5).count();
    (2 * n - rank) as i64 - 3
}

#[test]
fn five_quarter_instance_from_twenty_seeds() {
    let opts = SolveOptions { reject_reducible: true, ..SolveOptions::default() };
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = solve_rep_variety(&quarter(5), Target::PlusIdentity, &mut rng, opts).unwrap();
        assert!(t.residual() < 1e-10);
        assert_eq!(stabilizer_dimension(&t.elements), 0);
        assert_eq!(tangent_dimension(&t).unwrap(), 4);
        assert_eq!(finite_difference_dimension(&t), 4);
    }
}

#[test]
fn dimension_count_matches_two_n_minus_six() {
    for n in 3..=6 {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let opts = SolveOptions { reject_reducible: true, ..SolveOptions::default() };
        let t = solve_rep_variety(&quarter(n), Target::PlusIdentity, &mut rng, opts).unwrap();
        assert_eq!(tangent_dimension(&t).unwrap(), 2 * n as i64 - 6);
        assert_eq!(finite_difference_dimension(&t), 2 * n as i64 - 6);
    }
}

#[test]
fn su3_products_fill_the_segment() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    assert!(class_square_segment_check(500, &mut rng).unwrap() < 1e-8);
}

fn random_tuple(seed: u64, n: usize, equal: bool) -> HolonomyTuple {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = AlcoveValue::new(rng.random_range(0.01..0.49)).unwrap();
    let labels: Vec<AlcoveValue> =
        (0..n).map(|_| if equal { first } else { AlcoveValue::new(rng.random_range(0.01..0.49)).unwrap() }).collect();
    let elements = labels.iter().map(|mu| sample_class(*mu, &mut rng)).collect();
    HolonomyTuple { elements, labels, target: Target::PlusIdentity }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn alcove_is_ad_invariant(seed in any::<u64>(), mu in 0.0f64..=0.5, nu in 0.0f64..=0.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = sample_class(AlcoveValue::new(mu).unwrap(), &mut rng);
        let h = sample_class(AlcoveValue::new(nu).unwrap(), &mut rng);
        prop_assert!((alcove(&g.conjugate_by(&h)).value() - alcove(&g).value()).abs() < 1e-12);
        prop_assert!((alcove(&g.inverse()).value() - alcove(&g).value()).abs() < 1e-12);
    }

    #[test]
    fn braid_group_relations(seed in any::<u64>(), n in 3usize..=6) {
        let t = random_tuple(seed, n, true);
        for i in 0..n - 2 {
            prop_assert!(braid(&t, &[i, i + 1, i]).unwrap().distance(&braid(&t, &[i + 1, i, i + 1]).unwrap()) < 1e-12);
        }
        for i in 0..n - 1 {
            let h = half_twist(&t, i).unwrap();
            prop_assert!(half_twist_inverse(&h, i).unwrap().distance(&t) < 1e-12);
            prop_assert!(half_twist(&h, i).unwrap().distance(&full_twist(&t, i..i + 2).unwrap()) < 1e-12);
            prop_assert!((product(&h.elements).distance(&product(&t.elements))) < 1e-12);
        }
    }

    #[test]
    fn full_twist_preserves_enclosed_holonomy(seed in any::<u64>(), n in 2usize..=6, a in 0usize..6, len in 1usize..6) {
        let t = random_tuple(seed, n, false);
        let start = a % n;
        let end = (start + len).min(n);
        let f = full_twist(&t, start..end).unwrap();
        prop_assert!(product(&f.elements).distance(&product(&t.elements)) < 1e-12);
        prop_assert!((rho_y(&f, start..end).unwrap().value() - rho_y(&t, start..end).unwrap().value()).abs() < 1e-12);
        prop_assert!(f.label_defect() < 1e-12);
    }
}
