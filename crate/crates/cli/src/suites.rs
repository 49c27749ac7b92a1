//! The acceptance suite: twelve criteria, each a list of cases.
//!
//! Case ids are `NN-name/...` so a criterion is the set of cases sharing a prefix. Every case
//! draws from its own random stream, so criteria and cases run in parallel without changing
//! any result.

use dehnforge::holonomy::{
    alcove, braid, class_one_representative, class_square_segment_check, coisotropic_fiber_dim, full_twist, half_twist,
    half_twist_ad_sqrt_check, sample_class, segment_distance, solve_rep_variety, stabilizer_dimension,
    sur_weights, tangent_dimension, torus_element, AlcoveValue, FiberCase, HolonomyTuple, SolveOptions, Target,
};
use dehnforge::homalg::random::{random_cochain_map, random_complex, random_cone_data, random_factorization, random_reweighted_complex};
use dehnforge::homalg::{cohomology_ranks, cone, double_cone_lemma_check, mf_cohomology, mf_verify, CohomologyMode};
use dehnforge::pl_formula::{is_identity, monodromy_matrix, sign, torus_fixture, GradedGroup, GradedMap, SlantData};
use dehnforge::twist_local::{
    count_twisted_intersections, equivariance_check, maslov_index_loop, model_twist, section_index, sqrt_z_frame,
    symplectic_check, threshold_delta, AngleProfile, CotangentPoint, ROOT_RESIDUAL,
};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::oracles::{dense_intersection_count, mf_torsion_counts, torus_twist_matrix};
use crate::report::{Case, RunReport};
use crate::rng::case_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Full criteria except the SU(3) check, which uses 100 samples.
    Fast,
    Full,
}

pub struct Criterion {
    pub id: &'static str,
    pub title: &'static str,
    run: fn(Profile, u64) -> Vec<Case>,
}

impl Criterion {
    pub fn run(&self, profile: Profile, seed: u64) -> Vec<Case> {
        (self.run)(profile, seed)
    }
}

pub const CRITERIA: [Criterion; 12] = [
    Criterion { id: "01-double-cone", title: "double mapping cones are acyclic", run: double_cone_suite },
    Criterion { id: "02-cone-euler", title: "cone Euler characteristic and long exact sequence", run: cone_euler_suite },
    Criterion { id: "03-specialization", title: "rational and integer ranks agree", run: specialization_suite },
    Criterion { id: "04-matrix-factorization", title: "matrix factorizations against exhaustive counts", run: mf_suite },
    Criterion { id: "05-model-twist", title: "model twist is symplectic, antipodal and equivariant", run: model_twist_suite },
    Criterion { id: "06-intersections", title: "one intersection per transversal fiber pair", run: intersection_suite },
    Criterion { id: "07-maslov", title: "Maslov indices of the square-root loop and section", run: maslov_suite },
    Criterion { id: "08-representation-variety", title: "five quarter-labels give a four-dimensional variety", run: rep_variety_suite },
    Criterion { id: "09-twist-algebra", title: "half-twists, braid relations and central full twists", run: twist_algebra_suite },
    Criterion { id: "10-fiber-dimensions", title: "coisotropic fiber dimensions", run: fiber_suite },
    Criterion { id: "11-picard-lefschetz", title: "torus twist and sign table", run: pl_suite },
    Criterion { id: "12-su3-segment", title: "SU(3) class squares lie on the segment", run: su3_suite },
];

pub fn accept(profile: Profile, seed: u64) -> RunReport {
    let cases = CRITERIA.par_iter().flat_map(|c| c.run(profile, seed)).collect();
    let name = match profile {
        Profile::Fast => "accept-fast",
        Profile::Full => "accept-full",
    };
    RunReport::new(name, seed, cases)
}

fn id(prefix: &str, i: usize) -> String {
    format!("{prefix}/{i:04}")
}

fn double_cone_suite(_: Profile, seed: u64) -> Vec<Case> {
    (0..200)
        .into_par_iter()
        .map(|i| {
            let cid = id("01-double-cone", i);
            let d = random_cone_data(&mut case_rng(seed, &cid));
            let r = double_cone_lemma_check(&d);
            let case = Case::exact(&cid, &d.to_json(), r.hypotheses.all_hold() && r.acyclic(), "double-cone-acyclic");
            if case.pass {
                case
            } else {
                case.with_detail(format!("{:?}", r.hypotheses.failures()))
            }
        })
        .collect()
}

fn cone_euler_suite(_: Profile, seed: u64) -> Vec<Case> {
    (0..50)
        .into_par_iter()
        .map(|i| {
            let cid = id("02-cone-euler", i);
            let mut rng = case_rng(seed, &cid);
            let (na, nb) = (rng.random_range(1..=8), rng.random_range(1..=8));
            let a = random_complex(&mut rng, na, "a");
            let b = random_complex(&mut rng, nb, "b");
            let f = random_cochain_map(&mut rng, &a, &b);
            let inputs = json!({"c0": a.complex.to_json(), "c1": b.complex.to_json(), "f": dehnforge::homalg::map_to_json(&f)});
            let check = || -> Result<bool, dehnforge::homalg::HomalgError> {
                let k = cone(&f, &a.complex, &b.complex)?;
                let h0 = cohomology_ranks(&a.complex, CohomologyMode::RationalU)?;
                let h1 = cohomology_ranks(&b.complex, CohomologyMode::RationalU)?;
                let hk = cohomology_ranks(&k, CohomologyMode::RationalU)?;
                let euler = hk.euler_characteristic() == h1.euler_characteristic() - h0.euler_characteristic();
                let degrees: Vec<i64> = h0.ranks().keys().chain(h1.ranks().keys()).chain(hk.ranks().keys()).copied().collect();
                let lo = degrees.iter().min().copied().unwrap_or(0) - 1;
                let hi = degrees.iter().max().copied().unwrap_or(0) + 1;
                // ... -> H^d(C0) -> H^d(C1) -> H^d(Cone) -> H^{d+1}(C0) -> ...
                let les = (lo..=hi).all(|d| {
                    h1.rank(d) <= h0.rank(d) + hk.rank(d)
                        && hk.rank(d) <= h1.rank(d) + h0.rank(d + 1)
                        && h0.rank(d + 1) <= hk.rank(d) + h1.rank(d + 1)
                });
                Ok(k.is_complex() && euler && les)
            };
            match check() {
                Ok(ok) => Case::exact(&cid, &inputs, ok, "cone-euler-les"),
                Err(e) => Case::failed(&cid, &inputs, 0.0, "cone-euler-les", e),
            }
        })
        .collect()
}

fn specialization_suite(_: Profile, seed: u64) -> Vec<Case> {
    (0..50)
        .into_par_iter()
        .map(|i| {
            let cid = id("03-specialization", i);
            let c = random_reweighted_complex(&mut case_rng(seed, &cid));
            let rational = cohomology_ranks(&c, CohomologyMode::RationalU);
            let integer = cohomology_ranks(&c, CohomologyMode::IntegerAtOne);
            match (rational, integer) {
                (Ok(r), Ok(z)) => Case::exact(&cid, &c.to_json(), r.ranks() == z.ranks(), "specialization-ranks"),
                (Err(e), _) | (_, Err(e)) => Case::failed(&cid, &c.to_json(), 0.0, "specialization-ranks", e),
            }
        })
        .collect()
}

fn mf_suite(_: Profile, seed: u64) -> Vec<Case> {
    (0..20)
        .into_par_iter()
        .map(|i| {
            let cid = id("04-matrix-factorization", i);
            let w = [2i64, 3, 6][i % 3];
            let m = random_factorization(&mut case_rng(seed, &cid), w, 1 + i % 3);
            let Ok(h) = mf_cohomology(&m) else {
                return Case::failed(&cid, &m.to_json(), 0.0, "mf-cohomology", "cohomology failed");
            };
            let matches = [(&h.h0, &m.d0, &m.d1), (&h.h1, &m.d1, &m.d0)].iter().all(|(module, a, b)| {
                mf_torsion_counts(a, b, w).into_iter().all(|(k, n)| module.torsion_count(&BigInt::from(k)).to_usize() == Some(n))
            });
            Case::exact(&cid, &m.to_json(), mf_verify(&m) && matches, "mf-cohomology")
        })
        .collect()
}

fn unit_vector(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let m = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if m > 1e-6 {
            return v.iter().map(|x| x / m).collect();
        }
    }
}

fn model_twist_suite(_: Profile, seed: u64) -> Vec<Case> {
    let a = AngleProfile::new(0.5, 2.0).expect("valid profile");
    let params = |c: usize| json!({"c": c, "eps": a.eps(), "delta": a.delta(), "samples": 100});
    (1..=3usize)
        .into_par_iter()
        .flat_map(|c| {
            let prefix = format!("05-model-twist/c{c}");
            let symp = {
                let cid = format!("{prefix}/symplectic");
                let defect = symplectic_check(&a, c, 100, 1e-5, &mut case_rng(seed, &cid));
                Case::measured(cid, &params(c), defect, 1e-6, "twist-symplectic")
            };
            let antipodal = {
                let cid = format!("{prefix}/antipodal");
                let mut rng = case_rng(seed, &cid);
                let mut worst = 0.0f64;
                for _ in 0..100 {
                    let x = unit_vector(&mut rng, c + 1);
                    let p = CotangentPoint::on_zero_section(x.clone()).expect("unit vector");
                    let minus: Vec<f64> = x.iter().map(|v| -v).collect();
                    worst = worst.max(model_twist(&p, &a).distance(&CotangentPoint::project(&minus, &vec![0.0; c + 1])));
                }
                Case::measured(cid, &params(c), worst, 1e-9, "twist-antipodal-zero-section")
            };
            let outside = {
                let cid = format!("{prefix}/outside-support");
                let mut rng = case_rng(seed, &cid);
                let mut worst = 0.0f64;
                for _ in 0..100 {
                    let x = unit_vector(&mut rng, c + 1);
                    let r = a.support_radius() * rng.random_range(1.0..3.0);
                    let y: Vec<f64> = unit_vector(&mut rng, c + 1).iter().map(|v| r * v).collect();
                    let p = CotangentPoint::project(&x, &y);
                    // Projection to the tangent space shrinks y; rescale onto the sphere of radius r.
                    let p = if p.fiber_norm() > 1e-6 { p.scaled(r / p.fiber_norm()) } else { continue };
                    worst = worst.max(model_twist(&p, &a).distance(&p));
                }
                Case::measured(cid, &params(c), worst, 1e-9, "twist-identity-outside-support")
            };
            let equivariance = {
                let cid = format!("{prefix}/equivariance");
                let d = equivariance_check(&a, c, 100, &mut case_rng(seed, &cid));
                Case::measured(cid, &params(c), d.rotation.max(d.moment), 1e-9, "twist-equivariance")
            };
            vec![symp, antipodal, outside, equivariance]
        })
        .collect()
}

fn intersection_suite(_: Profile, seed: u64) -> Vec<Case> {
    let base = AngleProfile::new(0.5, 1.0).expect("valid profile");
    (0..20)
        .into_par_iter()
        .map(|i| {
            let cid = id("06-intersections", i);
            let c = 1 + i % 3;
            let mut rng = case_rng(seed, &cid);
            let v0 = unit_vector(&mut rng, c + 1);
            let v1 = unit_vector(&mut rng, c + 1);
            let inputs = json!({"v0": v0, "v1": v1, "eps": base.eps()});
            let run = || -> Result<(f64, usize, usize), dehnforge::twist_local::TwistError> {
                let a = base.with_delta(2.0 * threshold_delta(&base, &v0, &v1, 1.0)?)?;
                let hits = count_twisted_intersections(&v0, &v1, &a, 1.0)?;
                let residual = hits.points.iter().map(|p| p.residual).fold(0.0, f64::max);
                Ok((residual, hits.count, dense_intersection_count(&v0, &v1, &a, 1.0)))
            };
            match run() {
                Ok((residual, 1, 1)) => Case::measured(&cid, &inputs, residual, ROOT_RESIDUAL, "intersection-bijection"),
                Ok((_, count, dense)) => Case::failed(&cid, &inputs, ROOT_RESIDUAL, "intersection-bijection", format!("count {count}, dense {dense}")),
                Err(e) => Case::failed(&cid, &inputs, ROOT_RESIDUAL, "intersection-bijection", e),
            }
        })
        .collect()
}

fn maslov_suite(_: Profile, _: u64) -> Vec<Case> {
    [1usize, 2, 3, 5]
        .into_iter()
        .flat_map(|c| {
            let inputs = json!({"c": c});
            let reference = DMatrix::<Complex64>::identity(c + 1, c + 1);
            let lp = maslov_index_loop(|t| sqrt_z_frame(c, t), &reference, 64);
            let sec = section_index(c);
            let case = |name: &str, got: Result<i64, _>, want: i64| match got {
                Ok(v) => Case::exact(format!("07-maslov/c{c}/{name}"), &inputs, v == want, "maslov-index").with_detail(format!("index {v}")),
                Err(e) => Case::failed(format!("07-maslov/c{c}/{name}"), &inputs, 0.0, "maslov-index", e),
            };
            vec![case("loop", lp, c as i64 + 1), case("section", sec, c as i64 - 1)]
        })
        .collect()
}

fn quarters(n: usize) -> Vec<AlcoveValue> {
    vec![AlcoveValue::new(0.25).expect("in range"); n]
}

fn rep_variety_suite(_: Profile, seed: u64) -> Vec<Case> {
    let opts = SolveOptions { reject_reducible: true, ..SolveOptions::default() };
    (0..20)
        .into_par_iter()
        .map(|i| {
            let cid = id("08-representation-variety", i);
            let inputs = json!({"labels": vec!["1/4"; 5], "target": "+I"});
            match solve_rep_variety(&quarters(5), Target::PlusIdentity, &mut case_rng(seed, &cid), opts) {
                Ok(t) => {
                    let stab = stabilizer_dimension(&t.elements);
                    let tangent = tangent_dimension(&t);
                    let detail = format!("stabilizer {stab}, tangent {tangent:?}");
                    if stab == 0 && tangent == Ok(4) {
                        Case::measured(&cid, &inputs, t.residual(), 1e-10, "rep-variety-dimension").with_detail(detail)
                    } else {
                        Case::failed(&cid, &inputs, 1e-10, "rep-variety-dimension", detail)
                    }
                }
                Err(e) => Case::failed(&cid, &inputs, 1e-10, "rep-variety-dimension", e),
            }
        })
        .collect()
}

fn equal_label_tuple(rng: &mut impl Rng, n: usize) -> HolonomyTuple {
    let mu = AlcoveValue::new(rng.random_range(0.01..0.49)).expect("in range");
    let elements = (0..n).map(|_| sample_class(mu, rng)).collect();
    HolonomyTuple { elements, labels: vec![mu; n], target: Target::PlusIdentity }
}

fn twist_algebra_suite(_: Profile, seed: u64) -> Vec<Case> {
    let ad_sqrt = {
        let cid = "09-twist-algebra/ad-sqrt".to_string();
        let mut rng = case_rng(seed, &cid);
        let q = AlcoveValue::new(0.25).expect("in range");
        let mut worst = 0.0f64;
        let mut failure = None;
        for _ in 0..100 {
            match half_twist_ad_sqrt_check(&sample_class(q, &mut rng), &sample_class(q, &mut rng)) {
                Ok(d) => worst = worst.max(d),
                Err(e) => failure = Some(e),
            }
        }
        let inputs = json!({"pairs": 100, "label": "1/4"});
        match failure {
            None => Case::measured(cid, &inputs, worst, 1e-10, "half-twist-ad-sqrt"),
            Some(e) => Case::failed(cid, &inputs, 1e-10, "half-twist-ad-sqrt", e),
        }
    };
    let braids = {
        let cid = "09-twist-algebra/braid-relations".to_string();
        let mut rng = case_rng(seed, &cid);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let n = rng.random_range(3..=6);
            let t = equal_label_tuple(&mut rng, n);
            for i in 0..n - 1 {
                let sq = half_twist(&half_twist(&t, i).expect("equal labels"), i).expect("equal labels");
                worst = worst.max(sq.distance(&full_twist(&t, i..i + 2).expect("valid range")));
                if i + 2 < n {
                    let l = braid(&t, &[i, i + 1, i]).expect("valid word");
                    let r = braid(&t, &[i + 1, i, i + 1]).expect("valid word");
                    worst = worst.max(l.distance(&r));
                }
            }
        }
        Case::measured(cid, &json!({"tuples": 100}), worst, 1e-12, "braid-relations")
    };
    let central = {
        let cid = "09-twist-algebra/central-full-twist".to_string();
        let mut rng = case_rng(seed, &cid);
        let mut worst = 0.0f64;
        for k in 0..100 {
            let mu = AlcoveValue::new(rng.random_range(0.01..0.49)).expect("in range");
            let g = sample_class(mu, &mut rng);
            // Enclosed product g * (+-g^{-1}) is +-I.
            let partner = if k % 2 == 0 { g.inverse() } else { g.inverse().neg() };
            let rest = sample_class(mu, &mut rng);
            let elements = vec![rest, g, partner, rest.inverse()];
            let labels = elements.iter().map(alcove).collect();
            let t = HolonomyTuple { elements, labels, target: Target::PlusIdentity };
            let f = full_twist(&t, 1..3).expect("valid range");
            worst = worst.max(if f == t { 0.0 } else { f.distance(&t).max(f64::MIN_POSITIVE) });
        }
        Case::measured(cid, &json!({"tuples": 100}), worst, 0.0, "full-twist-central")
    };
    vec![ad_sqrt, braids, central]
}

fn fiber_suite(_: Profile, seed: u64) -> Vec<Case> {
    [(0.3, FiberCase::SeparatingGeneric, 1usize), (0.5, FiberCase::NonseparatingCentral, 3), (0.0, FiberCase::HalftwistPair, 2)]
        .into_iter()
        .map(|(lambda, case, want)| {
            let inputs = json!({"lambda": lambda, "case": case});
            let name = inputs["case"].as_str().unwrap_or("case").to_string();
            let cid = format!("10-fiber-dimensions/{name}");
            let got = coisotropic_fiber_dim(AlcoveValue::new(lambda).expect("in range"), case, &mut case_rng(seed, &cid));
            match got {
                Ok(d) => Case::exact(&cid, &inputs, d == want, "coisotropic-fiber-dimension").with_detail(format!("dimension {d}")),
                Err(e) => Case::failed(&cid, &inputs, 0.0, "coisotropic-fiber-dimension", e),
            }
        })
        .collect()
}

/// Zero slant data on `H(M) = Z^2 + Z`, `H(B) = Z`.
pub fn zero_fixture() -> SlantData {
    SlantData::new(
        GradedGroup::new([(0, 2), (1, 1)]),
        GradedGroup::new([(0, 1)]),
        GradedMap::zero(0),
        GradedMap::zero(0),
        2,
    )
    .expect("consistent fixture")
}

fn pl_suite(_: Profile, _: u64) -> Vec<Case> {
    let torus = torus_fixture();
    let t = monodromy_matrix(&torus).expect("valid fixture");
    let oracle = torus_twist_matrix();
    let torus_case = Case::exact("11-picard-lefschetz/torus", &torus.to_json(), t.blocks.get(&1) == Some(&oracle), "picard-lefschetz-torus");
    let zero = zero_fixture();
    let zero_case = Case::exact(
        "11-picard-lefschetz/zero",
        &zero.to_json(),
        monodromy_matrix(&zero).is_ok_and(|m| is_identity(&m)),
        "picard-lefschetz-zero",
    );
    let table: String = (1..=8).map(|c| if sign(c) > 0 { '+' } else { '-' }).collect();
    let sign_case = Case::exact("11-picard-lefschetz/sign-table", &json!({"c": [1, 8]}), table == "-++--++-", "picard-lefschetz-sign")
        .with_detail(table);
    vec![torus_case, zero_case, sign_case]
}

fn su3_suite(profile: Profile, seed: u64) -> Vec<Case> {
    let samples = match profile {
        Profile::Fast => 100,
        Profile::Full => 500,
    };
    let cid = "12-su3-segment/samples".to_string();
    let sampled = match class_square_segment_check(samples, &mut case_rng(seed, &cid)) {
        Ok(d) => Case::measured(cid, &json!({"samples": samples}), d, 1e-8, "su3-class-square"),
        Err(e) => Case::failed(cid, &json!({"samples": samples}), 1e-8, "su3-class-square", e),
    };
    let g = class_one_representative();
    let endpoint = |name: &str, h: DMatrix<Complex64>| {
        let cid = format!("12-su3-segment/{name}");
        match segment_distance(&g, &h) {
            Ok(d) => Case::measured(cid, &json!({"endpoint": name}), d, 1e-10, "su3-segment-endpoint"),
            Err(e) => Case::failed(cid, &json!({"endpoint": name}), 1e-10, "su3-segment-endpoint", e),
        }
    };
    // h = g^{-1} exp(omega_1) lands on omega_1.
    let w1 = sur_weights(3, 1).expect("valid weight").to_f64();
    let start = endpoint("omega1", g.adjoint() * torus_element(&w1));
    // Conjugating g by the simple reflection lands on omega_2 / 2.
    let s1 = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0]).map(Complex64::from);
    let end = endpoint("half-omega2", &s1 * &g * s1.adjoint());
    vec![sampled, start, end]
}

/// Elapsed-time budgets in seconds, checked by the acceptance test rather than stored in reports.
pub fn time_budget(criterion: &str) -> Option<f64> {
    match criterion {
        "01-double-cone" => Some(10.0),
        "05-model-twist" => Some(30.0),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criterion_ids_are_unique_and_ordered() {
        let ids: Vec<&str> = CRITERIA.iter().map(|c| c.id).collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn cheap_criteria_pass_and_are_deterministic() {
        for c in [&CRITERIA[6], &CRITERIA[9], &CRITERIA[10]] {
            let a = c.run(Profile::Fast, 5);
            assert!(a.iter().all(|x| x.pass), "{}: {a:?}", c.id);
            assert_eq!(a, c.run(Profile::Fast, 5));
            assert!(a.iter().all(|x| x.group() == c.id));
        }
    }

    #[test]
    fn zero_fixture_is_identity() {
        assert!(is_identity(&monodromy_matrix(&zero_fixture()).unwrap()));
    }
}
