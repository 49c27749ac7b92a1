//! Command grammar `dehnforge <area> <subcommand> [flags]` and its dispatch.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dehnforge::holonomy::{
    braid, coisotropic_fiber_dim, kr_labels, sample_class, solve_rep_variety, stabilizer_dimension, tangent_dimension,
    AlcoveValue, FiberCase, HolonomyTuple, RepInstance, SolveOptions, Solution, Target,
};
use dehnforge::homalg::{
    check_cochain_map, cohomology_ranks, cone, double_cone_lemma_check, map_from_json, mf_cohomology, mf_verify,
    random::random_cone_data, verify_complex, CohomologyMode, ConeData, GradedComplex, MatrixFactorization,
};
use dehnforge::pl_formula::{monodromy_matrix, sign, unipotency_check, SlantData};
use dehnforge::twist_local::{
    count_twisted_intersections, equivariance_check, maslov_index_loop, model_twist, section_index, sqrt_z_frame,
    symplectic_check, threshold_delta, AngleProfile, CotangentPoint, ROOT_RESIDUAL,
};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::One;
use rand::Rng;
use serde_json::{json, Value};

use crate::report::{Case, RunReport};
use crate::rng::case_rng;
use crate::suites::{accept, Profile, CRITERIA};

#[derive(Debug, Parser)]
#[command(name = "dehnforge", version, about = "Checks for fibered Dehn twists, energy-filtered complexes and SU(2) holonomy")]
pub struct Cli {
    /// Seed for every random choice in the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of random samples, where the command samples.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Override the pass tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub area: Area,
}

#[derive(Debug, Subcommand)]
pub enum Area {
    /// Cochain complexes over the energy ring and matrix factorizations.
    Homalg {
        #[command(subcommand)]
        cmd: HomalgCmd,
    },
    /// The local model Dehn twist.
    Twist {
        #[command(subcommand)]
        cmd: TwistCmd,
    },
    /// SU(2) representation varieties of marked spheres.
    Repvar {
        #[command(subcommand)]
        cmd: RepvarCmd,
    },
    /// Picard-Lefschetz monodromy from slant-product data.
    Pl { input: PathBuf },
    /// Run the acceptance suite.
    Accept {
        #[arg(long, value_enum, default_value = "fast")]
        profile: Profile,
    },
}

#[derive(Debug, Subcommand)]
pub enum HomalgCmd {
    /// Check degrees and `d^2 = 0` of a complex.
    Verify { input: PathBuf },
    /// Cone of `{"c0", "c1", "f"}` with its cohomology.
    Cone { input: PathBuf },
    /// Double-cone lemma on an instance, or on `--random N` generated instances.
    Doublecone {
        input: Option<PathBuf>,
        #[arg(long)]
        random: Option<usize>,
    },
    /// Verify a matrix factorization and compute its cohomology mod `w`.
    Mf { input: PathBuf },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct TwistArgs {
    /// Codimension; the fiber sphere is `S^c`.
    #[arg(long, default_value_t = 1)]
    pub c: usize,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    /// Defaults to 2, or to twice the threshold for `intersections`.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum TwistCmd {
    Symp(TwistArgs),
    Antipodal(TwistArgs),
    Equivariance(TwistArgs),
    Intersections(TwistArgs),
    Maslov(TwistArgs),
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    /// Instance JSON `{"labels": [{"num", "den"}], "target": "+I" | "-I"}`.
    #[arg(long, conflicts_with = "labels")]
    pub input: Option<PathBuf>,
    /// Comma-separated labels such as `1/4,1/4,1/4`.
    #[arg(long)]
    pub labels: Option<String>,
    #[arg(long, default_value = "+I")]
    pub target: String,
}

#[derive(Debug, Subcommand)]
pub enum RepvarCmd {
    /// Solve `g_1 ... g_n = target` with `g_i` in the labelled classes.
    Solve(LabelArgs),
    /// Solve and report the tangent and stabilizer dimensions.
    Dim(LabelArgs),
    /// Compare two braid words acting on a sampled tuple with equal labels.
    Orbit {
        #[arg(long)]
        labels: String,
        /// Space-separated generators, 1-based.
        #[arg(long)]
        braid: String,
        #[arg(long)]
        vs: String,
    },
    /// Dimension of a coisotropic fiber.
    Fibers {
        #[arg(long)]
        lambda: String,
        /// separating-generic, nonseparating-central or halftwist-pair.
        #[arg(long)]
        case: String,
    },
    /// Labels of the two-row weights.
    Kr {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k: usize,
    },
}

/// Malformed input, as opposed to a failed check.
#[derive(Debug)]
pub struct InputError(pub anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

pub fn run(cli: &Cli) -> Result<RunReport, InputError> {
    let out = match &cli.area {
        Area::Homalg { cmd } => homalg(cli, cmd),
        Area::Twist { cmd } => twist(cli, cmd),
        Area::Repvar { cmd } => repvar(cli, cmd),
        Area::Pl { input } => pl(cli, input),
        Area::Accept { profile } => Ok(accept(*profile, cli.seed)),
    };
    out.map_err(InputError)
}

/// Summary line per criterion, in criterion order.
pub fn criterion_lines(report: &RunReport) -> Vec<String> {
    CRITERIA
        .iter()
        .map(|c| {
            let cases: Vec<&Case> = report.cases.iter().filter(|x| x.group() == c.id).collect();
            let passed = cases.iter().filter(|x| x.pass).count();
            let verdict = if passed == cases.len() && !cases.is_empty() { "PASS" } else { "FAIL" };
            format!("{verdict} {} ({}/{} cases): {}", c.id, passed, cases.len(), c.title)
        })
        .collect()
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn parse_fraction(s: &str) -> Result<(i64, i64)> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d): (i64, i64) = (n.trim().parse()?, d.trim().parse()?);
            if d <= 0 {
                bail!("denominator of {s:?} must be positive");
            }
            Ok((n, d))
        }
        None => Ok((s.parse()?, 1)),
    }
}

fn parse_alcove(s: &str) -> Result<AlcoveValue> {
    let (n, d) = parse_fraction(s).with_context(|| format!("label {s:?}"))?;
    Ok(AlcoveValue::new(n as f64 / d as f64)?)
}

fn homalg(cli: &Cli, cmd: &HomalgCmd) -> Result<RunReport> {
    let seed = cli.seed;
    match cmd {
        HomalgCmd::Verify { input } => {
            let v = read_json(input)?;
            let c = GradedComplex::from_json(&v)?;
            let ver = verify_complex(&c);
            let violations: Vec<String> = ver.violations.iter().map(|x| format!("{x:?}")).collect();
            let case = Case::exact("verify", &v, ver.is_complex(), "complex-structure");
            Ok(RunReport::new("homalg-verify", seed, vec![case]).with_output(json!({"is_complex": ver.is_complex(), "violations": violations})))
        }
        HomalgCmd::Cone { input } => {
            let v = read_json(input)?;
            let field = |k: &str| v.get(k).ok_or_else(|| anyhow!("missing field {k:?}"));
            let c0 = GradedComplex::from_json(field("c0")?)?;
            let c1 = GradedComplex::from_json(field("c1")?)?;
            let f = map_from_json(field("f")?, c1.len(), c0.len())?;
            check_cochain_map(&f, &c0, &c1)?;
            let k = cone(&f, &c0, &c1)?;
            let mut output = json!({"cone": k.to_json()});
            let mut euler = true;
            for (name, mode) in [("rational-u", CohomologyMode::RationalU), ("integer-at-q1", CohomologyMode::IntegerAtOne)] {
                let (h0, h1, hk) = (cohomology_ranks(&c0, mode)?, cohomology_ranks(&c1, mode)?, cohomology_ranks(&k, mode)?);
                euler &= hk.euler_characteristic() == h1.euler_characteristic() - h0.euler_characteristic();
                output[name] = json!(hk.ranks());
            }
            let case = Case::exact("cone/euler", &v, k.is_complex() && euler, "cone-euler");
            Ok(RunReport::new("homalg-cone", seed, vec![case]).with_output(output))
        }
        HomalgCmd::Doublecone { input, random } => match (input, random) {
            (Some(path), None) => {
                let v = read_json(path)?;
                let d = ConeData::from_json(&v)?;
                let r = double_cone_lemma_check(&d);
                let case = Case::exact("doublecone", &v, r.hypotheses.all_hold() && r.acyclic(), "double-cone-acyclic");
                let output = json!({
                    "hypotheses_hold": r.hypotheses.all_hold(),
                    "failures": r.hypotheses.failures(),
                    "acyclic_rational": r.acyclic_rational,
                    "acyclic_integer": r.acyclic_integer,
                });
                Ok(RunReport::new("homalg-doublecone", seed, vec![case]).with_output(output))
            }
            (None, Some(n)) => {
                use rayon::prelude::*;
                let cases: Vec<Case> = (0..*n)
                    .into_par_iter()
                    .map(|i| {
                        let cid = format!("doublecone/{i:04}");
                        let d = random_cone_data(&mut case_rng(seed, &cid));
                        let r = double_cone_lemma_check(&d);
                        Case::exact(cid, &d.to_json(), r.hypotheses.all_hold() && r.acyclic(), "double-cone-acyclic")
                    })
                    .collect();
                let acyclic = cases.iter().filter(|c| c.pass).count();
                Ok(RunReport::new("homalg-doublecone", seed, cases).with_output(json!({"instances": n, "acyclic": acyclic})))
            }
            _ => bail!("give exactly one of an input file or --random N"),
        },
        HomalgCmd::Mf { input } => {
            let v = read_json(input)?;
            let m = MatrixFactorization::from_json(&v)?;
            let ok = mf_verify(&m);
            let mut output = json!({"verified": ok});
            if ok {
                let h = mf_cohomology(&m)?;
                output["h0"] = json!(h.h0.describe());
                output["h1"] = json!(h.h1.describe());
            }
            Ok(RunReport::new("homalg-mf", seed, vec![Case::exact("mf/verify", &v, ok, "mf-square")]).with_output(output))
        }
    }
}

fn profile(args: &TwistArgs, default_delta: f64) -> Result<AngleProfile> {
    if !(1..=8).contains(&args.c) {
        bail!("--c must be between 1 and 8, got {}", args.c);
    }
    Ok(AngleProfile::new(args.eps, args.delta.unwrap_or(default_delta))?)
}

fn unit_vector(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    use rand_distr::{Distribution, StandardNormal};
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let m = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if m > 1e-6 {
            return v.iter().map(|x| x / m).collect();
        }
    }
}

fn twist(cli: &Cli, cmd: &TwistCmd) -> Result<RunReport> {
    let seed = cli.seed;
    let samples = cli.samples.unwrap_or(100);
    let (name, args) = match cmd {
        TwistCmd::Symp(a) => ("symp", a),
        TwistCmd::Antipodal(a) => ("antipodal", a),
        TwistCmd::Equivariance(a) => ("equivariance", a),
        TwistCmd::Intersections(a) => ("intersections", a),
        TwistCmd::Maslov(a) => ("maslov", a),
    };
    let c = args.c;
    let params = json!({"c": c, "eps": args.eps, "delta": args.delta, "samples": samples});
    let suite = format!("twist-{name}");
    let report = match cmd {
        TwistCmd::Symp(_) => {
            let a = profile(args, 2.0)?;
            let d = symplectic_check(&a, c, samples, 1e-5, &mut case_rng(seed, "symp"));
            let case = Case::measured("symp", &params, d, cli.tol.unwrap_or(1e-6), "twist-symplectic");
            RunReport::new(suite, seed, vec![case]).with_output(json!({"max_defect": d}))
        }
        TwistCmd::Antipodal(_) => {
            let a = profile(args, 2.0)?;
            let mut rng = case_rng(seed, "antipodal");
            let (mut zero, mut far) = (0.0f64, 0.0f64);
            for _ in 0..samples {
                let x = unit_vector(&mut rng, c + 1);
                let minus: Vec<f64> = x.iter().map(|v| -v).collect();
                let p = CotangentPoint::on_zero_section(x.clone())?;
                zero = zero.max(model_twist(&p, &a).distance(&CotangentPoint::project(&minus, &vec![0.0; c + 1])));
                let q = CotangentPoint::project(&x, &unit_vector(&mut rng, c + 1));
                if q.fiber_norm() > 1e-6 {
                    let q = q.scaled(a.support_radius() * rng.random_range(1.0..3.0) / q.fiber_norm());
                    far = far.max(model_twist(&q, &a).distance(&q));
                }
            }
            let tol = cli.tol.unwrap_or(1e-9);
            let cases = vec![
                Case::measured("antipodal/zero-section", &params, zero, tol, "twist-antipodal-zero-section"),
                Case::measured("antipodal/outside-support", &params, far, tol, "twist-identity-outside-support"),
            ];
            RunReport::new(suite, seed, cases).with_output(json!({"zero_section_defect": zero, "outside_support_defect": far}))
        }
        TwistCmd::Equivariance(_) => {
            let a = profile(args, 2.0)?;
            let d = equivariance_check(&a, c, samples, &mut case_rng(seed, "equivariance"));
            let tol = cli.tol.unwrap_or(1e-9);
            let cases = vec![
                Case::measured("equivariance/rotation", &params, d.rotation, tol, "twist-equivariance"),
                Case::measured("equivariance/moment", &params, d.moment, tol, "twist-moment-norm"),
            ];
            RunReport::new(suite, seed, cases).with_output(serde_json::to_value(d)?)
        }
        TwistCmd::Intersections(_) => {
            let mut rng = case_rng(seed, "intersections");
            let v0 = unit_vector(&mut rng, c + 1);
            let v1 = unit_vector(&mut rng, c + 1);
            let base = profile(args, 1.0)?;
            let threshold = threshold_delta(&base, &v0, &v1, 1.0)?;
            let a = base.with_delta(args.delta.unwrap_or(2.0 * threshold))?;
            let hits = count_twisted_intersections(&v0, &v1, &a, 1.0)?;
            let residual = hits.points.iter().map(|p| p.residual).fold(0.0, f64::max);
            let inputs = json!({"v0": v0, "v1": v1, "eps": a.eps(), "delta": a.delta()});
            let tol = cli.tol.unwrap_or(ROOT_RESIDUAL);
            let cases = vec![
                Case::exact("intersections/count", &inputs, hits.count == 1, "intersection-bijection"),
                Case::measured("intersections/residual", &inputs, residual, tol, "intersection-residual"),
            ];
            let output = json!({"threshold_delta": threshold, "delta": a.delta(), "intersections": hits});
            RunReport::new(suite, seed, cases).with_output(output)
        }
        TwistCmd::Maslov(_) => {
            let reference = DMatrix::<Complex64>::identity(c + 1, c + 1);
            let lp = maslov_index_loop(|t| sqrt_z_frame(c, t), &reference, cli.samples.unwrap_or(64))?;
            let sec = section_index(c)?;
            let cases = vec![
                Case::exact("maslov/loop", &params, lp == c as i64 + 1, "maslov-index"),
                Case::exact("maslov/section", &params, sec == c as i64 - 1, "maslov-index"),
            ];
            RunReport::new(suite, seed, cases).with_output(json!({"loop": lp, "section": sec}))
        }
    };
    Ok(report)
}

fn instance(args: &LabelArgs, seed: u64) -> Result<RepInstance> {
    match (&args.input, &args.labels) {
        (Some(path), None) => Ok(RepInstance::from_json(&read_json(path)?)?),
        (None, Some(labels)) => {
            let labels = labels
                .split(',')
                .map(|s| parse_fraction(s).map(|(num, den)| dehnforge::holonomy::LabelRecord { num, den }))
                .collect::<Result<Vec<_>>>()?;
            let target: Target = serde_json::from_value(json!(args.target)).map_err(|_| anyhow!("target must be +I or -I"))?;
            let inst = RepInstance { labels, target, seed };
            inst.alcove_labels()?;
            Ok(inst)
        }
        _ => bail!("give exactly one of --input or --labels"),
    }
}

fn repvar(cli: &Cli, cmd: &RepvarCmd) -> Result<RunReport> {
    let seed = cli.seed;
    match cmd {
        RepvarCmd::Solve(args) | RepvarCmd::Dim(args) => {
            let inst = instance(args, seed)?;
            let labels = inst.alcove_labels()?;
            let dim = matches!(cmd, RepvarCmd::Dim(_));
            let opts = SolveOptions { tol: cli.tol.unwrap_or(1e-10), reject_reducible: dim, ..SolveOptions::default() };
            let inputs = serde_json::to_value(&inst)?;
            let mut rng = case_rng(inst.seed, "repvar");
            let tuple = match solve_rep_variety(&labels, inst.target, &mut rng, opts) {
                Ok(t) => t,
                Err(e) => {
                    let case = Case::failed("repvar/solve", &inputs, opts.tol, "rep-variety-solution", e);
                    return Ok(RunReport::new("repvar", seed, vec![case]));
                }
            };
            let mut cases = vec![Case::measured("repvar/solve", &inputs, tuple.residual(), opts.tol, "rep-variety-solution")];
            if dim {
                let stab = stabilizer_dimension(&tuple.elements);
                cases.push(Case::exact("repvar/tangent", &inputs, tangent_dimension(&tuple).is_ok(), "rep-variety-dimension"));
                cases.push(Case::exact("repvar/irreducible", &inputs, stab == 0, "rep-variety-irreducible"));
            }
            let output = Solution { instance: inst, tuple }.to_json();
            Ok(RunReport::new(if dim { "repvar-dim" } else { "repvar-solve" }, seed, cases).with_output(output))
        }
        RepvarCmd::Orbit { labels, braid: w1, vs: w2 } => {
            let labels = labels.split(',').map(parse_alcove).collect::<Result<Vec<_>>>()?;
            let word = |s: &str| -> Result<Vec<usize>> {
                s.split_whitespace()
                    .map(|t| match t.parse::<usize>() {
                        Ok(k) if k >= 1 && k < labels.len() => Ok(k - 1),
                        _ => Err(anyhow!("braid generator {t:?} must be in 1..{}", labels.len())),
                    })
                    .collect()
            };
            let (a, b) = (word(w1)?, word(w2)?);
            let mut rng = case_rng(seed, "orbit");
            let elements = labels.iter().map(|mu| sample_class(*mu, &mut rng)).collect();
            let t = HolonomyTuple { elements, labels: labels.clone(), target: Target::PlusIdentity };
            let (ta, tb) = (braid(&t, &a)?, braid(&t, &b)?);
            let d = ta.distance(&tb);
            let inputs = json!({"labels": labels.iter().map(|l| l.value()).collect::<Vec<_>>(), "braid": w1, "vs": w2});
            let case = Case::measured("orbit", &inputs, d, cli.tol.unwrap_or(1e-12), "braid-relations");
            Ok(RunReport::new("repvar-orbit", seed, vec![case]).with_output(json!({"distance": d})))
        }
        RepvarCmd::Fibers { lambda, case } => {
            let l = parse_alcove(lambda)?;
            let fc: FiberCase = serde_json::from_value(json!(case)).map_err(|_| anyhow!("unknown fiber case {case:?}"))?;
            let d = coisotropic_fiber_dim(l, fc, &mut case_rng(seed, "fibers"))?;
            let want = match fc {
                FiberCase::SeparatingGeneric => 1,
                FiberCase::NonseparatingCentral => 3,
                FiberCase::HalftwistPair => 2,
            };
            let inputs = json!({"lambda": l.value(), "case": fc});
            let c = Case::exact("fibers", &inputs, d == want, "coisotropic-fiber-dimension");
            Ok(RunReport::new("repvar-fibers", seed, vec![c]).with_output(json!({"dimension": d})))
        }
        RepvarCmd::Kr { r, k } => {
            let (n1, n2) = kr_labels(*r, *k)?;
            let inputs = json!({"r": r, "k": k});
            // Both weights sum to zero by construction; the case certifies that they were built.
            let c = Case::exact("kr", &inputs, n1.r() == *r && n2.r() == *r, "kr-labels");
            let mut output = json!({"nu1": n1.to_json(), "nu2": n2.to_json()});
            if let (Some(a), Some(b)) = (n1.rank_one(), n2.rank_one()) {
                // For SU(2) a weight is determined by its first coordinate, the alcove label.
                output["labels"] = json!([a.to_string(), b.to_string()]);
            }
            Ok(RunReport::new("repvar-kr", seed, vec![c]).with_output(output))
        }
    }
}

fn pl(cli: &Cli, input: &Path) -> Result<RunReport> {
    let v = read_json(input)?;
    let s = SlantData::from_json(&v)?;
    let t = monodromy_matrix(&s)?;
    let u = unipotency_check(&s)?;
    // A unipotent integer matrix has determinant one.
    let case = Case::exact("pl/determinant", &v, !u.is_unipotent || u.determinant == BigInt::one(), "picard-lefschetz-unipotent");
    let output = json!({"sign": sign(s.c), "monodromy": t.to_json(), "unipotency": u});
    Ok(RunReport::new("pl", cli.seed, vec![case]).with_output(output))
}
