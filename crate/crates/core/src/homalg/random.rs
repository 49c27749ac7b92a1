//! Seeded generators for complexes, cochain maps, cone data and matrix
//! factorizations with known structure.
//!
//! Complexes start as direct sums of elementary pieces (a single generator,
//! or a pair `x -> c y`) and are then conjugated by a graded unipotent change
//! of basis with positive-order off-diagonal entries, which hides the
//! splitting without changing cohomology.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{reweight, reweight_map, CoefficientRing, ConeData, Generator, GradedComplex, MatrixFactorization};
use crate::lambda::{exponent, Exponent, LambdaElement};
use crate::linalg::Matrix;

/// Generators per complex stay within this bound.
pub const MAX_GENERATORS: usize = 12;

fn random_exponent<R: Rng + ?Sized>(rng: &mut R) -> Exponent {
    let den = rng.random_range(1..=4);
    // At least 1/2 so that a weight shift of at most 1/4 keeps it positive.
    exponent(rng.random_range((den + 1) / 2..=2 * den), den)
}

fn random_sign<R: Rng + ?Sized>(rng: &mut R) -> i64 {
    if rng.random_bool(0.5) {
        1
    } else {
        -1
    }
}

/// One or two terms, every exponent at least 1/2.
pub fn random_positive<R: Rng + ?Sized>(rng: &mut R) -> LambdaElement {
    let mut out = LambdaElement::zero();
    for _ in 0..rng.random_range(1..=2) {
        out = &out + &LambdaElement::monomial(random_sign(rng) * rng.random_range(1..=2), random_exponent(rng));
    }
    if out.is_zero() {
        LambdaElement::monomial(1, random_exponent(rng))
    } else {
        out
    }
}

/// Like [`random_positive`], plus an optional constant term.
pub fn random_nonnegative<R: Rng + ?Sized>(rng: &mut R) -> LambdaElement {
    let c = rng.random_range(-2..=2);
    &LambdaElement::constant(c) + &random_positive(rng)
}

/// `±m q^a` with `m ∈ {1, 2}` and `a ≥ 1/2`; nonzero at `q = 1`.
fn random_monomial<R: Rng + ?Sized>(rng: &mut R) -> LambdaElement {
    let m = if rng.random_bool(0.75) { 1 } else { 2 };
    LambdaElement::monomial(random_sign(rng) * m, random_exponent(rng))
}

#[derive(Debug, Clone)]
enum Piece {
    Single(usize),
    Pair { x: usize, y: usize },
}

/// A complex together with the splitting it was built from.
#[derive(Debug, Clone)]
pub struct RandomComplex {
    pub complex: GradedComplex,
    degrees: Vec<i64>,
    pieces: Vec<Piece>,
    standard: Matrix<LambdaElement>,
    basis: Matrix<LambdaElement>,
    basis_inv: Matrix<LambdaElement>,
}

fn labelled(prefix: &str, degrees: &[i64]) -> Vec<Generator> {
    degrees.iter().enumerate().map(|(i, &d)| Generator::new(format!("{prefix}{i}"), d)).collect()
}

/// Split complex on `n` generators with degrees in `0..=3`.
fn standard<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (Vec<i64>, Matrix<LambdaElement>, Vec<Piece>) {
    let mut slots: Vec<usize> = (0..n).collect();
    slots.shuffle(rng);
    let mut degrees = vec![0; n];
    let mut d = Matrix::zeros(n, n);
    let mut pieces = Vec::new();
    while let Some(x) = slots.pop() {
        if !slots.is_empty() && rng.random_bool(0.6) {
            let y = slots.pop().expect("nonempty");
            let deg = rng.random_range(0..=2);
            degrees[x] = deg;
            degrees[y] = deg + 1;
            d[(y, x)] = random_monomial(rng);
            pieces.push(Piece::Pair { x, y });
        } else {
            degrees[x] = rng.random_range(0..=3);
            pieces.push(Piece::Single(x));
        }
    }
    (degrees, d, pieces)
}

/// Unipotent upper-triangular change of basis preserving degree, and its inverse.
///
/// Off-diagonal entries have positive order, or non-negative order when
/// `allow_constant` is set.
pub fn graded_unipotent<R: Rng + ?Sized>(
    rng: &mut R,
    degrees: &[i64],
    allow_constant: bool,
) -> (Matrix<LambdaElement>, Matrix<LambdaElement>) {
    let n = degrees.len();
    let mut p = Matrix::<LambdaElement>::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            if degrees[i] == degrees[j] && rng.random_bool(0.5) {
                p[(i, j)] = if allow_constant { random_nonnegative(rng) } else { random_positive(rng) };
            }
        }
    }
    let inv = p.unipotent_upper_inverse();
    (p, inv)
}

/// Map of degree `shift` from `src` to `dst` degrees with positive-order entries.
pub fn random_degree_map<R: Rng + ?Sized>(rng: &mut R, src: &[i64], dst: &[i64], shift: i64) -> Matrix<LambdaElement> {
    Matrix::from_fn(dst.len(), src.len(), |j, i| {
        if dst[j] == src[i] + shift && rng.random_bool(0.4) {
            random_positive(rng)
        } else {
            LambdaElement::zero()
        }
    })
}

fn conjugate(p: &Matrix<LambdaElement>, m: &Matrix<LambdaElement>, q_inv: &Matrix<LambdaElement>) -> Matrix<LambdaElement> {
    p.matmul(m).matmul(q_inv)
}

/// Random complex on `n` generators whose differential has positive order.
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, n: usize, prefix: &str) -> RandomComplex {
    let (degrees, d, pieces) = standard(rng, n);
    let (basis, basis_inv) = graded_unipotent(rng, &degrees, false);
    let diff = conjugate(&basis, &d, &basis_inv);
    let complex = GradedComplex::new(labelled(prefix, &degrees), diff, CoefficientRing::Lambda).expect("square differential");
    RandomComplex { complex, degrees, pieces, standard: d, basis, basis_inv }
}

/// Random cochain map `a -> b`: a split map between the elementary pieces,
/// transported to the conjugated bases, plus a null-homotopic term.
pub fn random_cochain_map<R: Rng + ?Sized>(rng: &mut R, a: &RandomComplex, b: &RandomComplex) -> Matrix<LambdaElement> {
    let (da, db) = (&a.degrees, &b.degrees);
    let mut f = Matrix::<LambdaElement>::zeros(db.len(), da.len());
    for s in &a.pieces {
        for t in &b.pieces {
            if !rng.random_bool(0.5) {
                continue;
            }
            match (s, t) {
                (Piece::Single(i), Piece::Single(j)) if da[*i] == db[*j] => f[(*j, *i)] = random_nonnegative(rng),
                (Piece::Single(i), Piece::Pair { y, .. }) if da[*i] == db[*y] => f[(*y, *i)] = random_nonnegative(rng),
                (Piece::Pair { x, .. }, Piece::Single(j)) if da[*x] == db[*j] => f[(*j, *x)] = random_nonnegative(rng),
                (Piece::Pair { x, y }, Piece::Pair { x: x2, y: y2 }) if da[*x] == db[*x2] => {
                    // With d x = c y and d x2 = c2 y2, (x, y) -> (g c x2, g c2 y2) commutes.
                    let g = random_nonnegative(rng);
                    f[(*x2, *x)] = &g * &a.standard[(*y, *x)];
                    f[(*y2, *y)] = &g * &b.standard[(*y2, *x2)];
                }
                (Piece::Pair { x, .. }, Piece::Pair { y: y2, .. }) if da[*x] == db[*y2] => {
                    f[(*y2, *x)] = random_nonnegative(rng)
                }
                _ => {}
            }
        }
    }
    let f = conjugate(&b.basis, &f, &a.basis_inv);
    let s = random_degree_map(rng, da, db, -1);
    let homotopic = b.complex.differential().matmul(&s).add(&s.matmul(a.complex.differential()));
    f.add(&homotopic)
}

/// Cone data satisfying the double-cone hypotheses by construction.
///
/// Starts from `C1 = C0 ⊕ C2` with inclusion and projection, conjugates all
/// three complexes, perturbs `f` and `k` within their homotopy classes
/// (adjusting `h` to match), then reweights with matched weights.
pub fn random_cone_data<R: Rng + ?Sized>(rng: &mut R) -> ConeData {
    let half = MAX_GENERATORS / 2;
    let (n0, n2) = (rng.random_range(1..=half), rng.random_range(1..=half));
    let n1 = n0 + n2;
    let (deg0, d0, _) = standard(rng, n0);
    let (deg2, d2, _) = standard(rng, n2);
    let deg1: Vec<i64> = deg0.iter().chain(&deg2).copied().collect();
    let d1 = Matrix::from_blocks(&[n0, n2], &[n0, n2], &[vec![Some(&d0), None], vec![None, Some(&d2)]]);
    let f = Matrix::from_fn(n1, n0, |j, i| if i == j { LambdaElement::one() } else { LambdaElement::zero() });
    let k = Matrix::from_fn(n2, n1, |j, i| if i == j + n0 { LambdaElement::one() } else { LambdaElement::zero() });

    let (p0, p0i) = graded_unipotent(rng, &deg0, false);
    let (p1, p1i) = graded_unipotent(rng, &deg1, false);
    let (p2, p2i) = graded_unipotent(rng, &deg2, false);
    let d0 = conjugate(&p0, &d0, &p0i);
    let d1 = conjugate(&p1, &d1, &p1i);
    let d2 = conjugate(&p2, &d2, &p2i);
    let mut f = conjugate(&p1, &f, &p0i);
    let mut k = conjugate(&p2, &k, &p1i);
    let mut h = Matrix::<LambdaElement>::zeros(n2, n0);

    // k += d2 s + s d1 keeps d2 h + h d0 = k f once h += s f.
    let s = random_degree_map(rng, &deg1, &deg2, -1);
    k = k.add(&d2.matmul(&s)).add(&s.matmul(&d1));
    h = h.add(&s.matmul(&f));
    // f += d1 t + t d0, then h += k t.
    let t = random_degree_map(rng, &deg0, &deg1, -1);
    f = f.add(&d1.matmul(&t)).add(&t.matmul(&d0));
    h = h.add(&k.matmul(&t));

    // Matched weights: the leading inclusion and projection stay at order zero.
    let pick = |rng: &mut R| exponent(rng.random_range(0..=3), 12);
    let w0: Vec<Exponent> = (0..n0).map(|_| pick(rng)).collect();
    let w2: Vec<Exponent> = (0..n2).map(|_| pick(rng)).collect();
    let w1: Vec<Exponent> = w0.iter().chain(&w2).copied().collect();

    let build = |prefix: &str, deg: &[i64], d: Matrix<LambdaElement>, w: &[Exponent]| {
        let c = GradedComplex::new(labelled(prefix, deg), d, CoefficientRing::Lambda).expect("square differential");
        reweight(&c, w).expect("one weight per generator")
    };
    let c0 = build("a", &deg0, d0, &w0);
    let c1 = build("b", &deg1, d1, &w1);
    let c2 = build("c", &deg2, d2, &w2);
    ConeData {
        f: reweight_map(&f, &w0, &w1),
        k: reweight_map(&k, &w1, &w2),
        h: reweight_map(&h, &w0, &w2),
        c0,
        c1,
        c2,
    }
}

/// Random positive-order complex, reweighted by weights in `[0, 1]`.
pub fn random_reweighted_complex<R: Rng + ?Sized>(rng: &mut R) -> GradedComplex {
    let n = rng.random_range(1..=MAX_GENERATORS);
    let c = random_complex(rng, n, "x").complex;
    let w: Vec<Exponent> = (0..n).map(|_| exponent(rng.random_range(0..=6), 6)).collect();
    reweight(&c, &w).expect("one weight per generator")
}

/// Unimodular integer matrix and its inverse.
pub fn random_unimodular<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (Matrix<BigInt>, Matrix<BigInt>) {
    let mut tri = || Matrix::from_fn(n, n, |i, j| BigInt::from(if i == j { 1 } else if i < j { rng.random_range(-2..=2) } else { 0 }));
    let upper = tri();
    let lower = tri().transpose();
    let upper_inv = upper.unipotent_upper_inverse();
    let lower_inv = lower.transpose().unipotent_upper_inverse().transpose();
    (lower.matmul(&upper), upper_inv.matmul(&lower_inv))
}

/// Diagonal factorization `a_i * (w / a_i) = w` in a random basis.
pub fn random_factorization<R: Rng + ?Sized>(rng: &mut R, w: i64, n: usize) -> MatrixFactorization {
    let divisors: Vec<i64> = (1..=w).filter(|a| w % a == 0).collect();
    let a: Vec<i64> = (0..n).map(|_| divisors[rng.random_range(0..divisors.len())]).collect();
    let d0 = Matrix::from_fn(n, n, |i, j| BigInt::from(if i == j { a[i] } else { 0 }));
    let d1 = Matrix::from_fn(n, n, |i, j| BigInt::from(if i == j { w / a[i] } else { 0 }));
    let (p0, p0i) = random_unimodular(rng, n);
    let (p1, p1i) = random_unimodular(rng, n);
    MatrixFactorization::new(p1.matmul(&d0).matmul(&p0i), p0.matmul(&d1).matmul(&p1i), w).expect("square blocks")
}
