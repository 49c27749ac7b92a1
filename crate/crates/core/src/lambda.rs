//! The coefficient ring of finite integer combinations of rational powers of
//! a formal variable `q`.
//!
//! An element is stored as a sparse map `exponent -> coefficient`. The map
//! never holds a zero coefficient, so structural equality is ring equality
//! and the zero element is the empty map.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact exponent of `q`.
pub type Exponent = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LambdaError {
    #[error("cannot evaluate q^{exponent} at q = {mu}: fractional power of a value other than 1")]
    FractionalPower { exponent: Exponent, mu: BigRational },
    #[error("cannot evaluate q^{exponent} at q = 0")]
    ZeroToNegativePower { exponent: Exponent },
    #[error("{n} is not a common denominator of the exponent {exponent}")]
    NotCommonDenominator { n: i64, exponent: Exponent },
    #[error("scaling denominator must be positive, got {0}")]
    NonPositiveDenominator(i64),
    #[error("invalid term record: {0}")]
    InvalidRecord(String),
}

/// Minimal exponent with nonzero coefficient; `Infinite` for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Finite(Exponent),
    Infinite,
}

impl Order {
    pub fn is_positive(&self) -> bool {
        match self {
            Order::Finite(e) => *e > Exponent::zero(),
            Order::Infinite => true,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            Order::Finite(e) => *e >= Exponent::zero(),
            Order::Infinite => true,
        }
    }

    pub fn finite(&self) -> Option<Exponent> {
        match self {
            Order::Finite(e) => Some(*e),
            Order::Infinite => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(e) => write!(f, "{e}"),
            Order::Infinite => write!(f, "+inf"),
        }
    }
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LambdaElement {
    terms: BTreeMap<Exponent, BigInt>,
}

impl LambdaElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, Exponent::zero())
    }

    /// `coeff * q^exponent`.
    pub fn monomial(coeff: impl Into<BigInt>, exponent: Exponent) -> Self {
        let mut out = Self::zero();
        out.add_term(exponent, coeff.into());
        out
    }

    /// `q^(num/den)` with unit coefficient.
    pub fn q_pow(num: i64, den: i64) -> Self {
        Self::monomial(1, Exponent::new(num, den))
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, Exponent::zero())
    }

    /// Builds an element from `(exponent, coefficient)` pairs, merging like terms.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, C)>,
        C: Into<BigInt>,
    {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, c.into());
        }
        out
    }

    fn add_term(&mut self, exponent: Exponent, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(exponent).or_insert_with(BigInt::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&exponent);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exponent: &Exponent) -> BigInt {
        self.terms.get(exponent).cloned().unwrap_or_default()
    }

    pub fn order(&self) -> Order {
        match self.terms.keys().next() {
            Some(e) => Order::Finite(*e),
            None => Order::Infinite,
        }
    }

    /// Returns `Some(c)` when the element is the constant `c * q^0` (or zero).
    pub fn as_integer(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => self.terms.get(&Exponent::zero()).cloned(),
            _ => None,
        }
    }

    /// Multiplies by `q^shift`.
    pub fn shift(&self, shift: Exponent) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e + shift, c.clone())).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(),
        }
    }

    /// Least common multiple of the exponent denominators (1 for zero).
    pub fn denominator_lcm(&self) -> i64 {
        self.terms.keys().fold(1, |acc, e| acc.lcm(e.denom()))
    }

    /// Evaluates at `q = mu`.
    ///
    /// Fractional exponents can only be evaluated at `mu = 1`.
    pub fn specialize(&self, mu: &BigRational) -> Result<BigRational, LambdaError> {
        let mut total = BigRational::zero();
        for (e, c) in &self.terms {
            let power = if mu.is_one() {
                BigRational::one()
            } else if !e.is_integer() {
                return Err(LambdaError::FractionalPower { exponent: *e, mu: mu.clone() });
            } else {
                let k = e.to_integer();
                if mu.is_zero() {
                    match k.signum() {
                        0 => BigRational::one(),
                        1 => BigRational::zero(),
                        _ => return Err(LambdaError::ZeroToNegativePower { exponent: *e }),
                    }
                } else {
                    pow_rational(mu, k)
                }
            };
            total += power * BigRational::from_integer(c.clone());
        }
        Ok(total)
    }

    /// Value at `q = 1`, always an integer.
    pub fn at_one(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |acc, c| acc + c)
    }

    /// Rewrites the element as a Laurent polynomial in `u = q^(1/n)`.
    pub fn to_single_variable(&self, n: i64) -> Result<LaurentPoly, LambdaError> {
        if n <= 0 {
            return Err(LambdaError::NonPositiveDenominator(n));
        }
        let mut out = BTreeMap::new();
        for (e, c) in &self.terms {
            let scaled = *e * Exponent::from_integer(n);
            if !scaled.is_integer() {
                return Err(LambdaError::NotCommonDenominator { n, exponent: *e });
            }
            out.insert(scaled.to_integer(), c.clone());
        }
        Ok(LaurentPoly { terms: out })
    }

    /// Splits into the `q^0` coefficient and the remainder.
    pub fn split_constant(&self) -> (BigInt, LambdaElement) {
        let mut rest = self.clone();
        let c = rest.terms.remove(&Exponent::zero()).unwrap_or_default();
        (c, rest)
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(e, c)| TermRecord { num: *e.numer(), den: *e.denom(), coeff: c.to_string() })
            .collect()
    }

    pub fn from_records(records: &[TermRecord]) -> Result<Self, LambdaError> {
        let mut out = Self::zero();
        for r in records {
            if r.den == 0 {
                return Err(LambdaError::InvalidRecord("zero denominator".into()));
            }
            let coeff: BigInt = r
                .coeff
                .trim()
                .parse()
                .map_err(|_| LambdaError::InvalidRecord(format!("bad coefficient {:?}", r.coeff)))?;
            out.add_term(Exponent::new(r.num, r.den), coeff);
        }
        Ok(out)
    }
}

fn pow_rational(base: &BigRational, k: i64) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..k.unsigned_abs() {
        acc *= base;
    }
    if k < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// Serialized term: `{"num": int, "den": int, "coeff": "<integer>"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub num: i64,
    pub den: i64,
    pub coeff: String,
}

impl Serialize for LambdaElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_records().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LambdaElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(deserializer)?;
        LambdaElement::from_records(&records).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for LambdaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LambdaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            if e.is_zero() {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}")?;
                }
                if e.is_integer() {
                    write!(f, "q^{}", e.numer())?;
                } else {
                    write!(f, "q^({e})")?;
                }
            }
        }
        Ok(())
    }
}

impl Add for &LambdaElement {
    type Output = LambdaElement;
    fn add(self, rhs: &LambdaElement) -> LambdaElement {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LambdaElement {
    type Output = LambdaElement;
    fn add(mut self, rhs: LambdaElement) -> LambdaElement {
        self += &rhs;
        self
    }
}

impl AddAssign<&LambdaElement> for LambdaElement {
    fn add_assign(&mut self, rhs: &LambdaElement) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl Neg for &LambdaElement {
    type Output = LambdaElement;
    fn neg(self) -> LambdaElement {
        LambdaElement { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl Neg for LambdaElement {
    type Output = LambdaElement;
    fn neg(self) -> LambdaElement {
        -&self
    }
}

impl Sub for &LambdaElement {
    type Output = LambdaElement;
    fn sub(self, rhs: &LambdaElement) -> LambdaElement {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Sub for LambdaElement {
    type Output = LambdaElement;
    fn sub(self, rhs: LambdaElement) -> LambdaElement {
        &self - &rhs
    }
}

impl Mul for &LambdaElement {
    type Output = LambdaElement;
    fn mul(self, rhs: &LambdaElement) -> LambdaElement {
        let mut out = LambdaElement::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(*ea + *eb, ca * cb);
            }
        }
        out
    }
}

impl Mul for LambdaElement {
    type Output = LambdaElement;
    fn mul(self, rhs: LambdaElement) -> LambdaElement {
        &self * &rhs
    }
}

impl Zero for LambdaElement {
    fn zero() -> Self {
        LambdaElement::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for LambdaElement {
    fn one() -> Self {
        LambdaElement::one()
    }
}

impl From<i64> for LambdaElement {
    fn from(c: i64) -> Self {
        LambdaElement::constant(c)
    }
}

/// Laurent polynomial in a single variable `u` with integer coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn from_terms<I: IntoIterator<Item = (i64, i64)>>(terms: I) -> Self {
        let mut out = BTreeMap::new();
        for (e, c) in terms {
            let slot = out.entry(e).or_insert_with(BigInt::zero);
            *slot += c;
        }
        out.retain(|_, c: &mut BigInt| !c.is_zero());
        Self { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &BigInt)> {
        self.terms.iter()
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Evaluates at `u = u0` modulo the prime `p`; `u0` must be a unit mod `p`.
    pub fn eval_mod(&self, u0: u64, p: u64) -> u64 {
        let inv = crate::linalg::modp::inv_mod(u0, p);
        let mut acc = 0u64;
        for (e, c) in &self.terms {
            let base = if *e >= 0 { u0 } else { inv };
            let pw = crate::linalg::modp::pow_mod(base, e.unsigned_abs(), p);
            let cm = crate::linalg::modp::bigint_mod(c, p);
            acc = crate::linalg::modp::add_mod(acc, crate::linalg::modp::mul_mod(cm, pw, p), p);
        }
        acc
    }

    /// Dense coefficient vector of `u^(-shift) * self`, lowest power first.
    pub fn to_dense(&self, shift: i64) -> Vec<BigInt> {
        let Some(max) = self.max_exponent() else { return Vec::new() };
        let len = (max - shift + 1).max(0) as usize;
        let mut out = vec![BigInt::zero(); len];
        for (e, c) in &self.terms {
            let idx = e - shift;
            assert!(idx >= 0, "shift {shift} above exponent {e}");
            out[idx as usize] = c.clone();
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                *out.entry(ea + eb).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        out.retain(|_, c| !c.is_zero());
        LaurentPoly { terms: out }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("{c}u^{e}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `a / b` as an exponent, panicking on a zero denominator.
pub fn exponent(num: i64, den: i64) -> Exponent {
    Exponent::new(num, den)
}

pub fn exponent_to_f64(e: &Exponent) -> f64 {
    e.numer().to_f64().unwrap_or(f64::NAN) / e.denom().to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(num: i64, den: i64) -> LambdaElement {
        LambdaElement::q_pow(num, den)
    }

    fn c(k: i64) -> LambdaElement {
        LambdaElement::constant(k)
    }

    #[test]
    fn additive_inverse_is_empty() {
        let s = &c(1) + &(-&c(1));
        assert!(s.is_zero());
        assert_eq!(s.num_terms(), 0);
    }

    #[test]
    fn like_terms_merge() {
        let a = LambdaElement::monomial(3, exponent(1, 2));
        let b = LambdaElement::monomial(2, exponent(1, 2));
        assert_eq!(&a + &b, LambdaElement::monomial(5, exponent(1, 2)));
    }

    #[test]
    fn distinct_exponents_stay_separate() {
        let s = &q(1, 2) + &q(1, 3);
        assert_eq!(s.num_terms(), 2);
        assert_eq!(s.order(), Order::Finite(exponent(1, 3)));
    }

    #[test]
    fn exponents_add_under_multiplication() {
        assert_eq!(&q(1, 2) * &q(1, 3), q(5, 6));
        let lhs = &(&c(1) + &q(1, 1)) * &(&c(1) - &q(1, 1));
        assert_eq!(lhs, &c(1) - &q(2, 1));
        assert!((&LambdaElement::zero() * &q(7, 3)).is_zero());
    }

    #[test]
    fn order_examples() {
        let a = &LambdaElement::monomial(3, exponent(1, 4)) + &LambdaElement::monomial(5, exponent(2, 1));
        assert_eq!(a.order(), Order::Finite(exponent(1, 4)));
        assert_eq!(LambdaElement::zero().order(), Order::Infinite);
        let b = &c(1) - &LambdaElement::monomial(7, exponent(-1, 2));
        assert_eq!(b.order(), Order::Finite(exponent(-1, 2)));
    }

    #[test]
    fn specialize_examples() {
        let one = BigRational::one();
        let a = &LambdaElement::monomial(3, exponent(1, 2)) - &c(1);
        assert_eq!(a.specialize(&one).unwrap(), BigRational::from_integer(2.into()));
        let b = &LambdaElement::monomial(2, exponent(3, 1)) + &q(1, 1);
        let two = BigRational::from_integer(2.into());
        assert_eq!(b.specialize(&two).unwrap(), BigRational::from_integer(18.into()));
        let four = BigRational::from_integer(4.into());
        assert!(matches!(q(1, 2).specialize(&four), Err(LambdaError::FractionalPower { .. })));
    }

    #[test]
    fn specialize_negative_powers() {
        let half = BigRational::new(1.into(), 2.into());
        let a = q(-2, 1);
        assert_eq!(a.specialize(&half).unwrap(), BigRational::from_integer(4.into()));
        assert!(matches!(a.specialize(&BigRational::zero()), Err(LambdaError::ZeroToNegativePower { .. })));
    }

    #[test]
    fn single_variable_examples() {
        let a = &q(1, 2) + &q(1, 1);
        assert_eq!(a.to_single_variable(2).unwrap(), LaurentPoly::from_terms([(1, 1), (2, 1)]));
        assert!(LambdaElement::zero().to_single_variable(5).unwrap().is_zero());
        assert!(matches!(q(1, 3).to_single_variable(2), Err(LambdaError::NotCommonDenominator { .. })));
    }

    #[test]
    fn json_round_trip() {
        let a = &LambdaElement::monomial(-12345678901234567890i128, exponent(-3, 7)) + &q(2, 1);
        let s = serde_json::to_string(&a).unwrap();
        let back: LambdaElement = serde_json::from_str(&s).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn deserialization_canonicalizes() {
        let s = r#"[{"num":2,"den":4,"coeff":"3"},{"num":1,"den":2,"coeff":"-3"},{"num":1,"den":1,"coeff":"0"}]"#;
        let a: LambdaElement = serde_json::from_str(s).unwrap();
        assert!(a.is_zero());
    }

    #[test]
    fn display_is_readable() {
        let a = &(&LambdaElement::monomial(3, exponent(1, 2)) - &c(1)) + &q(2, 1);
        assert_eq!(a.to_string(), "-1 + 3q^(1/2) + q^2");
    }
}
