//! Monodromy of a fibered Picard-Lefschetz degeneration on integral homology,
//! `alpha -> alpha + (-1)^{(c+1)(c+2)/2} [C] . [C^t] . alpha`, from user-supplied slant products.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::linalg::snf::determinant;
use crate::linalg::Matrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid slant data: {0}")]
    Schema(String),
}

/// Ranks of a free graded abelian group; absent degrees have rank 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GradedGroup {
    ranks: BTreeMap<i64, usize>,
}

impl GradedGroup {
    pub fn new(ranks: impl IntoIterator<Item = (i64, usize)>) -> Self {
        Self { ranks: ranks.into_iter().filter(|&(_, r)| r > 0).collect() }
    }

    pub fn rank(&self, d: i64) -> usize {
        self.ranks.get(&d).copied().unwrap_or(0)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.ranks.keys().copied()
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.ranks.iter().map(|(d, r)| if d.rem_euclid(2) == 0 { *r as i64 } else { -(*r as i64) }).sum()
    }
}

/// Homogeneous map of degree `shift`: block `d` sends degree `d` to degree `d + shift`.
/// Missing blocks are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedMap {
    pub shift: i64,
    pub blocks: BTreeMap<i64, Matrix<BigInt>>,
}

impl GradedMap {
    pub fn zero(shift: i64) -> Self {
        Self { shift, blocks: BTreeMap::new() }
    }

    pub fn block(&self, d: i64, source: &GradedGroup, target: &GradedGroup) -> Matrix<BigInt> {
        self.blocks.get(&d).cloned().unwrap_or_else(|| Matrix::zeros(target.rank(d + self.shift), source.rank(d)))
    }

    pub fn check(&self, source: &GradedGroup, target: &GradedGroup, name: &str) -> Result<(), PlError> {
        for (d, m) in &self.blocks {
            let want = (target.rank(d + self.shift), source.rank(*d));
            if m.shape() != want {
                return Err(PlError::Shape(format!("{name} block {d} is {:?}, expected {want:?}", m.shape())));
            }
        }
        Ok(())
    }

    /// `{"degree_shift": int, "blocks": {"d": [[int]]}}`.
    pub fn to_json(&self) -> Value {
        let blocks: serde_json::Map<String, Value> = self
            .blocks
            .iter()
            .map(|(d, m)| {
                let rows: Vec<Vec<Value>> = m.to_rows().into_iter().map(|r| r.into_iter().map(|x| int_json(&x)).collect()).collect();
                (d.to_string(), json!(rows))
            })
            .collect();
        json!({"degree_shift": self.shift, "blocks": blocks})
    }

    /// Parses the block format; an empty block `[]` takes its column count from `source`.
    pub fn from_json(v: &Value, source: &GradedGroup) -> Result<Self, PlError> {
        let shift = v.get("degree_shift").and_then(Value::as_i64).ok_or_else(|| PlError::Schema("missing degree_shift".into()))?;
        let blocks = v.get("blocks").and_then(Value::as_object).ok_or_else(|| PlError::Schema("missing blocks".into()))?;
        let mut out = BTreeMap::new();
        for (k, rows) in blocks {
            let d: i64 = k.parse().map_err(|_| PlError::Schema(format!("degree key {k:?} is not an integer")))?;
            let rows = rows.as_array().ok_or_else(|| PlError::Schema(format!("block {k} is not a list of rows")))?;
            let parsed: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|r| {
                    r.as_array()
                        .ok_or_else(|| PlError::Schema(format!("block {k} has a non-list row")))?
                        .iter()
                        .map(parse_int)
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<_, _>>()?;
            let cols = parsed.first().map_or(source.rank(d), Vec::len);
            let m = Matrix::try_from_rows(parsed, cols).ok_or_else(|| PlError::Schema(format!("block {k} is ragged")))?;
            out.insert(d, m);
        }
        Ok(Self { shift, blocks: out })
    }
}

fn int_json(x: &BigInt) -> Value {
    i64::try_from(x).map_or_else(|_| Value::String(x.to_string()), Value::from)
}

fn parse_int(v: &Value) -> Result<BigInt, PlError> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| PlError::Schema(format!("{n} is not an integer"))),
        Value::String(s) => s.parse().map_err(|_| PlError::Schema(format!("{s:?} is not an integer"))),
        other => Err(PlError::Schema(format!("{other} is not an integer"))),
    }
}

/// `[C] . : H(B) -> H(M)` and `[C^t] . : H(M) -> H(B)` with the codimension `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlantData {
    pub hm: GradedGroup,
    pub hb: GradedGroup,
    pub c_map: GradedMap,
    pub ct_map: GradedMap,
    pub c: u32,
}

impl SlantData {
    pub fn new(hm: GradedGroup, hb: GradedGroup, c_map: GradedMap, ct_map: GradedMap, c: u32) -> Result<Self, PlError> {
        let s = Self { hm, hb, c_map, ct_map, c };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), PlError> {
        if self.c == 0 {
            return Err(PlError::Schema("codimension must be at least 1".into()));
        }
        if self.c_map.shift + self.ct_map.shift != 0 {
            return Err(PlError::Shape(format!(
                "shifts {} + {} do not give a degree-preserving composite",
                self.c_map.shift, self.ct_map.shift
            )));
        }
        self.c_map.check(&self.hb, &self.hm, "[C]")?;
        self.ct_map.check(&self.hm, &self.hb, "[C^t]")
    }

    /// `[C] . [C^t]` on `H_d(M)`.
    pub fn composite(&self, d: i64) -> Matrix<BigInt> {
        let mid = d + self.ct_map.shift;
        self.c_map.block(mid, &self.hb, &self.hm).matmul(&self.ct_map.block(d, &self.hm, &self.hb))
    }

    /// `[C^t] . [C]` on `H_d(B)`.
    pub fn reverse_composite(&self, d: i64) -> Matrix<BigInt> {
        let mid = d + self.c_map.shift;
        self.ct_map.block(mid, &self.hm, &self.hb).matmul(&self.c_map.block(d, &self.hb, &self.hm))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "c": self.c,
            "hm": self.hm,
            "hb": self.hb,
            "c_map": self.c_map.to_json(),
            "ct_map": self.ct_map.to_json(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, PlError> {
        let field = |k: &str| v.get(k).ok_or_else(|| PlError::Schema(format!("missing field {k:?}")));
        let group = |k: &str| -> Result<GradedGroup, PlError> {
            let g: BTreeMap<String, usize> = serde_json::from_value(field(k)?.clone()).map_err(|e| PlError::Schema(format!("{k}: {e}")))?;
            let ranks = g
                .into_iter()
                .map(|(d, r)| d.parse::<i64>().map(|d| (d, r)).map_err(|_| PlError::Schema(format!("degree key {d:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(GradedGroup::new(ranks))
        };
        let hm = group("hm")?;
        let hb = group("hb")?;
        let c = field("c")?.as_u64().and_then(|c| u32::try_from(c).ok()).ok_or_else(|| PlError::Schema("c must be a positive integer".into()))?;
        let c_map = GradedMap::from_json(field("c_map")?, &hb)?;
        let ct_map = GradedMap::from_json(field("ct_map")?, &hm)?;
        Self::new(hm, hb, c_map, ct_map, c)
    }
}

/// `(-1)^{(c+1)(c+2)/2}`: period four in `c`, starting `-, +, +, -` at `c = 1`.
pub fn sign(c: u32) -> i32 {
    let e = (u64::from(c) + 1) * (u64::from(c) + 2) / 2;
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `Id + sign(c) [C] . [C^t]` on each `H_d(M)`.
pub fn monodromy_matrix(s: &SlantData) -> Result<GradedMap, PlError> {
    s.validate()?;
    let k = BigInt::from(sign(s.c));
    let blocks = s.hm.degrees().map(|d| (d, Matrix::identity(s.hm.rank(d)).add(&s.composite(d).scale(&k)))).collect();
    Ok(GradedMap { shift: 0, blocks })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Unipotency {
    pub is_unipotent: bool,
    /// Least `k` with `(T - Id)^k = 0`.
    pub nilpotency_index: Option<usize>,
    #[serde(serialize_with = "serialize_bigint")]
    pub determinant: BigInt,
}

fn serialize_bigint<S: serde::Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn unipotency_check(s: &SlantData) -> Result<Unipotency, PlError> {
    let t = monodromy_matrix(s)?;
    let mut det = BigInt::one();
    let mut index = 1;
    let mut nilpotent = true;
    for (d, m) in &t.blocks {
        det *= determinant(m);
        let n = m.sub(&Matrix::identity(s.hm.rank(*d)));
        // Nilpotent n x n matrices satisfy N^n = 0.
        let mut power = n.clone();
        let mut k = 1;
        while !power.is_zero() && k <= n.rows() {
            power = power.matmul(&n);
            k += 1;
        }
        if power.is_zero() {
            index = index.max(k);
        } else {
            nilpotent = false;
        }
    }
    Ok(Unipotency { is_unipotent: nilpotent, nilpotency_index: nilpotent.then_some(index), determinant: det })
}

/// Whether some ranks of `A_d -> B_d -> C_d -> A_{d+1}` make the long exact sequence exact.
///
/// With `x_d` the rank of `A_d -> B_d`, exactness forces `rank(B_d -> C_d) = B_d - x_d`,
/// `rank(C_d -> A_{d+1}) = C_d - B_d + x_d` and `x_{d+1} = A_{d+1} - C_d + B_d - x_d`, starting
/// from `x = 0` below the support. The ranks are therefore unique; the sequence is feasible iff
/// they are all non-negative and vanish above the support.
pub fn triangle_rank_consistency(a: &GradedGroup, b: &GradedGroup, c: &GradedGroup) -> bool {
    let degrees: Vec<i64> = a.degrees().chain(b.degrees()).chain(c.degrees()).collect();
    let (Some(&lo), Some(&hi)) = (degrees.iter().min(), degrees.iter().max()) else { return true };
    let r = |g: &GradedGroup, d: i64| g.rank(d) as i64;
    let mut x = r(a, lo);
    for d in lo..=hi + 1 {
        let g = r(b, d) - x;
        let h = r(c, d) - r(b, d) + x;
        if x < 0 || g < 0 || h < 0 {
            return false;
        }
        x = r(a, d + 1) - h;
    }
    x == 0
}

/// Dehn twist on the torus along a simple closed curve.
pub fn torus_fixture() -> SlantData {
    // M = T^2, B = point, C the curve of class (1, 0). [C^t] is the slant product
    // alpha -> alpha . [C], i.e. (a, b) -> -b, with the sign fixed by the twist oracle.
    let hm = GradedGroup::new([(0, 1), (1, 2), (2, 1)]);
    let hb = GradedGroup::new([(0, 1)]);
    let c_map = GradedMap { shift: 1, blocks: BTreeMap::from([(0, Matrix::from_rows(vec![vec![BigInt::one()], vec![BigInt::zero()]]))]) };
    let ct_map = GradedMap { shift: -1, blocks: BTreeMap::from([(1, Matrix::from_rows(vec![vec![BigInt::zero(), -BigInt::one()]]))]) };
    SlantData::new(hm, hb, c_map, ct_map, 1).expect("consistent fixture")
}

pub fn is_identity(m: &GradedMap) -> bool {
    m.blocks.values().all(|b| *b == Matrix::identity(b.rows()))
}

pub fn max_abs_entry(m: &GradedMap) -> BigInt {
    m.blocks.values().flat_map(|b| b.iter().map(|(_, _, x)| x.abs()).collect::<Vec<_>>()).max().unwrap_or_default()
}
