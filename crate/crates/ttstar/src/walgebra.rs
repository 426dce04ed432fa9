//! Minimal-model data attached to rational asymptotic exponents.
//!
//! When the exponents `m_j` are rational, the solution corresponds to a
//! minimal model of a higher-rank symmetry algebra.  All quantities here
//! are derived by exact rational arithmetic:
//!
//! * `Q` — the smallest integer `>= 2` with every `Q m_j / 2` integral
//!   (callers may override it with any larger admissible value),
//! * `N = (n+1)(Q-1)` — the total level,
//! * `P_j = Q m_j / 2` — integer charges,
//! * `b_j = (Q/2)(m_{j-1} - m_j + 2) - 1` — weight components, which are
//!   automatically the non-negative integers `P_{j-1} - P_j + Q - 1`
//!   whenever the ordering constraint holds strictly,
//! * the weight label `(m_n - m_0, m_0 - m_1, ..., m_{n-1} - m_n)`,
//! * `c_eff = n - 3 Q sum_j m_j^2` — the effective central charge.
//!
//! The closed-form cross-check
//! `(N + n + 1) / (4(n+1)) * sum m_j^2 = (n - c_eff) / 12`
//! ties the level to the central charge and is verified exactly by
//! [`ceff_consistency`].

use std::str::FromStr;

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asymmetry::antisymmetry_partner;

#[derive(Debug, Error)]
pub enum WalgebraError {
    #[error("invalid rational asymptotic data: {0}")]
    InvalidData(String),
    #[error("inadmissible level denominator {q}: {reason}")]
    InvalidOverride { q: u64, reason: String },
    #[error("integer overflow: {0}")]
    Overflow(String),
}

/// Exact counterpart of the floating-point asymptotic data: the rational
/// exponents must satisfy the anti-symmetry and the *strict* ordering
/// constraint `m_{j-1} - m_j + 2 > 0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RationalDataDto", into = "RationalDataDto")]
pub struct RationalAsymptoticData {
    pub n: usize,
    pub l: usize,
    pub m: Vec<BigRational>,
}

impl RationalAsymptoticData {
    pub fn new(n: usize, l: usize, m: Vec<BigRational>) -> Result<Self, WalgebraError> {
        let dim = n + 1;
        if n == 0 {
            return Err(WalgebraError::InvalidData("rank must be at least 1".into()));
        }
        if l > 1 {
            return Err(WalgebraError::InvalidData(format!(
                "index l = {l} is not normalized (expected 0 or 1)"
            )));
        }
        if m.len() != dim {
            return Err(WalgebraError::InvalidData(format!(
                "expected {dim} exponents, got {}",
                m.len()
            )));
        }
        for j in 0..dim {
            let p = antisymmetry_partner(n, l, j);
            if !(&m[j] + &m[p]).is_zero() {
                return Err(WalgebraError::InvalidData(format!(
                    "anti-symmetry violated exactly: m[{j}] + m[{p}] = {}",
                    &m[j] + &m[p]
                )));
            }
        }
        let two = BigRational::from_integer(BigInt::from(2));
        for j in 0..dim {
            let gap = &m[(j + dim - 1) % dim] - &m[j] + &two;
            if !gap.is_positive() {
                return Err(WalgebraError::InvalidData(format!(
                    "strict ordering violated at j = {j}: m[j-1] - m[j] + 2 = {gap}"
                )));
            }
        }
        Ok(RationalAsymptoticData { n, l, m })
    }
}

#[derive(Serialize, Deserialize)]
struct RationalDataDto {
    n: usize,
    l: usize,
    m: Vec<String>,
}

impl TryFrom<RationalDataDto> for RationalAsymptoticData {
    type Error = String;

    fn try_from(dto: RationalDataDto) -> Result<Self, String> {
        let m = dto
            .m
            .iter()
            .map(|s| BigRational::from_str(s).map_err(|e| format!("bad rational {s:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        RationalAsymptoticData::new(dto.n, dto.l, m).map_err(|e| e.to_string())
    }
}

impl From<RationalAsymptoticData> for RationalDataDto {
    fn from(data: RationalAsymptoticData) -> RationalDataDto {
        RationalDataDto {
            n: data.n,
            l: data.l,
            m: data.m.iter().map(|q| q.to_string()).collect(),
        }
    }
}

/// Exact minimal-model data; rationals serialize as `"p/q"` strings
/// (plain `"p"` when integral).
#[derive(Clone, Debug, Serialize)]
#[serde(into = "MinimalModelDto")]
pub struct MinimalModelData {
    pub n: usize,
    pub q: u64,
    /// Total level `N = (n+1)(q-1)`.
    pub big_n: u64,
    /// Integer charges `P_j = q m_j / 2`.
    pub p: Vec<BigInt>,
    /// Weight components `b_j = (q/2)(m_{j-1} - m_j + 2) - 1`.
    pub b: Vec<BigRational>,
    /// Cyclic differences `(m_n - m_0, m_0 - m_1, ..., m_{n-1} - m_n)`.
    pub weight_label: Vec<BigRational>,
    pub c_eff: BigRational,
}

#[derive(Serialize)]
struct MinimalModelDto {
    n: usize,
    #[serde(rename = "Q")]
    q: u64,
    #[serde(rename = "N")]
    big_n: u64,
    #[serde(rename = "P")]
    p: Vec<i64>,
    b: Vec<String>,
    b_integral: bool,
    weight_label: Vec<String>,
    c_eff: String,
}

impl From<MinimalModelData> for MinimalModelDto {
    fn from(d: MinimalModelData) -> MinimalModelDto {
        MinimalModelDto {
            n: d.n,
            q: d.q,
            big_n: d.big_n,
            p: d
                .p
                .iter()
                .map(|x| x.to_i64().expect("charge range checked at construction"))
                .collect(),
            b_integral: d.b.iter().all(|x| x.is_integer()),
            b: d.b.iter().map(|x| x.to_string()).collect(),
            weight_label: d.weight_label.iter().map(|x| x.to_string()).collect(),
            c_eff: d.c_eff.to_string(),
        }
    }
}

/// Computes the minimal-model data for raw rational exponents.
///
/// Works on any cyclic tuple (no anti-symmetry assumed) so that the
/// rotation covariance of every field can be tested directly.  Validation
/// of anti-symmetry and strict ordering lives in
/// [`RationalAsymptoticData::new`]; use [`minimal_model_for`] to go
/// through it.
pub fn minimal_model_data(
    m: &[BigRational],
    q_override: Option<u64>,
) -> Result<MinimalModelData, WalgebraError> {
    if m.len() < 2 {
        return Err(WalgebraError::InvalidData(
            "need at least two exponents".into(),
        ));
    }
    let n = m.len() - 1;
    let two = BigRational::from_integer(BigInt::from(2));

    let halves: Vec<BigRational> = m.iter().map(|mj| mj / &two).collect();
    let mut q_min = BigInt::one();
    for h in &halves {
        q_min = q_min.lcm(h.denom());
    }
    if q_min < BigInt::from(2) {
        q_min = BigInt::from(2);
    }

    let q_big = match q_override {
        None => q_min.clone(),
        Some(q) => {
            let q_big = BigInt::from(q);
            if q < 2 {
                return Err(WalgebraError::InvalidOverride {
                    q,
                    reason: "must be an integer >= 2".into(),
                });
            }
            for (j, h) in halves.iter().enumerate() {
                if !(h * BigRational::from_integer(q_big.clone())).is_integer() {
                    return Err(WalgebraError::InvalidOverride {
                        q,
                        reason: format!("{q} m[{j}]/2 = {} is not an integer", h * BigRational::from_integer(q_big.clone())),
                    });
                }
            }
            q_big
        }
    };
    let q: u64 = q_big
        .clone()
        .try_into()
        .map_err(|_| WalgebraError::Overflow("level denominator exceeds u64".into()))?;
    let big_n = (n as u64 + 1)
        .checked_mul(q - 1)
        .ok_or_else(|| WalgebraError::Overflow("total level exceeds u64".into()))?;

    let q_rational = BigRational::from_integer(q_big.clone());
    let p: Vec<BigInt> = halves
        .iter()
        .map(|h| (h * &q_rational).to_integer())
        .collect();
    // the charges serialize as plain JSON integers
    if p.iter().any(|x| x.to_i64().is_none()) {
        return Err(WalgebraError::Overflow("charge exceeds i64".into()));
    }

    let dim = n + 1;
    let mut b = Vec::with_capacity(dim);
    let mut weight_label = Vec::with_capacity(dim);
    for j in 0..dim {
        let prev = &m[(j + dim - 1) % dim];
        let gap = prev - &m[j] + &two;
        b.push(&q_rational / &two * gap - BigRational::one());
        weight_label.push(prev - &m[j]);
    }

    let sum_squares: BigRational = m.iter().map(|mj| mj * mj).sum();
    let c_eff = BigRational::from_integer(BigInt::from(n as i64))
        - BigRational::from_integer(BigInt::from(3)) * &q_rational * &sum_squares;

    Ok(MinimalModelData {
        n,
        q,
        big_n,
        p,
        b,
        weight_label,
        c_eff,
    })
}

/// Minimal-model data for validated anti-symmetric exponents.
pub fn minimal_model_for(
    data: &RationalAsymptoticData,
    q_override: Option<u64>,
) -> Result<MinimalModelData, WalgebraError> {
    minimal_model_data(&data.m, q_override)
}

/// Verifies the exact level / central-charge identity
/// `(N + n + 1) / (4(n+1)) * sum m_j^2 = (n - c_eff) / 12`,
/// with the left side built from the total level and the right side from
/// the central charge.
pub fn ceff_consistency(m: &[BigRational], data: &MinimalModelData) -> bool {
    let n = data.n;
    let sum_squares: BigRational = m.iter().map(|mj| mj * mj).sum();
    let lhs = BigRational::new(
        BigInt::from(data.big_n + n as u64 + 1),
        BigInt::from(4 * (n as u64 + 1)),
    ) * &sum_squares;
    let rhs = (BigRational::from_integer(BigInt::from(n as i64)) - &data.c_eff)
        / BigRational::from_integer(BigInt::from(12));
    lhs == rhs
}
