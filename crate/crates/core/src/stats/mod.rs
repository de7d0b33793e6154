//! Exact binomial tail probabilities, their piecewise polynomial form, and the
//! interval estimator for a branching ratio.

mod decay;
mod estimator;
mod piecewise;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::encodings::{unpair, Nat, Rational};
use crate::exact_arith::ArithError;
use crate::model_core::{ModelError, ObservationLog};

pub use decay::{decay_restriction, sweep_index, sweep_state};
pub use estimator::{
    decode_descriptor, decode_estimate, encode_descriptor, interval_estimate, DESCRIPTOR_VERSION,
};
pub use piecewise::{bounds, build_piecewise, piecewise_tail, Piece, PiecewisePoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("need n <= m, got n = {n}, m = {m}")]
    NOutOfRange { m: u64, n: u64 },
    #[error("branching ratio {0} is outside [0, 1]")]
    BOutOfRange(Rational),
    #[error("significance level {0} is outside (0, 1)")]
    AlphaOutOfRange(Rational),
    #[error("the piecewise form needs at least one trial")]
    ZeroTrials,
    #[error("log result {0} does not decode to J(m, n) with n <= m")]
    Malformed(Nat),
    #[error("estimator descriptor {0} is malformed: {1}")]
    BadDescriptor(Nat, String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub(crate) fn check_b(b: &Rational) -> Result<(), StatsError> {
    if b.is_negative() || b > &Rational::one() {
        return Err(StatsError::BOutOfRange(b.clone()));
    }
    Ok(())
}

pub(crate) fn check_alpha(alpha: &Rational) -> Result<(), StatsError> {
    if !alpha.is_positive() || alpha >= &Rational::one() {
        return Err(StatsError::AlphaOutOfRange(alpha.clone()));
    }
    Ok(())
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

fn rpow(x: &Rational, e: u64) -> Rational {
    // 0^0 = 1
    (0..e).fold(Rational::one(), |acc, _| acc * x)
}

/// `C(i, j) b^j (1-b)^(i-j)`.
pub fn binom_pmf(i: u64, b: &Rational, j: u64) -> Result<Rational, StatsError> {
    if j > i {
        return Err(StatsError::NOutOfRange { m: i, n: j });
    }
    check_b(b)?;
    Ok(Rational::from_integer(binomial(i, j)) * rpow(b, j) * rpow(&(Rational::one() - b), i - j))
}

/// Outcomes `k` at least as far from the mean `m b` as `n` is.
pub(crate) fn tail_set(m: u64, n: u64, b: &Rational) -> Vec<u64> {
    let mean = Rational::from_integer(m.into()) * b;
    let d = (Rational::from_integer(n.into()) - &mean).abs();
    (0..=m)
        .filter(|&k| (Rational::from_integer(k.into()) - &mean).abs() >= d)
        .collect()
}

/// Two-tailed tail probability `P(m, n, b)`.
pub fn tail_prob(m: u64, n: u64, b: &Rational) -> Result<Rational, StatsError> {
    if n > m {
        return Err(StatsError::NOutOfRange { m, n });
    }
    check_b(b)?;
    let mut p = Rational::zero();
    for k in tail_set(m, n, b) {
        p += binom_pmf(m, b, k)?;
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub p: Rational,
    pub reject: bool,
    /// `P` equals `alpha` exactly, where the strict test keeps the model.
    pub at_threshold: bool,
}

pub fn decide(m: u64, n: u64, b: &Rational, alpha: &Rational) -> Result<Decision, StatsError> {
    check_alpha(alpha)?;
    let p = tail_prob(m, n, b)?;
    Ok(Decision {
        reject: &p < alpha,
        at_threshold: &p == alpha,
        p,
    })
}

/// Reject iff `P(m, n, b) < alpha`.
pub fn reject(m: u64, n: u64, b: &Rational, alpha: &Rational) -> Result<bool, StatsError> {
    Ok(decide(m, n, b, alpha)?.reject)
}

pub fn decode_counts(code: &Nat) -> Result<(u64, u64), StatsError> {
    let (m, n) = unpair(code);
    match (m.to_u64(), n.to_u64()) {
        (Some(m), Some(n)) if n <= m => Ok((m, n)),
        _ => Err(StatsError::Malformed(code.clone())),
    }
}

/// Least tail probability over the logged counts; `None` for an empty log.
pub fn max_alpha(log: &ObservationLog, b: &Rational) -> Result<Option<Rational>, StatsError> {
    check_b(b)?;
    let mut best: Option<Rational> = None;
    for r in &log.records {
        let (m, n) = decode_counts(&r.result)?;
        let p = tail_prob(m, n, b)?;
        if best.as_ref().map_or(true, |x| &p < x) {
            best = Some(p);
        }
    }
    Ok(best)
}
