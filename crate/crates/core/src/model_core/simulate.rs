//! Seeded simulated universes standing in for physical measuring operations.

use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::log::ObservationLog;
use super::model::{MeasuringOperation, Outcome};
use super::ModelError;
use crate::encodings::{pair, pair_u64, Nat, Rational};
use crate::spec_lang::SimOpSpec;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn always_fail() -> MeasuringOperation {
    MeasuringOperation::new("always fails", |_| Outcome::Failure)
}

/// Counts `2k + 2` for a uniform `k <= max`.
pub fn baryon(max: u64) -> MeasuringOperation {
    MeasuringOperation::new(format!("baryon count, k <= {max}"), move |seed| {
        let k = rng(seed).gen_range(0..=max);
        Outcome::Result(Nat::from(k) * 2u32 + 2u32)
    })
}

/// Fire at a uniform time `t <= max_time` and read off `J(t, d)`.
///
/// The distance is the exact `speed * (t + ds) + dm`, rounded to the nearest
/// integer, with time jitter `ds` and reading error `dm` in thousandths kept
/// small enough that `speed*|ds| + |dm| < 1/2`.
pub fn cannon(speed: u64, max_time: u64) -> MeasuringOperation {
    // |a| <= a_max and |c| <= 499 - speed*|a|
    let a_max = 49.min((499 / speed.max(1)).saturating_sub(1)) as i64;
    MeasuringOperation::new(
        format!("cannon, speed {speed}, t <= {max_time}"),
        move |seed| {
            let mut r = rng(seed);
            let t = r.gen_range(0..=max_time);
            let a = if t == 0 {
                r.gen_range(0..=a_max)
            } else {
                r.gen_range(-a_max..=a_max)
            };
            let c_max = 499 - speed as i64 * a.abs();
            let c = r.gen_range(-c_max..=c_max);
            let exact = Rational::from_integer((speed * t).into())
                + Rational::new((speed as i64 * a + c).into(), 1000.into());
            let d = (exact + Rational::new(1.into(), 2.into()))
                .floor()
                .to_integer();
            let d = d.to_biguint().unwrap_or_default();
            Outcome::Result(pair(&Nat::from(t), &d))
        },
    )
}

/// `J(m, n)` with `m <= max_total` uniform and `n` binomial in `m` trials with success `b`.
pub fn decay(b: &Rational, max_total: u64) -> Result<MeasuringOperation, ModelError> {
    let bad = || {
        ModelError::BadParam(format!(
            "b = {b} must be a rational in [0, 1] with 64-bit parts"
        ))
    };
    if b < &Rational::zero() || b > &Rational::one() {
        return Err(bad());
    }
    let num = b.numer().to_u64().ok_or_else(bad)?;
    let den = b.denom().to_u64().ok_or_else(bad)?;
    Ok(MeasuringOperation::new(
        format!("decay counts, b = {b}, m <= {max_total}"),
        move |seed| {
            let mut r = rng(seed);
            let m = r.gen_range(0..=max_total);
            let n = (0..m).filter(|_| r.gen_range(0..den) < num).count() as u64;
            Outcome::Result(pair_u64(m, n))
        },
    ))
}

pub fn uniform(lo: u64, hi: u64) -> MeasuringOperation {
    MeasuringOperation::new(format!("uniform in [{lo}, {hi}]"), move |seed| {
        Outcome::Result(Nat::from(rng(seed).gen_range(lo..=hi)))
    })
}

fn nat_param(spec: &SimOpSpec, key: &str) -> Result<u64, ModelError> {
    let v = spec
        .param(key)
        .ok_or_else(|| ModelError::BadParam(format!("{} needs `{key}`", spec.name)))?;
    if !v.is_integer() || v < &Rational::zero() {
        return Err(ModelError::BadParam(format!(
            "`{key}` must be a nonnegative integer, got {v}"
        )));
    }
    v.to_integer()
        .to_u64()
        .ok_or_else(|| ModelError::BadParam(format!("`{key}` = {v} is too large")))
}

pub fn from_spec(spec: &SimOpSpec) -> Result<MeasuringOperation, ModelError> {
    match spec.name.as_str() {
        "fail" => Ok(always_fail()),
        "baryon" => Ok(baryon(nat_param(spec, "max")?)),
        "cannon" => Ok(cannon(
            nat_param(spec, "speed")?,
            nat_param(spec, "max_time")?,
        )),
        "decay" => {
            let b = spec
                .param("b")
                .ok_or_else(|| ModelError::BadParam("decay needs `b`".into()))?;
            decay(b, nat_param(spec, "max_total")?)
        }
        "uniform" => {
            let (lo, hi) = (nat_param(spec, "lo")?, nat_param(spec, "hi")?);
            if lo > hi {
                return Err(ModelError::BadParam(format!(
                    "uniform needs lo <= hi, got {lo} > {hi}"
                )));
            }
            Ok(uniform(lo, hi))
        }
        other => Err(ModelError::UnknownSimOp(other.to_string())),
    }
}

/// Run `op` once per seed and log the results that are not failures.
pub fn record_log(
    op: &MeasuringOperation,
    symbol: &str,
    seeds: std::ops::Range<u64>,
) -> ObservationLog {
    ObservationLog::of(symbol, seeds.filter_map(|s| op.run(s).result().cloned()))
}
