use std::collections::BTreeMap;

use num_traits::{One, ToPrimitive};

use super::faithful::witness_in;
use super::model::{Annotation, Model, NatFn, NatPred, SemiDecidableSet, StateSpace};
use super::ops::{derive, isomorph, merge_expansions, range_witnesses, reduct, restrict};
use super::{simulate, Budget, ModelError};
use crate::encodings::{first, unpair, Nat, Rational};

pub const BARYON_SPEC: &str = include_str!("../../specs/baryon.spec");
pub const CANNON_SPEC: &str = include_str!("../../specs/cannon.spec");
pub const DECAY_SPEC: &str = include_str!("../../specs/decay.spec");

pub fn baryon() -> Model {
    Model::parse(BARYON_SPEC).expect("bundled baryon spec")
}

pub fn cannon() -> Model {
    Model::parse(CANNON_SPEC).expect("bundled cannon spec")
}

/// Decay counts `J(m, n)` with branching ratio `b`, annotated by `q = B_{m,b}(n)`.
pub fn decay_model(b: &Rational) -> Result<Model, ModelError> {
    let mut m = Model::parse(DECAY_SPEC)?;
    m.ops.insert("f".into(), simulate::decay(b, 20)?);
    let b = b.clone();
    m.annotation = Some(Annotation::new("q", move |s| {
        let (i, j) = unpair(s);
        crate::stats::binom_pmf(i.to_u64()?, &b, j.to_u64()?).ok()
    }));
    Ok(m)
}

/// Cannon restricted to the measurements taken at time `u`.
pub fn chain_b(u: u64, budget: &Budget) -> Result<Model, ModelError> {
    let q = SemiDecidableSet::Decidable(NatPred::parse("n", &format!("K(n) = {u}"))?);
    restrict(&cannon(), "f", &q, budget)
}

pub fn chain_c(u: u64, budget: &Budget) -> Result<Model, ModelError> {
    derive(
        &chain_b(u, budget)?,
        "f",
        &NatFn::parse("n", "L(n)")?,
        &format!("g_{u}"),
        budget,
    )
}

pub fn chain_d(u: u64, budget: &Budget) -> Result<Model, ModelError> {
    reduct(&chain_c(u, budget)?, &[&format!("g_{u}")])
}

/// The time-`u` model moved onto the single state 0.
pub fn chain_e(u: u64, budget: &Budget) -> Result<Model, ModelError> {
    let fwd = NatFn::parse("s", &format!("s - {u}"))?;
    let bwd = NatFn::parse("t", &format!("t + {u}"))?;
    isomorph(
        &chain_d(u, budget)?,
        &fwd,
        &bwd,
        &StateSpace::parse_where("s = 0")?,
        budget,
    )
}

pub fn chain_f(us: &[u64], budget: &Budget) -> Result<Model, ModelError> {
    let parts = us
        .iter()
        .map(|&u| chain_e(u, budget))
        .collect::<Result<Vec<_>, _>>()?;
    merge_expansions(&parts)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StageTally {
    pub stage: &'static str,
    /// Non-failure results produced at this stage.
    pub produced: u64,
    pub witnessed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain7Report {
    /// `(u, g_u(0))` read off the merged model.
    pub values: Vec<(u64, Nat)>,
    pub stages: Vec<StageTally>,
    /// Cannon measurements at a time outside the requested `u` values.
    pub outside: u64,
}

impl Chain7Report {
    pub fn ok(&self) -> bool {
        self.values.iter().all(|(u, v)| *v == Nat::from(5 * u))
            && self.stages.iter().all(|s| s.produced == s.witnessed)
    }
}

const STAGES: [&str; 6] = [
    "cannon",
    "restriction",
    "derivation",
    "reduct",
    "isomorph",
    "merge",
];

/// Build the chain for each `u` and push `seeds` cannon measurements through it.
pub fn chain7(us: &[u64], seeds: u64, budget: &Budget) -> Result<Chain7Report, ModelError> {
    let base = cannon();
    let op = base.op("f").expect("cannon carries its operation").clone();
    let mut per_u = BTreeMap::new();
    for &u in us {
        let g = format!("g_{u}");
        let b = chain_b(u, budget)?;
        let c = chain_c(u, budget)?;
        let d = chain_d(u, budget)?;
        let e = chain_e(u, budget)?;
        per_u.insert(u, (g, [b, c, d, e]));
    }
    let f = chain_f(us, budget)?;
    let zero = Nat::from(0u8);
    let mut values = Vec::new();
    for &u in us {
        let g = f.observable(&format!("g_{u}"))?;
        let v = g
            .map
            .call(&zero, budget.max_steps)
            .map_err(|source| ModelError::Eval {
                symbol: g.symbol.clone(),
                state: zero.clone(),
                source,
            })?;
        values.push((u, v));
    }

    let mut stages: Vec<StageTally> = STAGES
        .iter()
        .map(|&stage| StageTally {
            stage,
            ..Default::default()
        })
        .collect();
    let mut cache: BTreeMap<(usize, String), BTreeMap<Nat, Nat>> = BTreeMap::new();
    let mut witnessed = |stage: usize, m: &Model, sym: &str, r: &Nat| -> Result<bool, ModelError> {
        let key = (stage, format!("{}/{sym}", m.name));
        if !cache.contains_key(&key) {
            cache.insert(key.clone(), range_witnesses(m, sym, budget)?);
        }
        Ok(cache[&key].contains_key(r))
    };
    let mut outside = 0;
    for seed in 0..seeds {
        let Some(r) = op.run(seed).result().cloned() else {
            continue;
        };
        stages[0].produced += 1;
        stages[0].witnessed += witnessed(0, &base, "f", &r)? as u64;
        let Some((g, models)) = first(&r).to_u64().and_then(|u| per_u.get(&u)) else {
            outside += 1;
            continue;
        };
        let syms = ["f", g.as_str(), g.as_str(), g.as_str()];
        for (k, m) in models.iter().enumerate() {
            if let Some(x) = m.op(syms[k]).and_then(|o| o.run(seed).result().cloned()) {
                stages[k + 1].produced += 1;
                stages[k + 1].witnessed += witnessed(k + 1, m, syms[k], &x)? as u64;
            }
        }
        if let Some(x) = f.op(g).and_then(|o| o.run(seed).result().cloned()) {
            stages[5].produced += 1;
            stages[5].witnessed += witness_in(&f, g, &x, budget)?.is_some() as u64;
        }
    }
    Ok(Chain7Report {
        values,
        stages,
        outside,
    })
}

fn param<'a>(params: &'a [(String, Rational)], key: &str) -> Option<&'a Rational> {
    params.iter().find(|(k, _)| k == key).map(|(_, v)| v)
}

fn nat_param(params: &[(String, Rational)], key: &str, default: u64) -> Result<u64, ModelError> {
    match param(params, key) {
        None => Ok(default),
        Some(v) if v.is_integer() => v.to_integer().to_u64().ok_or_else(|| {
            ModelError::BadParam(format!("`{key}` must be a nonnegative integer, got {v}"))
        }),
        Some(v) => Err(ModelError::BadParam(format!(
            "`{key}` must be a nonnegative integer, got {v}"
        ))),
    }
}

/// Named models; chain stages take `u` (default 0), `chain_F` takes `count` (default 20), `decay` takes `b`.
pub fn builtin(
    name: &str,
    params: &[(String, Rational)],
    budget: &Budget,
) -> Result<Model, ModelError> {
    let u = || nat_param(params, "u", 0);
    match name {
        "baryon" => Ok(baryon()),
        "cannon" => Ok(cannon()),
        "chain_Bu" => chain_b(u()?, budget),
        "chain_Cu" => chain_c(u()?, budget),
        "chain_Du" => chain_d(u()?, budget),
        "chain_Eu" => chain_e(u()?, budget),
        "chain_F" => {
            let n = nat_param(params, "count", 20)?;
            chain_f(&(0..n).collect::<Vec<_>>(), budget)
        }
        "decay" => {
            let half = Rational::one() / Rational::from_integer(2.into());
            decay_model(param(params, "b").unwrap_or(&half))
        }
        other => Err(ModelError::UnknownBuiltin(other.to_string())),
    }
}
