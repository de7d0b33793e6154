use std::collections::{BTreeMap, BTreeSet};

use super::model::{
    MeasuringOperation, Model, NatFn, Observable, Outcome, SemiAnswer, SemiDecidableSet, StateSpace,
};
use super::{Budget, ModelError};
use crate::encodings::Nat;

/// Extra enumeration factor granted to the witnessing side of a strength check.
pub const WITNESS_FACTOR: u64 = 4;

/// Values of `sym` on the first `budget.max_states` enumerated states.
pub fn enumerate_range(m: &Model, sym: &str, budget: &Budget) -> Result<BTreeSet<Nat>, ModelError> {
    Ok(range_witnesses(m, sym, budget)?.into_keys().collect())
}

/// Each range value at budget, paired with the first state producing it.
pub fn range_witnesses(
    m: &Model,
    sym: &str,
    budget: &Budget,
) -> Result<BTreeMap<Nat, Nat>, ModelError> {
    let obs = m.observable(sym)?;
    let mut out = BTreeMap::new();
    for s in m.states.scan(budget)?.states {
        let v = obs
            .map
            .call(&s, budget.max_steps)
            .map_err(|source| ModelError::Eval {
                symbol: sym.to_string(),
                state: s.clone(),
                source,
            })?;
        out.entry(v).or_insert(s);
    }
    Ok(out)
}

pub fn reduct(m: &Model, syms: &[&str]) -> Result<Model, ModelError> {
    if syms.is_empty() {
        return Err(ModelError::EmptyReduct);
    }
    for s in syms {
        m.observable(s)?;
    }
    let kept: Vec<Observable> = m
        .observables()
        .iter()
        .filter(|o| syms.contains(&o.symbol.as_str()))
        .cloned()
        .collect();
    let mut out = Model::new(&m.name, m.states.clone(), kept)?;
    out.ops = m
        .ops
        .iter()
        .filter(|(k, _)| syms.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    out.annotation = m.annotation.clone();
    Ok(out)
}

/// Submodel on the states whose `sym` value lies in `q`.
///
/// The wrapped measuring operation passes a result through only when `q`
/// accepts it within `budget`, and fails otherwise.
pub fn restrict(
    m: &Model,
    sym: &str,
    q: &SemiDecidableSet,
    budget: &Budget,
) -> Result<Model, ModelError> {
    let n = m.observables().len();
    if n != 1 {
        return Err(ModelError::MultiSymbolRestriction(n));
    }
    let obs = m.observable(sym)?.clone();
    let states = StateSpace::filter(&m.states, &obs.map, q);
    let range_decider = match (&obs.range_decider, q.decider()) {
        (Some(r), Some(d)) => Some(r.and(d)),
        (None, Some(d)) => Some(d.clone()),
        (r, None) => r.clone(),
    };
    let restricted = Observable {
        range_decider,
        ..obs
    };
    let mut out = Model::new(
        format!("{} | {sym} in {}", m.name, q.label()),
        states,
        vec![restricted],
    )?;
    if let Some(op) = m.op(sym) {
        let (op, q, budget) = (op.clone(), q.clone(), *budget);
        out.ops.insert(
            sym.to_string(),
            MeasuringOperation::new(
                format!("{} filtered by {}", op.description, q.label()),
                move |seed| match op.run(seed) {
                    Outcome::Result(r) if q.semidecide(&r, &budget) == SemiAnswer::Accept => {
                        Outcome::Result(r)
                    }
                    _ => Outcome::Failure,
                },
            ),
        );
    }
    out.annotation = m.annotation.clone();
    Ok(out)
}

/// Expansion by `newsym = h . base` with its natural two-step measuring operation.
pub fn derive(
    m: &Model,
    base: &str,
    h: &NatFn,
    newsym: &str,
    budget: &Budget,
) -> Result<Model, ModelError> {
    let b = m.observable(base)?;
    if m.observable(newsym).is_ok() {
        return Err(ModelError::SymbolCollision(newsym.to_string()));
    }
    let mut observables = m.observables().to_vec();
    observables.push(Observable::new(newsym, b.map.then(h)));
    let mut out = Model::new(&m.name, m.states.clone(), observables)?;
    out.ops = m.ops.clone();
    out.annotation = m.annotation.clone();
    if let Some(op) = m.op(base) {
        let (op, h, steps) = (op.clone(), h.clone(), budget.max_steps);
        out.ops.insert(
            newsym.to_string(),
            MeasuringOperation::new(
                format!("{} then {}", op.description, h.label()),
                move |seed| match op.run(seed) {
                    Outcome::Result(r) => h
                        .call(&r, steps)
                        .map(Outcome::Result)
                        .unwrap_or(Outcome::Failure),
                    Outcome::Failure => Outcome::Failure,
                },
            ),
        );
    }
    Ok(out)
}

/// Transport `m` along the state bijection `fwd` with inverse `bwd` onto `target`.
///
/// Both round trips and target membership are checked at `budget`.
pub fn isomorph(
    m: &Model,
    fwd: &NatFn,
    bwd: &NatFn,
    target: &StateSpace,
    budget: &Budget,
) -> Result<Model, ModelError> {
    let steps = budget.max_steps;
    let fail = |msg: String| ModelError::NotIsomorphic(msg);
    for s in m.states.scan(budget)?.states {
        let t = fwd
            .call(&s, steps)
            .map_err(|e| fail(format!("forward map at {s}: {e}")))?;
        if target.decides(&t, steps) == Some(false) {
            return Err(fail(format!("state {s} maps to {t}, outside the target")));
        }
        let back = bwd
            .call(&t, steps)
            .map_err(|e| fail(format!("backward map at {t}: {e}")))?;
        if back != s {
            return Err(fail(format!("state {s} maps to {t} and back to {back}")));
        }
    }
    for t in target.scan(budget)?.states {
        let s = bwd
            .call(&t, steps)
            .map_err(|e| fail(format!("backward map at {t}: {e}")))?;
        if m.states.decides(&s, steps) == Some(false) {
            return Err(fail(format!(
                "target state {t} maps to {s}, outside the source"
            )));
        }
        let again = fwd
            .call(&s, steps)
            .map_err(|e| fail(format!("forward map at {s}: {e}")))?;
        if again != t {
            return Err(fail(format!(
                "target state {t} maps to {s} and back to {again}"
            )));
        }
    }
    let observables = m
        .observables()
        .iter()
        .map(|o| Observable {
            symbol: o.symbol.clone(),
            map: bwd.then(&o.map),
            range_decider: o.range_decider.clone(),
        })
        .collect();
    let mut out = Model::new(&m.name, target.clone(), observables)?;
    out.ops = m.ops.clone();
    Ok(out)
}

/// Common expansion of models over one state space with disjoint symbols.
pub fn merge_expansions(parts: &[Model]) -> Result<Model, ModelError> {
    let first = parts.first().ok_or(ModelError::NoObservables)?;
    let mut observables = Vec::new();
    let mut ops = BTreeMap::new();
    for p in parts {
        if p.states.key() != first.states.key() {
            return Err(ModelError::StateSpaceMismatch(
                first.states.key().to_string(),
                p.states.key().to_string(),
            ));
        }
        observables.extend(p.observables().iter().cloned());
        ops.extend(p.ops.iter().map(|(k, v)| (k.clone(), v.clone())));
    }
    let name = if parts.len() == 1 {
        first.name.clone()
    } else {
        format!("merge of {} models", parts.len())
    };
    let mut out = Model::new(name, first.states.clone(), observables)?;
    out.ops = ops;
    out.annotation = first.annotation.clone();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strength {
    /// Every range value at budget was found in the other range.
    SubsetAtBudget,
    /// A value of one range that the other model's range decider rejects.
    Counterexample(Nat),
    /// A value not found within the extended budget and not refuted.
    Unknown(Nat),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolStrength {
    pub symbol: String,
    /// Whether ran_a is contained in ran_b.
    pub a_stronger: Strength,
    pub b_stronger: Strength,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrengthReport {
    pub symbols: Vec<SymbolStrength>,
}

impl StrengthReport {
    pub fn a_stronger(&self) -> bool {
        self.symbols
            .iter()
            .all(|s| s.a_stronger == Strength::SubsetAtBudget)
    }

    pub fn b_stronger(&self) -> bool {
        self.symbols
            .iter()
            .all(|s| s.b_stronger == Strength::SubsetAtBudget)
    }

    pub fn equivalent(&self) -> bool {
        self.a_stronger() && self.b_stronger()
    }

    pub fn counterexample(&self) -> bool {
        self.symbols.iter().any(|s| {
            matches!(s.a_stronger, Strength::Counterexample(_))
                || matches!(s.b_stronger, Strength::Counterexample(_))
        })
    }
}

fn contained(
    sub: &BTreeSet<Nat>,
    sup: &BTreeSet<Nat>,
    sup_obs: &Observable,
    steps: u64,
) -> Strength {
    let mut unknown = None;
    for n in sub {
        if sup.contains(n) {
            continue;
        }
        if let Some(d) = &sup_obs.range_decider {
            if d.test(n, steps) == Ok(false) {
                return Strength::Counterexample(n.clone());
            }
        }
        unknown.get_or_insert_with(|| n.clone());
    }
    unknown.map_or(Strength::SubsetAtBudget, Strength::Unknown)
}

pub fn compare_strength(
    a: &Model,
    b: &Model,
    budget: &Budget,
) -> Result<StrengthReport, ModelError> {
    let mut sa: Vec<String> = a.symbols().iter().map(|s| s.to_string()).collect();
    let mut sb: Vec<String> = b.symbols().iter().map(|s| s.to_string()).collect();
    sa.sort();
    sb.sort();
    if sa != sb {
        return Err(ModelError::SymbolMismatch(sa, sb));
    }
    let wide = budget.scale_states(WITNESS_FACTOR);
    let mut symbols = Vec::new();
    for sym in &sa {
        let ra = enumerate_range(a, sym, budget)?;
        let rb = enumerate_range(b, sym, budget)?;
        let ra_wide = enumerate_range(a, sym, &wide)?;
        let rb_wide = enumerate_range(b, sym, &wide)?;
        symbols.push(SymbolStrength {
            symbol: sym.clone(),
            a_stronger: contained(&ra, &rb_wide, b.observable(sym)?, budget.max_steps),
            b_stronger: contained(&rb, &ra_wide, a.observable(sym)?, budget.max_steps),
        });
    }
    Ok(StrengthReport { symbols })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encodings::pair_u64;
    use crate::model_core::{baryon, cannon, NatPred};

    fn n(x: u64) -> Nat {
        Nat::from(x)
    }

    fn set(xs: &[u64]) -> BTreeSet<Nat> {
        xs.iter().map(|&x| n(x)).collect()
    }

    #[test]
    fn ranges() {
        assert_eq!(
            enumerate_range(&baryon(), "f", &Budget::states(5)).unwrap(),
            set(&[2, 4, 6, 8, 10])
        );
        let c = enumerate_range(&cannon(), "f", &Budget::states(3)).unwrap();
        let want: BTreeSet<Nat> = [pair_u64(0, 0), pair_u64(1, 5), pair_u64(2, 10)]
            .into_iter()
            .collect();
        assert_eq!(c, want);
        assert!(enumerate_range(&baryon(), "f", &Budget::states(0))
            .unwrap()
            .is_empty());
        assert!(matches!(
            enumerate_range(&baryon(), "g", &Budget::states(1)),
            Err(ModelError::UnknownSymbol(_))
        ));
    }

    #[test]
    fn restriction_examples() {
        let b = Budget::states(6);
        let q = SemiDecidableSet::Decidable(NatPred::parse("n", "n > 2").unwrap());
        let c = restrict(&baryon(), "f", &q, &b).unwrap();
        assert_eq!(
            enumerate_range(&c, "f", &b).unwrap(),
            set(&[4, 6, 8, 10, 12])
        );

        let q = SemiDecidableSet::Decidable(NatPred::parse("n", "K(n) = 2").unwrap());
        let r = restrict(&cannon(), "f", &q, &Budget::states(30)).unwrap();
        assert_eq!(
            r.states.scan(&Budget::states(30)).unwrap().states,
            vec![n(2)]
        );
        assert_eq!(
            enumerate_range(&r, "f", &Budget::states(30)).unwrap(),
            [pair_u64(2, 10)].into_iter().collect()
        );
    }

    #[test]
    fn restriction_refuses_multi_symbol_models() {
        let m = derive(&baryon(), "f", &NatFn::identity(), "g", &Budget::default()).unwrap();
        let q = SemiDecidableSet::Decidable(NatPred::parse("n", "true").unwrap());
        assert_eq!(
            restrict(&m, "f", &q, &Budget::default()).unwrap_err(),
            ModelError::MultiSymbolRestriction(2)
        );
    }

    #[test]
    fn derive_examples() {
        let b = Budget::states(5);
        let h = NatFn::parse("n", "n / 2 - 1").unwrap();
        let m = derive(&baryon(), "f", &h, "g", &b).unwrap();
        assert_eq!(enumerate_range(&m, "g", &b).unwrap(), set(&[0, 1, 2, 3, 4]));
        assert!(matches!(
            derive(&m, "f", &h, "g", &b),
            Err(ModelError::SymbolCollision(_))
        ));
    }

    #[test]
    fn reduct_and_merge() {
        let b = Budget::states(8);
        let m = derive(
            &baryon(),
            "f",
            &NatFn::parse("n", "n * n").unwrap(),
            "g",
            &b,
        )
        .unwrap();
        let r = reduct(&m, &["g"]).unwrap();
        assert_eq!(r.symbols(), vec!["g"]);
        assert_eq!(
            enumerate_range(&r, "g", &b).unwrap(),
            enumerate_range(&m, "g", &b).unwrap()
        );
        assert_eq!(reduct(&m, &[]).unwrap_err(), ModelError::EmptyReduct);
        assert!(reduct(&m, &["h"]).is_err());

        let f = reduct(&m, &["f"]).unwrap();
        let merged = merge_expansions(&[f, r]).unwrap();
        assert_eq!(merged.symbols(), vec!["f", "g"]);
        let other = Model::new(
            "o",
            StateSpace::parse_where("s > 0").unwrap(),
            vec![Observable::new("h", NatFn::identity())],
        )
        .unwrap();
        assert!(matches!(
            merge_expansions(&[m.clone(), other]),
            Err(ModelError::StateSpaceMismatch(..))
        ));
        assert!(matches!(
            merge_expansions(&[m.clone(), m]),
            Err(ModelError::SymbolCollision(_))
        ));
    }

    #[test]
    fn isomorph_checks_round_trips() {
        let b = Budget::states(10);
        let m = Model::new(
            "m",
            StateSpace::parse_where("s = 3").unwrap(),
            vec![Observable::new("f", NatFn::identity())],
        )
        .unwrap();
        let fwd = NatFn::parse("s", "s - 3").unwrap();
        let bwd = NatFn::parse("t", "t + 3").unwrap();
        let target = StateSpace::parse_where("s = 0").unwrap();
        let e = isomorph(&m, &fwd, &bwd, &target, &b).unwrap();
        assert_eq!(enumerate_range(&e, "f", &b).unwrap(), set(&[3]));
        let bad = NatFn::parse("t", "t + 4").unwrap();
        assert!(matches!(
            isomorph(&m, &fwd, &bad, &target, &b),
            Err(ModelError::NotIsomorphic(_))
        ));
    }

    #[test]
    fn strength() {
        let b = Budget::states(20);
        let base = baryon();
        let sub = Model::new(
            "sub",
            StateSpace::parse_where("s > 0").unwrap(),
            vec![Observable::new("f", NatFn::parse("s", "2*s + 2").unwrap())
                .with_range(NatPred::parse("n", "n % 2 = 0 and n >= 4").unwrap())],
        )
        .unwrap();
        let r = compare_strength(&sub, &base, &b).unwrap();
        assert!(r.a_stronger());
        assert!(!r.b_stronger());
        assert_eq!(r.symbols[0].b_stronger, Strength::Counterexample(n(2)));
        assert!(compare_strength(&base, &base, &b).unwrap().equivalent());
        assert!(compare_strength(&base, &base, &Budget::states(0))
            .unwrap()
            .equivalent());
    }
}
