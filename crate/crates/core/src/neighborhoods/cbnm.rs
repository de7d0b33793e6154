use std::collections::BTreeSet;
use std::sync::{Arc, LazyLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::graph::{enumerate_graph_range, GraphRangeRequest};
use super::oracle::OracleMachine;
use super::NeighborhoodError;
use crate::encodings::{pair, unpair, Nat, Rational};
use crate::model_core::{Budget, Model, NatFn, NatPred, Observable, StateSpace, Visit};
use crate::spec_lang::{parse_real_fn, RealExpr, RealFn};

/// `N_A * k_B` in J/K/mol, exact: `602214076e15 * 1380649e-29`.
pub static GAS_CONSTANT: LazyLock<Rational> = LazyLock::new(|| {
    Rational::new(
        BigInt::from(602_214_076u64) * BigInt::from(1_380_649u64),
        BigInt::from(10u64).pow(14),
    )
});

/// `(P, V) -> P V / (N_A k_B)`.
pub fn ideal_gas_fn() -> RealFn {
    let inv = Rational::from_integer(BigInt::from(1)) / &*GAS_CONSTANT;
    RealFn::new(
        vec!["p".into(), "v".into()],
        vec![RealExpr::Mul(
            Box::new(RealExpr::Mul(
                Box::new(RealExpr::Var(0)),
                Box::new(RealExpr::Var(1)),
            )),
            Box::new(RealExpr::Const(inv)),
        )],
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CbnmDesc {
    /// The graph of a real map over Euclidean bases.
    Graph(RealFn),
    IdealGas,
    /// Molecule count `n`, observed through singletons.
    MoleculeSing(Nat),
    /// Molecule count `n`, observed through segments `{a, ..., a+k}`.
    MoleculeSeg(Nat),
}

impl CbnmDesc {
    /// `graph:<real fn>`, `ideal_gas`, `molecule_sing(n)` or `molecule_seg(n)`.
    pub fn parse(text: &str) -> Result<Self, NeighborhoodError> {
        let t = text.trim();
        let unknown = || NeighborhoodError::UnknownDescriptor(t.to_string());
        if let Some(f) = t.strip_prefix("graph:") {
            return parse_real_fn(f)
                .map(CbnmDesc::Graph)
                .map_err(|e| NeighborhoodError::UnknownDescriptor(format!("{t}: {e}")));
        }
        if t == "ideal_gas" {
            return Ok(CbnmDesc::IdealGas);
        }
        let arg = |prefix: &str| -> Option<Nat> {
            t.strip_prefix(prefix)?
                .strip_suffix(')')?
                .trim()
                .parse()
                .ok()
        };
        if let Some(n) = arg("molecule_sing(") {
            return Ok(CbnmDesc::MoleculeSing(n));
        }
        if let Some(n) = arg("molecule_seg(") {
            return Ok(CbnmDesc::MoleculeSeg(n));
        }
        Err(unknown())
    }
}

/// The model with states `0, 1, ...` whose observable lists `codes` cyclically.
fn listing_model(name: String, codes: BTreeSet<Nat>) -> Result<Model, NeighborhoodError> {
    let list: Arc<Vec<Nat>> = Arc::new(codes.into_iter().collect());
    let label = format!("{} listed codes", list.len());
    let states = if list.is_empty() {
        StateSpace::native(
            "nothing",
            |_, _| Ok(Visit::Skip),
            Some(NatPred::native("false", |_, _| Ok(false))),
        )
    } else {
        StateSpace::all()
    };
    let l1 = list.clone();
    let f = NatFn::native(format!("nth of {label}"), move |s, _| {
        let len = Nat::from(l1.len());
        let i = (s % &len).to_usize().expect("below list length");
        Ok(l1[i].clone())
    });
    let l2 = list.clone();
    let member = NatPred::native(format!("member of {label}"), move |n, _| {
        Ok(l2.binary_search(n).is_ok())
    });
    Ok(Model::new(
        name,
        states,
        vec![Observable::new("f", f).with_range(member)],
    )?)
}

/// Build the model; graph models are materialized at the given bounds.
pub fn make_cbnm(
    desc: &CbnmDesc,
    height: u64,
    chain: u64,
    budget: &Budget,
) -> Result<Model, NeighborhoodError> {
    match desc {
        CbnmDesc::Graph(_) | CbnmDesc::IdealGas => {
            let (f, name) = match desc {
                CbnmDesc::Graph(f) => (f.clone(), format!("graph of {f}")),
                _ => (ideal_gas_fn(), "ideal gas".to_string()),
            };
            let range = enumerate_graph_range(&GraphRangeRequest {
                machine: OracleMachine::new(f, budget.max_steps),
                height,
                chain,
                budget: *budget,
            })?;
            listing_model(format!("{name}, H = {height}, L = {chain}"), range.codes())
        }
        CbnmDesc::MoleculeSing(n) => {
            let c = n.clone();
            let f = NatFn::native(format!("{n}"), move |_, _| Ok(c.clone()));
            let c = n.clone();
            let member = NatPred::native(format!("n = {n}"), move |x, _| Ok(*x == c));
            Ok(Model::new(
                format!("molecule_sing({n})"),
                StateSpace::all(),
                vec![Observable::new("f", f).with_range(member)],
            )?)
        }
        CbnmDesc::MoleculeSeg(n) => {
            // state s lists J(a, n - a + j) for a = s mod (n+1), j = s div (n+1)
            let c = n.clone();
            let f = NatFn::native(format!("segments around {n}"), move |s, _| {
                let width = &c + 1u32;
                let (j, a) = s.div_rem(&width);
                Ok(pair(&a, &(&c - &a + j)))
            });
            let c = n.clone();
            let member = NatPred::native(format!("K(n) <= {n} <= K(n) + L(n)"), move |x, _| {
                let (a, k) = unpair(x);
                Ok(a <= c && c <= a + k)
            });
            Ok(Model::new(
                format!("molecule_seg({n})"),
                StateSpace::all(),
                vec![Observable::new("f", f).with_range(member)],
            )?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encodings::{pair_u64, rect_decode};
    use crate::model_core::enumerate_range;

    #[test]
    fn parse_descriptors() {
        assert_eq!(CbnmDesc::parse("ideal_gas").unwrap(), CbnmDesc::IdealGas);
        assert_eq!(
            CbnmDesc::parse("molecule_sing(7)").unwrap(),
            CbnmDesc::MoleculeSing(Nat::from(7u8))
        );
        assert!(matches!(
            CbnmDesc::parse("graph:x -> x^2").unwrap(),
            CbnmDesc::Graph(_)
        ));
        assert!(CbnmDesc::parse("photon(3)").is_err());
    }

    #[test]
    fn gas_constant_value() {
        let r = GAS_CONSTANT.to_f64().unwrap();
        assert!((r - 8.314462618).abs() < 1e-9);
    }

    #[test]
    fn molecules() {
        let b = Budget::new(64, 1000);
        let m = make_cbnm(&CbnmDesc::MoleculeSing(Nat::from(7u8)), 1, 1, &b).unwrap();
        let r = enumerate_range(&m, "f", &b).unwrap();
        assert_eq!(r.clone(), BTreeSet::from([Nat::from(7u8)]));

        let m = make_cbnm(&CbnmDesc::MoleculeSeg(Nat::from(2u8)), 1, 1, &b).unwrap();
        let r = enumerate_range(&m, "f", &b).unwrap();
        let want: BTreeSet<Nat> = (0..=3u64)
            .flat_map(|a| (0..=3u64).map(move |k| (a, k)))
            .filter(|&(a, k)| a <= 2 && 2 <= a + k)
            .map(|(a, k)| pair_u64(a, k))
            .collect();
        let bounded: BTreeSet<Nat> = r
            .clone()
            .into_iter()
            .filter(|c| {
                let (a, k) = unpair(c);
                a <= Nat::from(3u8) && k <= Nat::from(3u8)
            })
            .collect();
        assert_eq!(bounded, want);
        assert!(want.contains(&pair_u64(2, 3)));
    }

    #[test]
    fn ideal_gas_codes_meet_the_graph() {
        let b = Budget::new(1_000, 1_000);
        let m = make_cbnm(&CbnmDesc::IdealGas, 1, 1, &b).unwrap();
        let r = enumerate_range(&m, "f", &Budget::new(200, 1_000)).unwrap();
        assert!(!r.clone().is_empty());
        let f = ideal_gas_fn();
        for c in r.clone() {
            let (a, o) = unpair(&c);
            let inp = rect_decode(&a, 2).unwrap();
            let out = rect_decode(&o, 1).unwrap();
            // a bilinear map takes its extremes over a box at the corners
            let corners: Vec<Rational> = [inp.dims()[0].lo(), inp.dims()[0].hi()]
                .into_iter()
                .flat_map(|p| {
                    [inp.dims()[1].lo(), inp.dims()[1].hi()]
                        .map(|v| f.eval_point(&[p.clone(), v.clone()]).unwrap()[0].clone())
                })
                .collect();
            let lo = corners.iter().min().unwrap();
            let hi = corners.iter().max().unwrap();
            let iv = &out.dims()[0];
            assert!(lo < iv.hi() && hi > iv.lo(), "{inp} -> {out}");
        }
    }
}
