use std::collections::{BTreeMap, BTreeSet};

use super::log::ObservationLog;
use super::model::Model;
use super::ops::range_witnesses;
use super::{Budget, ModelError};
use crate::encodings::Nat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Some state within budget produces the result.
    Witnessed(Nat),
    /// The model's range decider rejects the result.
    Refuted,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordVerdict {
    pub symbol: String,
    pub result: Nat,
    pub verdict: Verdict,
}

fn witness_tables(
    m: &Model,
    syms: impl IntoIterator<Item = String>,
    budget: &Budget,
) -> Result<BTreeMap<String, BTreeMap<Nat, Nat>>, ModelError> {
    let mut out = BTreeMap::new();
    for s in syms {
        let table = range_witnesses(m, &s, budget)?;
        out.insert(s, table);
    }
    Ok(out)
}

fn judge(
    m: &Model,
    table: &BTreeMap<Nat, Nat>,
    symbol: &str,
    result: &Nat,
    steps: u64,
) -> Result<Verdict, ModelError> {
    if let Some(s) = table.get(result) {
        return Ok(Verdict::Witnessed(s.clone()));
    }
    let obs = m.observable(symbol)?;
    Ok(match &obs.range_decider {
        Some(d) if d.test(result, steps) == Ok(false) => Verdict::Refuted,
        _ => Verdict::Unknown,
    })
}

/// A state producing `n` under `sym`, if one is found within budget.
pub fn witness_in(
    m: &Model,
    sym: &str,
    n: &Nat,
    budget: &Budget,
) -> Result<Option<Nat>, ModelError> {
    Ok(range_witnesses(m, sym, budget)?.remove(n))
}

pub fn check_faithful(
    m: &Model,
    log: &ObservationLog,
    budget: &Budget,
) -> Result<Vec<RecordVerdict>, ModelError> {
    let syms: BTreeSet<String> = log.records.iter().map(|r| r.symbol.clone()).collect();
    for s in &syms {
        m.observable(s)?;
    }
    let tables = witness_tables(m, syms, budget)?;
    log.records
        .iter()
        .map(|r| {
            Ok(RecordVerdict {
                symbol: r.symbol.clone(),
                result: r.result.clone(),
                verdict: judge(
                    m,
                    &tables[&r.symbol],
                    &r.symbol,
                    &r.result,
                    budget.max_steps,
                )?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolReport {
    pub symbol: String,
    /// Logged results not witnessed in the range, with their verdict.
    pub unwitnessed: Vec<(Nat, Verdict)>,
    /// Range values at budget that never appear in the log.
    pub allowed_unobserved: Vec<Nat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximalReport {
    pub symbols: Vec<SymbolReport>,
}

impl MaximalReport {
    /// Every logged result is witnessed.
    pub fn results_witnessed(&self) -> bool {
        self.symbols.iter().all(|s| s.unwitnessed.is_empty())
    }

    /// Every range value at budget was observed.
    pub fn range_observed(&self) -> bool {
        self.symbols.iter().all(|s| s.allowed_unobserved.is_empty())
    }

    pub fn refuted(&self) -> bool {
        self.symbols
            .iter()
            .any(|s| s.unwitnessed.iter().any(|(_, v)| *v == Verdict::Refuted))
    }
}

pub fn check_maximally_faithful(
    m: &Model,
    log: &ObservationLog,
    budget: &Budget,
) -> Result<MaximalReport, ModelError> {
    for r in &log.records {
        m.observable(&r.symbol)?;
    }
    let syms: Vec<String> = m.symbols().iter().map(|s| s.to_string()).collect();
    let tables = witness_tables(m, syms.clone(), budget)?;
    let mut symbols = Vec::new();
    for sym in syms {
        let table = &tables[&sym];
        let logged: BTreeSet<&Nat> = log.results_for(&sym).collect();
        let mut unwitnessed = Vec::new();
        for r in &logged {
            match judge(m, table, &sym, r, budget.max_steps)? {
                Verdict::Witnessed(_) => {}
                v => unwitnessed.push(((*r).clone(), v)),
            }
        }
        let allowed_unobserved = table
            .keys()
            .filter(|v| !logged.contains(v))
            .cloned()
            .collect();
        symbols.push(SymbolReport {
            symbol: sym,
            unwitnessed,
            allowed_unobserved,
        });
    }
    Ok(MaximalReport { symbols })
}
