use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Subcommand;
use cpm_core::encodings::parse_rational;
use cpm_core::model_core::{
    builtin, chain7, check_faithful, check_maximally_faithful, compare_strength, derive, parse_log,
    range_witnesses, reduct, restrict, simulate::record_log, Model, NatFn, NatPred, ObservationLog,
    SemiDecidableSet, Strength, Verdict,
};
use cpm_core::neighborhoods::{make_cbnm, CbnmDesc};
use cpm_core::stats::decay_restriction;
use cpm_core::{Budget, Rational};
use serde_json::{json, Value};

use crate::out::{nat, Out};
use crate::{Global, Status};

const DEFAULT_STATES: u64 = 1_000;

#[derive(Subcommand, Debug)]
pub enum ModelCmd {
    /// Judge every logged result against the model
    Check {
        #[arg(long)]
        model: String,
        #[arg(long)]
        log: PathBuf,
        /// Also list allowed results the log never shows
        #[arg(long)]
        maximal: bool,
    },
    /// Range of an observable at budget, with a witness state per value
    Range {
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "f")]
        symbol: String,
    },
    /// Keep the states whose result satisfies a predicate in `n`
    Restrict {
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "f")]
        symbol: String,
        #[arg(long = "where")]
        pred: String,
        /// Check this log against the result instead of listing its range
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Add the observable `name = map o symbol`, with `map` an expression in `n`
    Derive {
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "f")]
        symbol: String,
        #[arg(long)]
        map: String,
        #[arg(long, default_value = "g")]
        name: String,
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Keep only the listed observables
    Reduct {
        #[arg(long)]
        model: String,
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<String>,
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Strength of `a` against `b`, symbol by symbol
    Compare {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Replay the cannon chain for the given times, e.g. `0..19` or `2,5`
    Chain7 {
        #[arg(long, default_value = "0..19")]
        u: String,
        /// Simulated cannon measurements pushed through every stage
        #[arg(long, default_value_t = 200)]
        seeds: u64,
    },
    /// Run the model's simulated operation and print the log
    Simulate {
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "f")]
        symbol: String,
        #[arg(long, default_value_t = 10)]
        count: u64,
    },
}

fn params(text: &str) -> Result<Vec<(String, Rational)>> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .with_context(|| format!("parameter `{p}` is not `key=value`"))?;
            Ok((k.trim().to_string(), parse_rational(v)?))
        })
        .collect()
}

fn param(ps: &[(String, Rational)], key: &str) -> Result<Rational> {
    ps.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.clone())
        .with_context(|| format!("missing parameter `{key}`"))
}

/// A spec file path, `builtin:<name>[:k=v,...]`, `decay_restriction:alpha=..,b=..`
/// or `cbnm:<descriptor>`.
pub fn load_model(src: &str, g: &Global, budget: &Budget) -> Result<Model> {
    if let Some(rest) = src.strip_prefix("builtin:") {
        let (name, ps) = rest.split_once(':').unwrap_or((rest, ""));
        return Ok(builtin(name, &params(ps)?, budget)?);
    }
    if let Some(rest) = src.strip_prefix("decay_restriction:") {
        let ps = params(rest)?;
        return Ok(decay_restriction(&param(&ps, "alpha")?, &param(&ps, "b")?)?);
    }
    if let Some(rest) = src.strip_prefix("cbnm:") {
        let desc = CbnmDesc::parse(rest)?;
        return Ok(make_cbnm(&desc, g.height, g.chain, budget)?);
    }
    let text = fs::read_to_string(src).with_context(|| format!("reading model `{src}`"))?;
    Model::parse(&text).with_context(|| format!("in model `{src}`"))
}

fn load_log(path: &PathBuf) -> Result<ObservationLog> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading log `{}`", path.display()))?;
    parse_log(&text).with_context(|| format!("in log `{}`", path.display()))
}

fn verdict_fields(v: &Verdict) -> (&'static str, Value) {
    match v {
        Verdict::Witnessed(s) => ("witnessed", nat(s)),
        Verdict::Refuted => ("refuted", Value::Null),
        Verdict::Unknown => ("unknown", Value::Null),
    }
}

fn check(m: &Model, log: &ObservationLog, budget: &Budget, out: &mut Out) -> Result<Status> {
    let verdicts = check_faithful(m, log, budget)?;
    let mut refuted = false;
    for v in &verdicts {
        let (name, witness) = verdict_fields(&v.verdict);
        refuted |= v.verdict == Verdict::Refuted;
        let plain = match &v.verdict {
            Verdict::Witnessed(s) => format!("{} {} witnessed by state {s}", v.symbol, v.result),
            _ => format!("{} {} {name}", v.symbol, v.result),
        };
        out.emit(
            plain,
            json!({
                "symbol": v.symbol,
                "result": nat(&v.result),
                "verdict": name,
                "witness_state": witness,
            }),
        );
    }
    Ok(if refuted { Status::Verdict } else { Status::Ok })
}

fn check_maximal(
    m: &Model,
    log: &ObservationLog,
    budget: &Budget,
    out: &mut Out,
) -> Result<Status> {
    let report = check_maximally_faithful(m, log, budget)?;
    for s in &report.symbols {
        for (r, v) in &s.unwitnessed {
            let (name, _) = verdict_fields(v);
            out.emit(
                format!("{} {r} {name}", s.symbol),
                json!({ "symbol": s.symbol, "result": nat(r), "verdict": name }),
            );
        }
        let unobserved: Vec<String> = s.allowed_unobserved.iter().map(|n| n.to_string()).collect();
        out.emit(
            format!(
                "{} allowed but unobserved: [{}]",
                s.symbol,
                unobserved.join(", ")
            ),
            json!({
                "symbol": s.symbol,
                "allowed_unobserved": s.allowed_unobserved.iter().map(nat).collect::<Vec<_>>(),
            }),
        );
    }
    let summary = if report.refuted() {
        "refuted"
    } else if !report.results_witnessed() {
        "unknown"
    } else if report.range_observed() {
        "maximally faithful at budget"
    } else {
        "faithful at budget"
    };
    out.emit(summary, json!({ "summary": summary }));
    Ok(if report.refuted() {
        Status::Verdict
    } else {
        Status::Ok
    })
}

fn list_range(m: &Model, sym: &str, budget: &Budget, out: &mut Out) -> Result<()> {
    for (v, s) in range_witnesses(m, sym, budget)? {
        out.emit(
            format!("{sym} {v} <- {s}"),
            json!({ "symbol": sym, "result": nat(&v), "state": nat(&s) }),
        );
    }
    Ok(())
}

fn range_or_check(
    m: &Model,
    syms: &[&str],
    log: &Option<PathBuf>,
    budget: &Budget,
    out: &mut Out,
) -> Result<Status> {
    match log {
        Some(path) => check(m, &load_log(path)?, budget, out),
        None => {
            for s in syms {
                list_range(m, s, budget, out)?;
            }
            Ok(Status::Ok)
        }
    }
}

fn parse_us(text: &str) -> Result<Vec<u64>> {
    let t = text.trim();
    if let Some((a, b)) = t.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
        if a > b {
            bail!("empty range `{t}`");
        }
        return Ok((a..=b).collect());
    }
    t.split(',')
        .map(|x| x.trim().parse().with_context(|| format!("bad time `{x}`")))
        .collect()
}

fn strength_text(s: &Strength) -> (String, Value) {
    match s {
        Strength::SubsetAtBudget => ("subset at budget".into(), json!({ "kind": "subset" })),
        Strength::Counterexample(n) => (
            format!("counterexample {n}"),
            json!({ "kind": "counterexample", "value": nat(n) }),
        ),
        Strength::Unknown(n) => (
            format!("unknown, {n} not found"),
            json!({ "kind": "unknown", "value": nat(n) }),
        ),
    }
}

pub fn run(cmd: &ModelCmd, g: &Global, out: &mut Out) -> Result<Status> {
    let budget = g.budget_or(DEFAULT_STATES);
    match cmd {
        ModelCmd::Check {
            model,
            log,
            maximal,
        } => {
            let m = load_model(model, g, &budget)?;
            let log = load_log(log)?;
            if *maximal {
                check_maximal(&m, &log, &budget, out)
            } else {
                check(&m, &log, &budget, out)
            }
        }
        ModelCmd::Range { model, symbol } => {
            let m = load_model(model, g, &budget)?;
            list_range(&m, symbol, &budget, out)?;
            Ok(Status::Ok)
        }
        ModelCmd::Restrict {
            model,
            symbol,
            pred,
            log,
        } => {
            let m = load_model(model, g, &budget)?;
            let q = SemiDecidableSet::Decidable(NatPred::parse("n", pred)?);
            let r = restrict(&m, symbol, &q, &budget)?;
            range_or_check(&r, &[symbol], log, &budget, out)
        }
        ModelCmd::Derive {
            model,
            symbol,
            map,
            name,
            log,
        } => {
            let m = load_model(model, g, &budget)?;
            let d = derive(&m, symbol, &NatFn::parse("n", map)?, name, &budget)?;
            range_or_check(&d, &[name], log, &budget, out)
        }
        ModelCmd::Reduct { model, keep, log } => {
            let m = load_model(model, g, &budget)?;
            let keep: Vec<&str> = keep.iter().map(String::as_str).collect();
            let r = reduct(&m, &keep)?;
            range_or_check(&r, &keep, log, &budget, out)
        }
        ModelCmd::Compare { a, b } => {
            let (ma, mb) = (load_model(a, g, &budget)?, load_model(b, g, &budget)?);
            let report = compare_strength(&ma, &mb, &budget)?;
            for s in &report.symbols {
                let (pa, ja) = strength_text(&s.a_stronger);
                let (pb, jb) = strength_text(&s.b_stronger);
                out.emit(
                    format!(
                        "{}: ran(a) in ran(b): {pa}; ran(b) in ran(a): {pb}",
                        s.symbol
                    ),
                    json!({ "symbol": s.symbol, "a_in_b": ja, "b_in_a": jb }),
                );
            }
            let summary = if report.equivalent() {
                "equivalent at budget"
            } else if report.a_stronger() {
                "a stronger"
            } else if report.b_stronger() {
                "b stronger"
            } else if report.counterexample() {
                "not equivalent"
            } else {
                "undetermined at budget"
            };
            out.emit(summary, json!({ "summary": summary }));
            Ok(if report.counterexample() {
                Status::Verdict
            } else {
                Status::Ok
            })
        }
        ModelCmd::Chain7 { u, seeds } => {
            let us = parse_us(u)?;
            let report = chain7(&us, *seeds, &budget)?;
            for (u, v) in &report.values {
                out.emit(
                    format!("g_{u}(0) = {v}"),
                    json!({ "u": u, "g_u(0)": nat(v) }),
                );
            }
            for st in &report.stages {
                out.emit(
                    format!("{}: {}/{} witnessed", st.stage, st.witnessed, st.produced),
                    json!({ "stage": st.stage, "produced": st.produced, "witnessed": st.witnessed }),
                );
            }
            let ok = report.ok();
            out.emit(
                format!(
                    "{} ({} measurements at other times)",
                    if ok { "ok" } else { "failed" },
                    report.outside
                ),
                json!({ "ok": ok, "outside": report.outside }),
            );
            Ok(if ok { Status::Ok } else { Status::Verdict })
        }
        ModelCmd::Simulate {
            model,
            symbol,
            count,
        } => {
            let m = load_model(model, g, &budget)?;
            m.observable(symbol)?;
            let Some(op) = m.op(symbol) else {
                bail!(
                    "model `{}` has no simulated operation for `{symbol}`",
                    m.name
                );
            };
            let log = record_log(op, symbol, g.seed..g.seed.saturating_add(*count));
            out.raw(&log.to_jsonl());
            Ok(Status::Ok)
        }
    }
}
