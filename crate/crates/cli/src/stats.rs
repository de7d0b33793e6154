use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Subcommand;
use cpm_core::encodings::parse_rational;
use cpm_core::exact_arith::format_fixed;
use cpm_core::model_core::parse_log;
use cpm_core::stats::{
    binom_pmf, bounds, build_piecewise, decide, interval_estimate, max_alpha, tail_prob,
};
use cpm_core::{AlgebraicNumber, Rational};
use serde_json::json;

use crate::out::{nat, rat, text, Out};
use crate::{Global, Status};

#[derive(Subcommand, Debug)]
pub enum StatsCmd {
    /// `C(i, j) b^j (1-b)^(i-j)`
    Pmf { i: u64, b: String, j: u64 },
    /// Two-tailed tail probability `P(m, n, b)`
    Tail { m: u64, n: u64, b: String },
    /// Reject `b` at level `alpha` when `P(m, n, b) < alpha`
    Reject {
        m: u64,
        n: u64,
        b: String,
        alpha: String,
    },
    /// Polynomial pieces of `b -> P(m, n, b)`
    Pieces { m: u64, n: u64 },
    /// Interval estimate `[r, s]` of `b` at level `alpha`
    Estimate { m: u64, n: u64, alpha: String },
    /// Largest level at which no logged count `J(m, n)` rejects `b`
    Maxalpha {
        #[arg(long)]
        log: PathBuf,
        b: String,
    },
}

fn q(s: &str) -> Result<Rational> {
    Ok(parse_rational(s)?)
}

fn endpoint(name: &str, a: &AlgebraicNumber, digits: u32, out: &mut Out) {
    match a {
        AlgebraicNumber::Rational(x) => out.emit(
            format!("{name} = {x} (exact)"),
            json!({ "endpoint": name, "exact": rat(x) }),
        ),
        AlgebraicNumber::Root { poly, interval } => {
            let (lo, hi) = a.decimal_enclosure(digits);
            let (lo, hi) = (format_fixed(&lo, digits), format_fixed(&hi, digits));
            out.emit(
                format!("{name} in [{lo}, {hi}]"),
                json!({
                    "endpoint": name,
                    "lo": lo,
                    "hi": hi,
                    "poly": text(poly),
                    "isolating": text(interval),
                }),
            );
        }
    }
}

pub fn run(cmd: &StatsCmd, g: &Global, out: &mut Out) -> Result<Status> {
    match cmd {
        StatsCmd::Pmf { i, b, j } => {
            let p = binom_pmf(*i, &q(b)?, *j)?;
            out.emit(&p, json!({ "pmf": rat(&p) }));
        }
        StatsCmd::Tail { m, n, b } => {
            let p = tail_prob(*m, *n, &q(b)?)?;
            out.emit(&p, json!({ "tail": rat(&p) }));
        }
        StatsCmd::Reject { m, n, b, alpha } => {
            let d = decide(*m, *n, &q(b)?, &q(alpha)?)?;
            let plain = if d.reject {
                format!("reject: P = {} < {alpha}", d.p)
            } else if d.at_threshold {
                format!("keep: P = {} = alpha", d.p)
            } else {
                format!("keep: P = {} > {alpha}", d.p)
            };
            out.emit(
                plain,
                json!({ "reject": d.reject, "p": rat(&d.p), "at_threshold": d.at_threshold }),
            );
            if d.reject {
                return Ok(Status::Verdict);
            }
        }
        StatsCmd::Pieces { m, n } => {
            let pw = build_piecewise(*m, *n)?;
            for (i, piece) in pw.pieces.iter().enumerate() {
                let at = pw.breakpoint(i);
                let v = &pw.endpoint_values[i];
                out.emit(
                    format!("P({at}) = {v}"),
                    json!({ "b": rat(&at), "value": rat(v) }),
                );
                out.emit(
                    format!("({};{}): {}", piece.lo, piece.hi, piece.psi),
                    json!({
                        "lo": rat(&piece.lo),
                        "hi": rat(&piece.hi),
                        "tail": piece.tail,
                        "psi": text(&piece.psi),
                    }),
                );
            }
            let last = pw.pieces.len();
            let (at, v) = (pw.breakpoint(last), &pw.endpoint_values[last]);
            out.emit(
                format!("P({at}) = {v}"),
                json!({ "b": rat(&at), "value": rat(v) }),
            );
            let disc: Vec<String> = pw.discontinuities().iter().map(|x| x.to_string()).collect();
            out.emit(
                format!("discontinuities: {}", disc.join(" ")),
                json!({ "discontinuities": disc }),
            );
        }
        StatsCmd::Estimate { m, n, alpha } => {
            let a = q(alpha)?;
            let (r, s) = bounds(*m, *n, &a)?;
            endpoint("r", &r, g.digits, out);
            endpoint("s", &s, g.digits, out);
            let code = interval_estimate(*m, *n, &a)?;
            out.emit(format!("code = {code}"), json!({ "code": nat(&code) }));
        }
        StatsCmd::Maxalpha { log, b } => {
            let text = fs::read_to_string(log)
                .with_context(|| format!("reading log `{}`", log.display()))?;
            let log = parse_log(&text)?;
            match max_alpha(&log, &q(b)?)? {
                Some(a) => out.emit(&a, json!({ "max_alpha": rat(&a) })),
                None => out.emit("unrestricted (empty log)", json!({ "max_alpha": null })),
            }
        }
    }
    Ok(Status::Ok)
}
