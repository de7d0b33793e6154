use std::fmt::Write as _;

use serde_json::{json, Value};
use thiserror::Error;

use super::faithful::{RecordVerdict, Verdict};
use crate::encodings::{parse_nat, Nat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("log line {line}: {message}")]
pub struct LogError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub symbol: String,
    pub result: Nat,
}

/// Measurement results, one record per line as `{"observable": "f", "result": 4}`.
/// `symbol` is read as an alias for `observable`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ObservationLog {
    pub records: Vec<Record>,
}

impl ObservationLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, symbol: &str, result: Nat) {
        self.records.push(Record {
            symbol: symbol.to_string(),
            result,
        });
    }

    pub fn of(symbol: &str, results: impl IntoIterator<Item = Nat>) -> Self {
        let mut log = Self::new();
        for r in results {
            log.push(symbol, r);
        }
        log
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records whose symbol is in `syms`.
    pub fn restrict_to(&self, syms: &[&str]) -> Self {
        ObservationLog {
            records: self
                .records
                .iter()
                .filter(|r| syms.contains(&r.symbol.as_str()))
                .cloned()
                .collect(),
        }
    }

    pub fn results_for<'a>(&'a self, symbol: &'a str) -> impl Iterator<Item = &'a Nat> + 'a {
        self.records
            .iter()
            .filter(move |r| r.symbol == symbol)
            .map(|r| &r.result)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let line = json!({ "observable": r.symbol, "result": nat_json(&r.result) });
            let _ = writeln!(out, "{line}");
        }
        out
    }
}

fn nat_json(n: &Nat) -> Value {
    Value::Number(
        n.to_string()
            .parse()
            .expect("decimal digits form a JSON number"),
    )
}

/// Parse line-delimited records; blank lines are skipped.
pub fn parse_log(text: &str) -> Result<ObservationLog, LogError> {
    let mut log = ObservationLog::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| LogError { line, message };
        if raw.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(raw).map_err(|e| err(e.to_string()))?;
        let symbol = v
            .get("observable")
            .or_else(|| v.get("symbol"))
            .and_then(Value::as_str)
            .ok_or_else(|| err("missing string field `observable`".into()))?;
        let result = match v.get("result") {
            Some(Value::Number(n)) => n.to_string(),
            Some(Value::String(s)) => s.clone(),
            _ => return Err(err("missing field `result`".into())),
        };
        let result = parse_nat(&result)
            .map_err(|_| err(format!("result `{result}` is not a nonnegative integer")))?;
        log.push(symbol, result);
    }
    Ok(log)
}

pub fn verdicts_to_jsonl(verdicts: &[RecordVerdict]) -> String {
    let mut out = String::new();
    for v in verdicts {
        let (name, witness) = match &v.verdict {
            Verdict::Witnessed(s) => ("witnessed", nat_json(s)),
            Verdict::Refuted => ("refuted", Value::Null),
            Verdict::Unknown => ("unknown", Value::Null),
        };
        let line = json!({
            "symbol": v.symbol,
            "result": nat_json(&v.result),
            "verdict": name,
            "witness_state": witness,
        });
        let _ = writeln!(out, "{line}");
    }
    out
}
