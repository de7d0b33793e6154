use anyhow::{bail, Result};
use clap::Subcommand;
use cpm_core::encodings::{
    discrete_code, int_code, int_decode, interval_code, interval_decode, pair_tuple, parse_nat,
    parse_rational, rat_code, rat_decode, rect_code, rect_decode, seg_decode, unpair_tuple,
    Discrete,
};
use cpm_core::{Interval, Nat, Rect};
use serde_json::json;

use crate::out::{nat, text, Out};
use crate::Status;

#[derive(Subcommand, Debug)]
pub enum EncodeCmd {
    /// Left-nested pairing of two or more nonnegative integers
    Pair {
        #[arg(required = true, num_args = 2.., value_name = "N")]
        items: Vec<String>,
    },
    /// An integer
    Int {
        #[arg(allow_hyphen_values = true)]
        value: String,
    },
    /// A rational `a/b`
    Rat {
        #[arg(allow_hyphen_values = true)]
        value: String,
    },
    /// An open interval `(a/b;c/d)`
    Ival { value: String },
    /// An open rectangle, one interval per argument or joined with `x`
    Rect {
        #[arg(required = true, num_args = 1.., value_name = "INTERVAL")]
        dims: Vec<String>,
    },
    /// The singleton `{a}`
    Sing { a: String },
    /// The segment `{a, ..., a+k}`
    Seg { a: String, k: String },
}

#[derive(Subcommand, Debug)]
pub enum DecodeCmd {
    /// Components of a left-nested tuple
    Pair {
        code: String,
        #[arg(long, default_value_t = 2)]
        arity: usize,
    },
    Int {
        code: String,
    },
    Rat {
        code: String,
    },
    Ival {
        code: String,
    },
    Rect {
        code: String,
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
    Sing {
        code: String,
    },
    Seg {
        code: String,
    },
}

fn emit_code(out: &mut Out, kind: &str, code: &Nat) {
    out.emit(code, json!({ "kind": kind, "code": nat(code) }));
}

pub fn encode(cmd: &EncodeCmd, out: &mut Out) -> Result<Status> {
    let (kind, code) = match cmd {
        EncodeCmd::Pair { items } => {
            let items = items
                .iter()
                .map(|s| parse_nat(s))
                .collect::<Result<Vec<_>, _>>()?;
            ("pair", pair_tuple(&items)?)
        }
        EncodeCmd::Int { value } => {
            let q = parse_rational(value)?;
            if !q.is_integer() {
                bail!("`{value}` is not an integer");
            }
            ("int", int_code(&q.to_integer()))
        }
        EncodeCmd::Rat { value } => ("rat", rat_code(&parse_rational(value)?)),
        EncodeCmd::Ival { value } => ("ival", interval_code(&value.parse::<Interval>()?)),
        EncodeCmd::Rect { dims } => {
            let mut all = Vec::new();
            for d in dims {
                all.extend(d.parse::<Rect>()?.dims().iter().cloned());
            }
            ("rect", rect_code(&Rect::new(all)?))
        }
        EncodeCmd::Sing { a } => ("sing", discrete_code(&Discrete::Sing(parse_nat(a)?))),
        EncodeCmd::Seg { a, k } => (
            "seg",
            discrete_code(&Discrete::Seg(parse_nat(a)?, parse_nat(k)?)),
        ),
    };
    emit_code(out, kind, &code);
    Ok(Status::Ok)
}

pub fn decode(cmd: &DecodeCmd, out: &mut Out) -> Result<Status> {
    match cmd {
        DecodeCmd::Pair { code, arity } => {
            let parts = unpair_tuple(&parse_nat(code)?, *arity)?;
            let plain: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
            let rec: Vec<_> = parts.iter().map(nat).collect();
            out.emit(plain.join(" "), json!({ "kind": "pair", "value": rec }));
        }
        DecodeCmd::Int { code } => {
            let i = int_decode(&parse_nat(code)?);
            out.emit(&i, json!({ "kind": "int", "value": text(&i) }));
        }
        DecodeCmd::Rat { code } => {
            let q = rat_decode(&parse_nat(code)?);
            out.emit(&q, json!({ "kind": "rat", "value": text(&q) }));
        }
        DecodeCmd::Ival { code } => {
            let iv = interval_decode(&parse_nat(code)?)?;
            out.emit(&iv, json!({ "kind": "ival", "value": text(&iv) }));
        }
        DecodeCmd::Rect { code, dim } => {
            let r = rect_decode(&parse_nat(code)?, *dim)?;
            out.emit(&r, json!({ "kind": "rect", "value": text(&r) }));
        }
        DecodeCmd::Sing { code } => {
            let a = parse_nat(code)?;
            out.emit(format!("{{{a}}}"), json!({ "kind": "sing", "a": nat(&a) }));
        }
        DecodeCmd::Seg { code } => {
            let Discrete::Seg(a, k) = seg_decode(&parse_nat(code)?) else {
                unreachable!("segment codes decode to segments")
            };
            let hi = &a + &k;
            out.emit(
                format!("{{{a}..{hi}}}"),
                json!({ "kind": "seg", "a": nat(&a), "k": nat(&k) }),
            );
        }
    }
    Ok(Status::Ok)
}
