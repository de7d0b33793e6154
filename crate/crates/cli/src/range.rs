use anyhow::{Context, Result};
use clap::Subcommand;
use cpm_core::encodings::parse_rational;
use cpm_core::neighborhoods::{
    enumerate_graph_range, ideal_gas_fn, membership_probe, GraphRange, GraphRangeRequest,
    NestedOracle, OracleMachine, ProbeStatus, ProbeVerdict,
};
use cpm_core::spec_lang::{parse_real_fn, RealFn};
use cpm_core::Rational;
use serde_json::json;

use crate::out::{nat, text, Out};
use crate::{Global, Status};

const DEFAULT_NODES: u64 = 1_000_000;

#[derive(Subcommand, Debug)]
pub enum RangeCmd {
    /// Sorted graph-range codes at the height and chain bounds
    Enumerate {
        /// A real map such as `x -> x^2`, or `ideal_gas`
        #[arg(long)]
        machine: String,
        /// Annotate each code with its input and output rectangles
        #[arg(long)]
        decode: bool,
    },
    /// Walk the canonical oracle of a point against the graph range
    Probe {
        #[arg(long)]
        machine: String,
        /// Input coordinates then output coordinates, comma separated
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 8)]
        depth: u64,
    },
}

fn machine_fn(text: &str) -> Result<RealFn> {
    if text.trim() == "ideal_gas" {
        return Ok(ideal_gas_fn());
    }
    parse_real_fn(text).with_context(|| format!("in machine `{text}`"))
}

fn graph_range(machine: &str, g: &Global) -> Result<GraphRange> {
    let budget = g.budget_or(DEFAULT_NODES);
    let range = enumerate_graph_range(&GraphRangeRequest {
        machine: OracleMachine::new(machine_fn(machine)?, budget.max_steps),
        height: g.height,
        chain: g.chain,
        budget,
    })?;
    let d = &range.diagnostics;
    if d.budget_exhausted {
        eprintln!("note: node budget exhausted after {} nodes", d.nodes);
    }
    Ok(range)
}

pub fn run(cmd: &RangeCmd, g: &Global, out: &mut Out) -> Result<Status> {
    match cmd {
        RangeCmd::Enumerate { machine, decode } => {
            let range = graph_range(machine, g)?;
            for code in range.codes() {
                let source = if range.emitted.contains(&code) {
                    "emitted"
                } else {
                    "saturated"
                };
                if *decode {
                    let (a, b) = range.decode(&code)?;
                    out.emit(
                        format!("{code}  {a} -> {b}"),
                        json!({
                            "code": nat(&code),
                            "source": source,
                            "input": text(&a),
                            "output": text(&b),
                        }),
                    );
                } else {
                    out.emit(&code, json!({ "code": nat(&code), "source": source }));
                }
            }
            Ok(Status::Ok)
        }
        RangeCmd::Probe {
            machine,
            point,
            depth,
        } => {
            let pt = point
                .split(',')
                .map(parse_rational)
                .collect::<Result<Vec<Rational>, _>>()?;
            let range = graph_range(machine, g)?;
            let report = membership_probe(&range, &NestedOracle::around_point(&pt), *depth)?;
            for step in &report.steps {
                let status = match &step.status {
                    ProbeStatus::Emitted => "emitted".to_string(),
                    ProbeStatus::Regenerated { height, chain } => {
                        format!("regenerated at height {height}, chain {chain}")
                    }
                    ProbeStatus::Unrefuted => "unrefuted".to_string(),
                    ProbeStatus::Excluded => "excluded".to_string(),
                };
                out.emit(
                    format!("{} {} {}: {status}", step.index, step.rect, step.code),
                    json!({
                        "index": step.index,
                        "code": nat(&step.code),
                        "rect": text(&step.rect),
                        "status": status,
                    }),
                );
            }
            match &report.verdict {
                ProbeVerdict::ConsistentAtDepth(d) => {
                    out.emit(
                        format!("consistent to depth {d}"),
                        json!({ "verdict": "consistent", "depth": d }),
                    );
                    Ok(Status::Ok)
                }
                ProbeVerdict::Excluded { index, code, rect } => {
                    out.emit(
                        format!("excluded at index {index} by {rect}"),
                        json!({
                            "verdict": "excluded",
                            "index": index,
                            "code": nat(code),
                            "rect": text(rect),
                        }),
                    );
                    Ok(Status::Verdict)
                }
            }
        }
    }
}
