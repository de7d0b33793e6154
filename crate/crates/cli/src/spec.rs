use std::fs;
use std::io::Read;

use anyhow::{Context, Result};
use clap::Subcommand;
use cpm_core::spec_lang::{parse_model, print_model, ModelSpec};
use cpm_core::Model;
use serde_json::json;

use crate::out::Out;
use crate::Status;

#[derive(Subcommand, Debug)]
pub enum SpecCmd {
    /// Print the spec in canonical form
    Fmt {
        /// Spec file, or `-` for stdin
        path: String,
    },
    /// Parse, build and report questionable declarations
    Lint { path: String },
}

fn read(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading spec `{path}`"))
}

fn warnings(spec: &ModelSpec) -> Vec<(String, String)> {
    let mut w = Vec::new();
    for o in &spec.observables {
        if !o.expr.free_vars().contains(&o.var) {
            w.push((o.symbol.clone(), "constant observable".to_string()));
        }
        if spec.range(&o.symbol).is_none() {
            w.push((
                o.symbol.clone(),
                "no range declaration; results can never be refuted".to_string(),
            ));
        }
        if spec.simop(&o.symbol).is_none() {
            w.push((o.symbol.clone(), "no simulated operation".to_string()));
        }
    }
    w
}

pub fn run(cmd: &SpecCmd, out: &mut Out) -> Result<Status> {
    match cmd {
        SpecCmd::Fmt { path } => {
            let spec = parse_model(&read(path)?).with_context(|| format!("in `{path}`"))?;
            out.raw(&print_model(&spec));
        }
        SpecCmd::Lint { path } => {
            let spec = parse_model(&read(path)?).with_context(|| format!("in `{path}`"))?;
            Model::from_spec(&spec).with_context(|| format!("in `{path}`"))?;
            let w = warnings(&spec);
            for (sym, msg) in &w {
                out.emit(
                    format!("warning: {sym}: {msg}"),
                    json!({ "symbol": sym, "warning": msg }),
                );
            }
            if w.is_empty() {
                out.emit("ok", json!({ "ok": true }));
            }
        }
    }
    Ok(Status::Ok)
}
