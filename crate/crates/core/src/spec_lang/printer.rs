use std::fmt::Write;

use super::ast::{ModelSpec, StatesSpec};

/// Canonical text of a spec; `parse_model` of the output yields the same spec.
pub fn print_model(spec: &ModelSpec) -> String {
    let mut out = String::new();
    writeln!(out, "model \"{}\"", spec.name).unwrap();
    match &spec.states {
        StatesSpec::Enumerate { expr, .. } => writeln!(out, "states enumerate {expr}").unwrap(),
        StatesSpec::Where { pred, .. } => writeln!(out, "states where {pred}").unwrap(),
    }
    for o in &spec.observables {
        writeln!(out, "observable {}({}) = {}", o.symbol, o.var, o.expr).unwrap();
    }
    for r in &spec.ranges {
        writeln!(out, "range {} where {}", r.symbol, r.pred).unwrap();
    }
    for s in &spec.simops {
        write!(out, "simop {} = {}", s.symbol, s.name).unwrap();
        if !s.params.is_empty() {
            let params: Vec<String> = s.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(out, "({})", params.join(", ")).unwrap();
        }
        out.push('\n');
    }
    out
}
