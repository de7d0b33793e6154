use std::fmt::{Display, Write as _};
use std::io::Write as _;

use clap::ValueEnum;
use cpm_core::{Nat, Rational};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Text for people
    Plain,
    /// One JSON object per line
    Lines,
}

/// Collects the command's output so that errors never interleave with it.
pub struct Out {
    format: Format,
    text: String,
}

impl Out {
    pub fn new(format: Format) -> Self {
        Out {
            format,
            text: String::new(),
        }
    }

    pub fn emit(&mut self, plain: impl Display, rec: Value) {
        let _ = match self.format {
            Format::Plain => writeln!(self.text, "{plain}"),
            Format::Lines => writeln!(self.text, "{rec}"),
        };
    }

    /// Text that is the same in both formats, such as a log or a spec file.
    pub fn raw(&mut self, text: &str) {
        self.text.push_str(text);
    }

    pub fn flush(self) {
        let mut stdout = std::io::stdout().lock();
        let _ = stdout.write_all(self.text.as_bytes());
        let _ = stdout.flush();
    }
}

pub fn nat(n: &Nat) -> Value {
    Value::Number(n.to_string().parse().expect("decimal digits"))
}

pub fn rat(q: &Rational) -> Value {
    Value::String(q.to_string())
}

pub fn text(s: impl Display) -> Value {
    Value::String(s.to_string())
}
