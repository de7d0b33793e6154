use std::collections::BTreeSet;
use std::fmt;

use crate::encodings::{Nat, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    /// Truncated subtraction.
    Monus,
    Mul,
    Div,
    Mod,
}

impl BinOp {
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Monus => 5,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 6,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "or",
            BinOp::And => "and",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Monus => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 4
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::Or | BinOp::And)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Proj {
    K,
    L,
}

/// Integer expressions and predicates over one bound variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(Nat),
    Bool(bool),
    Var(String),
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    /// `J(e1, ..., ek)`, left-nested.
    Pair(Vec<Expr>),
    Proj(Proj, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sort {
    Int,
    Bool,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Int => "integer",
            Sort::Bool => "predicate",
        })
    }
}

impl Expr {
    pub fn num(n: u64) -> Expr {
        Expr::Num(Nat::from(n))
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) | Expr::Bool(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Not(e) | Expr::Proj(_, e) => e.collect_vars(out),
            Expr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Pair(items) => items.iter().for_each(|e| e.collect_vars(out)),
            Expr::If(c, a, b) => {
                c.collect_vars(out);
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn rename_var(&self, from: &str, to: &str) -> Expr {
        let r = |e: &Expr| Box::new(e.rename_var(from, to));
        match self {
            Expr::Var(v) if v == from => Expr::Var(to.to_string()),
            Expr::Num(_) | Expr::Bool(_) | Expr::Var(_) => self.clone(),
            Expr::Not(e) => Expr::Not(r(e)),
            Expr::Proj(p, e) => Expr::Proj(*p, r(e)),
            Expr::Bin(op, a, b) => Expr::Bin(*op, r(a), r(b)),
            Expr::Pair(items) => Expr::Pair(items.iter().map(|e| e.rename_var(from, to)).collect()),
            Expr::If(c, a, b) => Expr::If(r(c), r(a), r(b)),
        }
    }

    /// Number of nodes, the unit of evaluation cost.
    pub fn size(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Bool(_) | Expr::Var(_) => 1,
            Expr::Not(e) | Expr::Proj(_, e) => 1 + e.size(),
            Expr::Bin(_, a, b) => 1 + a.size() + b.size(),
            Expr::Pair(items) => 1 + items.iter().map(Expr::size).sum::<usize>(),
            Expr::If(c, a, b) => 1 + c.size() + a.size() + b.size(),
        }
    }

    /// Infer the sort, or describe the first mismatch.
    pub fn sort(&self) -> Result<Sort, String> {
        let expect = |e: &Expr, want: Sort| -> Result<(), String> {
            let got = e.sort()?;
            if got == want {
                Ok(())
            } else {
                Err(format!("expected {want} but `{e}` is a {got}"))
            }
        };
        match self {
            Expr::Num(_) | Expr::Var(_) => Ok(Sort::Int),
            Expr::Bool(_) => Ok(Sort::Bool),
            Expr::Not(e) => expect(e, Sort::Bool).map(|_| Sort::Bool),
            Expr::Proj(_, e) => expect(e, Sort::Int).map(|_| Sort::Int),
            Expr::Pair(items) => {
                for e in items {
                    expect(e, Sort::Int)?;
                }
                Ok(Sort::Int)
            }
            Expr::Bin(op, a, b) => {
                let arg = if op.is_logical() {
                    Sort::Bool
                } else {
                    Sort::Int
                };
                expect(a, arg)?;
                expect(b, arg)?;
                Ok(if op.is_logical() || op.is_comparison() {
                    Sort::Bool
                } else {
                    Sort::Int
                })
            }
            Expr::If(c, a, b) => {
                expect(c, Sort::Bool)?;
                let s = a.sort()?;
                expect(b, s)?;
                Ok(s)
            }
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        match self {
            Expr::Num(n) => write!(f, "{n}"),
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Var(v) => f.write_str(v),
            Expr::Not(e) => {
                let paren = ctx > 3;
                if paren {
                    f.write_str("(")?;
                }
                f.write_str("not ")?;
                e.fmt_prec(f, 3)?;
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Expr::Bin(op, a, b) => {
                let p = op.precedence();
                let paren = ctx > p;
                if paren {
                    f.write_str("(")?;
                }
                // left-associative; comparisons do not chain
                let left_ctx = if op.is_comparison() { p + 1 } else { p };
                a.fmt_prec(f, left_ctx)?;
                write!(f, " {} ", op.symbol())?;
                b.fmt_prec(f, p + 1)?;
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Expr::Pair(items) => {
                f.write_str("J(")?;
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    e.fmt_prec(f, 0)?;
                }
                f.write_str(")")
            }
            Expr::Proj(p, e) => {
                f.write_str(match p {
                    Proj::K => "K(",
                    Proj::L => "L(",
                })?;
                e.fmt_prec(f, 0)?;
                f.write_str(")")
            }
            Expr::If(c, a, b) => {
                let paren = ctx > 0;
                if paren {
                    f.write_str("(")?;
                }
                f.write_str("if ")?;
                c.fmt_prec(f, 0)?;
                f.write_str(" then ")?;
                a.fmt_prec(f, 0)?;
                f.write_str(" else ")?;
                b.fmt_prec(f, 0)?;
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// How the state set is presented.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatesSpec {
    /// `states enumerate <expr>`: index `var` maps onto the states.
    Enumerate { var: String, expr: Expr },
    /// `states where <pred>`: the numbers accepted by the predicate, in order.
    Where { var: String, pred: Expr },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservableSpec {
    pub symbol: String,
    pub var: String,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeSpec {
    pub symbol: String,
    pub var: String,
    pub pred: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimOpSpec {
    pub symbol: String,
    pub name: String,
    pub params: Vec<(String, Rational)>,
}

impl SimOpSpec {
    pub fn param(&self, key: &str) -> Option<&Rational> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub name: String,
    pub states: StatesSpec,
    pub observables: Vec<ObservableSpec>,
    pub ranges: Vec<RangeSpec>,
    pub simops: Vec<SimOpSpec>,
}

impl ModelSpec {
    pub fn observable(&self, symbol: &str) -> Option<&ObservableSpec> {
        self.observables.iter().find(|o| o.symbol == symbol)
    }

    pub fn range(&self, symbol: &str) -> Option<&RangeSpec> {
        self.ranges.iter().find(|r| r.symbol == symbol)
    }

    pub fn simop(&self, symbol: &str) -> Option<&SimOpSpec> {
        self.simops.iter().find(|r| r.symbol == symbol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing_respects_precedence() {
        let e = Expr::bin(
            BinOp::Monus,
            Expr::var("a"),
            Expr::bin(BinOp::Monus, Expr::var("b"), Expr::var("c")),
        );
        assert_eq!(e.to_string(), "a - (b - c)");
        let e = Expr::bin(
            BinOp::Mul,
            Expr::bin(BinOp::Add, Expr::num(1), Expr::num(2)),
            Expr::var("s"),
        );
        assert_eq!(e.to_string(), "(1 + 2) * s");
        let e = Expr::Not(Box::new(Expr::bin(BinOp::Lt, Expr::var("s"), Expr::num(3))));
        assert_eq!(e.to_string(), "not s < 3");
    }

    #[test]
    fn sorts() {
        let ok = Expr::bin(
            BinOp::And,
            Expr::Bool(true),
            Expr::bin(BinOp::Eq, Expr::num(1), Expr::var("n")),
        );
        assert_eq!(ok.sort(), Ok(Sort::Bool));
        let bad = Expr::bin(BinOp::Add, Expr::Bool(true), Expr::num(1));
        assert!(bad.sort().is_err());
    }
}
