use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use super::ast::{BinOp, Expr, Proj};
use crate::encodings::{pair, unpair, Nat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("evaluation exceeded {limit} steps")]
    StepsExceeded { limit: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("sort mismatch: {0}")]
    Sort(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(Nat),
    Bool(bool),
}

struct Machine<'a> {
    var: &'a str,
    value: &'a Nat,
    left: u64,
    limit: u64,
}

impl Machine<'_> {
    fn tick(&mut self) -> Result<(), EvalError> {
        if self.left == 0 {
            return Err(EvalError::StepsExceeded { limit: self.limit });
        }
        self.left -= 1;
        Ok(())
    }

    fn int(&mut self, e: &Expr) -> Result<Nat, EvalError> {
        match self.eval(e)? {
            Value::Int(n) => Ok(n),
            Value::Bool(_) => Err(EvalError::Sort(format!("`{e}` is a predicate"))),
        }
    }

    fn bool(&mut self, e: &Expr) -> Result<bool, EvalError> {
        match self.eval(e)? {
            Value::Bool(b) => Ok(b),
            Value::Int(_) => Err(EvalError::Sort(format!("`{e}` is an integer"))),
        }
    }

    fn eval(&mut self, e: &Expr) -> Result<Value, EvalError> {
        self.tick()?;
        Ok(match e {
            Expr::Num(n) => Value::Int(n.clone()),
            Expr::Bool(b) => Value::Bool(*b),
            Expr::Var(v) if v == self.var => Value::Int(self.value.clone()),
            Expr::Var(v) => return Err(EvalError::Unbound(v.clone())),
            Expr::Not(a) => Value::Bool(!self.bool(a)?),
            Expr::Proj(p, a) => {
                let (k, l) = unpair(&self.int(a)?);
                Value::Int(match p {
                    Proj::K => k,
                    Proj::L => l,
                })
            }
            Expr::Pair(items) => {
                let mut acc = self.int(&items[0])?;
                for it in &items[1..] {
                    let b = self.int(it)?;
                    acc = pair(&acc, &b);
                }
                Value::Int(acc)
            }
            Expr::If(c, a, b) => {
                if self.bool(c)? {
                    self.eval(a)?
                } else {
                    self.eval(b)?
                }
            }
            Expr::Bin(op, a, b) => match op {
                BinOp::And => Value::Bool(self.bool(a)? && self.bool(b)?),
                BinOp::Or => Value::Bool(self.bool(a)? || self.bool(b)?),
                _ => {
                    let x = self.int(a)?;
                    let y = self.int(b)?;
                    match op {
                        BinOp::Eq => Value::Bool(x == y),
                        BinOp::Ne => Value::Bool(x != y),
                        BinOp::Lt => Value::Bool(x < y),
                        BinOp::Le => Value::Bool(x <= y),
                        BinOp::Gt => Value::Bool(x > y),
                        BinOp::Ge => Value::Bool(x >= y),
                        BinOp::Add => Value::Int(x + y),
                        BinOp::Monus => Value::Int(if x > y { x - y } else { Nat::zero() }),
                        BinOp::Mul => Value::Int(x * y),
                        BinOp::Div | BinOp::Mod if y.is_zero() => {
                            return Err(EvalError::DivisionByZero)
                        }
                        BinOp::Div => Value::Int(x.div_floor(&y)),
                        BinOp::Mod => Value::Int(x.mod_floor(&y)),
                        BinOp::And | BinOp::Or => unreachable!(),
                    }
                }
            },
        })
    }
}

/// Evaluate `e` with `var` bound to `value`, charging one step per node visited.
pub fn eval(e: &Expr, var: &str, value: &Nat, max_steps: u64) -> Result<Value, EvalError> {
    let mut m = Machine {
        var,
        value,
        left: max_steps,
        limit: max_steps,
    };
    m.eval(e)
}

pub fn eval_int(e: &Expr, var: &str, value: &Nat, max_steps: u64) -> Result<Nat, EvalError> {
    match eval(e, var, value, max_steps)? {
        Value::Int(n) => Ok(n),
        Value::Bool(_) => Err(EvalError::Sort(format!("`{e}` is a predicate"))),
    }
}

pub fn eval_pred(e: &Expr, var: &str, value: &Nat, max_steps: u64) -> Result<bool, EvalError> {
    match eval(e, var, value, max_steps)? {
        Value::Bool(b) => Ok(b),
        Value::Int(_) => Err(EvalError::Sort(format!("`{e}` is an integer"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec_lang::parse_expr;

    fn run(src: &str, s: u64) -> Nat {
        eval_int(&parse_expr(src).unwrap(), "s", &Nat::from(s), 1000).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(run("2*s+2", 3), Nat::from(8u32));
        assert_eq!(
            run("J(s, 5*s)", 2),
            pair(&Nat::from(2u32), &Nat::from(10u32))
        );
        assert_eq!(run("K(s)", 18), Nat::from(3u32));
        assert_eq!(run("L(s)", 18), Nat::from(2u32));
        assert_eq!(run("3 - s", 5), Nat::from(0u32));
        assert_eq!(
            run("if s % 2 = 0 then s / 2 else 3*s + 1", 7),
            Nat::from(22u32)
        );
    }

    #[test]
    fn errors() {
        let e = parse_expr("s / 0").unwrap();
        assert_eq!(
            eval_int(&e, "s", &Nat::from(1u32), 100),
            Err(EvalError::DivisionByZero)
        );
        let e = parse_expr("s + s + s").unwrap();
        assert_eq!(
            eval_int(&e, "s", &Nat::from(1u32), 3),
            Err(EvalError::StepsExceeded { limit: 3 })
        );
        assert!(eval_int(&e, "s", &Nat::from(1u32), 5).is_ok());
        let e = parse_expr("t").unwrap();
        assert!(matches!(
            eval_int(&e, "s", &Nat::from(1u32), 5),
            Err(EvalError::Unbound(_))
        ));
    }
}
