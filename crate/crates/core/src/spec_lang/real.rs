use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::lexer::Tok;
use super::parser::Parser;
use super::SpecError;
use crate::encodings::{parse_rational, Interval, Rational, Rect};

/// Polynomial real-valued expressions over a fixed list of input variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RealExpr {
    Const(Rational),
    Var(usize),
    Neg(Box<RealExpr>),
    Add(Box<RealExpr>, Box<RealExpr>),
    Sub(Box<RealExpr>, Box<RealExpr>),
    Mul(Box<RealExpr>, Box<RealExpr>),
    Pow(Box<RealExpr>, u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealError {
    #[error("expected a box of dimension {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("evaluation exceeded {limit} steps")]
    StepsExceeded { limit: u64 },
}

/// A closed enclosure `[lo, hi]`, possibly a single point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closed {
    pub lo: Rational,
    pub hi: Rational,
}

impl Closed {
    pub fn point(x: Rational) -> Self {
        Closed {
            lo: x.clone(),
            hi: x,
        }
    }

    fn mul(&self, o: &Closed) -> Closed {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        Closed {
            lo: c.iter().min().unwrap().clone(),
            hi: c.iter().max().unwrap().clone(),
        }
    }

    fn pow(&self, e: u32) -> Closed {
        let lp = pow(&self.lo, e);
        let hp = pow(&self.hi, e);
        if e % 2 == 1 {
            Closed { lo: lp, hi: hp }
        } else if self.lo.is_negative() && self.hi.is_positive() {
            Closed {
                lo: Rational::zero(),
                hi: lp.max(hp),
            }
        } else {
            Closed {
                lo: lp.clone().min(hp.clone()),
                hi: lp.max(hp),
            }
        }
    }

    /// Open widening by `margin` on each side.
    pub fn widen(&self, margin: &Rational) -> Interval {
        Interval::new(&self.lo - margin, &self.hi + margin).expect("positive margin")
    }
}

fn pow(x: &Rational, e: u32) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * x)
}

impl RealExpr {
    fn fold(self) -> RealExpr {
        use RealExpr::*;
        match self {
            Neg(a) => match a.fold() {
                Const(c) => Const(-c),
                a => Neg(Box::new(a)),
            },
            Add(a, b) => match (a.fold(), b.fold()) {
                (Const(x), Const(y)) => Const(x + y),
                (a, b) => Add(Box::new(a), Box::new(b)),
            },
            Sub(a, b) => match (a.fold(), b.fold()) {
                (Const(x), Const(y)) => Const(x - y),
                (a, b) => Sub(Box::new(a), Box::new(b)),
            },
            Mul(a, b) => match (a.fold(), b.fold()) {
                (Const(x), Const(y)) => Const(x * y),
                (a, b) => Mul(Box::new(a), Box::new(b)),
            },
            Pow(a, e) => match a.fold() {
                Const(x) => Const(pow(&x, e)),
                a => Pow(Box::new(a), e),
            },
            e => e,
        }
    }

    pub fn size(&self) -> u64 {
        match self {
            RealExpr::Const(_) | RealExpr::Var(_) => 1,
            RealExpr::Neg(a) | RealExpr::Pow(a, _) => 1 + a.size(),
            RealExpr::Add(a, b) | RealExpr::Sub(a, b) | RealExpr::Mul(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    pub fn eval_point(&self, x: &[Rational]) -> Rational {
        match self {
            RealExpr::Const(c) => c.clone(),
            RealExpr::Var(i) => x[*i].clone(),
            RealExpr::Neg(a) => -a.eval_point(x),
            RealExpr::Add(a, b) => a.eval_point(x) + b.eval_point(x),
            RealExpr::Sub(a, b) => a.eval_point(x) - b.eval_point(x),
            RealExpr::Mul(a, b) => a.eval_point(x) * b.eval_point(x),
            RealExpr::Pow(a, e) => pow(&a.eval_point(x), *e),
        }
    }

    /// Natural interval extension on a box of closed intervals.
    pub fn enclose(&self, b: &[Closed]) -> Closed {
        match self {
            RealExpr::Const(c) => Closed::point(c.clone()),
            RealExpr::Var(i) => b[*i].clone(),
            RealExpr::Neg(a) => {
                let v = a.enclose(b);
                Closed {
                    lo: -v.hi,
                    hi: -v.lo,
                }
            }
            RealExpr::Add(x, y) => {
                let (u, v) = (x.enclose(b), y.enclose(b));
                Closed {
                    lo: u.lo + v.lo,
                    hi: u.hi + v.hi,
                }
            }
            RealExpr::Sub(x, y) => {
                let (u, v) = (x.enclose(b), y.enclose(b));
                Closed {
                    lo: u.lo - v.hi,
                    hi: u.hi - v.lo,
                }
            }
            RealExpr::Mul(x, y) => x.enclose(b).mul(&y.enclose(b)),
            RealExpr::Pow(a, e) => a.enclose(b).pow(*e),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, vars: &[String], ctx: u8) -> fmt::Result {
        let (p, paren) = match self {
            RealExpr::Add(..) | RealExpr::Sub(..) => (1, ctx > 1),
            RealExpr::Mul(..) => (2, ctx > 2),
            RealExpr::Neg(_) => (3, ctx > 3),
            RealExpr::Const(c) if c.is_negative() || !c.is_integer() => (5, ctx > 2),
            _ => (5, false),
        };
        if paren {
            f.write_str("(")?;
        }
        match self {
            RealExpr::Const(c) => write!(f, "{c}")?,
            RealExpr::Var(i) => f.write_str(&vars[*i])?,
            RealExpr::Neg(a) => {
                f.write_str("-")?;
                a.fmt_prec(f, vars, 4)?;
            }
            RealExpr::Add(a, b) | RealExpr::Sub(a, b) | RealExpr::Mul(a, b) => {
                let sym = match self {
                    RealExpr::Add(..) => " + ",
                    RealExpr::Sub(..) => " - ",
                    _ => "*",
                };
                a.fmt_prec(f, vars, p)?;
                f.write_str(sym)?;
                b.fmt_prec(f, vars, p + 1)?;
            }
            RealExpr::Pow(a, e) => {
                a.fmt_prec(f, vars, 5)?;
                write!(f, "^{e}")?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A map from `R^c` to `R^d` given by polynomial components.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RealFn {
    vars: Vec<String>,
    outputs: Vec<RealExpr>,
}

impl RealFn {
    pub fn new(vars: Vec<String>, outputs: Vec<RealExpr>) -> Self {
        RealFn {
            vars,
            outputs: outputs.into_iter().map(RealExpr::fold).collect(),
        }
    }

    pub fn inputs(&self) -> usize {
        self.vars.len()
    }

    pub fn outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn components(&self) -> &[RealExpr] {
        &self.outputs
    }

    /// Cost of one interval evaluation, in expression nodes.
    pub fn cost(&self) -> u64 {
        self.outputs.iter().map(RealExpr::size).sum()
    }

    pub fn eval_point(&self, x: &[Rational]) -> Result<Vec<Rational>, RealError> {
        self.check_arity(x.len())?;
        Ok(self.outputs.iter().map(|e| e.eval_point(x)).collect())
    }

    pub fn enclose(&self, b: &[Closed]) -> Result<Vec<Closed>, RealError> {
        self.check_arity(b.len())?;
        Ok(self.outputs.iter().map(|e| e.enclose(b)).collect())
    }

    fn check_arity(&self, got: usize) -> Result<(), RealError> {
        if got == self.vars.len() {
            Ok(())
        } else {
            Err(RealError::Arity {
                expected: self.vars.len(),
                got,
            })
        }
    }
}

/// Enclosure of the image of the closure of `rect`, widened to an open
/// rectangle by `2^-m` on every side.
pub fn eval_interval(e: &RealFn, rect: &Rect, m: u32) -> Result<Rect, RealError> {
    let b: Vec<Closed> = rect
        .dims()
        .iter()
        .map(|iv| Closed {
            lo: iv.lo().clone(),
            hi: iv.hi().clone(),
        })
        .collect();
    let margin = Rational::new(1.into(), num_bigint::BigInt::one() << m);
    let dims = e.enclose(&b)?.iter().map(|c| c.widen(&margin)).collect();
    Ok(Rect::new(dims).expect("at least one output"))
}

impl fmt::Display for RealFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> ", self.vars.join(", "))?;
        for (i, e) in self.outputs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            e.fmt_prec(f, &self.vars, 0)?;
        }
        Ok(())
    }
}

struct RealParser<'a> {
    p: Parser,
    vars: &'a [String],
}

impl RealParser<'_> {
    fn sum(&mut self) -> Result<RealExpr, SpecError> {
        let mut e = self.product()?;
        loop {
            match self.p.peek() {
                Tok::Plus => {
                    self.p.bump();
                    e = RealExpr::Add(Box::new(e), Box::new(self.product()?));
                }
                Tok::Minus => {
                    self.p.bump();
                    e = RealExpr::Sub(Box::new(e), Box::new(self.product()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn product(&mut self) -> Result<RealExpr, SpecError> {
        let mut e = self.unary()?;
        loop {
            match self.p.peek() {
                Tok::Star => {
                    self.p.bump();
                    e = RealExpr::Mul(Box::new(e), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.p.bump();
                    let pos = self.p.pos();
                    match self.unary()?.fold() {
                        RealExpr::Const(c) if !c.is_zero() => {
                            e = RealExpr::Mul(Box::new(e), Box::new(RealExpr::Const(c.recip())));
                        }
                        RealExpr::Const(_) => {
                            return Err(SpecError::syntax(pos, "division by zero"))
                        }
                        _ => {
                            return Err(SpecError::syntax(
                                pos,
                                "only division by a constant keeps the map polynomial",
                            ));
                        }
                    }
                }
                _ => return Ok(e),
            }
        }
    }

    fn unary(&mut self) -> Result<RealExpr, SpecError> {
        if *self.p.peek() == Tok::Minus {
            self.p.bump();
            return Ok(RealExpr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<RealExpr, SpecError> {
        let base = self.atom()?;
        if *self.p.peek() != Tok::Caret {
            return Ok(base);
        }
        self.p.bump();
        match self.p.bump() {
            Tok::Number(n) if !n.contains('.') => {
                let pos = self.p.pos();
                let e: u32 = n
                    .parse()
                    .map_err(|_| SpecError::syntax(pos, "exponent too large"))?;
                Ok(RealExpr::Pow(Box::new(base), e))
            }
            _ => Err(SpecError::syntax(
                self.p.pos(),
                "expected a whole-number exponent",
            )),
        }
    }

    fn atom(&mut self) -> Result<RealExpr, SpecError> {
        let pos = self.p.pos();
        match self.p.peek().clone() {
            Tok::Number(n) => {
                self.p.bump();
                let q = parse_rational(&n).map_err(|e| SpecError::syntax(pos, e.to_string()))?;
                Ok(RealExpr::Const(q))
            }
            Tok::LParen => {
                self.p.bump();
                let e = self.sum()?;
                self.p.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.p.bump();
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(RealExpr::Var(i)),
                    None => Err(SpecError::scope(
                        pos,
                        format!("unknown input variable `{name}`"),
                    )),
                }
            }
            _ => Err(self.p.error_here("a real expression")),
        }
    }
}

/// Parse `x, y -> e1, e2`: named inputs, then one or more output components.
pub fn parse_real_fn(text: &str) -> Result<RealFn, SpecError> {
    let mut p = Parser::new(text)?;
    let mut vars = vec![p.ident("an input variable")?];
    while *p.peek() == Tok::Comma {
        p.bump();
        let pos = p.pos();
        let v = p.ident("an input variable")?;
        if vars.contains(&v) {
            return Err(SpecError::duplicate(
                pos,
                format!("input `{v}` listed twice"),
            ));
        }
        vars.push(v);
    }
    p.expect(Tok::Arrow, "`->`")?;
    let mut rp = RealParser { p, vars: &vars };
    let mut outputs = vec![rp.sum()?];
    while *rp.p.peek() == Tok::Comma {
        rp.p.bump();
        outputs.push(rp.sum()?);
    }
    while *rp.p.peek() == Tok::Newline {
        rp.p.bump();
    }
    if *rp.p.peek() != Tok::Eof {
        return Err(rp.p.error_here("end of expression"));
    }
    drop(rp);
    Ok(RealFn::new(vars, outputs))
}
