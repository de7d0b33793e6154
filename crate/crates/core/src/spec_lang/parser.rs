use std::collections::BTreeSet;

use super::ast::{
    BinOp, Expr, ModelSpec, ObservableSpec, Proj, RangeSpec, SimOpSpec, Sort, StatesSpec,
};
use super::lexer::{lex, Tok, Token};
use super::{Pos, SpecError};
use crate::encodings::{parse_rational, Nat, Rational};

const KEYWORDS: &[&str] = &[
    "and", "or", "not", "if", "then", "else", "div", "mod", "true", "false",
];

/// Variable name used when a predicate or enumerator mentions no variable.
pub const DEFAULT_VAR: &str = "s";

pub(crate) struct Parser {
    toks: Vec<Token>,
    i: usize,
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Self, SpecError> {
        Ok(Parser {
            toks: lex(text)?,
            i: 0,
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    pub(crate) fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].tok.clone();
        if t != Tok::Eof {
            self.i += 1;
        }
        t
    }

    pub(crate) fn error_here(&self, what: &str) -> SpecError {
        SpecError::syntax(
            self.pos(),
            format!("expected {what}, found {}", self.peek().describe()),
        )
    }

    pub(crate) fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SpecError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(what))
        }
    }

    fn at_ident(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    pub(crate) fn eat_ident(&mut self, word: &str) -> bool {
        if self.at_ident(word) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn ident(&mut self, what: &str) -> Result<String, SpecError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error_here(what)),
        }
    }

    fn skip_newlines(&mut self) {
        while *self.peek() == Tok::Newline {
            self.bump();
        }
    }

    fn end_of_line(&mut self) -> Result<(), SpecError> {
        match self.peek() {
            Tok::Newline => {
                self.bump();
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => Err(self.error_here("end of line")),
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, SpecError> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<Expr, SpecError> {
        let mut e = self.and_expr()?;
        while self.eat_ident("or") {
            e = Expr::bin(BinOp::Or, e, self.and_expr()?);
        }
        Ok(e)
    }

    fn and_expr(&mut self) -> Result<Expr, SpecError> {
        let mut e = self.not_expr()?;
        while self.eat_ident("and") {
            e = Expr::bin(BinOp::And, e, self.not_expr()?);
        }
        Ok(e)
    }

    fn not_expr(&mut self) -> Result<Expr, SpecError> {
        if self.eat_ident("not") {
            return Ok(Expr::Not(Box::new(self.not_expr()?)));
        }
        self.cmp_expr()
    }

    fn cmp_expr(&mut self) -> Result<Expr, SpecError> {
        let a = self.sum_expr()?;
        let op = match self.peek() {
            Tok::Eq | Tok::EqEq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return Ok(a),
        };
        self.bump();
        let b = self.sum_expr()?;
        Ok(Expr::bin(op, a, b))
    }

    fn sum_expr(&mut self) -> Result<Expr, SpecError> {
        let mut e = self.prod_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Monus,
                _ => return Ok(e),
            };
            self.bump();
            e = Expr::bin(op, e, self.prod_expr()?);
        }
    }

    fn prod_expr(&mut self) -> Result<Expr, SpecError> {
        let mut e = self.atom()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                Tok::Percent => BinOp::Mod,
                Tok::Ident(s) if s == "div" => BinOp::Div,
                Tok::Ident(s) if s == "mod" => BinOp::Mod,
                _ => return Ok(e),
            };
            self.bump();
            e = Expr::bin(op, e, self.atom()?);
        }
    }

    fn atom(&mut self) -> Result<Expr, SpecError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Number(s) => {
                if s.contains('.') {
                    return Err(SpecError::syntax(
                        pos,
                        format!("integer expressions take whole numbers, found {s}"),
                    ));
                }
                self.bump();
                Ok(Expr::Num(s.parse::<Nat>().expect("lexer yields digits")))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(s) => match s.as_str() {
                "true" | "false" => {
                    self.bump();
                    Ok(Expr::Bool(s == "true"))
                }
                "if" => {
                    self.bump();
                    let c = self.expr()?;
                    if !self.eat_ident("then") {
                        return Err(self.error_here("`then`"));
                    }
                    let a = self.expr()?;
                    if !self.eat_ident("else") {
                        return Err(self.error_here("`else`"));
                    }
                    let b = self.expr()?;
                    Ok(Expr::If(Box::new(c), Box::new(a), Box::new(b)))
                }
                "J" | "K" | "L" if self.toks[self.i + 1].tok == Tok::LParen => {
                    self.bump();
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen, "`)` or `,`")?;
                    match s.as_str() {
                        "J" => Ok(Expr::Pair(args)),
                        _ if args.len() != 1 => Err(SpecError::syntax(
                            pos,
                            format!("{s} takes exactly one argument"),
                        )),
                        "K" => Ok(Expr::Proj(Proj::K, Box::new(args.pop().unwrap()))),
                        _ => Ok(Expr::Proj(Proj::L, Box::new(args.pop().unwrap()))),
                    }
                }
                w if KEYWORDS.contains(&w) => Err(self.error_here("an expression")),
                _ => {
                    self.bump();
                    Ok(Expr::Var(s))
                }
            },
            _ => Err(self.error_here("an expression")),
        }
    }

    /// Rational literal: `[-]digits[.digits][/digits]`.
    pub(crate) fn rational(&mut self) -> Result<Rational, SpecError> {
        let pos = self.pos();
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let Tok::Number(a) = self.peek().clone() else {
            return Err(self.error_here("a number"));
        };
        self.bump();
        let mut text = a;
        if *self.peek() == Tok::Slash {
            self.bump();
            let Tok::Number(b) = self.peek().clone() else {
                return Err(self.error_here("a denominator"));
            };
            self.bump();
            text = format!("{text}/{b}");
        }
        let q = parse_rational(&text).map_err(|e| SpecError::syntax(pos, e.to_string()))?;
        Ok(if neg { -q } else { q })
    }
}

/// Parse a standalone integer expression or predicate.
pub fn parse_expr(text: &str) -> Result<Expr, SpecError> {
    let mut p = Parser::new(text)?;
    p.skip_newlines();
    let e = p.expr()?;
    p.skip_newlines();
    if *p.peek() != Tok::Eof {
        return Err(p.error_here("end of expression"));
    }
    Ok(e)
}

fn check_sort(e: &Expr, want: Sort, pos: Pos) -> Result<(), SpecError> {
    match e.sort() {
        Ok(s) if s == want => Ok(()),
        Ok(s) => Err(SpecError::sort(
            pos,
            format!("expected a {want}, found a {s}: `{e}`"),
        )),
        Err(msg) => Err(SpecError::sort(pos, msg)),
    }
}

fn single_var(e: &Expr, pos: Pos) -> Result<String, SpecError> {
    let vars = e.free_vars();
    match vars.len() {
        0 => Ok(DEFAULT_VAR.to_string()),
        1 => Ok(vars.into_iter().next().unwrap()),
        _ => Err(SpecError::scope(
            pos,
            format!(
                "expected at most one variable, found {}",
                vars.into_iter().collect::<Vec<_>>().join(", ")
            ),
        )),
    }
}

pub fn parse_model(text: &str) -> Result<ModelSpec, SpecError> {
    let mut p = Parser::new(text)?;
    let mut name: Option<String> = None;
    let mut states: Option<StatesSpec> = None;
    let mut observables: Vec<ObservableSpec> = Vec::new();
    let mut ranges: Vec<(Pos, RangeSpec)> = Vec::new();
    let mut simops: Vec<(Pos, SimOpSpec)> = Vec::new();
    loop {
        p.skip_newlines();
        if *p.peek() == Tok::Eof {
            break;
        }
        let pos = p.pos();
        let kw = p.ident("a declaration (model, states, observable, range, simop)")?;
        match kw.as_str() {
            "model" => {
                if name.is_some() {
                    return Err(SpecError::duplicate(pos, "model name declared twice"));
                }
                let Tok::Str(s) = p.peek().clone() else {
                    return Err(p.error_here("a quoted model name"));
                };
                p.bump();
                name = Some(s);
            }
            "states" => {
                if states.is_some() {
                    return Err(SpecError::duplicate(pos, "states declared twice"));
                }
                let enumerate = if p.eat_ident("enumerate") {
                    true
                } else if p.eat_ident("where") {
                    false
                } else {
                    return Err(p.error_here("`enumerate` or `where`"));
                };
                let epos = p.pos();
                let e = p.expr()?;
                let var = single_var(&e, epos)?;
                states = Some(if enumerate {
                    check_sort(&e, Sort::Int, epos)?;
                    StatesSpec::Enumerate { var, expr: e }
                } else {
                    check_sort(&e, Sort::Bool, epos)?;
                    StatesSpec::Where { var, pred: e }
                });
            }
            "observable" => {
                let symbol = p.ident("an observable symbol")?;
                p.expect(Tok::LParen, "`(`")?;
                let var = p.ident("a state variable")?;
                p.expect(Tok::RParen, "`)`")?;
                p.expect(Tok::Eq, "`=`")?;
                let epos = p.pos();
                let expr = p.expr()?;
                check_sort(&expr, Sort::Int, epos)?;
                let stray: BTreeSet<_> =
                    expr.free_vars().into_iter().filter(|v| *v != var).collect();
                if let Some(v) = stray.into_iter().next() {
                    return Err(SpecError::scope(epos, format!("unbound variable `{v}`")));
                }
                if observables.iter().any(|o| o.symbol == symbol) {
                    return Err(SpecError::duplicate(
                        pos,
                        format!("observable `{symbol}` declared twice"),
                    ));
                }
                observables.push(ObservableSpec { symbol, var, expr });
            }
            "range" => {
                let symbol = p.ident("an observable symbol")?;
                if !p.eat_ident("where") {
                    return Err(p.error_here("`where`"));
                }
                let epos = p.pos();
                let pred = p.expr()?;
                check_sort(&pred, Sort::Bool, epos)?;
                let var = single_var(&pred, epos)?;
                if ranges.iter().any(|(_, r)| r.symbol == symbol) {
                    return Err(SpecError::duplicate(
                        pos,
                        format!("range for `{symbol}` declared twice"),
                    ));
                }
                ranges.push((pos, RangeSpec { symbol, var, pred }));
            }
            "simop" => {
                let symbol = p.ident("an observable symbol")?;
                p.expect(Tok::Eq, "`=`")?;
                let op = p.ident("a simulated operation name")?;
                let mut params = Vec::new();
                if *p.peek() == Tok::LParen {
                    p.bump();
                    loop {
                        let key = p.ident("a parameter name")?;
                        p.expect(Tok::Eq, "`=`")?;
                        let v = p.rational()?;
                        params.push((key, v));
                        if *p.peek() == Tok::Comma {
                            p.bump();
                        } else {
                            break;
                        }
                    }
                    p.expect(Tok::RParen, "`)` or `,`")?;
                }
                if simops.iter().any(|(_, s)| s.symbol == symbol) {
                    return Err(SpecError::duplicate(
                        pos,
                        format!("simop for `{symbol}` declared twice"),
                    ));
                }
                simops.push((
                    pos,
                    SimOpSpec {
                        symbol,
                        name: op,
                        params,
                    },
                ));
            }
            other => {
                return Err(SpecError::syntax(
                    pos,
                    format!("unknown declaration `{other}`"),
                ));
            }
        }
        p.end_of_line()?;
    }
    let end = p.pos();
    let name =
        name.ok_or_else(|| SpecError::missing(end, "missing `model \"<name>\"` declaration"))?;
    let states = states.ok_or_else(|| SpecError::missing(end, "missing `states` declaration"))?;
    if observables.is_empty() {
        return Err(SpecError::missing(
            end,
            "at least one observable is required",
        ));
    }
    for (pos, r) in &ranges {
        if !observables.iter().any(|o| o.symbol == r.symbol) {
            return Err(SpecError::scope(
                *pos,
                format!("range names unknown observable `{}`", r.symbol),
            ));
        }
    }
    for (pos, s) in &simops {
        if !observables.iter().any(|o| o.symbol == s.symbol) {
            return Err(SpecError::scope(
                *pos,
                format!("simop names unknown observable `{}`", s.symbol),
            ));
        }
    }
    Ok(ModelSpec {
        name,
        states,
        observables,
        ranges: ranges.into_iter().map(|(_, r)| r).collect(),
        simops: simops.into_iter().map(|(_, s)| s).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec_lang::SpecErrorKind;

    const BARYON: &str = r#"
model "baryon"
states where true
observable f(s) = 2*s + 2
range f where n >= 2 and n % 2 = 0
simop f = baryon(max=1000)
"#;

    #[test]
    fn parses_baryon() {
        let spec = parse_model(BARYON).unwrap();
        assert_eq!(spec.name, "baryon");
        assert_eq!(spec.observables.len(), 1);
        assert_eq!(spec.observables[0].expr.to_string(), "2 * s + 2");
        assert_eq!(spec.ranges[0].var, "n");
        assert_eq!(
            spec.simops[0].param("max"),
            Some(&Rational::from_integer(1000.into()))
        );
    }

    #[test]
    fn dangling_operator_is_a_syntax_error() {
        let err =
            parse_model("model \"x\"\nstates where true\nobservable f(s) = s <\n").unwrap_err();
        assert_eq!(err.kind, SpecErrorKind::Syntax);
        assert_eq!(err.pos.line, 3);
        assert_eq!(err.pos.col, 22);
    }

    #[test]
    fn duplicate_symbol() {
        let err = parse_model(
            "model \"x\"\nstates where true\nobservable f(s) = s\nobservable f(t) = t\n",
        )
        .unwrap_err();
        assert_eq!(err.kind, SpecErrorKind::Duplicate);
    }

    #[test]
    fn sort_and_scope_errors() {
        let err =
            parse_model("model \"x\"\nstates where s + 1\nobservable f(s) = s\n").unwrap_err();
        assert_eq!(err.kind, SpecErrorKind::Sort);
        let err = parse_model("model \"x\"\nstates where true\nobservable f(s) = t\n").unwrap_err();
        assert_eq!(err.kind, SpecErrorKind::Scope);
        let err = parse_model("model \"x\"\nstates where true\n").unwrap_err();
        assert_eq!(err.kind, SpecErrorKind::Missing);
    }

    #[test]
    fn expressions() {
        let e = parse_expr("if K(n) = 3 then J(n, 5*n) else n div 2 mod 7").unwrap();
        assert_eq!(e.to_string(), "if K(n) = 3 then J(n, 5 * n) else n / 2 % 7");
        assert!(parse_expr("K(1, 2)").is_err());
        assert!(parse_expr("1.5").is_err());
        assert!(parse_expr("a b").is_err());
    }
}
