use std::cmp::Ordering;

use num_traits::{One, Zero};

use super::{binom_pmf, binomial, check_alpha, tail_prob, tail_set, StatsError};
use crate::encodings::Rational;
use crate::exact_arith::{isolate_roots, squarefree, AlgebraicNumber, Poly};

/// `psi` agrees with `P(m, n, .)` on the open interval `(lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub lo: Rational,
    pub hi: Rational,
    /// Outcomes counted in the tail on this piece.
    pub tail: Vec<u64>,
    pub psi: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewisePoly {
    pub m: u64,
    pub n: u64,
    pub pieces: Vec<Piece>,
    /// `P(m, n, i/(2m))` for `i = 0..=2m`.
    pub endpoint_values: Vec<Rational>,
}

fn q(a: u64, b: u64) -> Rational {
    Rational::new(a.into(), b.into())
}

fn pmf_poly(m: u64, k: u64) -> Poly {
    let c = Poly::constant(Rational::from_integer(binomial(m, k)));
    let one_minus_x = Poly::from_ints([1, -1]);
    &(&c * &Poly::x().pow(k as u32)) * &one_minus_x.pow((m - k) as u32)
}

pub fn build_piecewise(m: u64, n: u64) -> Result<PiecewisePoly, StatsError> {
    if m == 0 {
        return Err(StatsError::ZeroTrials);
    }
    if n > m {
        return Err(StatsError::NOutOfRange { m, n });
    }
    let k = 2 * m;
    let pieces = (0..k)
        .map(|i| {
            let tail = tail_set(m, n, &q(2 * i + 1, 2 * k));
            let psi = tail
                .iter()
                .fold(Poly::zero(), |acc, &j| &acc + &pmf_poly(m, j));
            Piece {
                lo: q(i, k),
                hi: q(i + 1, k),
                tail,
                psi,
            }
        })
        .collect();
    let endpoint_values = (0..=k)
        .map(|i| tail_prob(m, n, &q(i, k)))
        .collect::<Result<_, _>>()?;
    Ok(PiecewisePoly {
        m,
        n,
        pieces,
        endpoint_values,
    })
}

impl PiecewisePoly {
    pub fn breakpoint(&self, i: usize) -> Rational {
        q(i as u64, 2 * self.m)
    }

    pub fn eval(&self, b: &Rational) -> Rational {
        let k = Rational::from_integer((2 * self.m).into());
        let t = b * &k;
        if t.is_integer() {
            let i = t.to_integer();
            return self.endpoint_values[usize::try_from(i).expect("b in [0, 1]")].clone();
        }
        let i = usize::try_from(t.floor().to_integer()).expect("b in [0, 1]");
        self.pieces[i].psi.eval(b)
    }

    /// Interior breakpoints where a one-sided limit differs from the value.
    pub fn discontinuities(&self) -> Vec<Rational> {
        (1..self.pieces.len())
            .filter_map(|i| {
                let x = self.breakpoint(i);
                let v = &self.endpoint_values[i];
                let left = self.pieces[i - 1].psi.eval(&x);
                let right = self.pieces[i].psi.eval(&x);
                (&left != v || &right != v).then_some(x)
            })
            .collect()
    }
}

/// Sign of `p` just right of `x` (`dir = 1`) or just left of it (`dir = -1`).
fn sign_near(p: &Poly, x: &Rational, dir: i8) -> i8 {
    let mut d = p.clone();
    let mut flip = 1;
    while !d.is_zero() {
        let s = d.sign_at(x);
        if s != 0 {
            return s * flip;
        }
        d = d.derivative();
        flip *= dir;
    }
    0
}

/// Candidate extreme points of `{b in piece : psi(b) >= alpha}`.
fn piece_candidates(piece: &Piece, alpha: &Rational) -> Result<Vec<AlgebraicNumber>, StatsError> {
    let g = &piece.psi - &Poly::constant(alpha.clone());
    let (lo, hi) = (&piece.lo, &piece.hi);
    if g.is_zero() {
        return Ok(vec![
            AlgebraicNumber::rational(lo.clone()),
            AlgebraicNumber::rational(hi.clone()),
        ]);
    }
    let mut out = Vec::new();
    let mut sf = squarefree(&g)?;
    for e in [lo, hi] {
        if sf.eval(e).is_zero() {
            sf = sf.div_rem(&Poly::linear_root(e)).0;
        }
    }
    let roots = if sf.degree().unwrap_or(0) >= 1 {
        isolate_roots(&sf, lo, hi)?
    } else {
        Vec::new()
    };
    for iv in &roots {
        out.push(AlgebraicNumber::root(&sf, iv.clone())?);
    }
    if sign_near(&g, lo, 1) > 0 {
        out.push(AlgebraicNumber::rational(lo.clone()));
    }
    if sign_near(&g, hi, -1) > 0 {
        out.push(AlgebraicNumber::rational(hi.clone()));
    }
    Ok(out)
}

/// Greatest lower and least upper bound of `{b in [0, 1] : P(m, n, b) >= alpha}`.
pub fn bounds(
    m: u64,
    n: u64,
    alpha: &Rational,
) -> Result<(AlgebraicNumber, AlgebraicNumber), StatsError> {
    check_alpha(alpha)?;
    if n > m {
        return Err(StatsError::NOutOfRange { m, n });
    }
    if m == 0 {
        return Ok((
            AlgebraicNumber::rational(Rational::zero()),
            AlgebraicNumber::rational(Rational::one()),
        ));
    }
    let pw = build_piecewise(m, n)?;
    let mut cands = Vec::new();
    for (i, v) in pw.endpoint_values.iter().enumerate() {
        if v >= alpha {
            cands.push(AlgebraicNumber::rational(pw.breakpoint(i)));
        }
    }
    for piece in &pw.pieces {
        cands.extend(piece_candidates(piece, alpha)?);
    }
    let pick = |want: Ordering| {
        cands
            .iter()
            .skip(1)
            .fold(
                &cands[0],
                |best, c| if c.value_cmp(best) == want { c } else { best },
            )
            .clone()
    };
    // P(m, n, n/m) = 1, so the breakpoint n/m is always a candidate
    Ok((pick(Ordering::Less), pick(Ordering::Greater)))
}

/// `P(m, n, b)` evaluated via the piecewise form at `b` in `[0, 1]`.
pub fn piecewise_tail(m: u64, n: u64, b: &Rational) -> Result<Rational, StatsError> {
    if m == 0 {
        return binom_pmf(0, b, 0);
    }
    Ok(build_piecewise(m, n)?.eval(b))
}
