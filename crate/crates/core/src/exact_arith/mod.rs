//! Exact polynomial arithmetic, Sturm root isolation and algebraic numbers.

mod algebraic;
mod poly;
mod sturm;

use thiserror::Error;

use crate::encodings::{Interval, Rational};

pub use algebraic::{format_fixed, rational_to_f64, AlgebraicNumber};
pub use poly::Poly;
pub use sturm::{count_roots, isolate_roots, squarefree, SturmChain};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("the zero polynomial has no squarefree part or root count")]
    ZeroPolynomial,
    #[error("empty range ({lo}, {hi})")]
    EmptyRange { lo: Rational, hi: Rational },
    #[error("interval endpoint {0} is a root; perturb it")]
    EndpointRoot(Rational),
    #[error("interval {interval} holds {roots} roots, expected exactly one")]
    NotIsolating { roots: usize, interval: Interval },
    #[error("refinement tolerance must be positive, got {0}")]
    NonPositiveEps(Rational),
}

pub fn refine_root(a: &AlgebraicNumber, eps: &Rational) -> Result<Interval, ArithError> {
    a.refine(eps)
}

pub fn alg_compare(a: &AlgebraicNumber, q: &Rational) -> std::cmp::Ordering {
    a.compare_rational(q)
}
