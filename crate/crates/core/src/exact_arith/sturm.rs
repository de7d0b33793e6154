use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::Poly;
use super::ArithError;
use crate::encodings::{sign_of, Interval, Rational};

/// `p / gcd(p, p')` with coprime integer coefficients and positive leading coefficient.
pub fn squarefree(p: &Poly) -> Result<Poly, ArithError> {
    if p.is_zero() {
        return Err(ArithError::ZeroPolynomial);
    }
    let g = p.gcd(&p.derivative());
    Ok(p.div_rem(&g).0.primitive())
}

/// Positive multiple of `p` with integer coefficients (sign preserved).
fn positive_integer_multiple(p: &Poly) -> Vec<BigInt> {
    let lcm = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|c| c / &g).collect()
}

/// Sign of an integer polynomial at `x = num/den`, computed without fractions.
pub(crate) fn int_sign_at(c: &[BigInt], x: &Rational) -> i8 {
    let Some((last, rest)) = c.split_last() else {
        return 0;
    };
    let (p, q) = (x.numer(), x.denom());
    let mut qpow = BigInt::one();
    let mut h = last.clone();
    for ci in rest.iter().rev() {
        qpow *= q;
        h = h * p + ci * &qpow;
    }
    sign_of(&h)
}

/// A Sturm chain, stored as positive integer multiples of each member.
#[derive(Debug, Clone)]
pub struct SturmChain {
    seq: Vec<Vec<BigInt>>,
}

impl SturmChain {
    pub fn new(p: &Poly) -> Result<Self, ArithError> {
        if p.is_zero() {
            return Err(ArithError::ZeroPolynomial);
        }
        let mut polys = vec![p.clone(), p.derivative()];
        while !polys.last().unwrap().is_zero() {
            let n = polys.len();
            let r = polys[n - 2].div_rem(&polys[n - 1]).1;
            polys.push(-&r);
        }
        polys.pop();
        Ok(SturmChain {
            seq: polys.iter().map(positive_integer_multiple).collect(),
        })
    }

    pub fn sign_at(&self, x: &Rational) -> i8 {
        int_sign_at(&self.seq[0], x)
    }

    fn variations(&self, x: &Rational) -> usize {
        let mut count = 0;
        let mut prev = 0i8;
        for c in &self.seq {
            let s = int_sign_at(c, x);
            if s != 0 {
                if prev != 0 && s != prev {
                    count += 1;
                }
                prev = s;
            }
        }
        count
    }

    /// Distinct roots in the open interval `(lo, hi)`; endpoints must not be roots.
    pub fn count(&self, lo: &Rational, hi: &Rational) -> Result<usize, ArithError> {
        if lo >= hi {
            return Err(ArithError::EmptyRange {
                lo: lo.clone(),
                hi: hi.clone(),
            });
        }
        for e in [lo, hi] {
            if self.sign_at(e) == 0 {
                return Err(ArithError::EndpointRoot(e.clone()));
            }
        }
        Ok(self.variations(lo) - self.variations(hi))
    }
}

pub fn count_roots(p: &Poly, lo: &Rational, hi: &Rational) -> Result<usize, ArithError> {
    SturmChain::new(p)?.count(lo, hi)
}

/// Disjoint isolating intervals for every root in `(lo, hi)`, ordered low to high.
pub fn isolate_roots(p: &Poly, lo: &Rational, hi: &Rational) -> Result<Vec<Interval>, ArithError> {
    let chain = SturmChain::new(p)?;
    let total = chain.count(lo, hi)?;
    let mut out = Vec::with_capacity(total);
    bisect(&chain, lo.clone(), hi.clone(), total, &mut out);
    Ok(out)
}

fn bisect(chain: &SturmChain, lo: Rational, hi: Rational, n: usize, out: &mut Vec<Interval>) {
    match n {
        0 => {}
        1 => out.push(Interval::new(lo, hi).expect("bisection keeps lo < hi")),
        _ => {
            let mid = split_point(chain, &lo, &hi);
            let left = chain.count(&lo, &mid).expect("split point is not a root");
            bisect(chain, lo, mid.clone(), left, out);
            bisect(chain, mid, hi, n - left, out);
        }
    }
}

/// The midpoint, nudged by `w/2^k` when it happens to be a root.
pub(crate) fn split_point(chain: &SturmChain, lo: &Rational, hi: &Rational) -> Rational {
    let two = Rational::from_integer(2.into());
    let w = hi - lo;
    let mid = (lo + hi) / &two;
    if chain.sign_at(&mid) != 0 {
        return mid;
    }
    let mut step = &w / Rational::from_integer(4.into());
    loop {
        let cand = &mid + &step;
        if chain.sign_at(&cand) != 0 {
            return cand;
        }
        step /= &two;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(
            squarefree(&Poly::from_ints([1, -2, 1])).unwrap(),
            Poly::from_ints([-1, 1])
        );
        assert_eq!(
            squarefree(&Poly::from_ints([-2, 0, 1])).unwrap(),
            Poly::from_ints([-2, 0, 1])
        );
        assert_eq!(
            squarefree(&Poly::from_ints([-2, 0, 0, 3])).unwrap(),
            Poly::from_ints([-2, 0, 0, 3])
        );
        assert_eq!(squarefree(&Poly::zero()), Err(ArithError::ZeroPolynomial));
        // (x-1)^2 (x+2)^3 * (-5)
        let p = &(&Poly::from_ints([-1, 1]).pow(2) * &Poly::from_ints([2, 1]).pow(3))
            * &Poly::from_ints([-5]);
        assert_eq!(squarefree(&p).unwrap(), Poly::from_ints([-2, 1, 1]));
    }

    #[test]
    fn counting() {
        let cubic = Poly::from_ints([-2, 0, 0, 3]);
        assert_eq!(count_roots(&cubic, &q(0, 1), &q(1, 1)).unwrap(), 1);
        assert_eq!(
            count_roots(&Poly::from_ints([1, 0, 1]), &q(-10, 1), &q(10, 1)).unwrap(),
            0
        );
        assert_eq!(
            count_roots(&Poly::from_ints([-2, 0, 1]), &q(-2, 1), &q(2, 1)).unwrap(),
            2
        );
        assert_eq!(
            count_roots(&Poly::from_ints([-1, 1]), &q(1, 1), &q(2, 1)),
            Err(ArithError::EndpointRoot(q(1, 1)))
        );
        assert!(count_roots(&cubic, &q(1, 1), &q(1, 1)).is_err());
    }

    #[test]
    fn isolation() {
        let ivs = isolate_roots(&Poly::from_ints([-2, 0, 1]), &q(-2, 1), &q(2, 1)).unwrap();
        assert_eq!(ivs.len(), 2);
        assert!(ivs[0].hi() <= ivs[1].lo());
        assert!(ivs[0].contains(&q(-1414, 1000)) || ivs[0].lo() < &q(-1415, 1000));
        assert!(
            isolate_roots(&Poly::from_ints([1, 0, 1]), &q(-1, 1), &q(1, 1))
                .unwrap()
                .is_empty()
        );
        // roots at 0, 1/2 and 1 straddle every bisection midpoint
        let p = &(&Poly::x() * &Poly::from_ints([-1, 2])) * &Poly::from_ints([-1, 1]);
        let ivs = isolate_roots(&p, &q(-1, 1), &q(3, 1)).unwrap();
        assert_eq!(ivs.len(), 3);
        for (iv, r) in ivs.iter().zip([q(0, 1), q(1, 2), q(1, 1)]) {
            assert!(iv.contains(&r), "{iv} should contain {r}");
        }
    }
}
