use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use super::poly::Poly;
use super::sturm::{squarefree, SturmChain};
use super::ArithError;
use crate::encodings::{Interval, Rational};

/// A real algebraic number.
///
/// `Root` holds a squarefree primitive integer polynomial with exactly one
/// root in the open interval, and no root at either endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AlgebraicNumber {
    Rational(Rational),
    Root { poly: Poly, interval: Interval },
}

impl AlgebraicNumber {
    pub fn rational(q: Rational) -> Self {
        AlgebraicNumber::Rational(q)
    }

    /// The unique root of `poly` inside `interval`.
    ///
    /// The polynomial is reduced to its squarefree part first; a linear result
    /// collapses to the exact rational.
    pub fn root(poly: &Poly, interval: Interval) -> Result<Self, ArithError> {
        let sf = squarefree(poly)?;
        let n = SturmChain::new(&sf)?.count(interval.lo(), interval.hi())?;
        if n != 1 {
            return Err(ArithError::NotIsolating { roots: n, interval });
        }
        if sf.degree() == Some(1) {
            let c = sf.coeffs();
            return Ok(AlgebraicNumber::Rational(-&c[0] / &c[1]));
        }
        Ok(AlgebraicNumber::Root { poly: sf, interval })
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            AlgebraicNumber::Rational(q) => Some(q),
            AlgebraicNumber::Root { .. } => None,
        }
    }

    /// Interval of width at most `eps` around the number.
    ///
    /// Repeated calls on the same value with shrinking `eps` give nested results.
    pub fn refine(&self, eps: &Rational) -> Result<Interval, ArithError> {
        if !eps.is_positive() {
            return Err(ArithError::NonPositiveEps(eps.clone()));
        }
        match self {
            AlgebraicNumber::Rational(q) => {
                let half = eps / Rational::from_integer(2.into());
                Ok(Interval::new(q - &half, q + &half).expect("eps > 0"))
            }
            AlgebraicNumber::Root { poly, interval } => {
                Ok(halve_until(poly, interval.clone(), eps))
            }
        }
    }

    pub fn compare_rational(&self, q: &Rational) -> Ordering {
        match self {
            AlgebraicNumber::Rational(r) => r.cmp(q),
            AlgebraicNumber::Root { poly, interval } => {
                if q <= interval.lo() {
                    return Ordering::Greater;
                }
                if q >= interval.hi() {
                    return Ordering::Less;
                }
                let s = poly.sign_at(q);
                if s == 0 {
                    Ordering::Equal
                } else if s == poly.sign_at(interval.lo()) {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }

    /// Exact ordering of two algebraic numbers.
    pub fn value_cmp(&self, other: &AlgebraicNumber) -> Ordering {
        match (self, other) {
            (_, AlgebraicNumber::Rational(q)) => self.compare_rational(q),
            (AlgebraicNumber::Rational(q), _) => other.compare_rational(q).reverse(),
            (
                AlgebraicNumber::Root {
                    poly: pa,
                    interval: ia,
                },
                AlgebraicNumber::Root {
                    poly: pb,
                    interval: ib,
                },
            ) => {
                if ia.hi() <= ib.lo() {
                    return Ordering::Less;
                }
                if ib.hi() <= ia.lo() {
                    return Ordering::Greater;
                }
                let g = pa.gcd(pb);
                if g.degree().unwrap_or(0) >= 1 && g.sign_at(ia.lo()) != g.sign_at(ia.hi()) {
                    // the root of `pa` is a root of `pb`; equal iff it sits in `ib`
                    if self.compare_rational(ib.lo()) == Ordering::Greater
                        && self.compare_rational(ib.hi()) == Ordering::Less
                    {
                        return Ordering::Equal;
                    }
                }
                let (mut ia, mut ib) = (ia.clone(), ib.clone());
                loop {
                    ia = halve_until(
                        pa,
                        ia.clone(),
                        &(ia.width() / Rational::from_integer(2.into())),
                    );
                    ib = halve_until(
                        pb,
                        ib.clone(),
                        &(ib.width() / Rational::from_integer(2.into())),
                    );
                    if ia.hi() <= ib.lo() {
                        return Ordering::Less;
                    }
                    if ib.hi() <= ia.lo() {
                        return Ordering::Greater;
                    }
                }
            }
        }
    }

    pub fn value_eq(&self, other: &AlgebraicNumber) -> bool {
        self.value_cmp(other) == Ordering::Equal
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            AlgebraicNumber::Rational(q) => rational_to_f64(q),
            AlgebraicNumber::Root { .. } => {
                let iv = self
                    .refine(&Rational::new(BigInt::one(), BigInt::one() << 64))
                    .expect("positive eps");
                rational_to_f64(&iv.midpoint())
            }
        }
    }

    /// Enclosure `[t/10^k, (t+1)/10^k]` containing the number, decided exactly.
    pub fn decimal_enclosure(&self, digits: u32) -> (Rational, Rational) {
        let scale = Rational::from_integer(BigInt::from(10u32).pow(digits));
        let unit = scale.recip();
        let t = match self {
            AlgebraicNumber::Rational(q) => (q * &scale).floor().to_integer(),
            AlgebraicNumber::Root { .. } => {
                let iv = self
                    .refine(&(&unit / Rational::from_integer(2.into())))
                    .expect("positive eps");
                let t = (iv.lo() * &scale).floor().to_integer();
                let next = Rational::from_integer(&t + 1) / &scale;
                if self.compare_rational(&next) == Ordering::Less {
                    t
                } else {
                    t + 1
                }
            }
        };
        let lo = Rational::from_integer(t) / &scale;
        let hi = &lo + &unit;
        (lo, hi)
    }
}

fn halve_until(poly: &Poly, mut iv: Interval, eps: &Rational) -> Interval {
    let four = Rational::from_integer(4.into());
    let mut s_lo = poly.sign_at(iv.lo());
    while &iv.width() > eps {
        let mid = iv.midpoint();
        let s = poly.sign_at(&mid);
        iv = if s == 0 {
            let q = iv.width() / &four;
            let next = Interval::new(&mid - &q, &mid + &q).expect("positive width");
            s_lo = poly.sign_at(next.lo());
            next
        } else if s == s_lo {
            Interval::new(mid, iv.hi().clone()).expect("positive width")
        } else {
            Interval::new(iv.lo().clone(), mid).expect("positive width")
        };
    }
    iv
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    // scale to keep about 60 significant bits
    let n = q.numer();
    let d = q.denom();
    let shift = d.bits() as i64 - n.bits() as i64 + 60;
    let scaled = if shift >= 0 {
        (n << shift as usize).div_floor(d)
    } else {
        n.div_floor(&(d << (-shift) as usize))
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-shift as i32)
}

/// Render `x` (an exact multiple of `10^-digits`) in fixed-point notation.
pub fn format_fixed(x: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let t = (x * Rational::from_integer(scale.clone()))
        .round()
        .to_integer();
    let neg = t.is_negative();
    let (whole, frac) = t.abs().div_rem(&scale);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{whole}");
    }
    format!(
        "{sign}{whole}.{:0>width$}",
        frac.to_string(),
        width = digits as usize
    )
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraicNumber::Rational(q) => write!(f, "{q}"),
            AlgebraicNumber::Root { poly, interval } => write!(f, "root of {poly} in {interval}"),
        }
    }
}

impl From<Rational> for AlgebraicNumber {
    fn from(q: Rational) -> Self {
        AlgebraicNumber::Rational(q)
    }
}
