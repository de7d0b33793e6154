//! Bijective codes for pairs, tuples, integers, rationals, intervals,
//! rectangles and discrete basis elements.
//!
//! Every code is an arbitrary-precision nonnegative integer.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Nat = BigUint;
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("not a valid interval code: decodes to ({lo};{hi}) which is empty")]
    EmptyInterval { lo: Rational, hi: Rational },
    #[error("rectangle dimension must be at least 1")]
    ZeroDimension,
    #[error("tuple arity must be at least 1")]
    ZeroArity,
    #[error("cannot parse {what} from {text:?}")]
    Parse { what: &'static str, text: String },
}

/// Cantor pairing: `((a+b)^2 + 3a + b) / 2`.
pub fn pair(a: &Nat, b: &Nat) -> Nat {
    let s = a + b;
    (&s * &s + a * 3u32 + b) >> 1
}

/// Inverse of [`pair`], i.e. the projections `(K(n), L(n))`.
pub fn unpair(n: &Nat) -> (Nat, Nat) {
    let s: Nat = ((n * 8u32 + 1u32).sqrt() - 1u32) >> 1;
    let t = (&s * (&s + 1u32)) >> 1;
    let a = n - t;
    let b = s - &a;
    (a, b)
}

pub fn first(n: &Nat) -> Nat {
    unpair(n).0
}

pub fn second(n: &Nat) -> Nat {
    unpair(n).1
}

pub fn pair_u64(a: u64, b: u64) -> Nat {
    pair(&Nat::from(a), &Nat::from(b))
}

/// Left-nested tuple code: `J(a)=a`, `J(a,b,c)=J(J(a,b),c)`.
pub fn pair_tuple(items: &[Nat]) -> Result<Nat, EncodingError> {
    let (head, rest) = items.split_first().ok_or(EncodingError::ZeroArity)?;
    Ok(rest.iter().fold(head.clone(), |acc, x| pair(&acc, x)))
}

pub fn unpair_tuple(n: &Nat, arity: usize) -> Result<Vec<Nat>, EncodingError> {
    if arity == 0 {
        return Err(EncodingError::ZeroArity);
    }
    let mut out = Vec::with_capacity(arity);
    let mut cur = n.clone();
    for _ in 1..arity {
        let (a, b) = unpair(&cur);
        out.push(b);
        cur = a;
    }
    out.push(cur);
    out.reverse();
    Ok(out)
}

pub fn int_code(i: &BigInt) -> Nat {
    let m = i.magnitude() * 2u32;
    if i.is_negative() {
        m - 1u32
    } else {
        m
    }
}

pub fn int_decode(n: &Nat) -> BigInt {
    let (q, r) = n.div_rem(&Nat::from(2u32));
    if r.is_zero() {
        BigInt::from(q)
    } else {
        -BigInt::from(q) - 1
    }
}

pub fn rat_code(q: &Rational) -> Nat {
    if q.is_zero() {
        return Nat::zero();
    }
    let mut inner = Nat::one();
    for (p, e) in factorize(&q.numer().magnitude().clone()) {
        inner *= p.pow(2 * e);
    }
    for (p, e) in factorize(&q.denom().magnitude().clone()) {
        inner *= p.pow(2 * e - 1);
    }
    let signed = BigInt::from_biguint(q.numer().sign(), inner);
    int_code(&signed)
}

pub fn rat_decode(n: &Nat) -> Rational {
    let inner = int_decode(n);
    if inner.is_zero() {
        return Rational::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (p, e) in factorize(inner.magnitude()) {
        let p = BigInt::from(p);
        if e % 2 == 0 {
            num *= p.pow(e / 2);
        } else {
            den *= p.pow(e.div_ceil(2));
        }
    }
    if inner.is_negative() {
        num = -num;
    }
    Rational::new(num, den)
}

/// An open rational interval `(lo;hi)` with `lo < hi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, EncodingError> {
        if lo < hi {
            Ok(Interval { lo, hi })
        } else {
            Err(EncodingError::EmptyInterval { lo, hi })
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo < x && x < &self.hi
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        Interval::new(lo, hi).ok()
    }

    pub fn widen(&self, margin: &Rational) -> Interval {
        Interval {
            lo: &self.lo - margin,
            hi: &self.hi + margin,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};{})", self.lo, self.hi)
    }
}

impl FromStr for Interval {
    type Err = EncodingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || EncodingError::Parse {
            what: "interval",
            text: s.to_string(),
        };
        let body = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(err)?;
        let (a, b) = body.split_once(';').ok_or_else(err)?;
        Interval::new(parse_rational(a)?, parse_rational(b)?)
    }
}

pub fn interval_code(iv: &Interval) -> Nat {
    pair(&rat_code(&iv.lo), &rat_code(&iv.hi))
}

pub fn interval_decode(n: &Nat) -> Result<Interval, EncodingError> {
    let (a, b) = unpair(n);
    Interval::new(rat_decode(&a), rat_decode(&b))
}

/// An open rectangle: a product of `d >= 1` open rational intervals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rect(Vec<Interval>);

impl Rect {
    pub fn new(dims: Vec<Interval>) -> Result<Self, EncodingError> {
        if dims.is_empty() {
            return Err(EncodingError::ZeroDimension);
        }
        Ok(Rect(dims))
    }

    pub fn dims(&self) -> &[Interval] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_subset_of(&self, other: &Rect) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a.is_subset_of(b))
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        self.dim() == p.len() && self.0.iter().zip(p).all(|(iv, x)| iv.contains(x))
    }

    pub fn intersect(&self, other: &Rect) -> Option<Rect> {
        if self.dim() != other.dim() {
            return None;
        }
        let dims: Option<Vec<_>> = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.intersect(b))
            .collect();
        dims.map(Rect)
    }

    pub fn widen(&self, margin: &Rational) -> Rect {
        Rect(self.0.iter().map(|iv| iv.widen(margin)).collect())
    }

    /// Concatenate two rectangles into their product.
    pub fn product(&self, other: &Rect) -> Rect {
        let mut dims = self.0.clone();
        dims.extend(other.0.iter().cloned());
        Rect(dims)
    }
}

impl From<Interval> for Rect {
    fn from(iv: Interval) -> Self {
        Rect(vec![iv])
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, iv) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

impl FromStr for Rect {
    type Err = EncodingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let dims: Result<Vec<Interval>, _> = s.split('x').map(str::parse).collect();
        Rect::new(dims?)
    }
}

pub fn rect_code(r: &Rect) -> Nat {
    let codes: Vec<Nat> = r.0.iter().map(interval_code).collect();
    pair_tuple(&codes).expect("rectangles are nonempty")
}

pub fn rect_decode(n: &Nat, d: usize) -> Result<Rect, EncodingError> {
    if d == 0 {
        return Err(EncodingError::ZeroDimension);
    }
    let dims: Result<Vec<_>, _> = unpair_tuple(n, d)?.iter().map(interval_decode).collect();
    Rect::new(dims?)
}

/// Basis elements of the discrete space of nonnegative integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Discrete {
    /// The singleton `{a}`.
    Sing(Nat),
    /// The segment `{a, a+1, ..., a+k}`.
    Seg(Nat, Nat),
}

impl Discrete {
    pub fn lo(&self) -> &Nat {
        match self {
            Discrete::Sing(a) | Discrete::Seg(a, _) => a,
        }
    }

    pub fn hi(&self) -> Nat {
        match self {
            Discrete::Sing(a) => a.clone(),
            Discrete::Seg(a, k) => a + k,
        }
    }

    pub fn contains(&self, x: &Nat) -> bool {
        self.lo() <= x && *x <= self.hi()
    }

    pub fn is_subset_of(&self, other: &Discrete) -> bool {
        other.lo() <= self.lo() && self.hi() <= other.hi()
    }
}

pub fn sing_code(a: &Nat) -> Nat {
    a.clone()
}

pub fn seg_code(a: &Nat, k: &Nat) -> Nat {
    pair(a, k)
}

pub fn discrete_code(e: &Discrete) -> Nat {
    match e {
        Discrete::Sing(a) => sing_code(a),
        Discrete::Seg(a, k) => seg_code(a, k),
    }
}

pub fn sing_decode(n: &Nat) -> Discrete {
    Discrete::Sing(n.clone())
}

pub fn seg_decode(n: &Nat) -> Discrete {
    let (a, k) = unpair(n);
    Discrete::Seg(a, k)
}

/// Parse `a`, `-a`, `a/b` or a terminating decimal such as `-0.125`.
pub fn parse_rational(s: &str) -> Result<Rational, EncodingError> {
    let t = s.trim();
    let err = || EncodingError::Parse {
        what: "rational",
        text: s.to_string(),
    };
    if let Some((a, b)) = t.split_once('/') {
        let num: BigInt = a.trim().parse().map_err(|_| err())?;
        let den: BigInt = b.trim().parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int_part, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let negative = int_part.starts_with('-');
        let whole: BigInt = match int_part.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            w => w.parse().map_err(|_| err())?,
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let f: BigInt = frac.parse().map_err(|_| err())?;
        let mag = Rational::new(whole * &scale + f, scale);
        return Ok(if negative { -mag } else { mag });
    }
    t.parse::<BigInt>()
        .map(Rational::from_integer)
        .map_err(|_| err())
}

pub fn parse_nat(s: &str) -> Result<Nat, EncodingError> {
    s.trim().parse().map_err(|_| EncodingError::Parse {
        what: "nonnegative integer",
        text: s.to_string(),
    })
}

pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

/// Prime factorization as `(prime, exponent)` pairs in increasing order.
///
/// Trial division by small primes, then Pollard rho on the cofactor.
pub fn factorize(n: &Nat) -> Vec<(Nat, u32)> {
    let mut primes: Vec<Nat> = Vec::new();
    if n.is_zero() || n.is_one() {
        return Vec::new();
    }
    let mut rest = n.clone();
    let mut d = 2u32;
    while d < 1000 && !rest.is_one() {
        while (&rest % d).is_zero() {
            rest /= d;
            primes.push(Nat::from(d));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    split_big(rest, &mut primes);
    primes.sort();
    let mut out: Vec<(Nat, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

fn split_big(n: Nat, out: &mut Vec<Nat>) {
    if n.is_one() {
        return;
    }
    if let Some(small) = n.to_u64() {
        let mut found = Vec::new();
        factor_u64(small, &mut found);
        out.extend(found.into_iter().map(Nat::from));
        return;
    }
    if is_probable_prime(&n) {
        out.push(n);
        return;
    }
    let d = pollard_rho_big(&n);
    split_big(&n / &d, out);
    split_big(d, out);
}

/// Miller-Rabin with the first twelve primes as bases; deterministic below 3.3e24.
fn is_probable_prime(n: &Nat) -> bool {
    let one = Nat::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = Nat::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho_big(n: &Nat) -> Nat {
    let mut c = Nat::one();
    loop {
        let f = |x: &Nat| (x * x + &c) % n;
        let (mut x, mut y) = (Nat::from(2u32), Nat::from(2u32));
        let mut d = Nat::one();
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1u32;
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn factor_u64(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    for p in [2u64, 3, 5, 7, 11, 13] {
        if n % p == 0 {
            out.push(p);
            factor_u64(n / p, out);
            return;
        }
    }
    let d = pollard_rho(n);
    factor_u64(d, out);
    factor_u64(n / d, out);
}

/// Height of a rational: `max(|num|, den)`.
pub fn height(q: &Rational) -> Nat {
    q.numer().magnitude().max(q.denom().magnitude()).clone()
}

pub(crate) fn sign_of(x: &BigInt) -> i8 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}
