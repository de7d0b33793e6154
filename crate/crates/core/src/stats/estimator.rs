use num_traits::ToPrimitive;

use super::{bounds, StatsError};
use crate::encodings::{
    int_code, int_decode, interval_code, interval_decode, pair, pair_tuple, rat_code, rat_decode,
    unpair, unpair_tuple, Nat, Rational,
};
use crate::exact_arith::{AlgebraicNumber, Poly};

/// Leading tag of every endpoint descriptor.
pub const DESCRIPTOR_VERSION: u32 = 1;

/// `J(1, J(0, rat q))` for a rational, and
/// `J(1, J(1, J(J(d, J(int c_0, ..., int c_d)), ival)))` for a root.
pub fn encode_descriptor(a: &AlgebraicNumber) -> Nat {
    let body = match a {
        AlgebraicNumber::Rational(q) => pair(&Nat::from(0u8), &rat_code(q)),
        AlgebraicNumber::Root { poly, interval } => {
            let coeffs = poly
                .integer_coeffs()
                .expect("root polynomials are integral");
            let codes: Vec<Nat> = coeffs.iter().map(int_code).collect();
            let deg = Nat::from(coeffs.len() - 1);
            let p = pair(&deg, &pair_tuple(&codes).expect("nonempty"));
            pair(&Nat::from(1u8), &pair(&p, &interval_code(interval)))
        }
    };
    pair(&Nat::from(DESCRIPTOR_VERSION), &body)
}

pub fn decode_descriptor(code: &Nat) -> Result<AlgebraicNumber, StatsError> {
    let bad = |why: &str| StatsError::BadDescriptor(code.clone(), why.to_string());
    let (version, body) = unpair(code);
    if version != Nat::from(DESCRIPTOR_VERSION) {
        return Err(bad("unknown version"));
    }
    let (kind, rest) = unpair(&body);
    match kind.to_u8() {
        Some(0) => Ok(AlgebraicNumber::rational(rat_decode(&rest))),
        Some(1) => {
            let (p, iv) = unpair(&rest);
            let (deg, tuple) = unpair(&p);
            let deg = deg
                .to_usize()
                .filter(|&d| d < 4096)
                .ok_or_else(|| bad("degree too large"))?;
            let coeffs = unpair_tuple(&tuple, deg + 1).map_err(|e| bad(&e.to_string()))?;
            let poly = Poly::from_ints(coeffs.iter().map(int_decode));
            let interval = interval_decode(&iv).map_err(|e| bad(&e.to_string()))?;
            AlgebraicNumber::root(&poly, interval).map_err(|e| bad(&e.to_string()))
        }
        _ => Err(bad("unknown endpoint kind")),
    }
}

/// `J(r, s)` for the descriptors of the estimator's endpoints.
pub fn interval_estimate(m: u64, n: u64, alpha: &Rational) -> Result<Nat, StatsError> {
    let (r, s) = bounds(m, n, alpha)?;
    Ok(pair(&encode_descriptor(&r), &encode_descriptor(&s)))
}

pub fn decode_estimate(code: &Nat) -> Result<(AlgebraicNumber, AlgebraicNumber), StatsError> {
    let (r, s) = unpair(code);
    Ok((decode_descriptor(&r)?, decode_descriptor(&s)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn descriptor_layout() {
        let third = AlgebraicNumber::rational(q(1, 3));
        let code = encode_descriptor(&third);
        assert_eq!(
            code,
            pair(&Nat::from(1u8), &pair(&Nat::from(0u8), &rat_code(&q(1, 3))))
        );
        assert_eq!(decode_descriptor(&code).unwrap(), third);
    }

    #[test]
    fn estimate_round_trip() {
        let (r, s) = decode_estimate(&interval_estimate(3, 2, &q(1, 3)).unwrap()).unwrap();
        assert_eq!(r, AlgebraicNumber::rational(q(1, 3)));
        let AlgebraicNumber::Root { poly, interval } = &s else {
            panic!("{s:?}")
        };
        assert_eq!(poly, &Poly::from_ints([-2, 0, 0, 3]));
        assert!(interval.lo() >= &q(0, 1) && interval.hi() <= &q(1, 1));
        let (lo, hi) = s.decimal_enclosure(6);
        assert_eq!((lo, hi), (q(873_580, 1_000_000), q(873_581, 1_000_000)));

        let (r, s) = decode_estimate(&interval_estimate(0, 0, &q(1, 2)).unwrap()).unwrap();
        assert_eq!(
            (r.as_rational(), s.as_rational()),
            (Some(&q(0, 1)), Some(&q(1, 1)))
        );
        assert!(decode_descriptor(&Nat::from(0u8)).is_err());
    }
}
