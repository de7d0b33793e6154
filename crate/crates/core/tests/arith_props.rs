use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use cpm_core::encodings::{Interval, Rational};
use cpm_core::exact_arith::{
    alg_compare, count_roots, isolate_roots, refine_root, squarefree, AlgebraicNumber, Poly,
};

fn q(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

fn int_poly() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-6i64..=6, 2..=7)
        .prop_filter("nonconstant", |c| c.iter().skip(1).any(|&x| x != 0))
}

/// Bound on root magnitudes, plus one.
fn cauchy(p: &Poly) -> Rational {
    let c = p.coeffs();
    let lead = c.last().unwrap().abs();
    let m = c[..c.len() - 1]
        .iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(Rational::zero);
    m / lead + Rational::from_integer(2.into())
}

/// All irrational or rational roots of `p` as algebraic numbers.
fn roots(p: &Poly) -> Vec<AlgebraicNumber> {
    let sf = squarefree(p).unwrap();
    let r = cauchy(&sf) + q(1, 7919);
    isolate_roots(&sf, &-r.clone(), &r)
        .unwrap()
        .into_iter()
        .map(|iv| AlgebraicNumber::root(&sf, iv).unwrap())
        .collect()
}

proptest! {
    #[test]
    fn isolation_matches_counting(c in int_poly()) {
        let p = squarefree(&Poly::from_ints(c)).unwrap();
        let r = cauchy(&p) + q(1, 7919);
        let lo = -r.clone();
        prop_assume!(!p.eval(&lo).is_zero() && !p.eval(&r).is_zero());
        let ivs = isolate_roots(&p, &lo, &r).unwrap();
        let total = count_roots(&p, &lo, &r).unwrap();
        prop_assert_eq!(ivs.len(), total);
        let mut per = 0;
        for iv in &ivs {
            per += count_roots(&p, iv.lo(), iv.hi()).unwrap();
            prop_assert!(p.sign_at(iv.lo()) * p.sign_at(iv.hi()) < 0, "no sign change on {}", iv);
        }
        prop_assert_eq!(per, total);
    }

    #[test]
    fn refinement_is_nested(c in int_poly(), k1 in 1u32..20, extra in 1u32..20) {
        for a in roots(&Poly::from_ints(c)) {
            let e1 = Rational::new(1.into(), BigInt::from(2).pow(k1));
            let e2 = Rational::new(1.into(), BigInt::from(2).pow(k1 + extra));
            let i1 = refine_root(&a, &e1).unwrap();
            let i2 = refine_root(&a, &e2).unwrap();
            prop_assert!(i2.lo() >= i1.lo() && i2.hi() <= i1.hi());
            prop_assert!(i2.width() <= e2);
        }
    }

    #[test]
    fn compare_agrees_with_fine_enclosures(c in int_poly(), num in -4000i64..4000, den in 1i64..1000) {
        let x = q(num, den);
        let eps = Rational::new(1.into(), BigInt::from(10).pow(12));
        for a in roots(&Poly::from_ints(c)) {
            let got = alg_compare(&a, &x);
            let iv: Interval = refine_root(&a, &eps).unwrap();
            if iv.hi() <= &x && got != Ordering::Equal {
                prop_assert_eq!(got, Ordering::Less);
            } else if iv.lo() >= &x && got != Ordering::Equal {
                prop_assert_eq!(got, Ordering::Greater);
            }
            if got == Ordering::Equal {
                prop_assert_eq!(a.as_rational(), Some(&x));
            }
        }
    }

    #[test]
    fn horner_matches_monomial_sum(c in prop::collection::vec(-50i64..50, 1..9), num in -30i64..30, den in 1i64..30) {
        let p = Poly::from_ints(c.clone());
        let x = q(num, den);
        let mut brute = Rational::zero();
        let mut xp = Rational::from_integer(1.into());
        for &ci in &c {
            brute += Rational::from_integer(ci.into()) * &xp;
            xp *= &x;
        }
        prop_assert_eq!(p.eval(&x), brute);
    }

    #[test]
    fn roots_are_sorted_by_value_cmp(c in int_poly()) {
        let rs = roots(&Poly::from_ints(c));
        for w in rs.windows(2) {
            prop_assert_eq!(w[0].value_cmp(&w[1]), Ordering::Less);
        }
    }
}
