use std::cmp::Ordering;

use num_traits::{One, Zero};
use proptest::prelude::*;

use cpm_core::encodings::{pair_u64, Rational};
use cpm_core::exact_arith::alg_compare;
use cpm_core::model_core::ObservationLog;
use cpm_core::stats::{
    binom_pmf, bounds, build_piecewise, decide, decode_estimate, interval_estimate, max_alpha,
    piecewise_tail, tail_prob,
};

fn q(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

fn unit_rational() -> impl Strategy<Value = Rational> {
    (1i64..10_000).prop_flat_map(|d| (0..=d).prop_map(move |n| q(n, d)))
}

fn alpha() -> impl Strategy<Value = Rational> {
    (1i64..64).prop_flat_map(|a| (a + 1..=64).prop_map(move |b| q(a, b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn pmf_sums_to_one(b in unit_rational()) {
        for i in 0..=20 {
            let total = (0..=i).fold(Rational::zero(), |acc, j| acc + binom_pmf(i, &b, j).unwrap());
            prop_assert_eq!(total, Rational::one());
        }
    }
}

proptest! {
    #[test]
    fn tail_is_a_probability(m in 0u64..15, n in 0u64..15, b in unit_rational()) {
        prop_assume!(n <= m);
        let p = tail_prob(m, n, &b).unwrap();
        prop_assert!(p >= Rational::zero() && p <= Rational::one());
    }

    #[test]
    fn piecewise_agrees_with_direct(m in 1u64..13, n in 0u64..13, b in unit_rational()) {
        prop_assume!(n <= m);
        prop_assert_eq!(piecewise_tail(m, n, &b).unwrap(), tail_prob(m, n, &b).unwrap());
    }

    #[test]
    fn piece_polynomials_hold_on_open_pieces(m in 1u64..10, n in 0u64..10, t in 1i64..1000) {
        prop_assume!(n <= m);
        let pw = build_piecewise(m, n).unwrap();
        let frac = q(t, 1000);
        for piece in &pw.pieces {
            let b = &piece.lo + (&piece.hi - &piece.lo) * &frac;
            prop_assert_eq!(piece.psi.eval(&b), tail_prob(m, n, &b).unwrap());
        }
    }

    #[test]
    fn observed_ratio_is_inside_the_estimate(m in 1u64..9, n in 0u64..9, a in alpha()) {
        prop_assume!(n <= m);
        let (r, s) = bounds(m, n, &a).unwrap();
        let x = q(n as i64, m as i64);
        prop_assert!(alg_compare(&r, &x) != Ordering::Greater);
        prop_assert!(alg_compare(&s, &x) != Ordering::Less);
        prop_assert!(r.value_cmp(&s) != Ordering::Greater);
    }

    #[test]
    fn estimate_codes_decode_to_the_bounds(m in 1u64..7, n in 0u64..7, a in alpha()) {
        prop_assume!(n <= m);
        let (r, s) = bounds(m, n, &a).unwrap();
        let (dr, ds) = decode_estimate(&interval_estimate(m, n, &a).unwrap()).unwrap();
        prop_assert!(dr.value_eq(&r) && ds.value_eq(&s));
    }

    #[test]
    fn rejection_is_strict(m in 0u64..12, n in 0u64..12, b in unit_rational()) {
        prop_assume!(n <= m);
        let p = tail_prob(m, n, &b).unwrap();
        prop_assume!(!p.is_zero() && p < Rational::one());
        let d = decide(m, n, &b, &p).unwrap();
        prop_assert!(!d.reject && d.at_threshold);
    }

    #[test]
    fn max_alpha_keeps_every_record(counts in prop::collection::vec((0u64..10, 0u64..10), 1..6), b in unit_rational()) {
        let log = ObservationLog::of("f", counts.iter().map(|&(m, n)| pair_u64(m.max(n), m.min(n))));
        let a = max_alpha(&log, &b).unwrap().unwrap();
        for &(m, n) in &counts {
            let p = tail_prob(m.max(n), m.min(n), &b).unwrap();
            prop_assert!(p >= a);
        }
    }
}
