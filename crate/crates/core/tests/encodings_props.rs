use num_bigint::BigInt;
use proptest::prelude::*;

use cpm_core::encodings::{
    discrete_code, height, int_code, int_decode, interval_code, interval_decode, pair, pair_tuple,
    pair_u64, rat_code, rat_decode, rect_code, rect_decode, seg_decode, sing_decode, unpair,
    unpair_tuple, Discrete, Interval, Nat, Rational, Rect,
};

fn rational() -> impl Strategy<Value = Rational> {
    (-100_000i64..100_000, 1i64..100_000).prop_map(|(a, b)| Rational::new(a.into(), b.into()))
}

fn interval() -> impl Strategy<Value = Interval> {
    (rational(), rational())
        .prop_filter("distinct endpoints", |(a, b)| a != b)
        .prop_map(|(a, b)| {
            if a < b {
                Interval::new(a, b).unwrap()
            } else {
                Interval::new(b, a).unwrap()
            }
        })
}

#[test]
fn pair_is_strictly_monotone() {
    for a in 0..100u64 {
        for b in 0..100u64 {
            assert!(pair_u64(a, b) < pair_u64(a + 1, b));
            assert!(pair_u64(a, b) < pair_u64(a, b + 1));
        }
    }
}

#[test]
fn small_codes_are_exhaustive() {
    // every n below the bound is hit exactly once by some (a, b)
    let mut seen = vec![false; 5000];
    for a in 0..100u64 {
        for b in 0..100u64 {
            let p = pair_u64(a, b);
            if p < Nat::from(5000u32) {
                let i: usize = p.try_into().unwrap();
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
    }
    assert!(seen.iter().all(|&x| x));
}

proptest! {
    #[test]
    fn pair_round_trips_on_large_inputs(a in any::<u128>(), b in any::<u128>()) {
        let (a, b) = (Nat::from(a), Nat::from(b));
        prop_assert_eq!(unpair(&pair(&a, &b)), (a, b));
    }

    #[test]
    fn tuples_nest_to_the_left(a in 0u64..10_000, b in 0u64..10_000, c in 0u64..10_000) {
        let (a, b, c) = (Nat::from(a), Nat::from(b), Nat::from(c));
        let t = pair_tuple(&[a.clone(), b.clone(), c.clone()]).unwrap();
        prop_assert_eq!(&t, &pair(&pair(&a, &b), &c));
        prop_assert_eq!(unpair_tuple(&t, 3).unwrap(), vec![a, b, c]);
    }

    #[test]
    fn int_round_trips(i in any::<i128>()) {
        let i = BigInt::from(i);
        prop_assert_eq!(int_decode(&int_code(&i)), i);
    }

    #[test]
    fn rat_round_trips(q in rational()) {
        prop_assert_eq!(rat_decode(&rat_code(&q)), q);
    }

    #[test]
    fn rat_codes_decode_and_reencode(n in 0u64..1_000_000) {
        let n = Nat::from(n);
        prop_assert_eq!(rat_code(&rat_decode(&n)), n);
    }

    #[test]
    fn intervals_and_rects_round_trip(ivs in prop::collection::vec(interval(), 1..4)) {
        let c = interval_code(&ivs[0]);
        prop_assert_eq!(interval_decode(&c).unwrap(), ivs[0].clone());
        let r = Rect::new(ivs.clone()).unwrap();
        prop_assert_eq!(rect_decode(&rect_code(&r), ivs.len()).unwrap(), r);
    }

    #[test]
    fn discrete_codes_round_trip(a in 0u64..1_000_000, k in 0u64..1_000_000) {
        let (a, k) = (Nat::from(a), Nat::from(k));
        prop_assert_eq!(sing_decode(&discrete_code(&Discrete::Sing(a.clone()))), Discrete::Sing(a.clone()));
        let seg = Discrete::Seg(a, k);
        prop_assert_eq!(seg_decode(&discrete_code(&seg)), seg);
    }

    #[test]
    fn height_bounds_numerator_and_denominator(q in rational()) {
        let h = height(&q);
        prop_assert!(Nat::from(q.numer().magnitude().clone()) <= h);
        prop_assert!(Nat::from(q.denom().magnitude().clone()) <= h);
    }
}
