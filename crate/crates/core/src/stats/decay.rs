use super::{check_alpha, check_b, decode_counts, tail_prob, StatsError};
use crate::encodings::{pair_u64, Nat, Rational};
use crate::model_core::{
    decay_model, Annotation, Budget, MeasuringOperation, Model, NatFn, NatPred, Observable,
    Outcome, StateSpace, Visit,
};
use crate::spec_lang::EvalError;

/// `(i, j)` with `j <= i` at position `i(i+1)/2 + j` of the triangular sweep.
pub fn sweep_state(index: u64) -> (u64, u64) {
    // largest i with i(i+1)/2 <= index
    let mut i = (((8.0 * index as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while i * (i + 1) / 2 > index {
        i -= 1;
    }
    while (i + 1) * (i + 2) / 2 <= index {
        i += 1;
    }
    (i, index - i * (i + 1) / 2)
}

pub fn sweep_index(i: u64, j: u64) -> u64 {
    i * (i + 1) / 2 + j
}

fn kept(s: &Nat, b: &Rational, alpha: &Rational) -> bool {
    match decode_counts(s) {
        Ok((m, n)) => tail_prob(m, n, b).is_ok_and(|p| &p >= alpha),
        Err(_) => false,
    }
}

/// The decay submodel on the counts `J(m, n)` with `P(m, n, b) >= alpha`.
///
/// States are visited along the triangular sweep, so `J(m, n)` appears within
/// the first `sweep_index(m, n) + 1` indices.
pub fn decay_restriction(alpha: &Rational, b: &Rational) -> Result<Model, StatsError> {
    check_alpha(alpha)?;
    check_b(b)?;
    let (a1, b1) = (alpha.clone(), b.clone());
    let visit = move |index: u64, _: &Budget| -> Result<Visit, EvalError> {
        let (i, j) = sweep_state(index);
        let p = tail_prob(i, j, &b1).expect("j <= i and b in [0, 1]");
        Ok(if p >= a1 {
            Visit::State(pair_u64(i, j))
        } else {
            Visit::Skip
        })
    };
    let (a2, b2) = (alpha.clone(), b.clone());
    let decider = NatPred::native(format!("P(K(n), L(n), {b}) >= {alpha}"), move |s, _| {
        Ok(kept(s, &b2, &a2))
    });
    let states = StateSpace::native(
        format!("decay sweep with P(i, j, {b}) >= {alpha}"),
        visit,
        Some(decider.clone()),
    );
    let f = Observable::new("f", NatFn::identity()).with_range(decider);
    let base = decay_model(b)?;
    let mut m = Model::new(
        format!("decay restricted, b = {b}, alpha = {alpha}"),
        states,
        vec![f],
    )?;
    let op = base.op("f").expect("decay carries its operation").clone();
    let (a3, b3) = (alpha.clone(), b.clone());
    m.ops.insert(
        "f".into(),
        MeasuringOperation::new(
            format!("{} kept when P >= {alpha}", op.description),
            move |seed| match op.run(seed) {
                Outcome::Result(r) if kept(&r, &b3, &a3) => Outcome::Result(r),
                _ => Outcome::Failure,
            },
        ),
    );
    let b4 = b.clone();
    m.annotation = Some(Annotation::new("q", move |s| {
        let (i, j) = decode_counts(s).ok()?;
        super::binom_pmf(i, &b4, j).ok()
    }));
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_core::enumerate_range;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn sweep() {
        assert_eq!(sweep_state(0), (0, 0));
        assert_eq!(sweep_state(65), (10, 10));
        for k in 0..2000 {
            let (i, j) = sweep_state(k);
            assert!(j <= i);
            assert_eq!(sweep_index(i, j), k);
        }
    }

    #[test]
    fn examples() {
        let budget = Budget::states(sweep_index(10, 10) + 1);
        let m = decay_restriction(&q(1, 2), &q(1, 1)).unwrap();
        let range = enumerate_range(&m, "f", &budget).unwrap();
        for i in 0..=10 {
            assert!(range.contains(&pair_u64(i, i)));
        }
        assert!(!range.contains(&pair_u64(3, 2)));
        let m = decay_restriction(&q(1, 3), &q(1, 3)).unwrap();
        assert!(enumerate_range(&m, "f", &budget)
            .unwrap()
            .contains(&pair_u64(3, 2)));
        assert_eq!(
            m.annotation.as_ref().unwrap().get(&pair_u64(3, 2)),
            Some(q(2, 9))
        );
        let m = decay_restriction(&q(2, 3), &q(1, 3)).unwrap();
        assert!(!enumerate_range(&m, "f", &budget)
            .unwrap()
            .contains(&pair_u64(3, 2)));
        assert_eq!(m.states.decides(&pair_u64(3, 2), 10), Some(false));
    }
}
