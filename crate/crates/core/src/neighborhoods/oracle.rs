use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use super::{BasisDescriptor, NeighborhoodError};
use crate::encodings::{rect_code, sing_code, Interval, Nat, Rational, Rect};
use crate::exact_arith::AlgebraicNumber;
use crate::spec_lang::{eval_interval, RealFn};

pub(crate) fn two_pow_neg(k: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

/// An indexable stream of basis codes, nested by construction.
#[derive(Clone)]
pub struct NestedOracle {
    pub basis: BasisDescriptor,
    stream: Arc<dyn Fn(u64) -> Nat + Send + Sync>,
    /// The point the oracle presents, when it is known exactly.
    pub point: Option<Vec<Rational>>,
}

impl NestedOracle {
    /// `phi(i)` is the cube of half-width `2^-i` centred at `point`.
    pub fn around_point(point: &[Rational]) -> Self {
        let p = point.to_vec();
        NestedOracle {
            basis: BasisDescriptor::Euclidean(point.len()),
            stream: Arc::new(move |i| {
                let r = two_pow_neg(i);
                let dims = p
                    .iter()
                    .map(|x| Interval::new(x - &r, x + &r).expect("positive radius"))
                    .collect();
                rect_code(&Rect::new(dims).expect("nonempty point"))
            }),
            point: Some(point.to_vec()),
        }
    }

    /// Coordinates given as algebraic numbers; irrational ones are refined by halving.
    pub fn from_algebraic(coords: &[AlgebraicNumber]) -> Self {
        let cs = coords.to_vec();
        let point = coords
            .iter()
            .map(|c| c.as_rational().cloned())
            .collect::<Option<Vec<_>>>();
        NestedOracle {
            basis: BasisDescriptor::Euclidean(coords.len()),
            stream: Arc::new(move |i| {
                let r = two_pow_neg(i);
                let dims = cs
                    .iter()
                    .map(|c| match c {
                        AlgebraicNumber::Rational(x) => {
                            Interval::new(x - &r, x + &r).expect("positive radius")
                        }
                        AlgebraicNumber::Root { .. } => c.refine(&r).expect("positive eps"),
                    })
                    .collect();
                rect_code(&Rect::new(dims).expect("nonempty point"))
            }),
            point,
        }
    }

    /// The constant oracle `{n}` in the discrete singleton basis.
    pub fn singleton(n: &Nat) -> Self {
        let code = sing_code(n);
        NestedOracle {
            basis: BasisDescriptor::DiscreteSing,
            stream: Arc::new(move |_| code.clone()),
            point: None,
        }
    }

    /// A finite prefix; indices past the end repeat the last code.
    pub fn from_codes(basis: BasisDescriptor, codes: Vec<Nat>) -> Self {
        assert!(!codes.is_empty(), "an oracle needs at least one code");
        NestedOracle {
            basis,
            stream: Arc::new(move |i| codes[(i as usize).min(codes.len() - 1)].clone()),
            point: None,
        }
    }

    pub fn code(&self, i: u64) -> Nat {
        (self.stream)(i)
    }

    pub fn prefix(&self, len: u64) -> Vec<Nat> {
        (0..len).map(|i| self.code(i)).collect()
    }
}

impl fmt::Debug for NestedOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NestedOracle")
            .field("basis", &self.basis)
            .field("point", &self.point)
            .finish_non_exhaustive()
    }
}

/// A real map applied to oracle inputs by interval evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleMachine {
    pub f: RealFn,
    pub max_steps: u64,
}

impl OracleMachine {
    pub fn new(f: RealFn, max_steps: u64) -> Self {
        OracleMachine { f, max_steps }
    }

    /// Output box for input box `c` at step `m`, ignoring the step cap.
    pub fn output(&self, c: &Rect, m: u64) -> Result<Rect, NeighborhoodError> {
        Ok(eval_interval(&self.f, c, m.min(u32::MAX as u64) as u32)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    /// Code of the output rectangle, or `None` when the step cap was hit.
    pub output: Option<Nat>,
    pub max_index: u64,
    pub steps: u64,
    /// Whether intersecting with earlier outputs shrank the result.
    pub clipped: bool,
}

/// Run the machine on `phi(0..=m)` and return the code for step `m`.
pub fn machine_step(
    mach: &OracleMachine,
    prefix: &[Nat],
    m: u64,
) -> Result<StepRecord, NeighborhoodError> {
    let need = m as usize + 1;
    if prefix.len() < need {
        return Err(NeighborhoodError::ShortPrefix {
            got: prefix.len(),
            m,
        });
    }
    let basis = BasisDescriptor::Euclidean(mach.f.inputs());
    let boxes = prefix[..need]
        .iter()
        .map(|c| basis.decode_rect(c))
        .collect::<Result<Vec<_>, _>>()?;
    for (i, w) in boxes.windows(2).enumerate() {
        if !w[1].is_subset_of(&w[0]) {
            return Err(NeighborhoodError::NotNested {
                index: i as u64 + 1,
            });
        }
    }
    let steps = mach.f.cost().saturating_mul(need as u64);
    if steps > mach.max_steps {
        return Ok(StepRecord {
            output: None,
            max_index: m,
            steps,
            clipped: false,
        });
    }
    let mut clipped = false;
    let mut running: Option<Rect> = None;
    for (k, b) in boxes.iter().enumerate() {
        let out = mach.output(b, k as u64)?;
        running = Some(match running {
            None => out,
            Some(prev) => {
                let cut = prev
                    .intersect(&out)
                    .expect("outputs of nested inputs overlap");
                clipped |= cut != out;
                cut
            }
        });
    }
    Ok(StepRecord {
        output: running.map(|r| rect_code(&r)),
        max_index: m,
        steps,
        clipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encodings::rect_decode;
    use crate::spec_lang::parse_real_fn;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn identity_on_unit_interval() {
        let mach = OracleMachine::new(parse_real_fn("x -> x").unwrap(), 1000);
        let unit = rect_code(&Rect::from(Interval::new(q(0, 1), q(1, 1)).unwrap()));
        let r = machine_step(&mach, &[unit], 0).unwrap();
        let out = rect_decode(r.output.as_ref().unwrap(), 1).unwrap();
        assert_eq!(out.dims()[0], Interval::new(q(-1, 1), q(2, 1)).unwrap());
        assert_eq!(r.max_index, 0);
        assert!(!r.clipped);
    }

    #[test]
    fn squaring_shrinks_and_nests() {
        let mach = OracleMachine::new(parse_real_fn("x -> x^2").unwrap(), 10_000);
        let phi = NestedOracle::around_point(&[q(1, 1)]);
        let prefix = phi.prefix(12);
        let mut prev: Option<Rect> = None;
        for m in 0..12 {
            let r = machine_step(&mach, &prefix, m).unwrap();
            let out = rect_decode(r.output.as_ref().unwrap(), 1).unwrap();
            assert!(out.contains(&[q(1, 1)]));
            if let Some(p) = &prev {
                assert!(out.is_subset_of(p));
            }
            assert!(!r.clipped);
            prev = Some(out);
        }
        assert!(prev.unwrap().dims()[0].width() < q(1, 100));
    }

    #[test]
    fn constant_map_and_errors() {
        let mach = OracleMachine::new(parse_real_fn("x -> 0").unwrap(), 1000);
        let phi = NestedOracle::around_point(&[q(5, 1)]);
        let r = machine_step(&mach, &phi.prefix(4), 3).unwrap();
        assert!(rect_decode(&r.output.unwrap(), 1)
            .unwrap()
            .contains(&[q(0, 1)]));
        let reversed: Vec<Nat> = phi.prefix(3).into_iter().rev().collect();
        assert_eq!(
            machine_step(&mach, &reversed, 2),
            Err(NeighborhoodError::NotNested { index: 1 })
        );
        assert!(matches!(
            machine_step(&mach, &phi.prefix(1), 2),
            Err(NeighborhoodError::ShortPrefix { .. })
        ));
        let tight = OracleMachine::new(parse_real_fn("x -> x*x*x").unwrap(), 3);
        assert_eq!(
            machine_step(&tight, &phi.prefix(2), 1).unwrap().output,
            None
        );
    }

    #[test]
    fn algebraic_oracle_is_nested() {
        use crate::exact_arith::Poly;
        let root = AlgebraicNumber::root(
            &Poly::from_ints([-2, 0, 0, 3]),
            Interval::new(q(0, 1), q(1, 1)).unwrap(),
        )
        .unwrap();
        let phi = NestedOracle::from_algebraic(&[root, AlgebraicNumber::rational(q(1, 3))]);
        let rects: Vec<Rect> = phi
            .prefix(10)
            .iter()
            .map(|c| rect_decode(c, 2).unwrap())
            .collect();
        for w in rects.windows(2) {
            assert!(w[1].is_subset_of(&w[0]));
        }
        assert!(phi.point.is_none());
    }
}
