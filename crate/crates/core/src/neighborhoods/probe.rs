use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use super::graph::{encode_graph_code, fast_member, GraphRange};
use super::oracle::NestedOracle;
use super::{BasisDescriptor, NeighborhoodError};
use crate::encodings::{height, Nat, Rect};
use crate::spec_lang::{Closed, RealFn};

/// Most elementary cells the regenerator will check for one code.
pub const CELL_CAP: u64 = 200_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbeStatus {
    /// In the range at the request bounds.
    Emitted,
    /// In the range once the bounds were raised to the given height and chain.
    Regenerated { height: u64, chain: u64 },
    /// Neither found nor provably absent.
    Unrefuted,
    /// No point of the closed rectangle lies on the graph.
    Excluded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeStep {
    pub index: u64,
    pub code: Nat,
    pub rect: Rect,
    pub status: ProbeStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbeVerdict {
    ConsistentAtDepth(u64),
    Excluded { index: u64, code: Nat, rect: Rect },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeReport {
    pub steps: Vec<ProbeStep>,
    pub verdict: ProbeVerdict,
}

impl ProbeReport {
    pub fn is_excluded(&self) -> bool {
        matches!(self.verdict, ProbeVerdict::Excluded { .. })
    }
}

/// True when no point of the closure of `d_in` maps into the open `d_out`,
/// shown by a closed enclosure missing `d_out` in some output coordinate.
pub fn exclusion_proof(f: &RealFn, d_in: &Rect, d_out: &Rect) -> Result<bool, NeighborhoodError> {
    let closed: Vec<Closed> = d_in
        .dims()
        .iter()
        .map(|iv| Closed {
            lo: iv.lo().clone(),
            hi: iv.hi().clone(),
        })
        .collect();
    let enc = f.enclose(&closed)?;
    Ok(enc
        .iter()
        .zip(d_out.dims())
        .any(|(e, o)| &e.hi <= o.lo() || &e.lo >= o.hi()))
}

fn ceil_log2_inv(w: &crate::encodings::Rational) -> u64 {
    // smallest k with 2^-k <= w
    let mut k = 0u64;
    let mut p = crate::encodings::Rational::one();
    while &p > w && k < 62 {
        p /= crate::encodings::Rational::from_integer(BigInt::from(2));
        k += 1;
    }
    k
}

/// Check the first `depth` codes of `oracle` (a point of the product space)
/// against the graph range, regenerating at larger bounds when a code is
/// missing at the request bounds.
pub fn membership_probe(
    range: &GraphRange,
    oracle: &NestedOracle,
    depth: u64,
) -> Result<ProbeReport, NeighborhoodError> {
    let (c, d) = (range.inputs(), range.outputs());
    if oracle.basis != BasisDescriptor::Euclidean(c + d) {
        return Err(NeighborhoodError::Dimension {
            expected: c + d,
            got: match oracle.basis {
                BasisDescriptor::Euclidean(k) => k,
                _ => 0,
            },
        });
    }
    let req = &range.request;
    let mut steps = Vec::new();
    let mut prev: Option<Rect> = None;
    for index in 0..depth {
        let rect = oracle.basis.decode_rect(&oracle.code(index))?;
        if let Some(p) = &prev {
            if !rect.is_subset_of(p) {
                return Err(NeighborhoodError::NotNested { index });
            }
        }
        let d_in = Rect::new(rect.dims()[..c].to_vec()).expect("c >= 1");
        let d_out = Rect::new(rect.dims()[c..].to_vec()).expect("d >= 1");
        let code = encode_graph_code(&d_in, &d_out);
        let status = if range.contains(&code) {
            ProbeStatus::Emitted
        } else {
            let w = rect
                .dims()
                .iter()
                .map(|iv| iv.width())
                .min()
                .expect("nonempty");
            let chain = req.chain.max(ceil_log2_inv(&w) + 4).min(62);
            let h_rect = rect
                .dims()
                .iter()
                .flat_map(|iv| [height(iv.lo()), height(iv.hi())])
                .max()
                .and_then(|h| h.to_u64())
                .unwrap_or(u64::MAX);
            let height = req.height.max(h_rect).max(1u64 << chain);
            match fast_member(&req.machine, height, chain, &d_in, &d_out, CELL_CAP)? {
                Some(true) => ProbeStatus::Regenerated { height, chain },
                _ if exclusion_proof(&req.machine.f, &d_in, &d_out)? => {
                    steps.push(ProbeStep {
                        index,
                        code: code.clone(),
                        rect: rect.clone(),
                        status: ProbeStatus::Excluded,
                    });
                    return Ok(ProbeReport {
                        steps,
                        verdict: ProbeVerdict::Excluded { index, code, rect },
                    });
                }
                _ => ProbeStatus::Unrefuted,
            }
        };
        steps.push(ProbeStep {
            index,
            code,
            rect: rect.clone(),
            status,
        });
        prev = Some(rect);
    }
    Ok(ProbeReport {
        steps,
        verdict: ProbeVerdict::ConsistentAtDepth(depth),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encodings::{Interval, Rational};
    use crate::model_core::Budget;
    use crate::neighborhoods::{enumerate_graph_range, GraphRangeRequest, OracleMachine};
    use crate::spec_lang::parse_real_fn;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    fn squaring_range() -> GraphRange {
        enumerate_graph_range(&GraphRangeRequest {
            machine: OracleMachine::new(parse_real_fn("x -> x^2").unwrap(), 10_000),
            height: 2,
            chain: 2,
            budget: Budget::states(100_000),
        })
        .unwrap()
    }

    #[test]
    fn off_graph_point_is_excluded() {
        let r = squaring_range();
        let report =
            membership_probe(&r, &NestedOracle::around_point(&[q(1, 1), q(2, 1)]), 6).unwrap();
        let ProbeVerdict::Excluded { index, rect, .. } = &report.verdict else {
            panic!("{report:?}")
        };
        assert_eq!(*index, 2);
        let want = Rect::new(vec![
            Interval::new(q(3, 4), q(5, 4)).unwrap(),
            Interval::new(q(7, 4), q(9, 4)).unwrap(),
        ])
        .unwrap();
        assert_eq!(rect, &want);
        assert_eq!(report.steps.last().unwrap().status, ProbeStatus::Excluded);
    }

    #[test]
    fn on_graph_point_is_consistent() {
        let r = squaring_range();
        let report =
            membership_probe(&r, &NestedOracle::around_point(&[q(1, 1), q(1, 1)]), 8).unwrap();
        assert_eq!(report.verdict, ProbeVerdict::ConsistentAtDepth(8));
        assert!(report
            .steps
            .iter()
            .all(|s| s.status != ProbeStatus::Unrefuted));
        let report =
            membership_probe(&r, &NestedOracle::around_point(&[q(1, 1), q(2, 1)]), 0).unwrap();
        assert_eq!(report.verdict, ProbeVerdict::ConsistentAtDepth(0));
    }

    #[test]
    fn exclusion_needs_disjoint_enclosure() {
        let f = parse_real_fn("x -> x^2").unwrap();
        let r = |a, b| Rect::from(Interval::new(a, b).unwrap());
        assert!(exclusion_proof(&f, &r(q(3, 4), q(5, 4)), &r(q(7, 4), q(9, 4))).unwrap());
        assert!(!exclusion_proof(&f, &r(q(0, 1), q(2, 1)), &r(q(7, 4), q(9, 4))).unwrap());
    }
}
