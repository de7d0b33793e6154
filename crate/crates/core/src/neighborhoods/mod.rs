//! Computable points as nested oracles over countable bases, oracle machines,
//! the bounded graph-range enumerator and complete basic neighborhood models.

mod cbnm;
mod graph;
mod oracle;
mod probe;

use thiserror::Error;

use crate::encodings::{rect_decode, seg_decode, sing_decode, Discrete, EncodingError, Nat, Rect};
use crate::model_core::ModelError;
use crate::spec_lang::RealError;

pub use cbnm::{ideal_gas_fn, make_cbnm, CbnmDesc, GAS_CONSTANT};
pub use graph::{
    decode_graph_code, encode_graph_code, enumerate_graph_range, fast_member, range_difference,
    GraphDiagnostics, GraphRange, GraphRangeRequest, Pool,
};
pub use oracle::{machine_step, NestedOracle, OracleMachine, StepRecord};
pub use probe::{
    exclusion_proof, membership_probe, ProbeReport, ProbeStatus, ProbeStep, ProbeVerdict, CELL_CAP,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NeighborhoodError {
    #[error("code {code} is not a valid basis code: {why}")]
    InvalidCode { code: Nat, why: String },
    #[error("oracle is not nested at index {index}")]
    NotNested { index: u64 },
    #[error("oracle prefix has {got} codes, step {m} needs {}", .m + 1)]
    ShortPrefix { got: usize, m: u64 },
    #[error("expected {expected} dimensions, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("unknown neighborhood model `{0}`")]
    UnknownDescriptor(String),
    #[error("bounds must be positive")]
    ZeroBound,
    #[error(transparent)]
    Real(#[from] RealError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which countable basis a code refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisDescriptor {
    /// Open rational rectangles in `R^d`.
    Euclidean(usize),
    /// Singletons `{a}` coded by `a`.
    DiscreteSing,
    /// Segments `{a, ..., a+k}` coded by `J(a, k)`.
    DiscreteSeg,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisElement {
    Rect(Rect),
    Discrete(Discrete),
}

impl BasisDescriptor {
    pub fn decode(&self, code: &Nat) -> Result<BasisElement, NeighborhoodError> {
        match self {
            BasisDescriptor::Euclidean(d) => {
                rect_decode(code, *d).map(BasisElement::Rect).map_err(|e| {
                    NeighborhoodError::InvalidCode {
                        code: code.clone(),
                        why: e.to_string(),
                    }
                })
            }
            BasisDescriptor::DiscreteSing => Ok(BasisElement::Discrete(sing_decode(code))),
            BasisDescriptor::DiscreteSeg => Ok(BasisElement::Discrete(seg_decode(code))),
        }
    }

    pub fn decode_rect(&self, code: &Nat) -> Result<Rect, NeighborhoodError> {
        match self.decode(code)? {
            BasisElement::Rect(r) => Ok(r),
            BasisElement::Discrete(_) => Err(NeighborhoodError::InvalidCode {
                code: code.clone(),
                why: "not a rectangle code".into(),
            }),
        }
    }
}

/// Decide whether the element coded by `c1` lies inside the one coded by `c2`.
pub fn subset_codes(
    basis: &BasisDescriptor,
    c1: &Nat,
    c2: &Nat,
) -> Result<bool, NeighborhoodError> {
    Ok(match (basis.decode(c1)?, basis.decode(c2)?) {
        (BasisElement::Rect(a), BasisElement::Rect(b)) => a.is_subset_of(&b),
        (BasisElement::Discrete(a), BasisElement::Discrete(b)) => a.is_subset_of(&b),
        _ => unreachable!("one basis decodes to one kind"),
    })
}
