//! Nonnegative integer models with recursively enumerable state spaces,
//! budgeted faithfulness checks and the model algebra.

mod builtin;
mod faithful;
mod log;
mod model;
mod ops;
pub mod simulate;

use thiserror::Error;

use crate::encodings::Nat;
use crate::spec_lang::{EvalError, SpecError};

pub use builtin::{
    baryon, builtin, cannon, chain7, chain_b, chain_c, chain_d, chain_e, chain_f, decay_model,
    Chain7Report, StageTally, BARYON_SPEC, CANNON_SPEC, DECAY_SPEC,
};
pub use faithful::{
    check_faithful, check_maximally_faithful, witness_in, MaximalReport, RecordVerdict,
    SymbolReport, Verdict,
};
pub use log::{parse_log, verdicts_to_jsonl, LogError, ObservationLog, Record};
pub use model::{
    simulate_measurement, Annotation, MeasuringOperation, Model, NatFn, NatPred, Observable,
    Outcome, SemiAnswer, SemiDecidableSet, StateScan, StateSpace, Visit,
};
pub use ops::{
    compare_strength, derive, enumerate_range, isomorph, merge_expansions, range_witnesses, reduct,
    restrict, Strength, StrengthReport, SymbolStrength, WITNESS_FACTOR,
};

/// Finite truncation of an r.e. process.
///
/// `max_states` counts enumerator indices visited; `max_steps` caps every
/// single expression or program evaluation. Zero is allowed for both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Budget {
    pub max_states: u64,
    pub max_steps: u64,
}

impl Budget {
    pub const DEFAULT_STEPS: u64 = 10_000;

    pub fn new(max_states: u64, max_steps: u64) -> Self {
        Budget {
            max_states,
            max_steps,
        }
    }

    pub fn states(max_states: u64) -> Self {
        Budget::new(max_states, Self::DEFAULT_STEPS)
    }

    pub fn scale_states(&self, k: u64) -> Self {
        Budget::new(self.max_states.saturating_mul(k), self.max_steps)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(1000, Self::DEFAULT_STEPS)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unknown observable symbol `{0}`")]
    UnknownSymbol(String),
    #[error("a model needs at least one observable")]
    NoObservables,
    #[error("observable symbol `{0}` is already in use")]
    SymbolCollision(String),
    #[error("enumerating state index {index}: {source}")]
    Enumerate { index: u64, source: EvalError },
    #[error("evaluating `{symbol}` at state {state}: {source}")]
    Eval {
        symbol: String,
        state: Nat,
        source: EvalError,
    },
    #[error("a reduct must keep at least one symbol")]
    EmptyReduct,
    #[error("restriction is defined for one-symbol models; this model has {0} symbols")]
    MultiSymbolRestriction(usize),
    #[error("models have different state spaces: `{0}` vs `{1}`")]
    StateSpaceMismatch(String, String),
    #[error("models have different symbol sets: {0:?} vs {1:?}")]
    SymbolMismatch(Vec<String>, Vec<String>),
    #[error("isomorphism check failed: {0}")]
    NotIsomorphic(String),
    #[error("unknown builtin model `{0}`")]
    UnknownBuiltin(String),
    #[error("unknown simulated operation `{0}`")]
    UnknownSimOp(String),
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
}
