pub mod encodings;
pub mod exact_arith;
pub mod model_core;
pub mod neighborhoods;
pub mod spec_lang;
pub mod stats;

pub use encodings::{Interval, Nat, Rational, Rect};
pub use exact_arith::{AlgebraicNumber, Poly};
pub use model_core::{Budget, Model, ObservationLog};
