//! Kneading invariants, finite-type compilation and survivor-set dimension
//! for intermediate β-transformations x ↦ βx + α mod 1.

pub mod correspondence;
pub mod error;
pub mod golden;
pub mod graph;
pub mod input;
pub mod itinerary;
pub mod jobs;
pub mod kneading;
pub mod language;
pub mod numerics;
pub mod oracles;
pub mod par;
pub mod sft;
pub mod survivor;
pub mod winning;
pub mod words;

pub use error::{Error, Result};
pub use itinerary::{Params, Variant};
pub use numerics::{AlgebraicReal, Ball, Elem, NumberField, Poly, Scalar};
pub use words::{lex_compare, EPWord, FiniteWord};
