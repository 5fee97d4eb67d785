//! Exact and ball-arithmetic number backends.

pub mod algebraic;
pub mod ball;
pub mod field;
pub mod minpoly;
pub mod modp;
pub mod poly;
pub mod scalar;

pub use algebraic::{max_real_root_in, AlgebraicReal};
pub use ball::{Ball, DEFAULT_PRECISION};
pub use field::{Elem, NumberField};
pub use poly::Poly;
pub use scalar::Scalar;
