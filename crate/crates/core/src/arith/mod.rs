//! Arithmetic substrate: adjustable-precision reals, circle geometry,
//! bisection, and the incomplete beta function.

pub mod beta;
pub mod bigreal;
pub mod circle;
pub mod roots;

pub use beta::{inv_reg_inc_beta, reg_inc_beta, BetaProfile};
pub use bigreal::{BigReal, DEFAULT_PRECISION};
pub use circle::{arc_between, mod1, Arc, ArcRecord, CirclePoint};
pub use roots::{bisect_predicate, bisect_root};
