//! β-substitutions of Pisot numbers.
//!
//! The crate builds the substitution ψ_β read off from the β-transformation, the tilings it
//! generates, coincidence certificates for their translation flow, and the geometric factor
//! map onto a solenoid together with the arithmetical coding of the β-shift. All decisions
//! use exact arithmetic in ℚ(β).

pub mod algebra;
pub mod numeration;
pub mod substitution;
pub mod geometry;
pub mod tiling;
pub mod cli;
