//! Exact arithmetic in ℚ(β), Pisot certification and exact ordering.

mod field;
pub mod linalg;
mod pisot;
pub mod poly;

pub use field::{in_z_inv_beta, parse_value, AlgNum, PisotField, Sign};
pub use pisot::{verify_pisot, RootWitness, MAX_DEGREE};
pub use poly::{IntPolynomial, QPoly, Sturm};


use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("degree {degree} exceeds the supported maximum of 12")]
    DegreeTooLarge { degree: usize },
    #[error("polynomial is reducible (factor {factor})")]
    NotIrreducible { factor: String },
    #[error("not a Pisot number: {0}")]
    NotPisot(RootWitness),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("invalid value: {0}")]
    InvalidValue(String),
}

/// Field operation selector for [`alg_arithmetic`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn alg_arithmetic(a: &AlgNum, b: &AlgNum, op: FieldOp) -> Result<AlgNum, AlgebraError> {
    Ok(match op {
        FieldOp::Add => a + b,
        FieldOp::Sub => a - b,
        FieldOp::Mul => a * b,
        FieldOp::Div => a.checked_div(b)?,
    })
}

pub fn sign_of(a: &AlgNum) -> Sign {
    a.sign()
}

pub fn floor_of(a: &AlgNum) -> num_bigint::BigInt {
    a.floor()
}

#[cfg(test)]
mod tests;
