//! Exact finite field arithmetic and linear algebra.

mod field;
mod matrix;
mod packed;

pub use field::{
    default_modulus_code, is_prime, Arith, FieldContext, FieldElement, FieldId, FieldSpec, MAX_ORDER,
    TABLE_ORDER_LIMIT,
};
pub use matrix::Matrix;
pub use packed::RowPacking;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{d} exceeds 2^32")]
    OrderTooLarge { p: u32, d: u32 },
    #[error("modulus is not monic")]
    NotMonic,
    #[error("modulus {0:?} is reducible")]
    Reducible(Vec<u32>),
    #[error("bad modulus: {0}")]
    BadModulus(String),
    #[error("element code {code} is out of range for a field of order {order}")]
    InvalidElement { code: u32, order: u64 },
    #[error("operands from different fields ({left} vs {right})")]
    FieldMismatch { left: FieldId, right: FieldId },
    #[error("division by zero")]
    DivisionByZero,
    #[error("characteristic mismatch: {from} vs {to}")]
    CharacteristicMismatch { from: u32, to: u32 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("parse error at {position} in {input:?}: {reason}")]
    Parse {
        input: String,
        position: usize,
        reason: String,
    },
}
