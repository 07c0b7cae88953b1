//! Exact and floating point scalars and the dense linear algebra built on them.

pub mod complex;
pub mod field;
pub mod linalg;
pub mod reconstruct;

pub use complex::{svd_nullspace, Nullspace, C64};
pub use field::{Field, FieldError, PrimeField, PrimePair, Rationals, P31, P61};
pub use linalg::{determinant, rank, row_reduce, LinalgError, Matrix, RowReduction};
