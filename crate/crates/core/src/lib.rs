//! Polynomials vanishing on secant varieties of Segre varieties, and the
//! border rank lower bounds they certify.
//!
//! The crate is organized bottom-up:
//!
//! - [`scalar`]: prime fields, rationals, complex numbers and dense linear algebra.
//! - [`tensor`]: order-3 tensors and rank-one decompositions.
//! - [`rep`]: partitions, characters, Kronecker coefficients and zero patterns.
//! - [`hwv`]: highest weight polynomials stored as permutation pairs, and their
//!   pruned evaluation.
//! - [`ideal`]: vanishing kernels on secant varieties and border rank certificates.
//! - [`numag`]: path tracking, pseudowitness sets, monodromy, trace test,
//!   membership and interpolation.

pub mod hwv;
pub mod ideal;
pub mod numag;
pub mod rep;
pub mod rng;
pub mod scalar;
pub mod tensor;

/// Crate version, recorded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
