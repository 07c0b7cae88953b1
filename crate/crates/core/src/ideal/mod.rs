//! Vanishing kernels of highest weight polynomials on secant varieties, and the
//! border rank certificates they yield.
//!
//! A combination `c_1 P_1 + ... + c_k P_k` of same-shape polynomials vanishes on
//! `sigma_r` (with high probability) when `c` is in the left kernel of the
//! evaluation matrix at random rank-`r` decompositions. If it then fails to
//! vanish at a target tensor, the target has border rank greater than `r`.

pub mod certificate;
pub mod grid;
pub mod kernel;

use crate::hwv::HwvError;
use crate::rep::{weyl_dim, Partition, RepError};
use crate::scalar::{FieldError, LinalgError};

pub use certificate::{certify, Certificate, CertifyConfig, SigmaChecks, Verdict};
pub use grid::{evaluate_grid, EvaluationMatrix};
pub use kernel::{vanishing_kernel, KernelConfig, PrimeKernel, VanishingKernel};

#[derive(Debug, thiserror::Error)]
pub enum IdealError {
    #[error(transparent)]
    Hwv(#[from] HwvError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("no polynomials given")]
    Empty,
    #[error("polynomials of different shapes cannot be combined")]
    MixedShapes,
    #[error("at least one prime is required, and primes must be distinct")]
    BadPrimes,
    #[error("target has dims {target:?} but the kernel lives on {kernel:?}")]
    DimensionMismatch { target: [usize; 3], kernel: [usize; 3] },
    #[error("kernel has dimension {0}; select a vector explicitly")]
    KernelDimension(usize),
    #[error("kernel vector has {got} entries for {expected} polynomials")]
    KernelLength { expected: usize, got: usize },
    #[error("need at least k + 4 = {min} sample points, got {got}")]
    TooFewPoints { min: usize, got: usize },
}

/// Dimension `dim S_pi C^a * dim S_mu C^b * dim S_nu C^c` of one copy of the
/// module `S_pi A* (x) S_mu B* (x) S_nu C*`.
pub fn isotypic_dimension(pi: &Partition, mu: &Partition, nu: &Partition, a: usize, b: usize, c: usize) -> Result<u64, RepError> {
    let dims = [weyl_dim(pi, a)?, weyl_dim(mu, b)?, weyl_dim(nu, c)?];
    dims.iter().try_fold(1u64, |acc, &x| acc.checked_mul(x).ok_or(RepError::Overflow))
}
