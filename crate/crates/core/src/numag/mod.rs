//! Numerical algebraic geometry on parametrized varieties: path tracking,
//! pseudowitness sets, monodromy, the trace test, membership and
//! interpolation of vanishing polynomials.

pub mod interp;
pub mod param;
pub mod track;
pub mod witness;

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use crate::scalar::C64;

pub use interp::{interpolate, min_vanishing_degree, monomial_count, monomials, InterpolationMode, InterpolationReport, MinDegree};
pub use param::{Parametrization, VarietySpec};
pub use track::{refine, track, track_with_retries, Predictor, System, TrackError, TrackResult, TrackerConfig};
pub use witness::{
    complete_witness_set, hyperplane_section, membership, monodromy_expand, pseudo_witness, refine_all, slice_points, trace_test, MembershipOutcome, MonodromyConfig, MonodromyReport, PseudoWitnessSet,
    CompletionReport, Slice, TraceOutcome, WitnessPoint, DEDUP_TOL,
};

#[derive(Debug, thiserror::Error)]
pub enum NumagError {
    #[error("Jacobian has rank 0 at every sampled parameter; parametrization is degenerate")]
    Degenerate,
    #[error(transparent)]
    Track(#[from] TrackError),
    #[error("witness set is empty")]
    Empty,
    #[error("target has {got} coordinates, ambient space has {expected}")]
    TargetLength { expected: usize, got: usize },
    #[error("slice has {got} forms, the image needs {expected}")]
    SliceShape { expected: usize, got: usize },
}

/// Standard complex Gaussian.
pub fn random_normal(rng: &mut dyn RngCore) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) / std::f64::consts::SQRT_2
}

/// Uniform point of the unit circle.
pub fn random_unit(rng: &mut dyn RngCore) -> C64 {
    C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

pub fn random_vector(n: usize, rng: &mut dyn RngCore) -> Vec<C64> {
    (0..n).map(|_| random_normal(rng)).collect()
}

/// Scales `v` so its largest-modulus coordinate (the first among ties) is 1.
pub fn projective_normalize(v: &[C64]) -> Vec<C64> {
    let Some(pivot) = v.iter().copied().reduce(|a, b| if b.norm() > a.norm() { b } else { a }) else {
        return Vec::new();
    };
    if pivot.norm() == 0.0 {
        return v.to_vec();
    }
    v.iter().map(|z| z / pivot).collect()
}

pub(crate) fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
