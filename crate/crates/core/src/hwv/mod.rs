//! Highest weight polynomials encoded by permutation pairs.
//!
//! A polynomial is never expanded into monomials. It is stored as its shapes
//! `(pi, mu, nu)` and pair `(tau1, tau2)`, and evaluated on rank-one
//! decompositions by a pruned depth-first search (see [`eval`]).

pub mod basis;
pub mod eval;
pub mod plan;

use serde::{Deserialize, Serialize};

use crate::rep::{has_zero_pattern, Partition, Permutation, RepError};
use crate::scalar::{FieldError, LinalgError};
use crate::tensor::TensorError;

pub use basis::{hwv_basis, BasisConfig, HwvBasis};
pub use eval::{evaluate, evaluate_with, Engine, EvalConfig};
pub use plan::{build_plan, EvalPlan};

#[derive(Debug, thiserror::Error)]
pub enum HwvError {
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("shape {shape} has {parts} rows but side {side} has dimension {dim}")]
    ShapeExceedsDim { side: char, shape: Partition, parts: usize, dim: usize },
    #[error("decomposition has {0} terms; at most 64 are supported")]
    TooManyTerms(usize),
    #[error("slot order frontier too wide for the frontier engine")]
    FrontierTooWide,
    #[error("Kronecker coefficient is zero, nothing to construct")]
    EmptyIsotypic,
}

/// `P^{tau1,tau2}_{pi,mu,nu}`: degree `d = |pi| = |mu| = |nu|`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "HwvPolyRecord", into = "HwvPolyRecord")]
pub struct HwvPoly {
    pub pi: Partition,
    pub mu: Partition,
    pub nu: Partition,
    pub tau1: Permutation,
    pub tau2: Permutation,
}

impl HwvPoly {
    pub fn new(pi: Partition, mu: Partition, nu: Partition, tau1: Permutation, tau2: Permutation) -> Result<Self, RepError> {
        let d = pi.weight();
        if mu.weight() != d || nu.weight() != d {
            return Err(RepError::WeightMismatch(vec![d, mu.weight(), nu.weight()]));
        }
        for t in [&tau1, &tau2] {
            if t.len() != d {
                return Err(RepError::PermutationLength { expected: d, got: t.len() });
            }
        }
        Ok(HwvPoly { pi, mu, nu, tau1, tau2 })
    }

    pub fn degree(&self) -> usize {
        self.pi.weight()
    }

    pub fn shapes(&self) -> [&Partition; 3] {
        [&self.pi, &self.mu, &self.nu]
    }

    /// Longest column over the three shapes; decompositions with fewer terms
    /// are annihilated.
    pub fn max_column_length(&self) -> usize {
        self.shapes().iter().map(|p| p.len()).max().unwrap_or(0)
    }

    pub fn has_zero_pattern(&self) -> bool {
        has_zero_pattern(&self.pi, &self.mu, &self.nu, &self.tau1, &self.tau2).expect("validated on construction")
    }
}

#[derive(Serialize, Deserialize)]
struct HwvPolyRecord {
    d: usize,
    pi: Partition,
    mu: Partition,
    nu: Partition,
    tau1: Permutation,
    tau2: Permutation,
}

impl TryFrom<HwvPolyRecord> for HwvPoly {
    type Error = RepError;
    fn try_from(r: HwvPolyRecord) -> Result<Self, RepError> {
        let p = HwvPoly::new(r.pi, r.mu, r.nu, r.tau1, r.tau2)?;
        if p.degree() != r.d {
            return Err(RepError::WeightMismatch(vec![r.d, p.degree()]));
        }
        Ok(p)
    }
}

impl From<HwvPoly> for HwvPolyRecord {
    fn from(p: HwvPoly) -> Self {
        HwvPolyRecord { d: p.degree(), pi: p.pi, mu: p.mu, nu: p.nu, tau1: p.tau1, tau2: p.tau2 }
    }
}

/// The four degree-20 pairs for shapes `(5,5,5,5)^3` that span the highest
/// weight space used in the `M_2` certificate, in 1-indexed one-line notation.
pub const M2_DEGREE20_PAIRS: [([usize; 20], [usize; 20]); 4] = [
    (
        [10, 15, 5, 9, 13, 4, 17, 14, 7, 20, 19, 11, 2, 12, 8, 3, 16, 18, 6, 1],
        [10, 11, 6, 2, 8, 9, 4, 20, 15, 16, 13, 18, 14, 19, 7, 5, 17, 3, 12, 1],
    ),
    (
        [19, 10, 1, 5, 7, 12, 2, 13, 16, 6, 18, 9, 11, 20, 3, 17, 14, 8, 15, 4],
        [10, 5, 13, 6, 3, 16, 11, 1, 4, 18, 15, 17, 9, 2, 8, 12, 19, 7, 14, 20],
    ),
    (
        [16, 20, 9, 13, 8, 1, 4, 19, 11, 17, 7, 2, 14, 3, 6, 5, 12, 15, 18, 10],
        [1, 20, 11, 19, 5, 16, 17, 2, 18, 13, 7, 12, 14, 10, 8, 15, 6, 9, 3, 4],
    ),
    (
        [11, 5, 2, 1, 16, 10, 20, 3, 17, 19, 12, 18, 13, 9, 14, 4, 8, 6, 15, 7],
        [1, 6, 15, 13, 20, 3, 18, 11, 14, 2, 9, 5, 4, 17, 12, 8, 19, 16, 7, 10],
    ),
];

/// Integer kernel vector of the four degree-20 polynomials on `sigma_6`.
pub const M2_DEGREE20_KERNEL: [i64; 4] = [-266054, 421593, 755438, 374660];

/// The four degree-20 polynomials built from [`M2_DEGREE20_PAIRS`].
pub fn m2_degree20_polys() -> Vec<HwvPoly> {
    let s = Partition::new(vec![5, 5, 5, 5]).expect("valid shape");
    M2_DEGREE20_PAIRS
        .iter()
        .map(|(t1, t2)| {
            HwvPoly::new(
                s.clone(),
                s.clone(),
                s.clone(),
                Permutation::from_one_line(t1).expect("valid pair"),
                Permutation::from_one_line(t2).expect("valid pair"),
            )
            .expect("valid polynomial")
        })
        .collect()
}
