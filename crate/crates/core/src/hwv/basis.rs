//! Random search for a basis of the highest weight space of one isotypic
//! component: draw permutation pairs, keep those whose evaluation row raises
//! the rank of the evaluation matrix.

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use super::eval::{evaluate_with, EvalConfig};
use super::plan::build_plan;
use super::{HwvError, HwvPoly};
use crate::rep::{kronecker, random_pair_avoiding_zero_pattern, Partition, DEFAULT_PAIR_BUDGET};
use crate::scalar::linalg::{rank, Matrix};
use crate::scalar::PrimeField;
use crate::tensor::{random_decomposition, Decomposition};

#[derive(Clone, Debug)]
pub struct BasisConfig {
    /// Candidate pairs tried per basis element before giving up.
    pub trials_per_element: usize,
    /// Rank of the sample decompositions; `None` means the longest column.
    pub sample_rank: Option<usize>,
    /// Consecutive rejected candidates after which the sample rank is raised
    /// and a fresh batch of points at that rank is appended.
    pub stall_limit: usize,
}

impl Default for BasisConfig {
    fn default() -> Self {
        BasisConfig { trials_per_element: 50, sample_rank: None, stall_limit: 8 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HwvBasis {
    pub shapes: [Partition; 3],
    pub kronecker: u64,
    pub polys: Vec<HwvPoly>,
    pub prime: u64,
    /// Sample decompositions, dims equal to the shape lengths.
    pub points: Vec<Decomposition<u64>>,
    /// `matrix[i][j]` is polynomial `i` at point `j`.
    pub matrix: Vec<Vec<u64>>,
    /// Highest sample rank used.
    pub sample_rank: usize,
    pub trials: usize,
    /// False when the trial budget ran out before `kronecker` polynomials were found.
    pub complete: bool,
}

fn eval_row(field: &PrimeField, p: &HwvPoly, points: &[Decomposition<u64>]) -> Result<Vec<u64>, HwvError> {
    let plan = build_plan(p);
    let cfg = EvalConfig::default();
    points.par_iter().map(|w| evaluate_with(field, &plan, w, &cfg)).collect()
}

fn matrix_rank(field: &PrimeField, rows: &[Vec<u64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    rank(field, &Matrix::from_rows(rows).expect("rectangular")).expect("field entries")
}

/// Builds `kronecker(pi, mu, nu)` linearly independent highest weight
/// polynomials over `field`.
pub fn hwv_basis(
    pi: &Partition,
    mu: &Partition,
    nu: &Partition,
    field: &PrimeField,
    rng: &mut dyn RngCore,
    cfg: &BasisConfig,
) -> Result<HwvBasis, HwvError> {
    let d = pi.weight();
    if mu.weight() != d || nu.weight() != d {
        return Err(crate::rep::RepError::WeightMismatch(vec![d, mu.weight(), nu.weight()]).into());
    }
    if field.modulus() <= d as u64 {
        return Err(crate::scalar::FieldError::PrimeTooSmall { p: field.modulus(), d }.into());
    }
    let k = kronecker(pi, mu, nu)?;
    if k == 0 {
        return Err(HwvError::EmptyIsotypic);
    }
    let k_us = k as usize;
    let dims = [pi.len(), mu.len(), nu.len()];
    let mut sample_rank = cfg.sample_rank.unwrap_or_else(|| dims.into_iter().max().unwrap_or(1));
    let batch = k_us + 3;
    let mut points: Vec<Decomposition<u64>> = (0..batch).map(|_| random_decomposition(field, dims, sample_rank, rng)).collect();
    let mut polys: Vec<HwvPoly> = Vec::new();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let budget = cfg.trials_per_element * k_us;
    let mut trials = 0;
    let mut stall = 0;
    while polys.len() < k_us && trials < budget {
        trials += 1;
        let (t1, t2) = match random_pair_avoiding_zero_pattern(pi, mu, nu, rng, DEFAULT_PAIR_BUDGET) {
            Ok(pair) => pair,
            Err(crate::rep::RepError::BudgetExhausted(_)) => break,
            Err(e) => return Err(e.into()),
        };
        let p = HwvPoly::new(pi.clone(), mu.clone(), nu.clone(), t1, t2)?;
        if polys.contains(&p) {
            continue;
        }
        let row = eval_row(field, &p, &points)?;
        rows.push(row);
        if matrix_rank(field, &rows) == rows.len() {
            polys.push(p);
            stall = 0;
            continue;
        }
        rows.pop();
        stall += 1;
        if stall >= cfg.stall_limit {
            // points this special may not separate the whole space; widen them
            stall = 0;
            sample_rank += 1;
            let fresh: Vec<Decomposition<u64>> = (0..batch).map(|_| random_decomposition(field, dims, sample_rank, rng)).collect();
            for (p, row) in polys.iter().zip(rows.iter_mut()) {
                row.extend(eval_row(field, p, &fresh)?);
            }
            points.extend(fresh);
        }
    }
    let complete = polys.len() == k_us;
    Ok(HwvBasis {
        shapes: [pi.clone(), mu.clone(), nu.clone()],
        kronecker: k,
        polys,
        prime: field.modulus(),
        points,
        matrix: rows,
        sample_rank,
        trials,
        complete,
    })
}
