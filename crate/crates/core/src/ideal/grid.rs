use rayon::prelude::*;
use serde::Serialize;

use super::IdealError;
use crate::hwv::{build_plan, evaluate_with, EvalConfig, EvalPlan, HwvPoly};
use crate::rng;
use crate::scalar::{PrimeField, PrimePair};
use crate::tensor::{random_integer_decomposition, Decomposition};

/// Polynomials evaluated at sample decompositions, modulo each prime.
#[derive(Clone, Debug, Default, Serialize)]
pub struct EvaluationMatrix {
    pub polys: Vec<HwvPoly>,
    pub points: Vec<Decomposition<i64>>,
    pub r: usize,
    pub seed: u64,
    pub primes: Vec<u64>,
    /// `entries[prime][poly][point]`.
    pub entries: Vec<Vec<Vec<u64>>>,
}

impl EvaluationMatrix {
    /// Evaluates `polys` at `n` random rank-`r` decompositions with dims `dims`,
    /// drawn from the kernel stream of `seed`.
    pub fn sample(polys: &[HwvPoly], dims: [usize; 3], r: usize, n: usize, primes: &[u64], seed: u64) -> Result<Self, IdealError> {
        let mut m = EvaluationMatrix { polys: polys.to_vec(), points: Vec::new(), r, seed, primes: primes.to_vec(), entries: vec![vec![Vec::new(); polys.len()]; primes.len()] };
        m.extend(dims, n)?;
        Ok(m)
    }

    /// Appends `n` more points from the same stream.
    pub fn extend(&mut self, dims: [usize; 3], n: usize) -> Result<(), IdealError> {
        let bound = *self.primes.iter().min().ok_or(IdealError::BadPrimes)? as i64;
        let start = self.points.len() as u64;
        let fresh: Vec<Decomposition<i64>> = (0..n as u64)
            .map(|j| random_integer_decomposition(dims, self.r, bound, &mut rng::substream(self.seed, rng::STREAM_KERNEL, start + j)))
            .collect();
        let values = evaluate_grid(&self.polys, &fresh, &self.primes)?;
        for (per_prime, vals) in self.entries.iter_mut().zip(values) {
            for (row, v) in per_prime.iter_mut().zip(vals) {
                row.extend(v);
            }
        }
        self.points.extend(fresh);
        Ok(())
    }

    /// The first `cols` columns modulo prime number `i`.
    pub fn columns(&self, i: usize, cols: usize) -> Vec<Vec<u64>> {
        self.entries[i].iter().map(|row| row[..cols].to_vec()).collect()
    }
}

fn check_primes(primes: &[u64]) -> Result<(), IdealError> {
    let distinct = primes.iter().enumerate().all(|(i, p)| !primes[..i].contains(p));
    if primes.is_empty() || !distinct {
        return Err(IdealError::BadPrimes);
    }
    Ok(())
}

/// Values of every polynomial at one point, `out[prime][poly]`.
pub(crate) fn evaluate_point(plans: &[EvalPlan], point: &Decomposition<i64>, primes: &[u64]) -> Result<Vec<Vec<u64>>, IdealError> {
    let cfg = EvalConfig::default();
    let mut out = Vec::with_capacity(primes.len());
    // two primes share one pass
    for chunk in primes.chunks(2) {
        if let [p, q] = *chunk {
            let ring = PrimePair::new(p, q)?;
            let w = point.to_field(&ring);
            let vals = plans.iter().map(|plan| evaluate_with(&ring, plan, &w, &cfg)).collect::<Result<Vec<_>, _>>()?;
            out.push(vals.iter().map(|v| v[0]).collect());
            out.push(vals.iter().map(|v| v[1]).collect());
        } else {
            let f = PrimeField::new(chunk[0])?;
            let w = point.to_field(&f);
            out.push(plans.iter().map(|plan| evaluate_with(&f, plan, &w, &cfg)).collect::<Result<Vec<_>, _>>()?);
        }
    }
    Ok(out)
}

/// `out[prime][poly][point]` for integer sample points.
pub fn evaluate_grid(polys: &[HwvPoly], points: &[Decomposition<i64>], primes: &[u64]) -> Result<Vec<Vec<Vec<u64>>>, IdealError> {
    check_primes(primes)?;
    let plans: Vec<EvalPlan> = polys.iter().map(build_plan).collect();
    let per_point: Vec<Vec<Vec<u64>>> = points.par_iter().map(|w| evaluate_point(&plans, w, primes)).collect::<Result<_, _>>()?;
    Ok((0..primes.len())
        .map(|i| (0..polys.len()).map(|k| per_point.iter().map(|v| v[i][k]).collect()).collect())
        .collect())
}
