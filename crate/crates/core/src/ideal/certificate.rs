use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::evaluate_point;
use super::kernel::VanishingKernel;
use super::IdealError;
use crate::hwv::{build_plan, EvalPlan};
use crate::rep::{Partition, Permutation};
use crate::rng;
use crate::scalar::{Field, PrimeField, P31, P61};
use crate::tensor::{random_integer_decomposition, Decomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The target is outside `sigma_r`: border rank at least `r + 1`.
    BorderRankGt(usize),
    NoConclusion,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::BorderRankGt(r) => write!(f, "border_rank_gt_{r}"),
            Verdict::NoConclusion => f.write_str("no_conclusion"),
        }
    }
}

impl FromStr for Verdict {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "no_conclusion" {
            return Ok(Verdict::NoConclusion);
        }
        s.strip_prefix("border_rank_gt_")
            .and_then(|r| r.parse().ok())
            .map(Verdict::BorderRankGt)
            .ok_or_else(|| format!("unknown verdict {s:?}"))
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Verdict {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Replay of the kernel polynomial at fresh `sigma_r` samples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaChecks {
    pub points: usize,
    pub seed: u64,
    pub all_zero: bool,
    /// Samples with a nonzero value, per prime.
    pub nonzero: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub target: String,
    pub r: usize,
    pub d: usize,
    pub dims: [usize; 3],
    pub shapes: [Partition; 3],
    pub pairs: Vec<[Permutation; 2]>,
    pub kernel: Vec<i128>,
    pub primes: Vec<u64>,
    /// Kernel polynomial at the target, per prime (decimal prime as key).
    pub eval_at_target: BTreeMap<String, u64>,
    pub sigma_r_checks: SigmaChecks,
    pub verdict: Verdict,
    /// How each half of the verdict is established.
    pub evidence: BTreeMap<String, String>,
}

#[derive(Clone, Debug)]
pub struct CertifyConfig {
    pub primes: Vec<u64>,
    pub checks: usize,
    pub seed: u64,
    /// Coefficients to use instead of the kernel's own integer vector.
    pub kernel_vector: Option<Vec<i128>>,
}

impl CertifyConfig {
    pub fn new(seed: u64) -> Self {
        CertifyConfig { primes: vec![P31, P61], checks: 50, seed, kernel_vector: None }
    }
}

fn combine(values: &[u64], coeffs: &[i128], p: u64) -> u64 {
    let f = PrimeField::new(p).expect("checked prime");
    values.iter().zip(coeffs).fold(0, |acc, (&v, &c)| {
        let c = f.from_i64((c % p as i128) as i64);
        f.add(&acc, &f.mul(&c, &v))
    })
}

/// Evaluates the kernel polynomial at `target` modulo each prime and replays
/// it at fresh rank-`r` samples.
///
/// A nonzero value modulo any prime proves the integer value is nonzero, so
/// the target lies outside the zero set of the polynomial. That the polynomial
/// vanishes on `sigma_r` rests on the random samples and is probabilistic.
pub fn certify(kernel: &VanishingKernel, target: &Decomposition<i64>, target_name: &str, cfg: &CertifyConfig) -> Result<Certificate, IdealError> {
    if target.dims != kernel.dims {
        return Err(IdealError::DimensionMismatch { target: target.dims, kernel: kernel.dims });
    }
    let coeffs = match &cfg.kernel_vector {
        Some(v) => v.clone(),
        None if kernel.dimension != 1 => return Err(IdealError::KernelDimension(kernel.dimension)),
        None => kernel.integer.clone().ok_or(IdealError::KernelDimension(kernel.dimension))?,
    };
    if coeffs.len() != kernel.polys.len() {
        return Err(IdealError::KernelLength { expected: kernel.polys.len(), got: coeffs.len() });
    }
    let plans: Vec<EvalPlan> = kernel.polys.iter().map(build_plan).collect();
    let at_target = evaluate_point(&plans, target, &cfg.primes)?;
    let eval_at_target: BTreeMap<String, u64> =
        cfg.primes.iter().zip(&at_target).map(|(&p, vals)| (p.to_string(), combine(vals, &coeffs, p))).collect();

    let bound = *cfg.primes.iter().min().ok_or(IdealError::BadPrimes)? as i64;
    let samples: Vec<Vec<u64>> = (0..cfg.checks as u64)
        .into_par_iter()
        .map(|j| {
            let w = random_integer_decomposition(kernel.dims, kernel.r, bound, &mut rng::substream(cfg.seed, rng::STREAM_CERTIFY, j));
            let vals = evaluate_point(&plans, &w, &cfg.primes)?;
            Ok(cfg.primes.iter().zip(&vals).map(|(&p, v)| combine(v, &coeffs, p)).collect())
        })
        .collect::<Result<_, IdealError>>()?;
    let nonzero: BTreeMap<String, usize> =
        cfg.primes.iter().enumerate().map(|(i, p)| (p.to_string(), samples.iter().filter(|s| s[i] != 0).count())).collect();
    let all_zero = nonzero.values().all(|&n| n == 0);
    let hits = eval_at_target.values().any(|&v| v != 0);
    let verdict = if hits && all_zero { Verdict::BorderRankGt(kernel.r) } else { Verdict::NoConclusion };
    let evidence = BTreeMap::from([
        ("nonvanishing_at_target".to_string(), "exact: nonzero modulo a prime implies nonzero over the integers".to_string()),
        ("vanishing_on_sigma_r".to_string(), format!("probabilistic: zero at {} random rank-{} samples modulo each prime", cfg.checks, kernel.r)),
    ]);
    Ok(Certificate {
        target: target_name.to_string(),
        r: kernel.r,
        d: kernel.polys[0].degree(),
        dims: kernel.dims,
        shapes: kernel.shapes.clone(),
        pairs: kernel.polys.iter().map(|p| [p.tau1.clone(), p.tau2.clone()]).collect(),
        kernel: coeffs,
        primes: cfg.primes.clone(),
        eval_at_target,
        sigma_r_checks: SigmaChecks { points: cfg.checks, seed: cfg.seed, all_zero, nonzero },
        verdict,
        evidence,
    })
}
