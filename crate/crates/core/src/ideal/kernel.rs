use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::grid::EvaluationMatrix;
use super::IdealError;
use crate::hwv::HwvPoly;
use crate::rep::Partition;
use crate::scalar::reconstruct::{crt, primitive, rational_reconstruct};
use crate::scalar::{row_reduce, Field, Matrix, PrimeField, P31, P61};

#[derive(Clone, Debug)]
pub struct KernelConfig {
    pub r: usize,
    /// Initial number of sample points; `None` means `2k + 4`.
    pub n_points: Option<usize>,
    pub primes: Vec<u64>,
    pub seed: u64,
    /// Double the point count until the kernel dimension repeats.
    pub stabilize: bool,
    pub max_doublings: usize,
    /// Ambient dims of the samples; `None` means the shape lengths.
    pub dims: Option<[usize; 3]>,
}

impl KernelConfig {
    pub fn new(r: usize, seed: u64) -> Self {
        KernelConfig { r, n_points: None, primes: vec![P31, P61], seed, stabilize: true, max_doublings: 4, dims: None }
    }
}

/// Left kernel of the evaluation matrix modulo one prime.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrimeKernel {
    pub prime: u64,
    pub rank: usize,
    /// Basis vectors, each scaled so its first nonzero entry is 1.
    pub basis: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VanishingKernel {
    pub shapes: [Partition; 3],
    pub polys: Vec<HwvPoly>,
    pub r: usize,
    pub dims: [usize; 3],
    pub seed: u64,
    pub primes: Vec<u64>,
    /// Number of sample points used for the final answer.
    pub n_points: usize,
    /// `(points, kernel dimension)` after each batch.
    pub history: Vec<(usize, usize)>,
    pub per_prime: Vec<PrimeKernel>,
    /// Smallest kernel dimension over the primes (reduction mod `p` can only
    /// enlarge the kernel).
    pub dimension: usize,
    /// Primitive integer kernel vector, when the dimension is 1 and the
    /// per-prime vectors lift to a common integer vector.
    pub integer: Option<Vec<i128>>,
    /// Every prime saw the same dimension, and the integer vector (if any)
    /// reduces to each prime's kernel.
    pub consistent: bool,
    #[serde(skip)]
    pub matrix: EvaluationMatrix,
}

fn prime_kernel(prime: u64, rows: &[Vec<u64>]) -> Result<PrimeKernel, IdealError> {
    let f = PrimeField::new(prime)?;
    let m = Matrix::from_rows(rows)?;
    let red = row_reduce(&f, &m.transpose())?;
    let basis = red
        .kernel
        .into_iter()
        .map(|v| {
            let lead = *v.iter().find(|x| **x != 0).expect("kernel vectors are nonzero");
            let inv = f.inv(&lead).expect("nonzero");
            v.iter().map(|x| f.mul(x, &inv)).collect()
        })
        .collect();
    Ok(PrimeKernel { prime, rank: red.rank, basis })
}

/// Lifts per-prime kernel lines to a primitive integer vector.
fn lift(kernels: &[PrimeKernel]) -> Option<Vec<i128>> {
    let k = kernels.first()?.basis.first()?.len();
    let lines: Vec<&Vec<u64>> = kernels.iter().map(|pk| pk.basis.first()).collect::<Option<_>>()?;
    let mut rationals = Vec::with_capacity(k);
    for i in 0..k {
        let residues: Vec<(BigInt, BigInt)> = kernels.iter().zip(&lines).map(|(pk, v)| (BigInt::from(v[i]), BigInt::from(pk.prime))).collect();
        let (a, m) = crt(&residues);
        rationals.push(rational_reconstruct(&a, &m)?);
    }
    let lcm = rationals.iter().fold(BigInt::one(), |l, (_, d)| l.lcm(d));
    let ints: Vec<BigInt> = rationals.iter().map(|(n, d)| n * (&lcm / d)).collect();
    let ints = primitive(&ints);
    // the lift must reproduce every prime's line
    for (pk, v) in kernels.iter().zip(&lines) {
        let f = PrimeField::new(pk.prime).ok()?;
        let red: Vec<u64> = ints.iter().map(|x| f.from_bigint(x)).collect();
        let lead = *red.iter().find(|x| **x != 0)?;
        let inv = f.inv(&lead)?;
        if red.iter().map(|x| f.mul(x, &inv)).ne(v.iter().copied()) {
            return None;
        }
    }
    if ints.iter().all(Zero::is_zero) {
        return None;
    }
    ints.iter().map(|x| x.to_i128()).collect()
}

fn shapes_of(polys: &[HwvPoly]) -> Result<[Partition; 3], IdealError> {
    let first = polys.first().ok_or(IdealError::Empty)?;
    if polys.iter().any(|p| p.shapes() != first.shapes()) {
        return Err(IdealError::MixedShapes);
    }
    Ok([first.pi.clone(), first.mu.clone(), first.nu.clone()])
}

/// Computes the space of combinations of `polys` vanishing at random rank-`r`
/// decompositions.
///
/// Dimension 0 is conclusive: no combination vanishes on `sigma_r`. A positive
/// dimension is evidence, not proof.
pub fn vanishing_kernel(polys: &[HwvPoly], cfg: &KernelConfig) -> Result<VanishingKernel, IdealError> {
    let shapes = shapes_of(polys)?;
    let k = polys.len();
    let dims = cfg.dims.unwrap_or([shapes[0].len(), shapes[1].len(), shapes[2].len()]);
    let n0 = cfg.n_points.unwrap_or(2 * k + 4);
    if n0 < k + 4 {
        return Err(IdealError::TooFewPoints { min: k + 4, got: n0 });
    }
    let mut matrix = EvaluationMatrix::sample(polys, dims, cfg.r, n0, &cfg.primes, cfg.seed)?;
    let solve = |m: &EvaluationMatrix| -> Result<Vec<PrimeKernel>, IdealError> {
        m.primes.iter().enumerate().map(|(i, &p)| prime_kernel(p, &m.columns(i, m.points.len()))).collect()
    };
    let mut per_prime = solve(&matrix)?;
    let dim_of = |pk: &[PrimeKernel]| pk.iter().map(|p| p.basis.len()).min().unwrap_or(0);
    let mut history = vec![(matrix.points.len(), dim_of(&per_prime))];
    if cfg.stabilize {
        for _ in 0..cfg.max_doublings {
            let n = matrix.points.len();
            matrix.extend(dims, n)?;
            per_prime = solve(&matrix)?;
            let dim = dim_of(&per_prime);
            let stable = history.last().is_some_and(|&(_, prev)| prev == dim);
            history.push((matrix.points.len(), dim));
            if stable {
                break;
            }
        }
    }
    let dimension = dim_of(&per_prime);
    let same_dim = per_prime.iter().all(|p| p.basis.len() == dimension);
    let integer = if dimension == 1 && same_dim { lift(&per_prime) } else { None };
    let consistent = same_dim && (dimension != 1 || integer.is_some());
    Ok(VanishingKernel {
        shapes,
        polys: polys.to_vec(),
        r: cfg.r,
        dims,
        seed: cfg.seed,
        primes: cfg.primes.clone(),
        n_points: matrix.points.len(),
        history,
        per_prime,
        dimension,
        integer,
        consistent,
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::Permutation;

    fn d2() -> HwvPoly {
        HwvPoly::new("2".parse().unwrap(), "1,1".parse().unwrap(), "1,1".parse().unwrap(), Permutation::identity(2), Permutation::identity(2)).unwrap()
    }

    #[test]
    fn degree_two_polynomial_vanishes_on_rank_one_only() {
        let one = vanishing_kernel(&[d2()], &KernelConfig::new(1, 3)).unwrap();
        assert_eq!(one.dimension, 1);
        assert_eq!(one.integer, Some(vec![1]));
        assert!(one.consistent);
        let two = vanishing_kernel(&[d2()], &KernelConfig::new(2, 3)).unwrap();
        assert_eq!(two.dimension, 0);
        assert_eq!(two.per_prime[0].rank, 1);
    }

    #[test]
    fn duplicated_polynomial_gives_integer_relation() {
        // P and P again: kernel spanned by (1, -1)
        let kernel = vanishing_kernel(&[d2(), d2()], &KernelConfig::new(2, 5)).unwrap();
        assert_eq!(kernel.dimension, 1);
        assert_eq!(kernel.integer, Some(vec![1, -1]));
    }

    #[test]
    fn too_few_points_rejected() {
        let cfg = KernelConfig { n_points: Some(3), ..KernelConfig::new(1, 0) };
        assert!(matches!(vanishing_kernel(&[d2()], &cfg), Err(IdealError::TooFewPoints { .. })));
    }

    #[test]
    fn lifting_recovers_known_vector() {
        let target = [-266054i64, 421593, 755438, 374660];
        let kernels: Vec<PrimeKernel> = [P31, P61]
            .iter()
            .map(|&p| {
                let f = PrimeField::new(p).unwrap();
                let v: Vec<u64> = target.iter().map(|&x| f.from_i64(x)).collect();
                let inv = f.inv(&v[0]).unwrap();
                PrimeKernel { prime: p, rank: 3, basis: vec![v.iter().map(|x| f.mul(x, &inv)).collect()] }
            })
            .collect();
        assert_eq!(lift(&kernels), Some(vec![266054, -421593, -755438, -374660]));
    }
}
