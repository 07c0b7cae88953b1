//! Symmetric group characters by the Murnaghan-Nakayama rule, Kronecker
//! coefficients, and the Weyl dimension formula.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::{Partition, RepError};

/// Memoized Murnaghan-Nakayama evaluator.
///
/// The cache is keyed on `(shape, remaining class parts)`; removing the parts
/// of the class in a fixed order makes the subproblems shared across classes.
#[derive(Default, Debug)]
pub struct Characters {
    memo: HashMap<(Vec<u32>, Vec<u32>), i64>,
}

impl Characters {
    pub fn new() -> Self {
        Self::default()
    }

    /// `chi_lambda(mu)`.
    pub fn chi(&mut self, lambda: &Partition, mu: &Partition) -> Result<i64, RepError> {
        if lambda.weight() != mu.weight() {
            return Err(RepError::WeightMismatch(vec![lambda.weight(), mu.weight()]));
        }
        Ok(self.chi_rec(lambda.parts(), mu.parts()))
    }

    fn chi_rec(&mut self, lambda: &[u32], mu: &[u32]) -> i64 {
        if mu.is_empty() {
            return 1; // lambda is empty too
        }
        if lambda.len() <= 1 {
            return 1; // trivial character
        }
        let key = (lambda.to_vec(), mu.to_vec());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let k = mu[0];
        let rest = &mu[1..];
        let mut total = 0i64;
        for (shape, sign) in remove_rim_hooks(lambda, k) {
            total += sign * self.chi_rec(&shape, rest);
        }
        self.memo.insert(key, total);
        total
    }
}

/// All shapes obtained from `lambda` by removing a rim hook of length `k`,
/// each with the sign `(-1)^(height)`.
fn remove_rim_hooks(lambda: &[u32], k: u32) -> Vec<(Vec<u32>, i64)> {
    let l = lambda.len();
    // beta numbers, strictly decreasing
    let beta: Vec<i64> = lambda.iter().enumerate().map(|(i, &p)| p as i64 + (l - 1 - i) as i64).collect();
    let mut out = Vec::new();
    for i in 0..l {
        let target = beta[i] - k as i64;
        if target < 0 || beta.contains(&target) {
            continue;
        }
        let between = beta.iter().filter(|&&b| b > target && b < beta[i]).count();
        let mut nb = beta.clone();
        nb[i] = target;
        nb.sort_unstable_by(|a, b| b.cmp(a));
        let mut shape: Vec<u32> = nb.iter().enumerate().map(|(j, &b)| (b - (l - 1 - j) as i64) as u32).collect();
        while shape.last() == Some(&0) {
            shape.pop();
        }
        out.push((shape, if between % 2 == 0 { 1 } else { -1 }));
    }
    out
}

/// `z_mu = prod_i i^{m_i} m_i!`, the centralizer order of the class `mu`.
pub fn centralizer_order(mu: &Partition) -> BigUint {
    let mut z = BigUint::one();
    let mut counts: HashMap<u32, u32> = HashMap::new();
    for &p in mu.parts() {
        *counts.entry(p).or_default() += 1;
    }
    for (part, m) in counts {
        for j in 1..=m {
            z *= BigUint::from(part) * BigUint::from(j);
        }
    }
    z
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, i| acc * i)
}

/// Full character table of `S_d`.
#[derive(Clone, Debug, Serialize)]
pub struct CharacterTable {
    pub degree: usize,
    /// Irreducibles and classes, both indexed by [`Partition::all`].
    pub partitions: Vec<Partition>,
    /// `values[lambda][mu]`.
    pub values: Vec<Vec<i64>>,
    /// `|C_mu| = d! / z_mu`.
    pub class_sizes: Vec<BigUint>,
}

impl CharacterTable {
    pub fn new(d: usize) -> Self {
        let partitions = Partition::all(d as u32);
        let mut mn = Characters::new();
        let values = partitions
            .iter()
            .map(|l| partitions.iter().map(|m| mn.chi(l, m).expect("equal weights")).collect())
            .collect();
        let fact = factorial(d);
        let class_sizes = partitions.iter().map(|m| &fact / centralizer_order(m)).collect();
        CharacterTable { degree: d, partitions, values, class_sizes }
    }

    /// `sum_mu |C_mu| chi_a(mu) chi_b(mu)`, which is `d!` for `a == b` and 0 otherwise.
    pub fn inner_product_scaled(&self, a: usize, b: usize) -> BigInt {
        self.class_sizes
            .iter()
            .enumerate()
            .map(|(m, c)| BigInt::from(c.clone()) * self.values[a][m] * self.values[b][m])
            .sum()
    }
}

/// Kronecker coefficient `k_{pi,mu,nu} = (1/d!) sum_rho |C_rho| chi_pi chi_mu chi_nu`.
pub fn kronecker(pi: &Partition, mu: &Partition, nu: &Partition) -> Result<u64, RepError> {
    let mut mn = Characters::new();
    kronecker_with(&mut mn, pi, mu, nu)
}

/// As [`kronecker`], sharing a character cache across calls.
pub fn kronecker_with(mn: &mut Characters, pi: &Partition, mu: &Partition, nu: &Partition) -> Result<u64, RepError> {
    let d = pi.weight();
    if mu.weight() != d || nu.weight() != d {
        return Err(RepError::WeightMismatch(vec![d, mu.weight(), nu.weight()]));
    }
    let fact = BigInt::from(factorial(d));
    let mut sum = BigInt::zero();
    for rho in Partition::all(d as u32) {
        let a = mn.chi(pi, &rho)?;
        if a == 0 {
            continue;
        }
        let b = mn.chi(mu, &rho)?;
        if b == 0 {
            continue;
        }
        let c = mn.chi(nu, &rho)?;
        let class = BigInt::from(factorial(d) / centralizer_order(&rho));
        sum += class * a * b * c;
    }
    let (q, r) = sum.div_rem(&fact);
    debug_assert!(r.is_zero());
    q.to_u64().ok_or(RepError::Overflow)
}

/// Dimension of the irreducible `GL_n`-module `S_pi`, via
/// `prod_{i<j} (p_i - p_j + j - i) / (j - i)`.
pub fn weyl_dim(pi: &Partition, n: usize) -> Result<u64, RepError> {
    if pi.len() > n {
        return Err(RepError::TooManyParts { parts: pi.len(), n });
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..n {
        for j in i + 1..n {
            let pi_i = pi.part(i) as u64;
            let pi_j = pi.part(j) as u64;
            num *= pi_i - pi_j + (j - i) as u64;
            den *= (j - i) as u64;
        }
    }
    let (q, r) = num.div_rem(&den);
    debug_assert!(r.is_zero());
    q.to_u64().ok_or(RepError::Overflow)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn small_character_values() {
        let mut mn = Characters::new();
        assert_eq!(mn.chi(&p("4"), &p("2,1,1")).unwrap(), 1);
        assert_eq!(mn.chi(&p("1,1"), &p("2")).unwrap(), -1);
        assert_eq!(mn.chi(&p("2,1"), &p("1,1,1")).unwrap(), 2);
        assert_eq!(mn.chi(&p("2,1"), &p("3")).unwrap(), -1);
        assert_eq!(mn.chi(&p("2,2"), &p("2,2")).unwrap(), 2);
        assert!(mn.chi(&p("2"), &p("1,1,1")).is_err());
    }

    #[test]
    fn character_degrees_match_hook_lengths() {
        // dimension of S^(3,2) is 5, S^(3,1,1) is 6, S^(4,4,4,4,3)... use small ones
        let mut mn = Characters::new();
        assert_eq!(mn.chi(&p("3,2"), &p("1,1,1,1,1")).unwrap(), 5);
        assert_eq!(mn.chi(&p("3,1,1"), &p("1,1,1,1,1")).unwrap(), 6);
    }

    #[test]
    fn paper_kronecker_values_small() {
        assert_eq!(kronecker(&p("2"), &p("1,1"), &p("1,1")).unwrap(), 1);
        assert_eq!(kronecker(&p("2,1"), &p("2,1"), &p("2,1")).unwrap(), 1);
        assert_eq!(kronecker(&p("3"), &p("2,1"), &p("3")).unwrap(), 0);
        assert!(kronecker(&p("3"), &p("2,1"), &p("2")).is_err());
    }

    #[test]
    fn weyl_dimensions() {
        assert_eq!(weyl_dim(&p("1,1"), 2).unwrap(), 1);
        assert_eq!(weyl_dim(&p("2"), 2).unwrap(), 3);
        assert_eq!(weyl_dim(&p("5,5,5,4"), 4).unwrap(), 4);
        assert_eq!(weyl_dim(&p("5,5,5,5"), 4).unwrap(), 1);
        assert!(weyl_dim(&p("1,1,1"), 2).is_err());
    }
}
