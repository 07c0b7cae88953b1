//! Column groupings of the slot layout `(a^1)^{p1-p2} (x) (a^1 ^ a^2)^{p2-p3} (x) ...`
//! and the zero-pattern obstruction.

use rand::RngCore;
use serde::Serialize;

use super::{Partition, Permutation, RepError};

/// Slots `0..d` split into ordered groups, one per column of the shape.
///
/// Within a group the slot order is the column order of the wedge determinant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColumnGrouping {
    pub shape: Partition,
    pub groups: Vec<Vec<usize>>,
}

impl ColumnGrouping {
    pub fn degree(&self) -> usize {
        self.shape.weight()
    }

    /// Group index of every slot.
    pub fn group_of_slot(&self) -> Vec<usize> {
        let mut g = vec![0; self.degree()];
        for (i, grp) in self.groups.iter().enumerate() {
            for &s in grp {
                g[s] = i;
            }
        }
        g
    }

    /// The layout seen after the slot action by `tau`: the block originally at
    /// slots `G` sits at `tau(G)`, elementwise and in order.
    pub fn relocated(&self, tau: &Permutation) -> ColumnGrouping {
        ColumnGrouping {
            shape: self.shape.clone(),
            groups: self.groups.iter().map(|g| g.iter().map(|&s| tau.apply(s)).collect()).collect(),
        }
    }
}

/// For `j = 1..=len`, `p_j - p_{j+1}` consecutive blocks of size `j`, singletons first.
pub fn column_grouping(pi: &Partition) -> ColumnGrouping {
    let mut groups = Vec::new();
    let mut next = 0;
    for j in 1..=pi.len() {
        let count = pi.part(j - 1) - pi.part(j);
        for _ in 0..count {
            groups.push((next..next + j).collect());
            next += j;
        }
    }
    ColumnGrouping { shape: pi.clone(), groups }
}

/// The three groupings seen by a permutation pair: `A` from `pi`, `B` from
/// `mu` relocated by `tau1`, `C` from `nu` relocated by `tau2`.
pub fn relocated_groupings(
    pi: &Partition,
    mu: &Partition,
    nu: &Partition,
    tau1: &Permutation,
    tau2: &Permutation,
) -> Result<[ColumnGrouping; 3], RepError> {
    let d = pi.weight();
    if mu.weight() != d || nu.weight() != d {
        return Err(RepError::WeightMismatch(vec![d, mu.weight(), nu.weight()]));
    }
    if tau1.len() != d || tau2.len() != d {
        return Err(RepError::PermutationLength { expected: d, got: tau1.len().max(tau2.len()) });
    }
    Ok([column_grouping(pi), column_grouping(mu).relocated(tau1), column_grouping(nu).relocated(tau2)])
}

/// True when some pair of slots shares a group in all three groupings; the
/// corresponding polynomial is then identically zero.
pub fn has_zero_pattern(
    pi: &Partition,
    mu: &Partition,
    nu: &Partition,
    tau1: &Permutation,
    tau2: &Permutation,
) -> Result<bool, RepError> {
    let groupings = relocated_groupings(pi, mu, nu, tau1, tau2)?;
    Ok(groupings_have_zero_pattern(&groupings))
}

pub(crate) fn groupings_have_zero_pattern(groupings: &[ColumnGrouping; 3]) -> bool {
    let gb = groupings[1].group_of_slot();
    let gc = groupings[2].group_of_slot();
    groupings[0]
        .groups
        .iter()
        .any(|g| g.iter().enumerate().any(|(x, &i)| g[x + 1..].iter().any(|&j| gb[i] == gb[j] && gc[i] == gc[j])))
}

/// Default number of draws before giving up.
pub const DEFAULT_PAIR_BUDGET: usize = 1_000_000;

/// Draws uniform pairs `(tau1, tau2)` until one has no zero pattern.
pub fn random_pair_avoiding_zero_pattern(
    pi: &Partition,
    mu: &Partition,
    nu: &Partition,
    rng: &mut dyn RngCore,
    budget: usize,
) -> Result<(Permutation, Permutation), RepError> {
    let d = pi.weight();
    if mu.weight() != d || nu.weight() != d {
        return Err(RepError::WeightMismatch(vec![d, mu.weight(), nu.weight()]));
    }
    for _ in 0..budget {
        let t1 = Permutation::random(d, rng);
        let t2 = Permutation::random(d, rng);
        if !has_zero_pattern(pi, mu, nu, &t1, &t2)? {
            return Ok((t1, t2));
        }
    }
    Err(RepError::BudgetExhausted(budget))
}
