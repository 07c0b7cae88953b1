use serde::Serialize;

use super::HwvPoly;
use crate::rep::{relocated_groupings, ColumnGrouping};

/// Everything the evaluator needs to know about a polynomial's slot structure.
#[derive(Clone, Debug, Serialize)]
pub struct EvalPlan {
    pub degree: usize,
    /// `A` from `pi`, `B` from `mu` moved by `tau1`, `C` from `nu` moved by `tau2`.
    pub groupings: [ColumnGrouping; 3],
    /// Slots in the order the search assigns them.
    pub order: Vec<usize>,
    /// `conflicts[slot][side]`: slots visited before `slot` that share its group on `side`.
    pub conflicts: Vec<[Vec<usize>; 3]>,
    /// `group_of[side][slot]`.
    pub group_of: [Vec<usize>; 3],
    /// Slot order for the frontier engine, chosen to keep the frontier narrow.
    pub frontier_order: Vec<usize>,
    /// `frontiers[i]`: slots among the first `i + 1` of `frontier_order` that
    /// still share a group with an unvisited slot, in increasing order.
    pub frontiers: Vec<Vec<usize>>,
}

impl EvalPlan {
    /// Depth at which group `g` on `side` has all its slots assigned.
    pub fn completion_depth(&self, side: usize, g: usize) -> usize {
        let pos: Vec<usize> = {
            let mut p = vec![0; self.degree];
            for (depth, &s) in self.order.iter().enumerate() {
                p[s] = depth;
            }
            p
        };
        self.groupings[side].groups[g].iter().map(|&s| pos[s]).max().unwrap_or(0)
    }
}

/// Greedy visitation order: next slot is the one with the most already-visited
/// slots sharing a group with it (summed over the three groupings), ties to
/// the smallest slot index.
pub fn build_plan(p: &HwvPoly) -> EvalPlan {
    let groupings = relocated_groupings(&p.pi, &p.mu, &p.nu, &p.tau1, &p.tau2).expect("validated polynomial");
    let d = p.degree();
    let group_of = [groupings[0].group_of_slot(), groupings[1].group_of_slot(), groupings[2].group_of_slot()];
    let mut visited = vec![false; d];
    let mut order = Vec::with_capacity(d);
    let mut conflicts: Vec<[Vec<usize>; 3]> = vec![Default::default(); d];
    for _ in 0..d {
        let score = |s: usize| -> usize {
            (0..3)
                .map(|side| order.iter().filter(|&&o| group_of[side][o] == group_of[side][s]).count())
                .sum()
        };
        let next = (0..d)
            .filter(|&s| !visited[s])
            .max_by(|&a, &b| score(a).cmp(&score(b)).then(b.cmp(&a)))
            .expect("unvisited slot remains");
        for side in 0..3 {
            conflicts[next][side] = order.iter().copied().filter(|&o| group_of[side][o] == group_of[side][next]).collect();
        }
        visited[next] = true;
        order.push(next);
    }
    let (frontier_order, frontiers) = narrow_frontier_order(&group_of, d);
    EvalPlan { degree: d, groupings, order, conflicts, group_of, frontier_order, frontiers }
}

/// Nominal branching factor used to weigh frontier widths against each other.
const FRONTIER_BASE: f64 = 6.0;
/// Largest degree for which the order is optimized exactly over all subsets.
const EXACT_ORDER_MAX_DEGREE: usize = 22;

fn frontiers_of(order: &[usize], mates: &[u64]) -> Vec<Vec<usize>> {
    let mut visited = 0u64;
    order
        .iter()
        .map(|&x| {
            visited |= 1 << x;
            (0..order.len()).filter(|&v| visited >> v & 1 == 1 && mates[v] & !visited != 0).collect()
        })
        .collect()
}

fn frontier_width(set: u64, mates: &[u64]) -> u32 {
    let mut rest = set;
    let mut n = 0;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if mates[v] & !set != 0 {
            n += 1;
        }
    }
    n
}

/// An order minimizing `sum_i BASE^|frontier_i|`. The frontier after visiting
/// a set depends only on the set, so for small degrees this is a shortest path
/// over subsets; larger degrees fall back to greedy narrowest-next.
fn narrow_frontier_order(group_of: &[Vec<usize>; 3], d: usize) -> (Vec<usize>, Vec<Vec<usize>>) {
    assert!(d < 64, "slot sets are bitmasks");
    let mates: Vec<u64> = (0..d)
        .map(|s| (0..d).filter(|&o| o != s && (0..3).any(|side| group_of[side][o] == group_of[side][s])).fold(0, |m, o| m | 1 << o))
        .collect();
    let order = if d <= EXACT_ORDER_MAX_DEGREE {
        let n = 1usize << d;
        let mut cost = vec![f64::INFINITY; n];
        let mut last = vec![0u8; n];
        cost[0] = 0.0;
        for set in 1..n {
            let here = FRONTIER_BASE.powi(frontier_width(set as u64, &mates) as i32);
            let mut rest = set;
            while rest != 0 {
                let x = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let c = cost[set & !(1 << x)] + here;
                if c < cost[set] {
                    cost[set] = c;
                    last[set] = x as u8;
                }
            }
        }
        let mut order = Vec::with_capacity(d);
        let mut set = n - 1;
        while set != 0 {
            let x = last[set] as usize;
            order.push(x);
            set &= !(1 << x);
        }
        order.reverse();
        order
    } else {
        let mut visited = 0u64;
        let mut order = Vec::with_capacity(d);
        for _ in 0..d {
            let x = (0..d)
                .filter(|&x| visited >> x & 1 == 0)
                .min_by_key(|&x| (frontier_width(visited | 1 << x, &mates), std::cmp::Reverse((mates[x] & visited).count_ones()), x))
                .expect("unvisited slot remains");
            visited |= 1 << x;
            order.push(x);
        }
        order
    };
    let frontiers = frontiers_of(&order, &mates);
    (order, frontiers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::{Partition, Permutation};

    fn poly(pi: &str, mu: &str, nu: &str, t1: &[usize], t2: &[usize]) -> HwvPoly {
        HwvPoly::new(
            pi.parse().unwrap(),
            mu.parse().unwrap(),
            nu.parse().unwrap(),
            Permutation::from_one_line(t1).unwrap(),
            Permutation::from_one_line(t2).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn degree_two_conflicts() {
        let plan = build_plan(&poly("2", "1,1", "1,1", &[1, 2], &[1, 2]));
        assert_eq!(plan.order, vec![0, 1]);
        assert_eq!(plan.conflicts[1], [vec![], vec![0], vec![0]]);
    }

    #[test]
    fn vanishing_pair_shares_all_groups() {
        let plan = build_plan(&poly("2,1", "2,1", "2,1", &[1, 2, 3], &[1, 2, 3]));
        for side in 0..3 {
            assert_eq!(plan.group_of[side][1], plan.group_of[side][2]);
        }
    }

    #[test]
    fn frontier_order_is_a_permutation_with_consistent_frontiers() {
        let p = &crate::hwv::m2_degree20_polys()[3];
        let plan = build_plan(p);
        let mut sorted = plan.frontier_order.clone();
        sorted.sort();
        assert_eq!(sorted, (0..20).collect::<Vec<_>>());
        assert!(plan.frontiers.last().unwrap().is_empty());
        assert!(plan.frontiers.iter().all(|f| f.len() <= 10));
        assert_eq!(build_plan(p).frontier_order, plan.frontier_order);
    }

    #[test]
    fn symmetric_pairs_give_symmetric_conflicts() {
        let s: Partition = "3,2,1".parse().unwrap();
        let t = Permutation::from_one_line(&[4, 2, 6, 1, 3, 5]).unwrap();
        let p = HwvPoly::new(s.clone(), s.clone(), s, t.clone(), t).unwrap();
        let plan = build_plan(&p);
        let mut sorted = plan.order.clone();
        sorted.sort();
        assert_eq!(sorted, (0..6).collect::<Vec<_>>());
        for c in &plan.conflicts {
            assert_eq!(c[1], c[2]);
        }
    }
}
