//! Pruned evaluation of a permutation-pair polynomial at a rank-one decomposition.
//!
//! For `w = sum_s u_s (x) v_s (x) w_s` the contraction `<F^{tau1,tau2}, w^{(x)d}>`
//! expands into a sum over assignments `slot -> term` of a product of
//! determinants, one per column group of each of the three groupings: the
//! `g x g` determinant of the first `g` coordinates of the chosen side vectors,
//! taken in the group's slot order. The wedge normalizations `1/g!` and the
//! symmetrization constant are omitted; they only rescale the polynomial by a
//! nonzero constant depending on the shapes.
//!
//! The search assigns slots in the plan's order and cuts a branch as soon as
//! two slots of one group receive parallel vectors (the determinant would have
//! repeated columns) or a completed group's determinant is zero.

use rayon::prelude::*;

use super::plan::{build_plan, EvalPlan};
use super::{HwvError, HwvPoly};
use crate::scalar::linalg::{determinant, Matrix};
use crate::scalar::{Field, FieldError};
use crate::tensor::Decomposition;

/// Class id marking a vector whose truncation is zero.
const ZERO_CLASS: u8 = u8::MAX;
/// Largest determinant lookup table built per (side, group size).
const MAX_TABLE: usize = 1 << 20;

/// Which summation strategy [`evaluate_with`] uses. Both return the same value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Frontier when applicable, search otherwise.
    #[default]
    Auto,
    /// Depth-first enumeration of every surviving assignment.
    Search,
    /// Dynamic program over the frontier of the slot order: partial sums of
    /// assignments agreeing on the slots still tied to unvisited ones are merged.
    Frontier,
}

#[derive(Clone, Debug)]
pub struct EvalConfig {
    pub engine: Engine,
    /// Prefix depth at which the search forest is split into parallel tasks.
    pub split_depth: usize,
    pub parallel: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { engine: Engine::Auto, split_depth: 3, parallel: true }
    }
}

/// Frontier keys pack one 6-bit term index per frontier slot.
const MAX_FRONTIER: usize = 10;

/// Evaluates `p` at `w` with a freshly built plan.
pub fn evaluate<F: Field>(field: &F, p: &HwvPoly, w: &Decomposition<F::Elem>) -> Result<F::Elem, HwvError> {
    evaluate_with(field, &build_plan(p), w, &EvalConfig::default())
}

pub fn evaluate_with<F: Field>(
    field: &F,
    plan: &EvalPlan,
    w: &Decomposition<F::Elem>,
    cfg: &EvalConfig,
) -> Result<F::Elem, HwvError> {
    w.validate()?;
    let p = field.characteristic();
    if p != 0 && p <= plan.degree as u64 {
        return Err(FieldError::PrimeTooSmall { p, d: plan.degree }.into());
    }
    for (side, name) in ['A', 'B', 'C'].into_iter().enumerate() {
        let shape = &plan.groupings[side].shape;
        if shape.len() > w.dims[side] {
            return Err(HwvError::ShapeExceedsDim { side: name, shape: shape.clone(), parts: shape.len(), dim: w.dims[side] });
        }
    }
    if w.rank() > 64 {
        return Err(HwvError::TooManyTerms(w.rank()));
    }
    let max_col = plan.groupings.iter().map(|g| g.shape.len()).max().unwrap_or(0);
    if w.rank() < max_col {
        return Ok(field.zero());
    }
    let search = Search::new(field, plan, w);
    let frontier_ok = plan.frontiers.iter().all(|f| f.len() <= MAX_FRONTIER) && search.all_tabulated();
    match cfg.engine {
        Engine::Search => Ok(search.run(cfg)),
        Engine::Auto if !frontier_ok => Ok(search.run(cfg)),
        _ => {
            if !frontier_ok {
                return Err(HwvError::FrontierTooWide);
            }
            Ok(search.run_frontier(plan, cfg))
        }
    }
}

struct GroupInfo {
    slots: Vec<usize>,
    table: usize,
}

enum DetTable<E> {
    /// `g = 1`: the first coordinate of each term's vector.
    Single(Vec<E>),
    /// Lookup by `sum_i term_i * r^(g-1-i)`.
    Table(Vec<E>),
    /// Truncated vectors, determinant computed on demand.
    Direct(Vec<Vec<E>>),
}

struct Step {
    slot: usize,
    /// Flattened group id on each side.
    gid: [usize; 3],
    /// Table index weight of this slot inside its group, per side.
    stride: [usize; 3],
    /// Terms whose truncation is nonzero on all three sides.
    valid: u64,
    /// `parallel[side][t]`: terms whose truncation is parallel to term `t`'s.
    parallel: [Vec<u64>; 3],
    /// Groups whose last slot is this one.
    completes: Vec<usize>,
}

/// Mutable search state; cloned once per parallel task.
#[derive(Clone)]
struct State {
    /// Terms excluded from each group because a parallel vector is already in it.
    blocked: Vec<u64>,
    /// Partial lookup index of each group.
    index: Vec<usize>,
    assign: Vec<u8>,
}

struct Search<'a, F: Field> {
    field: &'a F,
    r: usize,
    d: usize,
    steps: Vec<Step>,
    groups: Vec<GroupInfo>,
    tables: Vec<DetTable<F::Elem>>,
    /// Table keys of the last slot's three groups, when all are tabulated.
    leaf_keys: Option<[usize; 3]>,
}

impl<'a, F: Field> Search<'a, F> {
    fn new(field: &'a F, plan: &EvalPlan, w: &Decomposition<F::Elem>) -> Self {
        let r = w.rank();
        let mut parallel: Vec<Vec<u64>> = Vec::new();
        let mut tables: Vec<DetTable<F::Elem>> = Vec::new();
        // (side, g) -> index into parallel/tables
        let mut key_of: Vec<(usize, usize)> = Vec::new();
        let mut groups = Vec::new();
        let mut gid_base = [0usize; 3];
        for side in 0..3 {
            gid_base[side] = groups.len();
            for g in &plan.groupings[side].groups {
                let size = g.len();
                let key = match key_of.iter().position(|&k| k == (side, size)) {
                    Some(k) => k,
                    None => {
                        let vecs: Vec<Vec<F::Elem>> = w.terms.iter().map(|t| t.side(side)[..size].to_vec()).collect();
                        parallel.push(parallel_masks(&projective_classes(field, &vecs)));
                        tables.push(det_table(field, vecs, size));
                        key_of.push((side, size));
                        key_of.len() - 1
                    }
                };
                groups.push(GroupInfo { slots: g.clone(), table: key });
            }
        }
        let mut pos = vec![0; plan.degree];
        for (depth, &s) in plan.order.iter().enumerate() {
            pos[s] = depth;
        }
        let steps: Vec<Step> = plan
            .order
            .iter()
            .enumerate()
            .map(|(depth, &slot)| {
                let gid = [0, 1, 2].map(|side| gid_base[side] + plan.group_of[side][slot]);
                let stride = gid.map(|g| {
                    let slots = &groups[g].slots;
                    let at = slots.iter().position(|&s| s == slot).expect("slot in its group");
                    r.pow((slots.len() - 1 - at) as u32)
                });
                let par = gid.map(|g| parallel[groups[g].table].clone());
                let valid = (0..r).filter(|&t| par.iter().all(|p| p[t] != 0)).fold(0u64, |m, t| m | 1 << t);
                let completes = gid
                    .iter()
                    .copied()
                    .filter(|&g| groups[g].slots.iter().map(|&s| pos[s]).max() == Some(depth))
                    .collect();
                Step { slot, gid, stride, valid, parallel: par, completes }
            })
            .collect();
        let leaf_keys = steps.last().and_then(|st: &Step| {
            let keys = st.gid.map(|g| groups[g].table);
            keys.iter().all(|&k| matches!(tables[k], DetTable::Table(_))).then_some(keys)
        });
        Search { field, r, d: plan.degree, steps, groups, tables, leaf_keys }
    }

    fn group_det(&self, gid: usize, state: &State) -> F::Elem {
        let g = &self.groups[gid];
        match &self.tables[g.table] {
            DetTable::Single(first) => first[state.assign[g.slots[0]] as usize].clone(),
            DetTable::Table(t) => t[state.index[gid]].clone(),
            DetTable::Direct(vecs) => {
                let cols: Vec<&[F::Elem]> = g.slots.iter().map(|&s| vecs[state.assign[s] as usize].as_slice()).collect();
                small_det(self.field, &cols)
            }
        }
    }

    /// Terms that may go into the slot of `depth` given the groups filled so far.
    #[inline(always)]
    fn available(&self, depth: usize, state: &State) -> u64 {
        let st = &self.steps[depth];
        st.valid & !(state.blocked[st.gid[0]] | state.blocked[st.gid[1]] | state.blocked[st.gid[2]])
    }

    /// Places term `t` at `depth`; returns the updated product, or `None` (with
    /// the state restored) when a completed group has zero determinant.
    #[inline(always)]
    fn place(&self, depth: usize, t: usize, prod: &F::Elem, state: &mut State) -> Option<F::Elem> {
        let st = &self.steps[depth];
        state.assign[st.slot] = t as u8;
        for side in 0..3 {
            state.index[st.gid[side]] += t * st.stride[side];
        }
        let mut p = prod.clone();
        for &g in &st.completes {
            let det = self.group_det(g, state);
            if self.field.is_zero(&det) {
                for side in 0..3 {
                    state.index[st.gid[side]] -= t * st.stride[side];
                }
                return None;
            }
            p = self.field.mul(&p, &det);
        }
        for side in 0..3 {
            state.blocked[st.gid[side]] |= st.parallel[side][t];
        }
        Some(p)
    }

    #[inline(always)]
    fn unplace(&self, depth: usize, t: usize, state: &mut State) {
        let st = &self.steps[depth];
        for side in 0..3 {
            state.blocked[st.gid[side]] &= !st.parallel[side][t];
            state.index[st.gid[side]] -= t * st.stride[side];
        }
    }

    fn dfs(&self, depth: usize, prod: &F::Elem, state: &mut State, acc: &mut F::Elem) {
        let mut avail = self.available(depth, state);
        if depth + 1 == self.d {
            if let Some(keys) = self.leaf_keys {
                let tables = keys.map(|k| match &self.tables[k] {
                    DetTable::Table(t) => t.as_slice(),
                    _ => unreachable!("leaf keys point at lookup tables"),
                });
                // every group of the last slot completes here
                let st = &self.steps[depth];
                let base = st.gid.map(|g| state.index[g]);
                let mut sum = self.field.zero();
                while avail != 0 {
                    let t = avail.trailing_zeros() as usize;
                    avail &= avail - 1;
                    let a = &tables[0][base[0] + t * st.stride[0]];
                    let b = &tables[1][base[1] + t * st.stride[1]];
                    let c = &tables[2][base[2] + t * st.stride[2]];
                    sum = self.field.add(&sum, &self.field.mul(&self.field.mul(a, b), c));
                }
                *acc = self.field.add(acc, &self.field.mul(prod, &sum));
                return;
            }
            while avail != 0 {
                let t = avail.trailing_zeros() as usize;
                avail &= avail - 1;
                if let Some(p) = self.place(depth, t, prod, state) {
                    *acc = self.field.add(acc, &p);
                    self.unplace(depth, t, state);
                }
            }
            return;
        }
        while avail != 0 {
            let t = avail.trailing_zeros() as usize;
            avail &= avail - 1;
            if let Some(p) = self.place(depth, t, prod, state) {
                self.dfs(depth + 1, &p, state, acc);
                self.unplace(depth, t, state);
            }
        }
    }

    fn prefixes(&self, depth: usize, stop: usize, prod: &F::Elem, state: &mut State, out: &mut Vec<(F::Elem, State)>) {
        if depth == stop {
            out.push((prod.clone(), state.clone()));
            return;
        }
        let mut avail = self.available(depth, state);
        while avail != 0 {
            let t = avail.trailing_zeros() as usize;
            avail &= avail - 1;
            if let Some(p) = self.place(depth, t, prod, state) {
                self.prefixes(depth + 1, stop, &p, state, out);
                self.unplace(depth, t, state);
            }
        }
    }

    fn run(&self, cfg: &EvalConfig) -> F::Elem {
        let mut state = State { blocked: vec![0; self.groups.len()], index: vec![0; self.groups.len()], assign: vec![0; self.d] };
        if self.d == 0 {
            return self.field.one();
        }
        let split = cfg.split_depth.min(self.d - 1);
        if !cfg.parallel || split == 0 {
            let mut acc = self.field.zero();
            self.dfs(0, &self.field.one(), &mut state, &mut acc);
            return acc;
        }
        let mut tasks = Vec::new();
        self.prefixes(0, split, &self.field.one(), &mut state, &mut tasks);
        tasks
            .into_par_iter()
            .map(|(prod, mut state)| {
                let mut acc = self.field.zero();
                self.dfs(split, &prod, &mut state, &mut acc);
                acc
            })
            .reduce(|| self.field.zero(), |a, b| self.field.add(&a, &b))
    }
}

struct FrontierStep {
    /// Previous-key positions of visited group-mates, per side.
    mates: [Vec<usize>; 3],
    /// For each group completing here: table key, `(previous-key position, stride)`
    /// of its other slots, and the stride of the new slot.
    completes: Vec<(usize, Vec<(usize, usize)>, usize)>,
    /// `(previous position, new position)` of slots staying in the frontier.
    carry: Vec<(usize, usize)>,
    /// Position of the new slot in the new key, if it stays in the frontier.
    slot_pos: Option<usize>,
    valid: u64,
    parallel: [Vec<u64>; 3],
}

#[inline(always)]
fn key_val(key: u64, pos: usize) -> usize {
    ((key >> (6 * pos)) & 63) as usize
}

impl<'a, F: Field> Search<'a, F> {
    fn all_tabulated(&self) -> bool {
        self.tables.iter().all(|t| !matches!(t, DetTable::Direct(_)))
    }

    fn table_slice(&self, key: usize) -> &[F::Elem] {
        match &self.tables[key] {
            DetTable::Single(v) | DetTable::Table(v) => v,
            DetTable::Direct(_) => unreachable!("frontier engine needs tabulated groups"),
        }
    }

    fn frontier_steps(&self, plan: &EvalPlan) -> Vec<FrontierStep> {
        let mut pos_in_order = vec![0; self.d];
        for (i, &s) in plan.frontier_order.iter().enumerate() {
            pos_in_order[s] = i;
        }
        let by_slot: Vec<&Step> = {
            let mut v: Vec<Option<&Step>> = vec![None; self.d];
            for st in &self.steps {
                v[st.slot] = Some(st);
            }
            v.into_iter().map(|s| s.expect("every slot has a step")).collect()
        };
        let empty = Vec::new();
        plan.frontier_order
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let prev = if i == 0 { &empty } else { &plan.frontiers[i - 1] };
                let next = &plan.frontiers[i];
                let at = |s: usize| prev.iter().position(|&p| p == s).expect("visited mate is in the frontier");
                let st = by_slot[x];
                let mates = st.gid.map(|g| {
                    self.groups[g].slots.iter().filter(|&&s| s != x && pos_in_order[s] < i).map(|&s| at(s)).collect()
                });
                let completes = st
                    .gid
                    .iter()
                    .filter(|&&g| self.groups[g].slots.iter().all(|&s| pos_in_order[s] <= i))
                    .map(|&g| {
                        let grp = &self.groups[g];
                        let n = grp.slots.len();
                        let stride = |k: usize| self.r.pow((n - 1 - k) as u32);
                        let others = grp.slots.iter().enumerate().filter(|&(_, &s)| s != x).map(|(k, &s)| (at(s), stride(k))).collect();
                        let own = grp.slots.iter().position(|&s| s == x).expect("slot in group");
                        (grp.table, others, stride(own))
                    })
                    .collect();
                let carry = next.iter().enumerate().filter(|&(_, &s)| s != x).map(|(j, &s)| (at(s), j)).collect();
                let slot_pos = next.iter().position(|&s| s == x);
                FrontierStep { mates, completes, carry, slot_pos, valid: st.valid, parallel: st.parallel.clone() }
            })
            .collect()
    }

    fn expand_state(&self, fs: &FrontierStep, key: u64, val: &F::Elem, out: &mut Vec<(u64, F::Elem)>) {
        let mut blocked = 0u64;
        for side in 0..3 {
            for &p in &fs.mates[side] {
                blocked |= fs.parallel[side][key_val(key, p)];
            }
        }
        let mut avail = fs.valid & !blocked;
        if avail == 0 {
            return;
        }
        let mut bases = [0usize; 3];
        for (b, (_, others, _)) in bases.iter_mut().zip(&fs.completes) {
            *b = others.iter().map(|&(p, stride)| key_val(key, p) * stride).sum();
        }
        let new_base = fs.carry.iter().fold(0u64, |k, &(from, to)| k | ((key_val(key, from) as u64) << (6 * to)));
        'terms: while avail != 0 {
            let t = avail.trailing_zeros() as usize;
            avail &= avail - 1;
            let mut p = val.clone();
            for (b, (table, _, stride)) in bases.iter().zip(&fs.completes) {
                let det = &self.table_slice(*table)[b + t * stride];
                if self.field.is_zero(det) {
                    continue 'terms;
                }
                p = self.field.mul(&p, det);
            }
            let k = match fs.slot_pos {
                Some(pos) => new_base | (t as u64) << (6 * pos),
                None => new_base,
            };
            out.push((k, p));
        }
    }

    fn run_frontier(&self, plan: &EvalPlan, cfg: &EvalConfig) -> F::Elem {
        let steps = self.frontier_steps(plan);
        let mut states: Vec<(u64, F::Elem)> = vec![(0, self.field.one())];
        for fs in &steps {
            let mut next: Vec<(u64, F::Elem)> = if cfg.parallel && states.len() > 4096 {
                states
                    .par_chunks(1024)
                    .flat_map_iter(|chunk| {
                        let mut out = Vec::new();
                        for (key, val) in chunk {
                            self.expand_state(fs, *key, val, &mut out);
                        }
                        out
                    })
                    .collect()
            } else {
                let mut out = Vec::new();
                for (key, val) in &states {
                    self.expand_state(fs, *key, val, &mut out);
                }
                out
            };
            if cfg.parallel {
                next.par_sort_unstable_by_key(|e| e.0);
            } else {
                next.sort_unstable_by_key(|e| e.0);
            }
            states = merge_sorted(self.field, next);
            if states.is_empty() {
                return self.field.zero();
            }
        }
        states.into_iter().fold(self.field.zero(), |acc, (_, v)| self.field.add(&acc, &v))
    }
}

/// Adds up the values of equal keys in a key-sorted list, dropping zero sums.
fn merge_sorted<F: Field>(field: &F, sorted: Vec<(u64, F::Elem)>) -> Vec<(u64, F::Elem)> {
    let mut out: Vec<(u64, F::Elem)> = Vec::with_capacity(sorted.len() / 2 + 1);
    for (k, v) in sorted {
        match out.last_mut() {
            Some((lk, lv)) if *lk == k => *lv = field.add(lv, &v),
            _ => {
                if out.last().is_some_and(|(_, lv)| field.is_zero(lv)) {
                    out.pop();
                }
                out.push((k, v));
            }
        }
    }
    if out.last().is_some_and(|(_, lv)| field.is_zero(lv)) {
        out.pop();
    }
    out
}

/// `masks[t]`: bitmask of the terms sharing term `t`'s class; zero for the
/// zero class.
fn parallel_masks(classes: &[u8]) -> Vec<u64> {
    classes
        .iter()
        .map(|&c| {
            if c == ZERO_CLASS {
                return 0;
            }
            classes.iter().enumerate().filter(|&(_, &o)| o == c).fold(0u64, |m, (t, _)| m | 1 << t)
        })
        .collect()
}

/// Class ids such that two vectors share an id iff they are parallel; zero
/// vectors get [`ZERO_CLASS`].
fn projective_classes<F: Field>(field: &F, vecs: &[Vec<F::Elem>]) -> Vec<u8> {
    let mut reps: Vec<Vec<F::Elem>> = Vec::new();
    vecs.iter()
        .map(|v| {
            let Some(lead) = v.iter().find(|x| !field.is_zero(x)) else {
                return ZERO_CLASS;
            };
            let inv = field.inv(lead).expect("nonzero");
            let normalized: Vec<F::Elem> = v.iter().map(|x| field.mul(x, &inv)).collect();
            match reps.iter().position(|r| *r == normalized) {
                Some(i) => i as u8,
                None => {
                    reps.push(normalized);
                    (reps.len() - 1) as u8
                }
            }
        })
        .collect()
}

fn det_table<F: Field>(field: &F, vecs: Vec<Vec<F::Elem>>, g: usize) -> DetTable<F::Elem> {
    let r = vecs.len();
    if g == 1 {
        return DetTable::Single(vecs.into_iter().map(|v| v[0].clone()).collect());
    }
    let size = r.checked_pow(g as u32).filter(|&s| s <= MAX_TABLE);
    let Some(size) = size else {
        return DetTable::Direct(vecs);
    };
    let mut table = Vec::with_capacity(size);
    let mut tuple = vec![0usize; g];
    for _ in 0..size {
        let distinct = (0..g).all(|i| (i + 1..g).all(|j| tuple[i] != tuple[j]));
        let det = if distinct {
            let cols: Vec<&[F::Elem]> = tuple.iter().map(|&t| vecs[t].as_slice()).collect();
            small_det(field, &cols)
        } else {
            field.zero()
        };
        table.push(det);
        // odometer, last index fastest
        for i in (0..g).rev() {
            tuple[i] += 1;
            if tuple[i] < r {
                break;
            }
            tuple[i] = 0;
        }
    }
    DetTable::Table(table)
}

/// Determinant of the matrix whose columns are `cols`; unrolled up to size 4.
pub(crate) fn small_det<F: Field>(f: &F, cols: &[&[F::Elem]]) -> F::Elem {
    let m = |i: usize, j: usize| &cols[j][i];
    let det2 = |a: &F::Elem, b: &F::Elem, c: &F::Elem, d: &F::Elem| f.sub(&f.mul(a, d), &f.mul(b, c));
    match cols.len() {
        0 => f.one(),
        1 => m(0, 0).clone(),
        2 => det2(m(0, 0), m(0, 1), m(1, 0), m(1, 1)),
        3 => {
            let c0 = det2(m(1, 1), m(1, 2), m(2, 1), m(2, 2));
            let c1 = det2(m(1, 0), m(1, 2), m(2, 0), m(2, 2));
            let c2 = det2(m(1, 0), m(1, 1), m(2, 0), m(2, 1));
            f.add(&f.sub(&f.mul(m(0, 0), &c0), &f.mul(m(0, 1), &c1)), &f.mul(m(0, 2), &c2))
        }
        4 => {
            // Laplace expansion along the first two rows
            let lo = |a: usize, b: usize| det2(m(0, a), m(0, b), m(1, a), m(1, b));
            let hi = |a: usize, b: usize| det2(m(2, a), m(2, b), m(3, a), m(3, b));
            let terms = [
                (lo(0, 1), hi(2, 3), false),
                (lo(0, 2), hi(1, 3), true),
                (lo(0, 3), hi(1, 2), false),
                (lo(1, 2), hi(0, 3), false),
                (lo(1, 3), hi(0, 2), true),
                (lo(2, 3), hi(0, 1), false),
            ];
            terms.iter().fold(f.zero(), |acc, (x, y, neg)| {
                let t = f.mul(x, y);
                if *neg {
                    f.sub(&acc, &t)
                } else {
                    f.add(&acc, &t)
                }
            })
        }
        n => {
            let data = (0..n).flat_map(|i| (0..n).map(move |j| cols[j][i].clone())).collect();
            determinant(f, &Matrix { rows: n, cols: n, data }).expect("square")
        }
    }
}
