//! Pseudowitness sets `{F, pi, L, W}` for images of parametrizations.
//!
//! Points are kept in source coordinates `y`. The system is
//! `[A g(y) - b; B y - c]`: `k = dim X` general affine forms on the image and
//! `n - k` general affine forms on the source, which cut each positive
//! dimensional fiber of `g` down to finitely many points. `W` holds one source
//! point per distinct image point.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::param::{Parametrization, VarietySpec};
use super::track::{refine, track_with_retries, System, TrackError, TrackerConfig};
use super::{dist, norm, random_normal, random_unit, random_vector, NumagError};
use crate::rng;
use crate::scalar::{svd_nullspace, C64};

/// Image points closer than this (relative to their size) are the same point.
pub const DEDUP_TOL: f64 = 1e-6;
/// Singular values below this fraction of the largest count as zero when
/// measuring the Jacobian rank.
const RANK_TOL: f64 = 1e-8;
const TRACE_TOL: f64 = 1e-6;
const RETRIES: usize = 3;

/// Affine linear forms `coeffs * x = consts`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    pub coeffs: Vec<Vec<C64>>,
    pub consts: Vec<C64>,
}

impl Slice {
    pub fn random(forms: usize, vars: usize, rng: &mut dyn RngCore) -> Self {
        Slice { coeffs: (0..forms).map(|_| random_vector(vars, rng)).collect(), consts: random_vector(forms, rng) }
    }

    /// The forms `coeffs` shifted to pass through `point`.
    pub fn through(coeffs: Vec<Vec<C64>>, point: &[C64]) -> Self {
        let consts = coeffs.iter().map(|row| row.iter().zip(point).map(|(a, x)| a * x).sum()).collect();
        Slice { coeffs, consts }
    }

    pub fn forms(&self) -> usize {
        self.coeffs.len()
    }

    fn matrix(&self, vars: usize) -> DMatrix<C64> {
        DMatrix::from_fn(self.forms(), vars, |i, j| self.coeffs[i][j])
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.coeffs.iter().zip(&self.consts).map(|(row, c)| row.iter().zip(x).map(|(a, x)| a * x).sum::<C64>() - c).collect()
    }
}

struct SliceSystem<'a> {
    g: &'a VarietySpec,
    image: &'a Slice,
    source: &'a Slice,
}

impl System for SliceSystem<'_> {
    fn dim(&self) -> usize {
        self.g.source_dim()
    }

    fn eval(&self, y: &DVector<C64>) -> DVector<C64> {
        let x = self.g.eval(y.as_slice());
        let mut out = self.image.apply(&x);
        out.extend(self.source.apply(y.as_slice()));
        DVector::from_vec(out)
    }

    fn jacobian(&self, y: &DVector<C64>) -> DMatrix<C64> {
        let n = self.g.source_dim();
        let top = self.image.matrix(self.g.ambient_dim()) * self.g.jacobian(y.as_slice());
        let bottom = self.source.matrix(n);
        DMatrix::from_fn(n, n, |i, j| if i < top.nrows() { top[(i, j)] } else { bottom[(i - top.nrows(), j)] })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessPoint {
    pub source: Vec<C64>,
    pub image: Vec<C64>,
    pub residual: f64,
}

/// Also the witness archive: serializing it records everything needed to
/// resume monodromy or run membership later.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PseudoWitnessSet {
    pub variety: VarietySpec,
    pub seed: u64,
    /// Dimension of the (affine) image, i.e. the Jacobian rank.
    pub image_dim: usize,
    /// Dimension of a general fiber.
    pub fiber_dim: usize,
    pub image_slice: Slice,
    pub source_slice: Slice,
    pub points: Vec<WitnessPoint>,
    pub tracker: TrackerConfig,
    /// Draws consumed from the seed's numag stream, so reloaded sets continue it.
    pub stream_position: u64,
}

impl PseudoWitnessSet {
    pub fn degree(&self) -> usize {
        self.points.len()
    }

    fn system<'a>(&'a self, image: &'a Slice) -> SliceSystem<'a> {
        SliceSystem { g: &self.variety, image, source: &self.source_slice }
    }

    fn next_rng(&mut self) -> ChaCha8Rng {
        self.stream_position += 1;
        rng::substream(self.seed, rng::STREAM_NUMAG, self.stream_position)
    }

    fn contains_image(&self, x: &[C64]) -> bool {
        self.points.iter().any(|p| same_point(&p.image, x))
    }

    /// Moves every witness point from the current image slice to `to`.
    pub fn move_points(&mut self, to: &Slice) -> Vec<Result<WitnessPoint, TrackError>> {
        let from = self.image_slice.clone();
        let mut rng = self.next_rng();
        let cfg = self.tracker.with_gamma(&mut rng);
        let seeds: Vec<u64> = self.points.iter().map(|_| rng.gen()).collect();
        let this = &*self;
        this.points
            .par_iter()
            .zip(seeds)
            .map(|(p, seed)| {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                this.track_leg(&from, to, &p.source, &cfg, &mut r)
            })
            .collect()
    }

    /// All paths of one move share `cfg.gamma`, so the move is a bijection of
    /// witness points; only retries draw a fresh gamma.
    fn track_leg(&self, from: &Slice, to: &Slice, y: &[C64], cfg: &TrackerConfig, rng: &mut dyn RngCore) -> Result<WitnessPoint, TrackError> {
        let start = self.system(from);
        let end = self.system(to);
        let r = track_with_retries(&start, &end, y, cfg, RETRIES, rng)?;
        Ok(WitnessPoint { image: self.variety.eval(&r.point), source: r.point, residual: r.residual })
    }

    /// Every stored point re-evaluated against the stored system.
    pub fn max_residual(&self) -> f64 {
        let sys = self.system(&self.image_slice);
        self.points.iter().map(|p| sys.eval(&DVector::from_column_slice(&p.source)).norm()).fold(0.0, f64::max)
    }
}

fn same_point(a: &[C64], b: &[C64]) -> bool {
    dist(a, b) <= DEDUP_TOL * norm(a).max(norm(b)).max(1.0)
}

fn jacobian_rank(g: &VarietySpec, y: &[C64]) -> usize {
    let ns = svd_nullspace(&g.jacobian(y).transpose(), RANK_TOL);
    g.ambient_dim() - ns.nullity
}

/// Starts a pseudowitness set with the single point obtained by tracking
/// `g(y*)` for a random `y*` onto a random slice.
pub fn pseudo_witness(g: &VarietySpec, seed: u64) -> Result<PseudoWitnessSet, NumagError> {
    let mut rng = rng::substream(seed, rng::STREAM_NUMAG, 0);
    let n = g.source_dim();
    let big_n = g.ambient_dim();
    let k = (0..3).map(|_| jacobian_rank(g, &random_vector(n, &mut rng))).max().unwrap_or(0);
    if k == 0 {
        return Err(NumagError::Degenerate);
    }
    let y_star = random_vector(n, &mut rng);
    let x_star = g.eval(&y_star);
    let image_coeffs: Vec<Vec<C64>> = (0..k).map(|_| random_vector(big_n, &mut rng)).collect();
    let start_slice = Slice::through(image_coeffs.clone(), &x_star);
    let image_slice = Slice { coeffs: image_coeffs, consts: random_vector(k, &mut rng) };
    let source_slice = Slice::through((0..n - k).map(|_| random_vector(n, &mut rng)).collect(), &y_star);
    let tracker = TrackerConfig { gamma: random_unit(&mut rng), ..TrackerConfig::default() };
    let mut pw = PseudoWitnessSet {
        variety: g.clone(),
        seed,
        image_dim: k,
        fiber_dim: n - k,
        image_slice,
        source_slice,
        points: Vec::new(),
        tracker,
        stream_position: 0,
    };
    let target = pw.image_slice.clone();
    let cfg = pw.tracker.clone();
    let first = pw.track_leg(&start_slice, &target, &y_star, &cfg, &mut rng)?;
    pw.points.push(first);
    Ok(pw)
}

#[derive(Clone, Debug)]
pub struct MonodromyConfig {
    pub max_rounds: usize,
    /// Stop once the count has not changed for this many rounds.
    pub stable_rounds: usize,
}

impl Default for MonodromyConfig {
    fn default() -> Self {
        MonodromyConfig { max_rounds: 100, stable_rounds: 5 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonodromyReport {
    /// Witness count after each round.
    pub counts: Vec<usize>,
    pub failures: usize,
    pub stabilized: bool,
}

/// Grows `W` with triangle loops `L -> L1 -> L2 -> L` through random slices.
pub fn monodromy_expand(pw: &mut PseudoWitnessSet, cfg: &MonodromyConfig) -> Result<MonodromyReport, NumagError> {
    if pw.points.is_empty() {
        return Err(NumagError::Empty);
    }
    let k = pw.image_dim;
    let big_n = pw.variety.ambient_dim();
    let mut counts = Vec::new();
    let mut failures = 0;
    let mut unchanged = 0;
    let home = pw.image_slice.clone();
    for _ in 0..cfg.max_rounds {
        let mut rng = pw.next_rng();
        let legs = [Slice::random(k, big_n, &mut rng), Slice::random(k, big_n, &mut rng), home.clone()];
        let gammas: Vec<TrackerConfig> = legs.iter().map(|_| pw.tracker.with_gamma(&mut rng)).collect();
        let seeds: Vec<u64> = pw.points.iter().map(|_| rng.gen()).collect();
        let this = &*pw;
        let ends: Vec<Result<WitnessPoint, TrackError>> = this
            .points
            .par_iter()
            .zip(seeds)
            .map(|(p, seed)| {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                let mut from = &home;
                let mut y = p.source.clone();
                let mut last = None;
                for (leg, cfg) in legs.iter().zip(&gammas) {
                    let wp = this.track_leg(from, leg, &y, cfg, &mut r)?;
                    y = wp.source.clone();
                    from = leg;
                    last = Some(wp);
                }
                Ok(last.expect("three legs"))
            })
            .collect();
        let before = pw.points.len();
        for e in ends {
            match e {
                Ok(wp) if !pw.contains_image(&wp.image) => pw.points.push(wp),
                Ok(_) => {}
                Err(_) => failures += 1,
            }
        }
        counts.push(pw.points.len());
        if pw.points.len() == before {
            unchanged += 1;
            if unchanged >= cfg.stable_rounds {
                return Ok(MonodromyReport { counts, failures, stabilized: true });
            }
        } else {
            unchanged = 0;
        }
    }
    Ok(MonodromyReport { counts, failures, stabilized: false })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum TraceOutcome {
    Pass { residual: f64 },
    Fail { residual: f64 },
    /// A path failed, so the traces are unavailable.
    Inconclusive { failures: usize },
}

impl TraceOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, TraceOutcome::Pass { .. })
    }
}

/// Moves the first image form through three parallel positions and checks that
/// the sum of the image points moves linearly.
pub fn trace_test(pw: &mut PseudoWitnessSet) -> Result<TraceOutcome, NumagError> {
    if pw.points.is_empty() {
        return Err(NumagError::Empty);
    }
    let mut rng = pw.next_rng();
    let shift = random_normal(&mut rng);
    let shifted = |s: f64| {
        let mut slice = pw.image_slice.clone();
        slice.consts[0] += shift * s;
        slice
    };
    let (plus, minus) = (shifted(1.0), shifted(-1.0));
    let big_n = pw.variety.ambient_dim();
    let total = |pts: &[WitnessPoint]| (0..big_n).map(|i| pts.iter().map(|p| p.image[i]).sum::<C64>()).collect::<Vec<C64>>();
    let mut sums = Vec::new();
    for slice in [&plus, &minus] {
        let moved: Result<Vec<WitnessPoint>, TrackError> = pw.move_points(slice).into_iter().collect();
        match moved {
            Ok(pts) => sums.push(total(&pts)),
            Err(_) => return Ok(TraceOutcome::Inconclusive { failures: 1 }),
        }
    }
    let centre = total(&pw.points);
    // linear in the shift iff S(+1) + S(-1) = 2 S(0)
    let curvature: Vec<C64> = (0..big_n).map(|i| sums[0][i] + sums[1][i] - centre[i] * 2.0).collect();
    let displacement = dist(&sums[0], &sums[1]).max(f64::MIN_POSITIVE);
    let residual = norm(&curvature) / displacement;
    Ok(if residual < TRACE_TOL { TraceOutcome::Pass { residual } } else { TraceOutcome::Fail { residual } })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum MembershipOutcome {
    Member { distance: f64 },
    NotMember { distance: f64 },
    Inconclusive { failures: usize },
}

impl MembershipOutcome {
    pub fn is_member(&self) -> Option<bool> {
        match self {
            MembershipOutcome::Member { .. } => Some(true),
            MembershipOutcome::NotMember { .. } => Some(false),
            MembershipOutcome::Inconclusive { .. } => None,
        }
    }
}

/// Whether `target` lies on the variety: move `W` to a general slice through
/// `target` and look for `target` among the endpoints. Meaningful only for a
/// complete witness set.
pub fn membership(pw: &mut PseudoWitnessSet, target: &[C64]) -> Result<MembershipOutcome, NumagError> {
    let big_n = pw.variety.ambient_dim();
    if target.len() != big_n {
        return Err(NumagError::TargetLength { expected: big_n, got: target.len() });
    }
    if pw.points.is_empty() {
        return Err(NumagError::Empty);
    }
    let mut rng = pw.next_rng();
    let slice = Slice::through((0..pw.image_dim).map(|_| random_vector(big_n, &mut rng)).collect(), target);
    let ends = pw.move_points(&slice);
    let failures = ends.iter().filter(|e| e.is_err()).count();
    let pivot = (0..big_n).max_by(|&i, &j| target[i].norm().total_cmp(&target[j].norm())).unwrap_or(0);
    let normalize = |v: &[C64]| -> Vec<C64> {
        if pw.variety.is_cone() && v[pivot].norm() > 0.0 {
            v.iter().map(|z| z / v[pivot]).collect()
        } else {
            v.to_vec()
        }
    };
    let t = normalize(target);
    let distance = ends
        .iter()
        .filter_map(|e| e.as_ref().ok())
        .map(|p| dist(&normalize(&p.image), &t) / norm(&t).max(1.0))
        .fold(f64::INFINITY, f64::min);
    Ok(if distance < DEDUP_TOL {
        MembershipOutcome::Member { distance }
    } else if failures > 0 {
        MembershipOutcome::Inconclusive { failures }
    } else {
        MembershipOutcome::NotMember { distance }
    })
}

/// Images of the witness points moved to `slice` (which need not be general,
/// e.g. containing a fixed hyperplane), deduplicated.
pub fn slice_points(pw: &mut PseudoWitnessSet, slice: &Slice) -> Result<Vec<Vec<C64>>, NumagError> {
    if slice.forms() != pw.image_dim {
        return Err(NumagError::SliceShape { expected: pw.image_dim, got: slice.forms() });
    }
    let mut out: Vec<Vec<C64>> = Vec::new();
    for e in pw.move_points(slice) {
        let p = e?;
        if !out.iter().any(|q| same_point(q, &p.image)) {
            out.push(p.image);
        }
    }
    Ok(out)
}

/// Refines every stored point against the stored system (used after reloading).
pub fn refine_all(pw: &mut PseudoWitnessSet) -> Result<(), NumagError> {
    let slice = pw.image_slice.clone();
    let tol = pw.tracker.newton_tol;
    let refined: Vec<WitnessPoint> = {
        let sys = pw.system(&slice);
        pw.points
            .iter()
            .map(|p| {
                let r = refine(&sys, &p.source, tol, 10)?;
                Ok(WitnessPoint { image: pw.variety.eval(&r.point), source: r.point, residual: r.residual })
            })
            .collect::<Result<_, TrackError>>()?
    };
    pw.points = refined;
    Ok(())
}

/// Points of `X ∩ {h = 0}` in coordinates on the hyperplane, each repeated at
/// `scalings` random multiples along its ray. For cones only.
pub fn hyperplane_section(pw: &mut PseudoWitnessSet, h: &[C64], scalings: usize) -> Result<Vec<Vec<C64>>, NumagError> {
    let big_n = pw.variety.ambient_dim();
    if h.len() != big_n {
        return Err(NumagError::TargetLength { expected: big_n, got: h.len() });
    }
    if !pw.variety.is_cone() {
        return Err(NumagError::Degenerate);
    }
    let mut rng = pw.next_rng();
    let mut coeffs = vec![h.to_vec()];
    let mut consts = vec![C64::new(0.0, 0.0)];
    for _ in 1..pw.image_dim {
        coeffs.push(random_vector(big_n, &mut rng));
        consts.push(C64::new(1.0, 0.0));
    }
    let points = slice_points(pw, &Slice { coeffs, consts })?;
    let kernel = svd_nullspace(&DMatrix::from_row_slice(1, big_n, h), RANK_TOL).basis;
    let coords = |x: &[C64]| -> Vec<C64> { kernel.iter().map(|k| k.iter().zip(x).map(|(a, b)| a.conj() * b).sum()).collect() };
    let mut out = Vec::with_capacity(points.len() * scalings);
    for x in &points {
        let z = coords(x);
        for _ in 0..scalings {
            let s = random_normal(&mut rng);
            out.push(z.iter().map(|c| c * s).collect());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompletionReport {
    pub monodromy: Vec<MonodromyReport>,
    pub trace: TraceOutcome,
}

/// Runs monodromy until stable, then the trace test; on failure resumes
/// monodromy, up to `attempts` times in all.
pub fn complete_witness_set(pw: &mut PseudoWitnessSet, cfg: &MonodromyConfig, attempts: usize) -> Result<CompletionReport, NumagError> {
    let mut monodromy = Vec::new();
    let mut trace = TraceOutcome::Inconclusive { failures: 0 };
    for _ in 0..attempts.max(1) {
        monodromy.push(monodromy_expand(pw, cfg)?);
        trace = trace_test(pw)?;
        if trace.passed() {
            break;
        }
    }
    Ok(CompletionReport { monodromy, trace })
}
