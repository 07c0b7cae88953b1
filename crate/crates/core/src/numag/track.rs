//! Predictor-corrector path tracking along `H(y, t) = (1 - t) F_end(y) + gamma t F_start(y)`
//! from `t = 1` to `t = 0`.

use nalgebra::{DMatrix, DVector};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::random_unit;
use crate::scalar::C64;

/// A square system of equations.
pub trait System: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, y: &DVector<C64>) -> DVector<C64>;
    fn jacobian(&self, y: &DVector<C64>) -> DMatrix<C64>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Predictor {
    Euler,
    Rk4,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrackerConfig {
    pub predictor: Predictor,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    /// Residual required of the endpoint.
    pub newton_tol: f64,
    /// Relative Newton update size accepted along the path.
    pub corrector_tol: f64,
    pub max_corrector_iters: usize,
    /// Largest first Newton update (relative) accepted after a prediction;
    /// bigger corrections signal a jump to a neighbouring path.
    pub max_correction: f64,
    pub gamma: C64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            predictor: Predictor::Rk4,
            initial_step: 0.02,
            min_step: 1e-10,
            max_step: 0.1,
            newton_tol: 1e-10,
            corrector_tol: 1e-9,
            max_corrector_iters: 3,
            max_correction: 1e-3,
            gamma: C64::new(0.6, 0.8),
        }
    }
}

impl TrackerConfig {
    pub fn with_gamma(&self, rng: &mut dyn RngCore) -> Self {
        TrackerConfig { gamma: random_unit(rng), ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum TrackError {
    #[error("step size fell below the minimum at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("path diverged at t = {t}")]
    Diverged { t: f64 },
    #[error("endpoint near-singular, residual {residual:e}")]
    NearSingular { residual: f64 },
    #[error("start point is not a solution, residual {residual:e}")]
    BadStart { residual: f64 },
}

#[derive(Clone, Debug)]
pub struct TrackResult {
    pub point: Vec<C64>,
    pub residual: f64,
    pub steps: usize,
}

struct Homotopy<'a> {
    start: &'a dyn System,
    end: &'a dyn System,
    gamma: C64,
}

impl Homotopy<'_> {
    fn h(&self, y: &DVector<C64>, t: f64) -> DVector<C64> {
        self.end.eval(y) * C64::new(1.0 - t, 0.0) + self.start.eval(y) * (self.gamma * t)
    }

    fn hy(&self, y: &DVector<C64>, t: f64) -> DMatrix<C64> {
        self.end.jacobian(y) * C64::new(1.0 - t, 0.0) + self.start.jacobian(y) * (self.gamma * t)
    }

    /// `dy/dt = -H_y^{-1} H_t`.
    fn velocity(&self, y: &DVector<C64>, t: f64) -> Option<DVector<C64>> {
        let ht = self.start.eval(y) * self.gamma - self.end.eval(y);
        self.hy(y, t).lu().solve(&(-ht))
    }
}

/// Newton's method on `f` until the residual is below `tol`.
pub fn refine(f: &dyn System, y: &[C64], tol: f64, max_iters: usize) -> Result<TrackResult, TrackError> {
    let mut y = DVector::from_column_slice(y);
    let mut residual = f.eval(&y).norm();
    for _ in 0..max_iters {
        if residual < tol {
            break;
        }
        let Some(delta) = f.jacobian(&y).lu().solve(&f.eval(&y)) else {
            return Err(TrackError::NearSingular { residual });
        };
        y -= delta;
        residual = f.eval(&y).norm();
    }
    if !(residual < tol) {
        return Err(TrackError::NearSingular { residual });
    }
    Ok(TrackResult { point: y.iter().copied().collect(), residual, steps: 0 })
}

fn predict(h: &Homotopy, y: &DVector<C64>, t: f64, dt: f64, kind: Predictor) -> Option<DVector<C64>> {
    let s = C64::new(-dt, 0.0);
    let k1 = h.velocity(y, t)?;
    if kind == Predictor::Euler {
        return Some(y + k1 * s);
    }
    let half = s * 0.5;
    let k2 = h.velocity(&(y + &k1 * half), t - dt / 2.0)?;
    let k3 = h.velocity(&(y + &k2 * half), t - dt / 2.0)?;
    let k4 = h.velocity(&(y + &k3 * s), t - dt)?;
    let two = C64::new(2.0, 0.0);
    Some(y + (k1 + k2 * two + k3 * two + k4) * (s / 6.0))
}

fn correct(h: &Homotopy, mut y: DVector<C64>, t: f64, cfg: &TrackerConfig) -> Option<DVector<C64>> {
    let mut previous = f64::INFINITY;
    for i in 0..cfg.max_corrector_iters {
        let delta = h.hy(&y, t).lu().solve(&h.h(&y, t))?;
        let size = delta.norm() / (1.0 + y.norm());
        if (i == 0 && size > cfg.max_correction) || size > previous / 2.0 {
            return None;
        }
        previous = size;
        y -= &delta;
        if size <= cfg.corrector_tol {
            return Some(y);
        }
    }
    None
}

/// Tracks `start_point` (a solution of `start`) to a solution of `end`.
pub fn track(start: &dyn System, end: &dyn System, start_point: &[C64], cfg: &TrackerConfig) -> Result<TrackResult, TrackError> {
    let y0 = DVector::from_column_slice(start_point);
    let residual = start.eval(&y0).norm();
    if !(residual < cfg.newton_tol.max(1e-8) * (1.0 + y0.norm())) {
        return Err(TrackError::BadStart { residual });
    }
    let hom = Homotopy { start, end, gamma: cfg.gamma };
    let mut y = y0;
    let mut t = 1.0f64;
    let mut dt = cfg.initial_step;
    let mut streak = 0;
    let mut steps = 0;
    while t > 0.0 {
        let step = dt.min(t);
        let next_t = if step >= t { 0.0 } else { t - step };
        let accepted = predict(&hom, &y, t, step, cfg.predictor).and_then(|p| correct(&hom, p, next_t, cfg));
        match accepted {
            Some(next) => {
                y = next;
                t = next_t;
                steps += 1;
                streak += 1;
                if streak >= 3 {
                    dt = (dt * 1.5).min(cfg.max_step);
                    streak = 0;
                }
                if y.norm() > 1e8 {
                    return Err(TrackError::Diverged { t });
                }
            }
            None => {
                streak = 0;
                dt /= 2.0;
                if dt < cfg.min_step {
                    return Err(TrackError::StepUnderflow { t });
                }
            }
        }
    }
    let y: Vec<C64> = y.iter().copied().collect();
    let mut out = refine(end, &y, cfg.newton_tol, 20)?;
    out.steps = steps;
    Ok(out)
}

/// [`track`], retrying with fresh random `gamma` up to `retries` times.
pub fn track_with_retries(
    start: &dyn System,
    end: &dyn System,
    start_point: &[C64],
    cfg: &TrackerConfig,
    retries: usize,
    rng: &mut dyn RngCore,
) -> Result<TrackResult, TrackError> {
    let mut result = track(start, end, start_point, cfg);
    for _ in 0..retries {
        match &result {
            Ok(_) | Err(TrackError::BadStart { .. }) => break,
            Err(_) => result = track(start, end, start_point, &cfg.with_gamma(rng)),
        }
    }
    result
}
