//! Interpolation of vanishing polynomials from sample points.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::scalar::{svd_nullspace, C64};

/// Relative singular value cut for the interpolation matrix.
pub const INTERP_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterpolationMode {
    /// Forms of degree exactly `d`; points are scaled to unit norm first.
    Homogeneous,
    /// Polynomials of degree at most `d`; points are used as given.
    Affine,
}

/// Exponent vectors in `n` variables, graded reverse order within a degree.
pub fn monomials(n: usize, degree: usize, mode: InterpolationMode) -> Vec<Vec<u32>> {
    fn exactly(n: usize, d: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(d as u32);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e as u32);
            exactly(n, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let degrees: Vec<usize> = match mode {
        InterpolationMode::Homogeneous => vec![degree],
        InterpolationMode::Affine => (0..=degree).collect(),
    };
    for d in degrees {
        exactly(n, d, &mut Vec::new(), &mut out);
    }
    out
}

/// Number of monomials `monomials(n, degree, mode).len()` without listing them.
pub fn monomial_count(n: usize, degree: usize, mode: InterpolationMode) -> usize {
    let binom = |a: usize, b: usize| -> usize { (0..b).fold(1usize, |acc, i| acc * (a - i) / (i + 1)) };
    match mode {
        InterpolationMode::Homogeneous if n == 0 => 0,
        InterpolationMode::Homogeneous => binom(n + degree - 1, degree),
        InterpolationMode::Affine => binom(n + degree, degree),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InterpolationReport {
    pub degree: usize,
    pub mode: InterpolationMode,
    pub monomials: usize,
    pub points: usize,
    /// Dimension of the degree-`d` polynomials vanishing on the points.
    pub nullity: usize,
    pub gap_ratio: f64,
    pub reliable: bool,
    /// Coefficients (in [`monomials`] order) of a basis of the vanishing space.
    #[serde(skip)]
    pub basis: Vec<Vec<C64>>,
}

/// Builds the preconditioned point-by-monomial matrix and measures its nullity.
pub fn interpolate(points: &[Vec<C64>], degree: usize, mode: InterpolationMode) -> InterpolationReport {
    let n = points.first().map_or(0, Vec::len);
    let monos = monomials(n, degree, mode);
    let scaled: Vec<Vec<C64>> = points
        .iter()
        .map(|p| {
            let s = p.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if mode == InterpolationMode::Homogeneous && s > 0.0 {
                p.iter().map(|z| z / s).collect()
            } else {
                p.clone()
            }
        })
        .collect();
    let mut m = DMatrix::from_fn(points.len(), monos.len(), |i, j| {
        monos[j].iter().zip(&scaled[i]).fold(C64::new(1.0, 0.0), |acc, (&e, z)| acc * z.powu(e))
    });
    let mut col_scale = vec![1.0; monos.len()];
    for (j, scale) in col_scale.iter_mut().enumerate() {
        let c = m.column(j).norm();
        if c > 0.0 {
            *scale = c;
            m.column_mut(j).unscale_mut(c);
        }
    }
    let ns = svd_nullspace(&m, INTERP_TOL);
    let basis = ns.basis.iter().map(|v| v.iter().zip(&col_scale).map(|(z, s)| z / *s).collect()).collect();
    InterpolationReport {
        degree,
        mode,
        monomials: monos.len(),
        points: points.len(),
        nullity: ns.nullity,
        gap_ratio: ns.gap_ratio,
        reliable: ns.reliable,
        basis,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinDegree {
    /// First degree with a reliable positive nullity.
    pub degree: Option<usize>,
    pub reports: Vec<InterpolationReport>,
    /// Set when the memory cap stopped the search; holds the last completed degree.
    pub budget_stop: Option<usize>,
}

/// Tries `d = 1, ..., d_max`, each with `ceil(1.5 * monomials)` fresh samples.
pub fn min_vanishing_degree(
    sampler: &mut dyn FnMut() -> Vec<C64>,
    n: usize,
    d_max: usize,
    mode: InterpolationMode,
    memory_cap_bytes: usize,
) -> MinDegree {
    let mut reports = Vec::new();
    for d in 1..=d_max {
        let cols = monomial_count(n, d, mode);
        let rows = (3 * cols).div_ceil(2);
        // the SVD works on a square padding of the larger side
        let side = rows.max(cols);
        if side.saturating_mul(side).saturating_mul(std::mem::size_of::<C64>() * 3) > memory_cap_bytes {
            return MinDegree { degree: None, reports, budget_stop: Some(d - 1) };
        }
        let points: Vec<Vec<C64>> = (0..rows).map(|_| sampler()).collect();
        let report = interpolate(&points, d, mode);
        let found = report.reliable && report.nullity > 0;
        reports.push(report);
        if found {
            return MinDegree { degree: Some(d), reports, budget_stop: None };
        }
    }
    MinDegree { degree: None, reports, budget_stop: None }
}
