//! Complex floating point linear algebra: numerical nullspaces with gap reporting.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;

/// Singular values on either side of the cut must differ by at least this factor.
pub const GAP_RATIO_THRESHOLD: f64 = 10.0;

/// Numerical nullspace of a complex matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Nullspace {
    pub nullity: usize,
    /// Orthonormal basis of the nullspace (each vector has `cols` entries).
    #[serde(skip)]
    pub basis: Vec<Vec<C64>>,
    /// Singular values, descending.
    pub singular_values: Vec<f64>,
    /// Ratio of the singular values straddling the cut (`inf` when the next one is exactly zero).
    pub gap_ratio: f64,
    /// False when `gap_ratio` is below [`GAP_RATIO_THRESHOLD`].
    pub reliable: bool,
}

/// Nullity = number of singular values below `tol * sigma_max`, counting the
/// `cols - rows` directions a wide matrix always has.
pub fn svd_nullspace(m: &DMatrix<C64>, tol: f64) -> Nullspace {
    assert!(tol > 0.0 && tol < 1.0, "tolerance must lie in (0, 1)");
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Nullspace { nullity: 0, basis: vec![], singular_values: vec![], gap_ratio: f64::INFINITY, reliable: true };
    }
    // pad wide matrices so the SVD yields a full set of right singular vectors
    let work = if rows < cols {
        let mut p = DMatrix::<C64>::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap());
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let smax = sv.first().copied().unwrap_or(0.0);
    let cut = tol * smax;
    let rank = if smax == 0.0 { 0 } else { sv.iter().filter(|&&s| s >= cut).count() };
    let nullity = cols - rank;
    let gap_ratio = if smax == 0.0 {
        f64::INFINITY
    } else if rank < sv.len() {
        let below = sv[rank];
        if below == 0.0 {
            f64::INFINITY
        } else {
            sv[rank - 1] / below
        }
    } else {
        // nothing dropped: compare the smallest singular value with the threshold itself
        sv[rank - 1] / cut
    };
    let basis = order[rank..]
        .iter()
        .map(|&i| v_t.row(i).iter().map(|z| z.conj()).collect())
        .collect();
    Nullspace { nullity, basis, singular_values: sv, gap_ratio, reliable: gap_ratio >= GAP_RATIO_THRESHOLD }
}
