//! Floating-point oracle for the exact formulas.
//!
//! Every dimension here is the nullity of an explicit real matrix, read off
//! from its singular values. A singular value counts as zero when it is below
//! `RANK_EPS · side · σ_max` (`side` the larger matrix dimension), and the
//! answer is only accepted when the two singular values bracketing that
//! threshold differ by more than `MIN_GAP_RATIO`.

pub mod adjoint;
pub mod centralizer;
pub mod charpoly;
pub mod cocycle;
pub mod commutant;
pub mod hexfloat;
pub mod point;
pub mod quadratic;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use adjoint::{fixed_dim_numeric, invariants_dim_numeric, spectral_type_numeric};
pub use centralizer::centralizer_dim;
pub use charpoly::{char_coeffs, torus_jacobian_rank};
pub use cocycle::cocycle_dim;
pub use commutant::{commutant_dim, invariant_subspace_search, SubspaceClass, SubspaceReport};
pub use point::RepresentationPoint;
pub use quadratic::{membership_residual, so_pq_basis, QuadraticSpace};

pub const RANK_EPS: f64 = 1e-9;
pub const MIN_GAP_RATIO: f64 = 1e3;
/// A matrix whose largest singular value is below this is numerically zero;
/// the relative threshold alone would read pure roundoff as full rank.
pub const ZERO_FLOOR: f64 = 1e-12;

/// Outcome of a thresholded rank computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankInfo {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    /// `cols - rank`.
    pub nullity: usize,
    pub threshold: f64,
    /// Smallest kept over largest dropped singular value; infinite when
    /// nothing is dropped or nothing is kept.
    pub gap_ratio: f64,
}

fn rank_from_singular_values(
    mut sv: Vec<f64>,
    rows: usize,
    cols: usize,
    context: &str,
) -> Result<RankInfo> {
    sv.sort_by(|a, b| b.total_cmp(a));
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let side = rows.max(cols) as f64;
    let threshold = RANK_EPS * side * sigma_max;
    let rank = if sigma_max <= ZERO_FLOOR {
        0
    } else {
        sv.iter().filter(|&&s| s > threshold).count()
    };
    let gap_ratio = if rank == 0 || rank == sv.len() {
        f64::INFINITY
    } else {
        let dropped = sv[rank];
        if dropped == 0.0 {
            f64::INFINITY
        } else {
            sv[rank - 1] / dropped
        }
    };
    if gap_ratio <= MIN_GAP_RATIO {
        return Err(Error::RankGap {
            context: context.to_string(),
            gap_ratio,
            required: MIN_GAP_RATIO,
        });
    }
    Ok(RankInfo {
        rows,
        cols,
        rank,
        nullity: cols - rank,
        threshold,
        gap_ratio,
    })
}

/// Thresholded numerical rank; fails when the rank gap is not clear.
pub fn numerical_rank(m: &DMatrix<f64>, context: &str) -> Result<RankInfo> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(RankInfo {
            rows,
            cols,
            rank: 0,
            nullity: cols,
            threshold: 0.0,
            gap_ratio: f64::INFINITY,
        });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(format!(
            "{context}: non-finite matrix entry"
        )));
    }
    let sv = m.singular_values();
    rank_from_singular_values(sv.iter().copied().collect(), rows, cols, context)
}

/// Orthonormal basis of the numerical kernel, as the columns of the result.
pub fn kernel_basis(m: &DMatrix<f64>, context: &str) -> Result<(DMatrix<f64>, RankInfo)> {
    let (rows, cols) = m.shape();
    // The thin SVD only yields a full right factor when rows >= cols.
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    if padded.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(format!(
            "{context}: non-finite matrix entry"
        )));
    }
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let info = rank_from_singular_values(sv.clone(), rows, cols, context)?;
    let kernel_rows: Vec<usize> = (0..sv.len())
        .filter(|&i| !(sv[i] > info.threshold && info.rank > 0))
        .collect();
    let mut basis = DMatrix::zeros(cols, kernel_rows.len());
    for (j, &i) in kernel_rows.iter().enumerate() {
        basis.set_column(j, &v_t.row(i).transpose());
    }
    debug_assert_eq!(basis.ncols(), info.nullity);
    Ok((basis, info))
}

/// Stacks equally wide blocks vertically.
pub fn vstack(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        out.view_mut((r, 0), (b.nrows(), cols)).copy_from(b);
        r += b.nrows();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_simple_matrices() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 1.0, 1.0]);
        let info = numerical_rank(&m, "test").unwrap();
        assert_eq!((info.rank, info.nullity), (2, 1));
        assert!(info.gap_ratio > 1e10);
        let z = DMatrix::<f64>::zeros(2, 5);
        assert_eq!(numerical_rank(&z, "zero").unwrap().nullity, 5);
    }

    #[test]
    fn ambiguous_gap_is_reported() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1e-7, 1e-12]));
        assert_eq!(numerical_rank(&m, "ok").unwrap().rank, 2);
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1e-8, 1e-9]));
        assert!(matches!(
            numerical_rank(&m, "bad"),
            Err(Error::RankGap { .. })
        ));
    }

    #[test]
    fn roundoff_matrix_is_zero() {
        // ∧² of a plane rotation minus one: exactly zero in exact arithmetic
        let t: f64 = 0.7;
        let m = DMatrix::from_element(1, 1, t.cos() * t.cos() + t.sin() * t.sin() - 1.0);
        assert_eq!(numerical_rank(&m, "noise").unwrap().nullity, 1);
        let noise = DMatrix::from_row_slice(2, 2, &[3e-16, -1e-16, 0.0, 2e-16]);
        let (k, _) = kernel_basis(&noise, "noise").unwrap();
        assert_eq!(k.ncols(), 2);
    }

    #[test]
    fn kernel_of_wide_matrix() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let (k, info) = kernel_basis(&m, "wide").unwrap();
        assert_eq!(info.nullity, 2);
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).norm() < 1e-14);
        assert!((k.transpose() * &k - DMatrix::identity(2, 2)).norm() < 1e-12);
    }
}
