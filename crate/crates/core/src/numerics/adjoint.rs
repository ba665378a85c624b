use std::f64::consts::TAU;

use nalgebra::DMatrix;

use super::point::RepresentationPoint;
use super::quadratic::{so_pq_basis, QuadraticSpace};
use super::{numerical_rank, vstack, RankInfo};
use crate::error::{Error, Result};
use crate::spectra::SpectralType;

/// Matrix of `X ↦ S X S⁻¹` on `so(p,q)` in the basis of [`so_pq_basis`].
pub fn ad_matrix(s: &DMatrix<f64>, space: &QuadraticSpace) -> Result<DMatrix<f64>> {
    let n = space.dim();
    if s.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: s.nrows(),
        });
    }
    let inv = s
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::invalid("singular matrix has no adjoint action"))?;
    let basis = so_pq_basis(space);
    let d = basis.len();
    let mut out = DMatrix::zeros(d, d);
    for (c, x) in basis.iter().enumerate() {
        let y = s * x * &inv;
        for (r, v) in space.coords(&y).into_iter().enumerate() {
            out[(r, c)] = v;
        }
    }
    Ok(out)
}

/// Dimension of the fixed space of `Ad(S)` on `so(p,q)`.
pub fn fixed_dim_numeric(s: &DMatrix<f64>, space: &QuadraticSpace) -> Result<usize> {
    Ok(fixed_dim_info(s, space)?.nullity)
}

pub fn fixed_dim_info(s: &DMatrix<f64>, space: &QuadraticSpace) -> Result<RankInfo> {
    let ad = ad_matrix(s, space)?;
    let d = ad.nrows();
    numerical_rank(&(ad - DMatrix::identity(d, d)), "fixed space of Ad(S)")
}

/// Dimension of the common fixed space of `Ad(ρ(g))` over all generators,
/// which is the space of `Γ`-invariants of the adjoint module.
pub fn invariants_dim_numeric(rep: &RepresentationPoint) -> Result<usize> {
    Ok(invariants_info(rep)?.nullity)
}

pub fn invariants_info(rep: &RepresentationPoint) -> Result<RankInfo> {
    let space = rep.space();
    let d = space.algebra_dim();
    let blocks: Vec<DMatrix<f64>> = rep
        .images()
        .iter()
        .map(|s| Ok(ad_matrix(s, &space)? - DMatrix::identity(d, d)))
        .collect::<Result<_>>()?;
    if blocks.is_empty() {
        return Ok(RankInfo {
            rows: 0,
            cols: d,
            rank: 0,
            nullity: d,
            threshold: 0.0,
            gap_ratio: f64::INFINITY,
        });
    }
    numerical_rank(&vstack(&blocks), "adjoint invariants")
}

/// Reads off the spectral type of a matrix whose eigenvalues are `d`-th roots
/// of unity, each eigenvalue within `radius` of its root.
pub fn spectral_type_numeric(s: &DMatrix<f64>, order: u32, radius: f64) -> Result<SpectralType> {
    let d = order as usize;
    let mut mult = vec![0usize; d];
    for ev in s.complex_eigenvalues().iter() {
        let angle = ev.im.atan2(ev.re).rem_euclid(TAU);
        let k = ((angle / TAU) * d as f64).round() as usize % d;
        let root = nalgebra::Complex::from_polar(1.0, TAU * k as f64 / d as f64);
        let dist = (ev - root).norm();
        if dist > radius {
            return Err(Error::invalid(format!(
                "eigenvalue {ev} is {dist:.2e} from the nearest {order}-th root of unity"
            )));
        }
        mult[k] += 1;
    }
    SpectralType::new(order, mult)
}
