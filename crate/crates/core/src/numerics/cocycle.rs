use nalgebra::DMatrix;

use super::adjoint::ad_matrix;
use super::point::RepresentationPoint;
use super::{numerical_rank, RankInfo};
use crate::error::{Error, Result};
use crate::presentation::Word;

/// Dimension of `Z¹(Γ, Ad ∘ ρ)` together with the rank diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CocycleDim {
    pub dim: usize,
    pub info: RankInfo,
}

/// `dim Z¹` for the relators of the point's own signature.
pub fn cocycle_dim(rep: &RepresentationPoint) -> Result<usize> {
    Ok(cocycle_info(rep)?.dim)
}

pub fn cocycle_info(rep: &RepresentationPoint) -> Result<CocycleDim> {
    cocycle_info_for(rep, &rep.signature().relators())
}

/// Same computation against an explicit relator list, e.g. cyclic conjugates
/// of the standard ones.
pub fn cocycle_info_for(rep: &RepresentationPoint, relators: &[Word]) -> Result<CocycleDim> {
    let system = cocycle_system(rep, relators)?;
    let info = numerical_rank(&system, "cocycle system")?;
    Ok(CocycleDim {
        dim: info.nullity,
        info,
    })
}

/// The matrix of `(u_k) ↦ (Σ_k Ad(ρ(∂w/∂g_k)) u_k)_w`, one block row per relator.
pub fn cocycle_system(rep: &RepresentationPoint, relators: &[Word]) -> Result<DMatrix<f64>> {
    let space = rep.space();
    let d = space.algebra_dim();
    let gens = rep.images().len();
    let ads = rep
        .images()
        .iter()
        .map(|s| ad_matrix(s, &space))
        .collect::<Result<Vec<_>>>()?;
    let ad_invs = rep
        .images()
        .iter()
        .map(|s| {
            let inv = s
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::invalid("generator image is singular"))?;
            ad_matrix(&inv, &space)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut system = DMatrix::zeros(relators.len() * d, gens * d);
    for (r, w) in relators.iter().enumerate() {
        // Fox calculus along the word: a letter g contributes Ad(prefix) to
        // the g-block, a letter g⁻¹ contributes -Ad(prefix · g⁻¹).
        let mut prefix = DMatrix::<f64>::identity(d, d);
        for letter in w.letters() {
            let k = letter.generator;
            if k >= gens {
                return Err(Error::ArityMismatch {
                    expected: gens,
                    found: k + 1,
                });
            }
            let mut block = system.view_mut((r * d, k * d), (d, d));
            if letter.inverse {
                prefix *= &ad_invs[k];
                block -= &prefix;
            } else {
                block += &prefix;
                prefix *= &ads[k];
            }
        }
    }
    Ok(system)
}
