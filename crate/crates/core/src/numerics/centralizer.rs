use nalgebra::DMatrix;

use super::numerical_rank;
use super::quadratic::{so_pq_basis, QuadraticSpace};
use crate::error::{Error, Result};

const MEMBERSHIP_TOL: f64 = 1e-8;

/// `dim {X ∈ so(p,q) : [X, h] = 0 for all h in sub_basis}`.
pub fn centralizer_dim(space: &QuadraticSpace, sub_basis: &[DMatrix<f64>]) -> Result<usize> {
    let n = space.dim();
    for (k, h) in sub_basis.iter().enumerate() {
        if h.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: h.nrows(),
            });
        }
        let res = space.algebra_residual(h);
        if res > MEMBERSHIP_TOL * h.norm().max(1.0) {
            return Err(Error::invalid(format!(
                "subalgebra element {k} is not in so({},{}) (residual {res:.2e})",
                space.p, space.q
            )));
        }
    }
    let ambient = so_pq_basis(space);
    // Brackets of elements of so(p,q) stay in so(p,q), so coordinates suffice.
    centralizer_with(&ambient, sub_basis, |m| space.coords(m))
}

/// Centralizer dimension for an arbitrary matrix Lie algebra given by a basis,
/// comparing brackets entrywise.
pub fn centralizer_dim_in(ambient: &[DMatrix<f64>], sub_basis: &[DMatrix<f64>]) -> Result<usize> {
    centralizer_with(ambient, sub_basis, |m| m.iter().copied().collect())
}

fn centralizer_with(
    ambient: &[DMatrix<f64>],
    sub_basis: &[DMatrix<f64>],
    flatten: impl Fn(&DMatrix<f64>) -> Vec<f64>,
) -> Result<usize> {
    if sub_basis.is_empty() || ambient.is_empty() {
        return Ok(ambient.len());
    }
    let columns: Vec<Vec<f64>> = ambient
        .iter()
        .map(|x| {
            sub_basis
                .iter()
                .flat_map(|h| flatten(&(x * h - h * x)))
                .collect()
        })
        .collect();
    let rows = columns[0].len();
    let m = DMatrix::from_fn(rows, columns.len(), |r, c| columns[c][r]);
    Ok(numerical_rank(&m, "centralizer")?.nullity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadratic::{so_block_subalgebra, su_block_subalgebra, su_pq_basis};

    #[test]
    fn empty_subalgebra_centralizes_everything() {
        let s = QuadraticSpace::new(2, 3).unwrap();
        assert_eq!(centralizer_dim(&s, &[]).unwrap(), 10);
    }

    #[test]
    fn compact_blocks_have_trivial_centralizer() {
        let s = QuadraticSpace::new(3, 4).unwrap();
        assert_eq!(centralizer_dim(&s, &so_block_subalgebra(&s)).unwrap(), 0);
    }

    #[test]
    fn so2_blocks_are_their_own_centralizer() {
        // so(2) ⊕ so(2) is abelian and self-centralizing in so(2,2)
        let s = QuadraticSpace::new(2, 2).unwrap();
        assert_eq!(centralizer_dim(&s, &so_block_subalgebra(&s)).unwrap(), 2);
    }

    #[test]
    fn unitary_blocks_leave_a_central_line() {
        let s = QuadraticSpace::new(3, 4).unwrap();
        let dim = centralizer_dim_in(&su_pq_basis(&s), &su_block_subalgebra(&s)).unwrap();
        assert_eq!(dim, 1);
    }

    #[test]
    fn rejects_non_members() {
        let s = QuadraticSpace::new(2, 1).unwrap();
        assert!(centralizer_dim(&s, &[DMatrix::identity(3, 3)]).is_err());
    }
}
