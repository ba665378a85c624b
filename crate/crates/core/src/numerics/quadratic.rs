use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `R^{p+q}` with the form `J = I_p ⊕ -I_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadraticSpace {
    pub p: usize,
    pub q: usize,
}

impl QuadraticSpace {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p + q == 0 {
            return Err(Error::invalid("quadratic space of dimension zero"));
        }
        Ok(QuadraticSpace { p, q })
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    /// Dimension of `so(p,q)`.
    pub fn algebra_dim(&self) -> usize {
        let n = self.dim();
        n * (n - 1) / 2
    }

    pub fn sign(&self, i: usize) -> f64 {
        if i < self.p {
            1.0
        } else {
            -1.0
        }
    }

    pub fn form(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| if i == j { self.sign(i) } else { 0.0 })
    }

    /// `J X`, computed by flipping the signs of the last `q` rows.
    pub fn apply_form(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = x.clone();
        for i in self.p..self.dim() {
            out.row_mut(i).neg_mut();
        }
        out
    }

    /// `B(u, v)` between the columns of two bases: `Uᵀ J V`.
    pub fn gram(&self, u: &DMatrix<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
        u.transpose() * self.apply_form(v)
    }

    /// Coordinates of `X ∈ so(p,q)` in the basis of [`so_pq_basis`]: the
    /// strictly upper entries of the antisymmetric matrix `J X`.
    pub fn coords(&self, x: &DMatrix<f64>) -> Vec<f64> {
        let a = self.apply_form(x);
        let n = self.dim();
        let mut out = Vec::with_capacity(self.algebra_dim());
        for i in 0..n {
            for j in i + 1..n {
                out.push(a[(i, j)]);
            }
        }
        out
    }

    /// `‖Xᵀ J + J X‖_F`.
    pub fn algebra_residual(&self, x: &DMatrix<f64>) -> f64 {
        let jx = self.apply_form(x);
        (jx.transpose() + &jx).norm()
    }
}

/// `J (E_ij - E_ji)` for `i < j` in lexicographic order: a basis of
/// `{X : Xᵀ J + J X = 0}`.
pub fn so_pq_basis(space: &QuadraticSpace) -> Vec<DMatrix<f64>> {
    let n = space.dim();
    let mut out = Vec::with_capacity(space.algebra_dim());
    for i in 0..n {
        for j in i + 1..n {
            let mut x = DMatrix::zeros(n, n);
            x[(i, j)] = space.sign(i);
            x[(j, i)] = -space.sign(j);
            out.push(x);
        }
    }
    out
}

/// Basis of `so(p) ⊕ so(q)` inside `so(p,q)` (block-diagonal elements).
pub fn so_block_subalgebra(space: &QuadraticSpace) -> Vec<DMatrix<f64>> {
    let n = space.dim();
    let mut out = Vec::new();
    let mut k = 0;
    let basis = so_pq_basis(space);
    for i in 0..n {
        for j in i + 1..n {
            if (i < space.p) == (j < space.p) {
                out.push(basis[k].clone());
            }
            k += 1;
        }
    }
    out
}

/// `(‖Sᵀ J S - J‖_F, |det S - 1|)`.
pub fn membership_residual(s: &DMatrix<f64>, space: &QuadraticSpace) -> Result<(f64, f64)> {
    let n = space.dim();
    if s.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: s.nrows(),
        });
    }
    let form = (s.transpose() * space.apply_form(s) - space.form()).norm();
    let det = (s.determinant() - 1.0).abs();
    Ok((form, det))
}

/// Real `2n × 2n` form of a complex matrix `A + iB`: `[[A, -B], [B, A]]`.
pub fn realify(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<f64> {
    let n = re.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(re);
    out.view_mut((n, n), (n, n)).copy_from(re);
    out.view_mut((0, n), (n, n)).copy_from(&(-im));
    out.view_mut((n, 0), (n, n)).copy_from(im);
    out
}

/// Realified basis of `su(p,q) = {X : X* J + J X = 0, tr X = 0}`, with
/// `X = J A` for `A` running over a basis of traceless-compatible skew-Hermitian
/// matrices. Real dimension `(p+q)² - 1`.
pub fn su_pq_basis(space: &QuadraticSpace) -> Vec<DMatrix<f64>> {
    su_basis_filtered(space, |_, _| true)
}

/// Realified basis of `su(p) ⊕ su(q)` inside `su(p,q)`.
pub fn su_block_subalgebra(space: &QuadraticSpace) -> Vec<DMatrix<f64>> {
    su_basis_filtered(space, |i, j| (i < space.p) == (j < space.p))
}

fn su_basis_filtered(
    space: &QuadraticSpace,
    keep: impl Fn(usize, usize) -> bool,
) -> Vec<DMatrix<f64>> {
    let n = space.dim();
    let zero = DMatrix::<f64>::zeros(n, n);
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !keep(i, j) {
                continue;
            }
            let mut a = zero.clone();
            a[(i, j)] = 1.0;
            a[(j, i)] = -1.0;
            out.push(realify(&space.apply_form(&a), &zero));
            let mut b = zero.clone();
            b[(i, j)] = 1.0;
            b[(j, i)] = 1.0;
            out.push(realify(&zero, &space.apply_form(&b)));
        }
    }
    // i (E_jj - E_{j+1,j+1}) is in u(p,q) for any real diagonal and is traceless.
    for j in 0..n.saturating_sub(1) {
        if !keep(j, j + 1) {
            continue;
        }
        let mut d = zero.clone();
        d[(j, j)] = 1.0;
        d[(j + 1, j + 1)] = -1.0;
        out.push(realify(&zero, &d));
    }
    out
}
