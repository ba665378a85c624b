use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::numerical_rank;
use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, GroupFamily};

const FD_STEP: f64 = 1e-5;
const MAX_SAMPLES: u64 = 8;

/// Coefficients `a_1, …, a_{n-1}` of `det(x I - S) = xⁿ + a_1 x^{n-1} + … + a_n`,
/// by the Faddeev–LeVerrier recursion.
pub fn char_coeffs(s: &DMatrix<f64>) -> Vec<f64> {
    let n = s.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut c = 1.0;
    let mut out = Vec::with_capacity(n);
    for k in 1..n {
        m = s * &m + &id * c;
        c = -(s * &m).trace() / k as f64;
        out.push(c);
    }
    out
}

/// A maximal torus of `h`, in block form, as a function of its angles.
struct Torus {
    n: usize,
    /// Planes rotated by one angle each.
    rotations: Vec<(usize, usize)>,
    /// A hyperbolic plane, present when `SO(p,q)` has both `p` and `q` odd.
    boost: Option<(usize, usize)>,
}

impl Torus {
    fn of(h: &GroupDescriptor) -> Self {
        let (p, q) = h.signature();
        let mut rotations = Vec::new();
        for i in 0..p / 2 {
            rotations.push((2 * i, 2 * i + 1));
        }
        for i in 0..q / 2 {
            rotations.push((p + 2 * i, p + 2 * i + 1));
        }
        let boost = match h.family {
            GroupFamily::SpecialOrthogonalIndefinite { .. } if p % 2 == 1 && q % 2 == 1 => {
                Some((p - 1, p + q - 1))
            }
            _ => None,
        };
        Torus {
            n: h.natural_dim,
            rotations,
            boost,
        }
    }

    fn params(&self) -> usize {
        self.rotations.len() + usize::from(self.boost.is_some())
    }

    fn element(&self, t: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::identity(self.n, self.n);
        for (&(i, j), &a) in self.rotations.iter().zip(t) {
            m[(i, i)] = a.cos();
            m[(j, j)] = a.cos();
            m[(i, j)] = -a.sin();
            m[(j, i)] = a.sin();
        }
        if let Some((i, j)) = self.boost {
            let b = t[self.rotations.len()];
            m[(i, i)] = b.cosh();
            m[(j, j)] = b.cosh();
            m[(i, j)] = b.sinh();
            m[(j, i)] = b.sinh();
        }
        m
    }
}

/// Rank of the Jacobian of `angles ↦ char_coeffs(torus element)` at a random
/// base point. Degenerate base points (rank below the number of angles, or an
/// unclear rank gap) are re-sampled a bounded number of times; the last
/// measurement is returned.
pub fn torus_jacobian_rank(h: &GroupDescriptor, seed: u64) -> Result<usize> {
    let torus = Torus::of(h);
    let k = torus.params();
    if k == 0 {
        return Ok(0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = Err(Error::invalid("no base point sampled"));
    for _ in 0..MAX_SAMPLES {
        let base: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..2.9)).collect();
        let columns: Vec<Vec<f64>> = (0..k)
            .map(|j| {
                let mut plus = base.clone();
                let mut minus = base.clone();
                plus[j] += FD_STEP;
                minus[j] -= FD_STEP;
                let cp = char_coeffs(&torus.element(&plus));
                let cm = char_coeffs(&torus.element(&minus));
                cp.iter()
                    .zip(&cm)
                    .map(|(a, b)| (a - b) / (2.0 * FD_STEP))
                    .collect()
            })
            .collect();
        let rows = torus.n - 1;
        let jac = DMatrix::from_fn(rows, k, |r, c| columns[c][r]);
        last = numerical_rank(&jac, "torus Jacobian").map(|info| info.rank);
        if matches!(last, Ok(r) if r == k) {
            break;
        }
    }
    last
}
