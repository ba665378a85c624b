use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::point::RepresentationPoint;
use super::quadratic::QuadraticSpace;
use super::{kernel_basis, numerical_rank, vstack};
use crate::error::{Error, Result};

/// Gram eigenvalues within this distance of zero count as null directions.
pub const GRAM_TOL: f64 = 1e-8;
/// Relative radius for grouping eigenvalues of a normalized commutant element.
const CLUSTER_RADIUS: f64 = 1e-4;
const MAX_ATTEMPTS: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubspaceClass {
    Positive,
    Negative,
    Isotropic,
    TotallyIsotropic,
    Mixed,
}

impl SubspaceClass {
    /// Classifies from the eigenvalues of the restricted Gram matrix.
    pub fn from_gram_eigenvalues(ev: &[f64], tol: f64) -> Self {
        if ev.iter().all(|x| x.abs() <= tol) {
            SubspaceClass::TotallyIsotropic
        } else if ev.iter().all(|&x| x > tol) {
            SubspaceClass::Positive
        } else if ev.iter().all(|&x| x < -tol) {
            SubspaceClass::Negative
        } else if ev.iter().any(|x| x.abs() <= tol) {
            SubspaceClass::Isotropic
        } else {
            SubspaceClass::Mixed
        }
    }
}

/// An invariant subspace `W` with its `B`-orthogonal complement.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceReport {
    /// Orthonormal (Euclidean) columns spanning `W`.
    pub basis: DMatrix<f64>,
    /// Orthonormal columns spanning `W^⊥ = {v : B(w, v) = 0 ∀ w ∈ W}`.
    pub complement: DMatrix<f64>,
    pub classification: SubspaceClass,
    pub dimension: usize,
}

impl SubspaceReport {
    pub fn new(basis: DMatrix<f64>, space: &QuadraticSpace) -> Result<Self> {
        let gram = space.gram(&basis, &basis);
        let ev: Vec<f64> = gram.symmetric_eigenvalues().iter().copied().collect();
        let classification = SubspaceClass::from_gram_eigenvalues(&ev, GRAM_TOL);
        let (complement, _) = kernel_basis(&space.apply_form(&basis).transpose(), "B-complement")?;
        Ok(SubspaceReport {
            dimension: basis.ncols(),
            basis,
            complement,
            classification,
        })
    }
}

/// One block row `Sᵀ ⊗ I - I ⊗ S` per generator, acting on column-major `vec M`.
fn commutant_system(images: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n = images.first().map_or(0, |m| m.nrows());
    let id = DMatrix::<f64>::identity(n, n);
    let blocks: Vec<_> = images
        .iter()
        .map(|s| s.transpose().kronecker(&id) - id.kronecker(s))
        .collect();
    if blocks.is_empty() {
        return DMatrix::zeros(0, n * n);
    }
    vstack(&blocks)
}

/// Dimension of the commutant `{M : M ρ(g) = ρ(g) M}`.
///
/// For real matrices the real solution space has the same dimension as the
/// complex one, so this is also the complex commutant dimension; 1 means the
/// representation is absolutely irreducible.
pub fn commutant_dim(rep: &RepresentationPoint) -> Result<usize> {
    let n = rep.space().dim();
    if rep.images().is_empty() {
        return Ok(n * n);
    }
    Ok(numerical_rank(&commutant_system(rep.images()), "commutant")?.nullity)
}

/// Invariant subspaces read off from eigenspaces of a random commutant element.
///
/// Returns an empty list for absolutely irreducible points. Real eigenvalues
/// give `ker(M - λ)`, complex pairs give `ker((M - a)² + b²)`.
pub fn invariant_subspace_search(
    rep: &RepresentationPoint,
    seed: u64,
) -> Result<Vec<SubspaceReport>> {
    let space = rep.space();
    let n = space.dim();
    let commutant = if rep.images().is_empty() {
        DMatrix::identity(n * n, n * n)
    } else {
        kernel_basis(&commutant_system(rep.images()), "commutant")?.0
    };
    if commutant.ncols() <= 1 {
        return Ok(Vec::new());
    }
    let mut last_error = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let coeffs: Vec<f64> = (0..commutant.ncols())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let v = &commutant * nalgebra::DVector::from_vec(coeffs);
        let m = DMatrix::from_column_slice(n, n, v.as_slice());
        let m = &m / m.norm();
        match eigen_subspaces(&m, &space) {
            Ok(found) if !found.is_empty() => return Ok(found),
            Ok(_) => last_error = "commutant element is scalar".to_string(),
            Err(e) => last_error = e.to_string(),
        }
    }
    Err(Error::Defective(format!(
        "no usable commutant element after {MAX_ATTEMPTS} attempts: {last_error}"
    )))
}

fn cluster(values: &[Complex<f64>], radius: f64) -> Vec<Complex<f64>> {
    let mut clusters: Vec<(Complex<f64>, usize)> = Vec::new();
    for &v in values {
        match clusters
            .iter_mut()
            .find(|(sum, count)| (sum / *count as f64 - v).norm() <= radius)
        {
            Some((sum, count)) => {
                *sum += v;
                *count += 1;
            }
            None => clusters.push((v, 1)),
        }
    }
    clusters
        .into_iter()
        .map(|(sum, count)| sum / count as f64)
        .collect()
}

fn eigen_subspaces(m: &DMatrix<f64>, space: &QuadraticSpace) -> Result<Vec<SubspaceReport>> {
    let n = m.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let ev: Vec<Complex<f64>> = m.complex_eigenvalues().iter().copied().collect();
    let mut out = Vec::new();
    for lambda in cluster(&ev, CLUSTER_RADIUS) {
        let op = if lambda.im.abs() <= CLUSTER_RADIUS {
            m - &id * lambda.re
        } else if lambda.im > 0.0 {
            let shifted = m - &id * lambda.re;
            &shifted * &shifted + &id * (lambda.im * lambda.im)
        } else {
            continue;
        };
        let (basis, _) = kernel_basis(&op, "commutant eigenspace")?;
        if basis.ncols() == 0 {
            return Err(Error::Defective(format!(
                "eigenvalue {lambda} has an empty numerical eigenspace"
            )));
        }
        if basis.ncols() < n {
            out.push(SubspaceReport::new(basis, space)?);
        }
    }
    Ok(out)
}

/// Whether some reported subspace is positive of dimension `p`.
pub fn stabilizes_positive_subspace(reports: &[SubspaceReport], p: usize) -> bool {
    reports
        .iter()
        .any(|r| r.classification == SubspaceClass::Positive && r.dimension == p)
}
