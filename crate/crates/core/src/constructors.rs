//! Explicit representations into `SO(p) × SO(q) ⊂ SO(p,q)` with prescribed
//! spectral types on the torsion generators.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::adjoint::spectral_type_numeric;
use crate::numerics::point::RepresentationPoint;
use crate::numerics::quadratic::QuadraticSpace;
use crate::optim::{self, minimize_on_rotations, stage_seed, SolverOptions};
use crate::presentation::FuchsianSignature;
use crate::spectra::{balanced_spectrum, SpectralType};

/// Tolerance for the exact-order and spectrum checks on torsion images.
pub const ORDER_TOL: f64 = 1e-10;
/// A proper power closer than this to the identity means the order is wrong.
const PROPER_POWER_GAP: f64 = 1e-2;
/// Eigenvalue clustering radius when reading spectra back.
const SPECTRUM_RADIUS: f64 = 1e-8;
/// Cap on relabelled spectral choices tried when none were prescribed.
const MAX_RELABELINGS: usize = 64;
/// Cap on all spectral choices tried when none were prescribed.
const MAX_CANDIDATES: usize = 96;
/// Largest total multiplicity change considered around balanced spectra.
const NEARBY_BUDGET: usize = 4;
const NEARBY_PER_PERIOD: usize = 12;

fn default_tolerance() -> f64 {
    1e-8
}

fn default_max_iterations() -> usize {
    2000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionProblem {
    pub signature: FuchsianSignature,
    pub p: usize,
    pub q: usize,
    /// Spectral types of the torsion images in the `SO(p)` factor; balanced when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectra_p: Option<Vec<SpectralType>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectra_q: Option<Vec<SpectralType>>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    pub seed: u64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    /// Draw all but the last handle pair at random instead of setting them to
    /// the identity. Needed for nontrivial surface-group points.
    #[serde(default)]
    pub randomize_pairs: bool,
}

impl ConstructionProblem {
    pub fn new(signature: FuchsianSignature, p: usize, q: usize, seed: u64) -> Self {
        ConstructionProblem {
            signature,
            p,
            q,
            spectra_p: None,
            spectra_q: None,
            tolerance: default_tolerance(),
            seed,
            max_iterations: default_max_iterations(),
            randomize_pairs: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 2 || self.q == 1 {
            return Err(Error::invalid(format!(
                "factors SO({}) x SO({}) are not supported: need p >= 2 and q = 0 or q >= 2",
                self.p, self.q
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        for (n, spectra) in [(self.p, &self.spectra_p), (self.q, &self.spectra_q)] {
            if let Some(s) = spectra {
                check_spectra(&self.signature, n, s)?;
            }
        }
        Ok(())
    }
}

fn check_spectra(sig: &FuchsianSignature, n: usize, spectra: &[SpectralType]) -> Result<()> {
    if spectra.len() != sig.torsion_count() {
        return Err(Error::ArityMismatch {
            expected: sig.torsion_count(),
            found: spectra.len(),
        });
    }
    for (s, &d) in spectra.iter().zip(sig.periods()) {
        if s.order() != d {
            return Err(Error::invalid(format!(
                "spectral type of order {} given for period {d}",
                s.order()
            )));
        }
        if s.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: s.dim(),
            });
        }
        if !s.has_exact_order() {
            return Err(Error::invalid(format!(
                "spectral type {:?} does not have exact order {d}",
                s.mult()
            )));
        }
    }
    Ok(())
}

/// Block-diagonal matrix with the given spectrum: `+1` entries, `-1` entries,
/// then one rotation block by `2πk/d` per conjugate pair `k < d/2`.
pub fn block_rotation(spectrum: &SpectralType) -> Result<DMatrix<f64>> {
    if spectrum.minus_one_mult() % 2 != 0 {
        return Err(Error::invalid("odd multiplicity of -1 has determinant -1"));
    }
    let n = spectrum.dim();
    let d = spectrum.order() as usize;
    let t = spectrum.mult();
    let mut m = DMatrix::zeros(n, n);
    let mut pos = 0;
    for _ in 0..t[0] {
        m[(pos, pos)] = 1.0;
        pos += 1;
    }
    if d % 2 == 0 {
        for _ in 0..t[d / 2] {
            m[(pos, pos)] = -1.0;
            pos += 1;
        }
    }
    for (k, &tk) in t.iter().enumerate().take(d.div_ceil(2)).skip(1) {
        let a = TAU * k as f64 / d as f64;
        let (c, s) = (a.cos(), a.sin());
        for _ in 0..tk {
            m[(pos, pos)] = c;
            m[(pos + 1, pos + 1)] = c;
            m[(pos, pos + 1)] = -s;
            m[(pos + 1, pos)] = s;
            pos += 2;
        }
    }
    debug_assert_eq!(pos, n);
    Ok(m)
}

fn rotation3(axis: [f64; 3], angle: f64) -> DMatrix<f64> {
    let [x, y, z] = axis;
    let (c, s) = (angle.cos(), angle.sin());
    let t = 1.0 - c;
    DMatrix::from_row_slice(
        3,
        3,
        &[
            t * x * x + c,
            t * x * y - s * z,
            t * x * z + s * y,
            t * x * y + s * z,
            t * y * y + c,
            t * y * z - s * x,
            t * x * z - s * y,
            t * y * z + s * x,
            t * z * z + c,
        ],
    )
}

/// `x_1, x_2, x_3 ∈ SO(3)` with `x_1 x_2 x_3 = I`, `x_1`, `x_2` rotations by
/// `2π/d_1`, `2π/d_2` and `x_3` a rotation by `2πk/d_3`, `k` the smallest
/// unit modulo `d_3` for which the axes can be placed.
///
/// With half-angles `a, b` and angle `θ` between the axes, the product
/// rotates by `γ` with `cos(γ/2) = ±(cos a cos b - sin a sin b cos θ)`.
pub fn triangle_solve(d1: u32, d2: u32, d3: u32) -> Result<[DMatrix<f64>; 3]> {
    let sig = FuchsianSignature::new(0, vec![d1, d2, d3])?;
    let (a, b) = (PI / d1 as f64, PI / d2 as f64);
    for k in 1..=d3 / 2 {
        if k.gcd(&d3) != 1 {
            continue;
        }
        let half = PI * k as f64 / d3 as f64;
        for c in [half.cos(), -half.cos()] {
            let cos_theta = (a.cos() * b.cos() - c) / (a.sin() * b.sin());
            if cos_theta.abs() > 1.0 {
                continue;
            }
            let sin_theta = (1.0 - cos_theta * cos_theta).sqrt();
            let x1 = rotation3([0.0, 0.0, 1.0], 2.0 * a);
            let x2 = rotation3([sin_theta, 0.0, cos_theta], 2.0 * b);
            let x3 = (&x1 * &x2).transpose();
            let images = vec![x1, x2, x3];
            let rep = RepresentationPoint::new(
                sig.clone(),
                QuadraticSpace::new(3, 0)?,
                images,
                ORDER_TOL,
                None,
            )?;
            rep.check().map_err(|e| e.at_stage("triangle"))?;
            let [x1, x2, x3]: [DMatrix<f64>; 3] =
                rep.images().to_vec().try_into().expect("three images");
            return Ok([x1, x2, x3]);
        }
    }
    Err(Error::Infeasible(format!(
        "no placement of rotation axes realizes orders ({d1},{d2},{d3}) in SO(3)"
    )))
}

/// Eigenvalues sorted by angle, for comparing conjugacy classes in `SO(n)`.
fn sorted_angles(m: &DMatrix<f64>) -> Vec<f64> {
    let mut a: Vec<f64> = m
        .complex_eigenvalues()
        .iter()
        .map(|z| z.im.atan2(z.re).abs())
        .collect();
    a.sort_by(f64::total_cmp);
    a
}

/// Conjugators `h_i ∈ SO(n)` with `∏ h_i x_i h_i⁻¹ = I` (and `h_1 = I`).
pub fn conjugacy_product_solve(
    targets: &[DMatrix<f64>],
    n: usize,
    opts: &SolverOptions,
) -> Result<Vec<DMatrix<f64>>> {
    let m = targets.len();
    if m < 2 {
        return Err(Error::invalid("need at least two conjugacy classes"));
    }
    if targets.iter().any(|x| x.shape() != (n, n)) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: targets
                .iter()
                .find(|x| x.shape() != (n, n))
                .map_or(0, |x| x.nrows()),
        });
    }
    let det: f64 = targets.iter().map(|x| x.determinant()).product();
    if (det - 1.0).abs() > 1e-8 {
        return Err(Error::Infeasible(format!(
            "product of determinants is {det}, not 1"
        )));
    }
    if m == 2 {
        let a = sorted_angles(&targets[0]);
        let b = sorted_angles(&targets[1]);
        if a.iter().zip(&b).any(|(u, v)| (u - v).abs() > 1e-8) {
            return Err(Error::Infeasible(
                "x1 and x2^-1 have different spectra, so x1 x2 = I is impossible".into(),
            ));
        }
    }
    let id = DMatrix::<f64>::identity(n, n);
    let residual = |h: &[DMatrix<f64>]| {
        let mut acc = targets[0].clone();
        for (hi, xi) in h.iter().zip(&targets[1..]) {
            acc = acc * hi * xi * hi.transpose();
        }
        let d = acc - &id;
        DVector::from_column_slice(d.as_slice())
    };
    let start = vec![id.clone(); m - 1];
    let sol = minimize_on_rotations(n, m - 1, Some(start), residual, opts, "conjugacy product")?;
    let mut out = vec![id];
    out.extend(sol.unknowns);
    Ok(out)
}

/// `y, z ∈ SO(n)` with `y z y⁻¹ z⁻¹ = C`.
pub fn commutator_solve(
    c: &DMatrix<f64>,
    n: usize,
    opts: &SolverOptions,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if c.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.nrows(),
        });
    }
    let id = DMatrix::<f64>::identity(n, n);
    if (c - &id).norm() <= opts.tolerance {
        return Ok((id.clone(), id));
    }
    if n <= 2 {
        return Err(Error::Infeasible(format!(
            "SO({n}) is abelian, so only the identity is a commutator"
        )));
    }
    let residual = |x: &[DMatrix<f64>]| {
        let d = &x[0] * &x[1] * x[0].transpose() * x[1].transpose() - c;
        DVector::from_column_slice(d.as_slice())
    };
    let sol = minimize_on_rotations(n, 2, None, residual, opts, "commutator")?;
    let mut it = sol.unknowns.into_iter();
    Ok((it.next().expect("y"), it.next().expect("z")))
}

/// Relabelings `(a_1, …, a_m)` of the torsion spectra, identity first, up to
/// `k ↦ -k` which gives the same class in `SO(n)`.
fn relabelings(periods: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &d in periods {
        let units: Vec<u32> = (1..=d / 2).filter(|a| a.gcd(&d) == 1).collect();
        out = out
            .into_iter()
            .flat_map(|prefix| {
                units.iter().map(move |&a| {
                    let mut v = prefix.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    out.sort_by_key(|v| (v.iter().filter(|&&a| a != 1).count(), v.clone()));
    out.truncate(MAX_RELABELINGS);
    out
}

/// Images of all generators in one `SO(n)` factor, in alphabet order.
fn build_factor(
    sig: &FuchsianSignature,
    n: usize,
    spectra: &[SpectralType],
    problem: &ConstructionProblem,
    seed: u64,
) -> Result<Vec<DMatrix<f64>>> {
    let id = DMatrix::<f64>::identity(n, n);
    let g = sig.genus() as usize;
    let opts = SolverOptions::new(problem.tolerance * 1e-2, problem.max_iterations, seed);
    let blocks = spectra
        .iter()
        .map(block_rotation)
        .collect::<Result<Vec<_>>>()?;
    let mut rng = optim::rng(stage_seed(seed, 100));

    let torsion: Vec<DMatrix<f64>> = if g == 0 {
        let h = conjugacy_product_solve(&blocks, n, &opts)?;
        h.iter()
            .zip(&blocks)
            .map(|(h, b)| h * b * h.transpose())
            .collect()
    } else {
        blocks
            .iter()
            .map(|b| {
                let h = optim::random_rotation(n, &mut rng);
                &h * b * h.transpose()
            })
            .collect()
    };
    let mut images = torsion.clone();
    if g == 0 {
        return Ok(images);
    }
    let mut prefix = torsion.iter().fold(id.clone(), |acc, x| acc * x);
    for _ in 0..g - 1 {
        let (y, z) = if problem.randomize_pairs {
            (
                optim::random_rotation(n, &mut rng),
                optim::random_rotation(n, &mut rng),
            )
        } else {
            (id.clone(), id.clone())
        };
        prefix = prefix * &y * &z * y.transpose() * z.transpose();
        images.push(y);
        images.push(z);
    }
    let c = prefix.transpose();
    let (y, z) = commutator_solve(&c, n, &opts)?;
    images.push(y);
    images.push(z);
    Ok(images)
}

/// Exact-order spectral types of dimension `n` whose multiplicities differ from
/// `center` by at most `budget` in total, paired with that distance.
fn nearby_spectra(center: &SpectralType, budget: usize) -> Vec<(usize, SpectralType)> {
    let d = center.order() as usize;
    let n = center.dim();
    // Independent slots: t_0, t_{d/2} for even d, and t_k = t_{d-k} for 0 < k < d/2.
    let mut slots: Vec<(usize, usize)> = vec![(0, 1)];
    if d % 2 == 0 {
        slots.push((d / 2, 1));
    }
    slots.extend((1..d.div_ceil(2)).map(|k| (k, 2)));
    let mut out = Vec::new();
    let mut values = vec![0usize; slots.len()];
    fn walk(
        i: usize,
        used: usize,
        filled: usize,
        ctx: (&[(usize, usize)], &SpectralType, usize, usize, usize),
        values: &mut Vec<usize>,
        out: &mut Vec<(usize, SpectralType)>,
    ) {
        let (slots, center, d, n, budget) = ctx;
        if i == slots.len() {
            if filled != n {
                return;
            }
            let mut mult = vec![0; d];
            for (&(k, _), &v) in slots.iter().zip(values.iter()) {
                mult[k] = v;
                mult[(d - k) % d] = v;
            }
            if let Ok(s) = SpectralType::new(d as u32, mult) {
                if s.has_exact_order() {
                    out.push((used, s));
                }
            }
            return;
        }
        let (k, weight) = slots[i];
        let c = center.mult()[k];
        let room = budget - used;
        for v in c.saturating_sub(room)..=c + room {
            let cost = v.abs_diff(c);
            if filled + weight * v > n || (k != 0 && 2 * k == d && v % 2 == 1) {
                continue;
            }
            values[i] = v;
            walk(i + 1, used + cost, filled + weight * v, ctx, values, out);
        }
    }
    walk(
        0,
        0,
        0,
        (&slots, center, d, n, budget),
        &mut values,
        &mut out,
    );
    out.sort_by(|a, b| (a.0, a.1.mult()).cmp(&(b.0, b.1.mult())));
    out
}

/// Candidate spectra for a factor when none were prescribed: Galois
/// relabelings of the balanced types first, then nearby exact-order types by
/// increasing distance from balanced.
fn candidate_spectra(balanced: &[SpectralType]) -> Result<Vec<Vec<SpectralType>>> {
    let periods: Vec<u32> = balanced.iter().map(|s| s.order()).collect();
    let mut out: Vec<Vec<SpectralType>> = Vec::new();
    for labels in relabelings(&periods) {
        let spectra = balanced
            .iter()
            .zip(&labels)
            .map(|(s, &a)| s.relabel(a))
            .collect::<Result<Vec<_>>>()?;
        if !out.contains(&spectra) {
            out.push(spectra);
        }
    }
    let lists: Vec<Vec<(usize, SpectralType)>> = balanced
        .iter()
        .map(|s| {
            let mut l = nearby_spectra(s, NEARBY_BUDGET);
            l.truncate(NEARBY_PER_PERIOD);
            l
        })
        .collect();
    let mut tuples: Vec<(usize, Vec<SpectralType>)> = vec![(0, vec![])];
    for list in &lists {
        tuples = tuples
            .into_iter()
            .flat_map(|(cost, prefix)| {
                list.iter().map(move |(c, s)| {
                    let mut v = prefix.clone();
                    v.push(s.clone());
                    (cost + c, v)
                })
            })
            .collect();
    }
    tuples.sort_by_key(|(cost, _)| *cost);
    for (_, spectra) in tuples {
        if out.len() >= MAX_CANDIDATES {
            break;
        }
        if !out.contains(&spectra) {
            out.push(spectra);
        }
    }
    Ok(out)
}

/// Builds one factor. Without prescribed spectra, walks through
/// [`candidate_spectra`] until a solver succeeds.
fn solve_factor(
    problem: &ConstructionProblem,
    n: usize,
    prescribed: Option<&Vec<SpectralType>>,
    seed: u64,
    name: &str,
) -> Result<(Vec<DMatrix<f64>>, Vec<SpectralType>)> {
    let sig = &problem.signature;
    if n == 0 {
        return Ok((vec![DMatrix::zeros(0, 0); sig.generator_count()], vec![]));
    }
    if let Some(spectra) = prescribed {
        let images = build_factor(sig, n, spectra, problem, seed).map_err(|e| e.at_stage(name))?;
        return Ok((images, spectra.clone()));
    }
    let balanced = sig
        .periods()
        .iter()
        .map(|&d| balanced_spectrum(n, d))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at_stage(name))?;
    let mut first_error = None;
    for spectra in candidate_spectra(&balanced)? {
        match build_factor(sig, n, &spectra, problem, seed) {
            Ok(images) => return Ok((images, spectra)),
            Err(e @ (Error::NoConvergence { .. } | Error::Infeasible(_))) => {
                first_error.get_or_insert(e);
            }
            Err(e) => return Err(e.at_stage(name)),
        }
    }
    Err(first_error
        .expect("balanced spectra are always a candidate")
        .at_stage(name))
}

fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (p, q) = (a.nrows(), b.nrows());
    let mut m = DMatrix::zeros(p + q, p + q);
    m.view_mut((0, 0), (p, p)).copy_from(a);
    m.view_mut((p, p), (q, q)).copy_from(b);
    m
}

/// Checks `‖x^d - I‖ < ORDER_TOL` and that no proper power is near `I`.
pub fn check_exact_order(x: &DMatrix<f64>, d: u32, stage: &str) -> Result<()> {
    let n = x.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let mut power = id.clone();
    for k in 1..=d {
        power = &power * x;
        let dev = (&power - &id).norm();
        if k < d && dev < PROPER_POWER_GAP {
            return Err(Error::Residual {
                stage: format!("{stage}: power {k} is already the identity"),
                residual: dev,
                tolerance: PROPER_POWER_GAP,
            });
        }
        if k == d && dev >= ORDER_TOL {
            return Err(Error::Residual {
                stage: format!("{stage}: power {d}"),
                residual: dev,
                tolerance: ORDER_TOL,
            });
        }
    }
    Ok(())
}

/// A constructed point with the spectra that were realized.
#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    pub point: RepresentationPoint,
    pub spectra_p: Vec<SpectralType>,
    pub spectra_q: Vec<SpectralType>,
}

/// Builds `ρ₀ = (σ, τ)` into `SO(p) × SO(q)` and embeds it block-diagonally.
pub fn deformation_point(problem: &ConstructionProblem) -> Result<Construction> {
    problem.validate()?;
    let sig = &problem.signature;
    let (sigma, spectra_p) = solve_factor(
        problem,
        problem.p,
        problem.spectra_p.as_ref(),
        stage_seed(problem.seed, 1),
        &format!("SO({}) factor", problem.p),
    )?;
    let (tau, spectra_q) = solve_factor(
        problem,
        problem.q,
        problem.spectra_q.as_ref(),
        stage_seed(problem.seed, 2),
        &format!("SO({}) factor", problem.q),
    )?;
    let images: Vec<DMatrix<f64>> = sigma
        .iter()
        .zip(&tau)
        .map(|(a, b)| block_diag(a, b))
        .collect();
    let space = QuadraticSpace::new(problem.p, problem.q)?;
    let point = RepresentationPoint::new(
        sig.clone(),
        space,
        images,
        problem.tolerance,
        Some(problem.seed),
    )?;
    point.check()?;

    let alphabet = sig.alphabet();
    for (i, &d) in sig.periods().iter().enumerate() {
        let name = alphabet.name(i);
        let x = &point.images()[i];
        check_exact_order(x, d, &name)?;
        let expected = if problem.q == 0 {
            spectra_p[i].clone()
        } else {
            spectra_p[i].direct_sum(&spectra_q[i])?
        };
        let found = spectral_type_numeric(x, d, SPECTRUM_RADIUS)?;
        if found != expected {
            return Err(Error::Residual {
                stage: format!(
                    "spectrum of {name}: found {:?}, expected {:?}",
                    found.mult(),
                    expected.mult()
                ),
                residual: f64::NAN,
                tolerance: SPECTRUM_RADIUS,
            });
        }
    }
    Ok(Construction {
        point,
        spectra_p,
        spectra_q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_rotation_examples() {
        let s = SpectralType::new(4, vec![0, 1, 0, 1]).unwrap();
        let r = block_rotation(&s).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!((r - expected).norm() < 1e-15);
        let b = block_rotation(&balanced_spectrum(7, 2).unwrap()).unwrap();
        let diag: Vec<f64> = (0..7).map(|i| b[(i, i)]).collect();
        assert_eq!(diag, [1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0]);
        assert_eq!(b.determinant(), 1.0);
    }

    #[test]
    fn block_rotation_has_exact_order() {
        for (n, d) in [(3, 7), (5, 4), (6, 6), (9, 5), (4, 2)] {
            let s = balanced_spectrum(n, d).unwrap();
            let m = block_rotation(&s).unwrap();
            check_exact_order(&m, d, "block").unwrap();
            assert_eq!(spectral_type_numeric(&m, d, 1e-10).unwrap(), s);
        }
    }

    #[test]
    fn triangle_orders() {
        for (d, k) in [([2, 3, 7], 2), ([3, 3, 4], 1), ([2, 4, 5], 2)] {
            let [x1, x2, x3] = triangle_solve(d[0], d[1], d[2]).unwrap();
            check_exact_order(&x1, d[0], "x1").unwrap();
            check_exact_order(&x2, d[1], "x2").unwrap();
            check_exact_order(&x3, d[2], "x3").unwrap();
            let st = spectral_type_numeric(&x3, d[2], 1e-10).unwrap();
            let mut expected = vec![0; d[2] as usize];
            expected[0] = 1;
            expected[k] = 1;
            expected[d[2] as usize - k] = 1;
            assert_eq!(st.mult(), expected);
        }
        assert!(matches!(
            triangle_solve(2, 3, 5),
            Err(Error::NonHyperbolic { .. })
        ));
    }

    #[test]
    fn inverse_pair_needs_no_conjugation() {
        let x = block_rotation(&balanced_spectrum(3, 5).unwrap()).unwrap();
        let opts = SolverOptions::new(1e-10, 100, 0);
        let h = conjugacy_product_solve(&[x.clone(), x.transpose()], 3, &opts).unwrap();
        for hi in h {
            assert!((hi - DMatrix::identity(3, 3)).norm() < 1e-15);
        }
    }

    #[test]
    fn mismatched_pair_is_infeasible() {
        let x = block_rotation(&balanced_spectrum(3, 2).unwrap()).unwrap();
        let y = block_rotation(&balanced_spectrum(3, 3).unwrap()).unwrap();
        let opts = SolverOptions::new(1e-10, 100, 0);
        assert!(matches!(
            conjugacy_product_solve(&[x, y], 3, &opts),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn commutators() {
        let opts = SolverOptions::new(1e-10, 5000, 4);
        let id = DMatrix::<f64>::identity(3, 3);
        let (y, z) = commutator_solve(&id, 3, &opts).unwrap();
        assert_eq!((y, z), (id.clone(), id));
        let c = optim::random_rotation(3, &mut optim::rng(77));
        let (y, z) = commutator_solve(&c, 3, &opts).unwrap();
        assert!((&y * &z * y.transpose() * z.transpose() - &c).norm() < 1e-8);
        let r = block_rotation(&balanced_spectrum(2, 4).unwrap()).unwrap();
        assert!(commutator_solve(&r, 2, &opts).is_err());
    }

    #[test]
    fn nearby_spectra_start_at_the_center() {
        let center = balanced_spectrum(4, 4).unwrap();
        let near = nearby_spectra(&center, 4);
        assert_eq!(near[0], (0, center));
        assert!(near
            .iter()
            .all(|(c, s)| *c <= 4 && s.dim() == 4 && s.has_exact_order()));
        let want = SpectralType::new(4, vec![2, 1, 0, 1]).unwrap();
        assert!(near.iter().any(|(_, s)| *s == want));
    }

    #[test]
    fn relabeling_order() {
        let r = relabelings(&[2, 3, 7]);
        assert_eq!(r, vec![vec![1, 1, 1], vec![1, 1, 2], vec![1, 1, 3]]);
    }
}
