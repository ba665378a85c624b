//! Exact evaluation of the tangent-space dimension formula, the upper bound on
//! tangent spaces at dense points, the comparison inequality that separates
//! `SO(p)×SO(q)`-dense deformations, and the resulting dimension report.

use std::io::Write;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupDescriptor;
use crate::presentation::FuchsianSignature;
use crate::spectra::{adjoint_fixed_dim, balanced_product_spectrum, error_term_sum, SpectralType};
use crate::Rational;

/// Serializes rationals as `"a/b"` (or `"a"` for integers).
pub mod rational_str {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use crate::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(D::Error::custom)
    }

    pub fn parse(s: &str) -> Result<Rational, String> {
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad rational {s:?}"))?;
                let d: i64 = d
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad rational {s:?}"))?;
                if d == 0 {
                    return Err(format!("zero denominator in {s:?}"));
                }
                Ok(Rational::new(n, d))
            }
            None => s
                .parse::<i64>()
                .map(Rational::from_integer)
                .map_err(|_| format!("bad rational {s:?}")),
        }
    }
}

fn int(x: usize) -> Rational {
    Rational::from_integer(x as i64)
}

/// `(1-χ) dim G + dim (g*)^Γ + Σ (dim G/d_i - dim g^{<x_i>})`, which must be an integer.
pub fn weil_dim_z1(
    sig: &FuchsianSignature,
    fixed_dims: &[usize],
    invariants_dim: usize,
    g: &GroupDescriptor,
) -> Result<i64> {
    if fixed_dims.len() != sig.torsion_count() {
        return Err(Error::ArityMismatch {
            expected: sig.torsion_count(),
            found: fixed_dims.len(),
        });
    }
    let dim = int(g.dim);
    let mut total = (Rational::from_integer(1) - sig.euler_char()) * dim + int(invariants_dim);
    for (&d, &fix) in sig.periods().iter().zip(fixed_dims) {
        total += dim / Rational::from_integer(d as i64) - int(fix);
    }
    if !total.is_integer() {
        return Err(Error::NonIntegral {
            value: total.to_string(),
        });
    }
    Ok(total.to_integer())
}

/// `(1-χ) dim H + (2g + m + rank H) + (3/2) m rank H`.
pub fn ll_upper_bound(sig: &FuchsianSignature, h: &GroupDescriptor) -> Rational {
    let m = sig.torsion_count();
    let rank = int(h.rank);
    (Rational::from_integer(1) - sig.euler_char()) * int(h.dim)
        + int(2 * sig.genus() as usize + m)
        + rank
        + Rational::new(3, 2) * int(m) * rank
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityCheck {
    #[serde(with = "rational_str")]
    pub lhs: Rational,
    #[serde(with = "rational_str")]
    pub rhs: Rational,
    pub holds: bool,
    /// False when `SO(p,q)` is split (`p = q` or `|p - q| = 1`).
    pub hypotheses_hold: bool,
}

/// Compares `-χ (dim G - dim H)` against
/// `2g + m + (3m/2 + 1) rank H - Σ (dim G/d_i - dim g^{<x_i>})`
/// for `G = SO(p,q)` and `H = SO(p)×SO(q)`; `spectra` are the torsion
/// spectra on the `(p+q)`-dimensional natural module.
pub fn check_inequality(
    sig: &FuchsianSignature,
    p: usize,
    q: usize,
    spectra: &[SpectralType],
) -> Result<InequalityCheck> {
    let g = GroupDescriptor::so_pq(p, q)?;
    let h = GroupDescriptor::product(p, q)?;
    let m = sig.torsion_count();
    let lhs = -sig.euler_char() * int(g.dim - h.dim);
    let rhs = int(2 * sig.genus() as usize + m)
        + (Rational::new(3 * m as i64, 2) + Rational::from_integer(1)) * int(h.rank)
        - error_term_sum(sig, spectra, &g)?;
    Ok(InequalityCheck {
        holds: lhs > rhs,
        lhs,
        rhs,
        hypotheses_hold: !g.is_split(),
    })
}

/// Right-hand side of the comparison inequality with balanced block spectra.
fn balanced_rhs(sig: &FuchsianSignature, p: usize, q: usize) -> Result<Rational> {
    let spectra = balanced_spectra(sig, p, q)?;
    Ok(check_inequality(sig, p, q, &spectra)?.rhs)
}

/// Torsion spectra of the block deformation point `σ ⊕ τ` with balanced blocks.
pub fn balanced_spectra(sig: &FuchsianSignature, p: usize, q: usize) -> Result<Vec<SpectralType>> {
    sig.periods()
        .iter()
        .map(|&d| balanced_product_spectrum(p, q, d))
        .collect()
}

/// Constants of the linear majorant `α + β (p+q)` of the inequality's right-hand side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedConstants {
    #[serde(with = "rational_str")]
    pub alpha: Rational,
    #[serde(with = "rational_str")]
    pub beta: Rational,
}

/// Largest joint residue period enumerated exactly when fitting `α`.
const MAX_EXACT_PERIOD: usize = 600;

/// Period in `n` of the deviation of a balanced spectrum from `n/d`.
fn spectral_period(d: u32) -> usize {
    if d % 2 == 0 {
        2 * d as usize
    } else {
        d as usize
    }
}

impl ReducedConstants {
    /// With balanced spectra, `rank H = (p+q)/2 + O(1)` and each defect term is
    /// `γ_d (p+q) + O(1)` with `γ_d = 1/(2d)` for even `d` and `0` for odd `d`,
    /// so `β = (3m/2 + 1)/2 - Σ γ_{d_i}`. The bounded remainder is periodic in
    /// `(p, q)` and `α` is its maximum over one period.
    pub fn for_signature(sig: &FuchsianSignature) -> Result<Self> {
        let m = sig.torsion_count() as i64;
        let mut beta = (Rational::new(3 * m, 2) + Rational::from_integer(1)) / 2;
        for &d in sig.periods() {
            if d % 2 == 0 {
                beta -= Rational::new(1, 2 * d as i64);
            }
        }
        let period = sig
            .periods()
            .iter()
            .fold(2usize, |acc, &d| acc.lcm(&spectral_period(d)));
        let alpha = if period <= MAX_EXACT_PERIOD {
            Self::max_remainder(sig, period, &beta)?
        } else {
            Self::split_remainder_bound(sig, &beta)?
        };
        Ok(ReducedConstants { alpha, beta })
    }

    fn max_remainder(sig: &FuchsianSignature, period: usize, beta: &Rational) -> Result<Rational> {
        let reps: Vec<usize> = (period.max(2)..period.max(2) + period).collect();
        let values: Vec<Rational> = reps
            .par_iter()
            .map(|&p| -> Result<Rational> {
                let mut best: Option<Rational> = None;
                for &q in &reps {
                    let r = balanced_rhs(sig, p, q)? - beta * int(p + q);
                    best = Some(best.map_or(r, |b| b.max(r)));
                }
                Ok(best.expect("non-empty residue range"))
            })
            .collect::<Result<_>>()?;
        Ok(values.into_iter().max().expect("non-empty residue range"))
    }

    /// Sum of the per-term maxima; a valid but possibly loose `α` for long periods.
    fn split_remainder_bound(sig: &FuchsianSignature, beta: &Rational) -> Result<Rational> {
        let m = sig.torsion_count() as i64;
        let rank_coeff = Rational::new(3 * m, 2) + Rational::from_integer(1);
        // rank H - (p+q)/2 <= 0, attained for p, q even.
        let mut alpha = Rational::from_integer(2 * sig.genus() as i64 + m);
        let mut gamma_total = Rational::zero();
        for &d in sig.periods() {
            let gamma = if d % 2 == 0 {
                Rational::new(1, 2 * d as i64)
            } else {
                Rational::zero()
            };
            gamma_total += gamma;
            let per = spectral_period(d);
            let mut worst: Option<Rational> = None;
            for p in per..2 * per {
                for q in per..2 * per {
                    let g = GroupDescriptor::so_pq(p, q)?;
                    let s = balanced_product_spectrum(p, q, d)?;
                    let defect = crate::spectra::defect_term(&s, &g)?;
                    let r = gamma * int(p + q) - defect;
                    worst = Some(worst.map_or(r, |w| w.max(r)));
                }
            }
            alpha += worst.expect("non-empty residue range");
        }
        debug_assert_eq!(*beta, rank_coeff / 2 - gamma_total);
        Ok(alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedInequality {
    #[serde(with = "rational_str")]
    pub alpha: Rational,
    #[serde(with = "rational_str")]
    pub beta: Rational,
    /// `α + β (p+q) < -χ p q`.
    pub holds: bool,
}

pub fn reduced_inequality(
    sig: &FuchsianSignature,
    p: usize,
    q: usize,
) -> Result<ReducedInequality> {
    let constants = ReducedConstants::for_signature(sig)?;
    Ok(reduced_with(sig, &constants, p, q))
}

pub fn reduced_with(
    sig: &FuchsianSignature,
    constants: &ReducedConstants,
    p: usize,
    q: usize,
) -> ReducedInequality {
    let lhs = constants.alpha + constants.beta * int(p + q);
    let rhs = -sig.euler_char() * int(p * q);
    ReducedInequality {
        alpha: constants.alpha,
        beta: constants.beta,
        holds: lhs < rhs,
    }
}

/// Exact dimension data at the block deformation point for `SO(p,q)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub signature: FuchsianSignature,
    pub p: usize,
    pub q: usize,
    pub group: GroupDescriptor,
    pub split: bool,
    pub hypotheses_hold: bool,
    #[serde(with = "rational_str")]
    pub chi: Rational,
    pub spectra: Vec<SpectralType>,
    pub fixed_dims: Vec<usize>,
    pub invariants_dim: usize,
    pub weil_z1: i64,
    #[serde(with = "rational_str")]
    pub upper_bound: Rational,
    #[serde(with = "rational_str")]
    pub inequality_lhs: Rational,
    #[serde(with = "rational_str")]
    pub inequality_rhs: Rational,
    pub inequality_holds: bool,
    #[serde(with = "rational_str")]
    pub reduced_alpha: Rational,
    #[serde(with = "rational_str")]
    pub reduced_beta: Rational,
    pub reduced_holds: bool,
    #[serde(with = "rational_str")]
    pub leading_term: Rational,
    /// `|weil_z1 - leading_term|`.
    #[serde(with = "rational_str")]
    pub error_bound: Rational,
    /// `error_bound / rank G`, the measured constant.
    #[serde(with = "rational_str")]
    pub error_ratio: Rational,
}

pub fn epi_dimension_report(
    sig: &FuchsianSignature,
    p: usize,
    q: usize,
) -> Result<DimensionReport> {
    let constants = ReducedConstants::for_signature(sig)?;
    report_with(sig, &constants, p, q)
}

fn report_with(
    sig: &FuchsianSignature,
    constants: &ReducedConstants,
    p: usize,
    q: usize,
) -> Result<DimensionReport> {
    if p < 3 || q < 3 {
        return Err(Error::invalid(format!(
            "dimension report needs p, q >= 3 (got {p}, {q})"
        )));
    }
    let g = GroupDescriptor::so_pq(p, q)?;
    let spectra = balanced_spectra(sig, p, q)?;
    let fixed_dims: Vec<usize> = spectra.iter().map(adjoint_fixed_dim).collect();
    let weil_z1 = weil_dim_z1(sig, &fixed_dims, 0, &g)?;
    let chi = sig.euler_char();
    let leading_term = (Rational::from_integer(1) - chi) * int(g.dim);
    let error_bound = (Rational::from_integer(weil_z1) - leading_term).abs();
    let ineq = check_inequality(sig, p, q, &spectra)?;
    let reduced = reduced_with(sig, constants, p, q);
    Ok(DimensionReport {
        signature: sig.clone(),
        p,
        q,
        group: g,
        split: g.is_split(),
        hypotheses_hold: g.meets_main_hypotheses(),
        chi,
        spectra,
        fixed_dims,
        invariants_dim: 0,
        weil_z1,
        upper_bound: ll_upper_bound(sig, &g),
        inequality_lhs: ineq.lhs,
        inequality_rhs: ineq.rhs,
        inequality_holds: ineq.holds,
        reduced_alpha: reduced.alpha,
        reduced_beta: reduced.beta,
        reduced_holds: reduced.holds,
        leading_term,
        error_bound,
        error_ratio: error_bound / int(g.rank),
    })
}

impl DimensionReport {
    /// Checks the internal invariants and that every field recomputes
    /// identically from `(signature, p, q)`.
    pub fn validate(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::invalid(format!("report check failed: {what}")));
        if Rational::from_integer(self.weil_z1) > self.upper_bound {
            return fail("weil_z1 exceeds the upper bound");
        }
        let dim = int(self.group.dim);
        if self.leading_term != (Rational::from_integer(1) - self.chi) * dim {
            return fail("leading term is not (1-chi) dim G");
        }
        if self.inequality_holds != (self.inequality_lhs > self.inequality_rhs) {
            return fail("inequality verdict disagrees with its sides");
        }
        let fresh = epi_dimension_report(&self.signature, self.p, self.q)?;
        if &fresh != self {
            return fail("fields do not recompute from signature and (p, q)");
        }
        Ok(())
    }
}

/// Inclusive `(p, q)` grid restricted to `p < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub p_min: usize,
    pub p_max: usize,
    pub q_min: usize,
    pub q_max: usize,
}

impl Grid {
    pub fn new(p_min: usize, p_max: usize, q_min: usize, q_max: usize) -> Result<Self> {
        let g = Grid {
            p_min,
            p_max,
            q_min,
            q_max,
        };
        if g.points().is_empty() {
            return Err(Error::invalid(format!(
                "grid {p_min}:{p_max}:{q_min}:{q_max} has no points with p < q"
            )));
        }
        Ok(g)
    }

    /// Parses `pmin:pmax:qmin:qmax`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(':')
            .map(|x| x.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("bad grid {s:?}")))?;
        match parts.as_slice() {
            [a, b, c, d] => Grid::new(*a, *b, *c, *d),
            _ => Err(Error::Parse(format!(
                "grid must be pmin:pmax:qmin:qmax, got {s:?}"
            ))),
        }
    }

    /// Points in lexicographic `(p, q)` order.
    pub fn points(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in self.p_min..=self.p_max {
            for q in self.q_min.max(p + 1)..=self.q_max {
                out.push((p, q));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub points: usize,
    /// Smallest `c` with `|weil_z1 - (1-χ) dim G| <= c rank G` on every point.
    #[serde(with = "rational_str")]
    pub error_constant: Rational,
    pub fit_holds: usize,
    pub inequality_true: usize,
    pub reduced_true: usize,
    pub verdicts_agree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sweep {
    pub reports: Vec<DimensionReport>,
    pub summary: SweepSummary,
}

/// Evaluates the report on every grid point; rows come back in grid order
/// regardless of how the work is scheduled.
pub fn sweep(sig: &FuchsianSignature, grid: &Grid) -> Result<Sweep> {
    let constants = ReducedConstants::for_signature(sig)?;
    let reports: Vec<DimensionReport> = grid
        .points()
        .par_iter()
        .map(|&(p, q)| report_with(sig, &constants, p, q))
        .collect::<Result<_>>()?;
    let error_constant = reports
        .iter()
        .map(|r| r.error_ratio)
        .max()
        .unwrap_or_else(Rational::zero);
    let summary = SweepSummary {
        points: reports.len(),
        error_constant,
        fit_holds: reports
            .iter()
            .filter(|r| r.error_bound <= error_constant * int(r.group.rank))
            .count(),
        inequality_true: reports.iter().filter(|r| r.inequality_holds).count(),
        reduced_true: reports.iter().filter(|r| r.reduced_holds).count(),
        verdicts_agree: reports
            .iter()
            .filter(|r| r.inequality_holds == r.reduced_holds)
            .count(),
    };
    Ok(Sweep { reports, summary })
}

/// Fixed column order of the sweep CSV.
pub const CSV_COLUMNS: [&str; 20] = [
    "genus",
    "periods",
    "p",
    "q",
    "split",
    "chi",
    "dim_g",
    "rank_g",
    "weil_z1",
    "leading_term",
    "error_bound",
    "error_ratio",
    "upper_bound",
    "inequality_lhs",
    "inequality_rhs",
    "inequality_holds",
    "reduced_alpha",
    "reduced_beta",
    "reduced_holds",
    "verdicts_agree",
];

/// Writes one row per report, rationals as `a/b`, periods joined with `;`.
pub fn write_csv<W: Write>(out: W, reports: &[DimensionReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::invalid(format!("csv output: {e}"));
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for r in reports {
        let periods: Vec<String> = r
            .signature
            .periods()
            .iter()
            .map(|d| d.to_string())
            .collect();
        let row = [
            r.signature.genus().to_string(),
            periods.join(";"),
            r.p.to_string(),
            r.q.to_string(),
            r.split.to_string(),
            r.chi.to_string(),
            r.group.dim.to_string(),
            r.group.rank.to_string(),
            r.weil_z1.to_string(),
            r.leading_term.to_string(),
            r.error_bound.to_string(),
            r.error_ratio.to_string(),
            r.upper_bound.to_string(),
            r.inequality_lhs.to_string(),
            r.inequality_rhs.to_string(),
            r.inequality_holds.to_string(),
            r.reduced_alpha.to_string(),
            r.reduced_beta.to_string(),
            r.reduced_holds.to_string(),
            (r.inequality_holds == r.reduced_holds).to_string(),
        ];
        w.write_record(&row).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::invalid(format!("csv output: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::balanced_spectrum;
    use proptest::prelude::*;

    fn sig(g: u32, periods: &[u32]) -> FuchsianSignature {
        FuchsianSignature::new(g, periods.to_vec()).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn weil_examples() {
        let so3 = GroupDescriptor::so(3).unwrap();
        assert_eq!(
            weil_dim_z1(&sig(0, &[2, 3, 7]), &[1, 1, 1], 0, &so3).unwrap(),
            3
        );
        assert_eq!(weil_dim_z1(&sig(2, &[]), &[], 0, &so3).unwrap(), 9);
        for g in 2..6 {
            let s = sig(g, &[]);
            assert_eq!(
                weil_dim_z1(&s, &[], so3.dim, &so3).unwrap(),
                2 * g as i64 * so3.dim as i64
            );
        }
        assert!(matches!(
            weil_dim_z1(&sig(0, &[2, 3, 7]), &[1, 1], 0, &so3),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn upper_bound_examples() {
        let so3 = GroupDescriptor::so(3).unwrap();
        assert_eq!(ll_upper_bound(&sig(0, &[2, 3, 7]), &so3), r(81, 7));
        assert_eq!(ll_upper_bound(&sig(2, &[]), &so3), r(14, 1));
        // Independent re-derivation for SO(5)×SO(8): dim 38, rank 6, m = 3, g = 0.
        let h = GroupDescriptor::product(5, 8).unwrap();
        let expected = r(43, 42) * r(38, 1) + r(3 + 6, 1) + r(3, 2) * r(18, 1);
        assert_eq!(ll_upper_bound(&sig(0, &[2, 3, 7]), &h), expected);
        assert_eq!(expected, r(817, 21) + r(9, 1) + r(27, 1));
    }

    #[test]
    fn inequality_genus_two() {
        let c = check_inequality(&sig(2, &[]), 5, 8, &[]).unwrap();
        assert_eq!(c.lhs, r(80, 1));
        assert_eq!(c.rhs, r(10, 1));
        assert!(c.holds && c.hypotheses_hold);
        let split = check_inequality(&sig(2, &[]), 5, 6, &[]).unwrap();
        assert!(!split.hypotheses_hold);
    }

    #[test]
    fn inequality_triangle_tracks_error_sum() {
        let s = sig(0, &[2, 3, 7]);
        let spectra = balanced_spectra(&s, 10, 13).unwrap();
        let c = check_inequality(&s, 10, 13, &spectra).unwrap();
        let g = GroupDescriptor::so_pq(10, 13).unwrap();
        let e = error_term_sum(&s, &spectra, &g).unwrap();
        assert_eq!(c.lhs, r(130, 42));
        assert_eq!(c.rhs, r(3, 1) + r(11, 2) * r(11, 1) - e);
        // -χ pq = 130/42 is far below the (p+q)-linear right side at this size.
        assert!(!c.holds);
        // It does hold once pq/42 outgrows 2.75 (p+q).
        let (p, q) = (240, 250);
        let big = check_inequality(&s, p, q, &balanced_spectra(&s, p, q).unwrap()).unwrap();
        assert!(big.holds);
    }

    #[test]
    fn reduced_constants_genus_two() {
        let c = ReducedConstants::for_signature(&sig(2, &[])).unwrap();
        assert_eq!(c.beta, r(1, 2));
        assert_eq!(c.alpha, r(4, 1));
        for p in 3..20 {
            for q in p + 1..22 {
                let red = reduced_with(&sig(2, &[]), &c, p, q);
                let h = GroupDescriptor::product(p, q).unwrap();
                let direct = (h.rank + 4) < 2 * p * q;
                assert_eq!(red.holds, direct);
            }
        }
    }

    #[test]
    fn reduced_is_a_majorant_and_agrees_on_test_grids() {
        for s in [
            sig(0, &[2, 3, 7]),
            sig(2, &[]),
            sig(1, &[2, 2]),
            sig(0, &[3, 3, 4]),
        ] {
            let c = ReducedConstants::for_signature(&s).unwrap();
            for p in 3..=24 {
                for q in p + 1..=26 {
                    let rhs = balanced_rhs(&s, p, q).unwrap();
                    assert!(rhs <= c.alpha + c.beta * int(p + q), "{s} at ({p},{q})");
                    let red = reduced_with(&s, &c, p, q);
                    let full =
                        check_inequality(&s, p, q, &balanced_spectra(&s, p, q).unwrap()).unwrap();
                    if red.holds {
                        assert!(full.holds, "{s} at ({p},{q})");
                    }
                }
            }
        }
    }

    #[test]
    fn alpha_is_attained() {
        // α is a maximum, not just a bound: some (p, q) meets it exactly.
        let s = sig(0, &[2, 3, 7]);
        let c = ReducedConstants::for_signature(&s).unwrap();
        let mut hit = false;
        for p in 3..=90 {
            for q in p..=90 {
                if balanced_rhs(&s, p, q).unwrap() - c.beta * int(p + q) == c.alpha {
                    hit = true;
                }
            }
        }
        assert!(hit);
    }

    #[test]
    fn heavy_torsion_small_dims_fail() {
        let s = sig(0, &[2, 2, 2, 3]);
        let red = reduced_inequality(&s, 3, 5).unwrap();
        let full = check_inequality(&s, 3, 5, &balanced_spectra(&s, 3, 5).unwrap()).unwrap();
        assert!(!red.holds);
        assert_eq!(red.holds, full.holds);
    }

    #[test]
    fn long_period_uses_split_bound() {
        let s = sig(0, &[5, 7, 11]);
        let c = ReducedConstants::for_signature(&s).unwrap();
        for p in 3..15 {
            for q in p + 1..17 {
                assert!(balanced_rhs(&s, p, q).unwrap() <= c.alpha + c.beta * int(p + q));
            }
        }
    }

    #[test]
    fn report_examples() {
        let rep = epi_dimension_report(&sig(0, &[2, 3, 7]), 10, 13).unwrap();
        let g = GroupDescriptor::so_pq(10, 13).unwrap();
        let e = error_term_sum(&rep.signature, &rep.spectra, &g).unwrap();
        assert_eq!(Rational::from_integer(rep.weil_z1), rep.leading_term + e);
        assert_eq!(rep.error_bound, e.abs());
        assert!(rep.hypotheses_hold);
        rep.validate().unwrap();

        for (p, q) in [(5, 8), (3, 4), (7, 20)] {
            let rep = epi_dimension_report(&sig(2, &[]), p, q).unwrap();
            assert_eq!(rep.weil_z1, 3 * rep.group.dim as i64);
            assert!(rep.error_bound.is_zero());
        }
        let rep = epi_dimension_report(&sig(2, &[]), 5, 8).unwrap();
        assert_eq!(rep.leading_term, r(234, 1));

        let rep = epi_dimension_report(&sig(1, &[2, 2]), 8, 9).unwrap();
        assert!(!rep.hypotheses_hold && rep.split);
        rep.validate().unwrap();

        assert!(epi_dimension_report(&sig(2, &[]), 2, 5).is_err());
    }

    #[test]
    fn report_json_round_trip() {
        let rep = epi_dimension_report(&sig(0, &[2, 3, 7]), 10, 13).unwrap();
        let json = serde_json::to_string_pretty(&rep).unwrap();
        assert!(json.contains("\"chi\": \"-1/42\""));
        let back: DimensionReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rep);
        back.validate().unwrap();

        let mut tampered = rep.clone();
        tampered.weil_z1 += 1;
        assert!(tampered.validate().is_err());
    }

    #[test]
    fn grid_parse_and_order() {
        let g = Grid::parse("5:7:6:8").unwrap();
        assert_eq!(g.points(), [(5, 6), (5, 7), (5, 8), (6, 7), (6, 8), (7, 8)]);
        assert!(Grid::parse("5:7").is_err());
        assert!(Grid::parse("9:9:3:4").is_err());
    }

    #[test]
    fn sweep_csv_shape() {
        let sw = sweep(&sig(2, &[]), &Grid::parse("5:6:6:8").unwrap()).unwrap();
        assert_eq!(sw.summary.points, 5);
        assert_eq!(sw.summary.fit_holds, 5);
        assert!(sw.summary.error_constant.is_zero());
        let mut buf = Vec::new();
        write_csv(&mut buf, &sw.reports).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "2,,5,6,true,-2,55,5,165,165,0,0,174,60,9,true,4,1/2,true,true"
        );
        assert_eq!(text.lines().count(), 6);
    }

    #[test]
    fn weil_bounded_by_upper_bound_on_grid() {
        for s in [
            sig(0, &[2, 3, 7]),
            sig(1, &[2]),
            sig(0, &[3, 3, 4]),
            sig(0, &[2, 2, 2, 2, 2]),
        ] {
            for p in 3..=16 {
                for q in p + 1..=18 {
                    let rep = epi_dimension_report(&s, p, q).unwrap();
                    assert!(Rational::from_integer(rep.weil_z1) <= rep.upper_bound);
                }
            }
        }
    }

    #[test]
    fn so3_balanced_spectrum_fixed_dims() {
        // fixed dims used in the SO(3) example are those of balanced spectra
        for d in [2u32, 3, 7] {
            assert_eq!(adjoint_fixed_dim(&balanced_spectrum(3, d).unwrap()), 1);
        }
    }

    proptest! {
        #[test]
        fn weil_is_always_integral(
            genus in 0u32..4,
            periods in prop::collection::vec(2u32..12, 0..6),
            n in 2usize..30,
            fix_seed in prop::collection::vec(0usize..500, 6),
            inv in 0usize..50,
        ) {
            let s = match FuchsianSignature::new(genus, periods) {
                Ok(s) => s,
                Err(_) => return Ok(()),
            };
            let g = GroupDescriptor::so(n).unwrap();
            let fixed: Vec<usize> = fix_seed[..s.torsion_count()].to_vec();
            prop_assert!(weil_dim_z1(&s, &fixed, inv, &g).is_ok());
        }
    }
}
