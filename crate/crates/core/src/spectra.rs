//! Eigenvalue multiplicities of finite-order special orthogonal operators and
//! the fixed-space counts they determine on the adjoint module.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, GroupFamily};
use crate::presentation::FuchsianSignature;
use crate::Rational;

/// Multiplicities `t_0..t_{d-1}` of the eigenvalues `exp(2πik/d)` of an
/// operator of order dividing `d` on an `n`-dimensional real space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpectrum", into = "RawSpectrum")]
pub struct SpectralType {
    order: u32,
    dim: usize,
    mult: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawSpectrum {
    order: u32,
    dim: usize,
    mult: Vec<usize>,
}

impl TryFrom<RawSpectrum> for SpectralType {
    type Error = Error;

    fn try_from(raw: RawSpectrum) -> Result<Self> {
        SpectralType::new(raw.order, raw.mult).and_then(|s| {
            if s.dim != raw.dim {
                Err(Error::DimensionMismatch {
                    expected: raw.dim,
                    found: s.dim,
                })
            } else {
                Ok(s)
            }
        })
    }
}

impl From<SpectralType> for RawSpectrum {
    fn from(s: SpectralType) -> Self {
        RawSpectrum {
            order: s.order,
            dim: s.dim,
            mult: s.mult,
        }
    }
}

impl SpectralType {
    /// Checks conjugation symmetry and the determinant-one parity condition.
    pub fn new(order: u32, mult: Vec<usize>) -> Result<Self> {
        if order == 0 {
            return Err(Error::invalid("spectral order must be at least 1"));
        }
        let d = order as usize;
        if mult.len() != d {
            return Err(Error::ArityMismatch {
                expected: d,
                found: mult.len(),
            });
        }
        for k in 1..d {
            if mult[k] != mult[d - k] {
                return Err(Error::invalid(format!(
                    "multiplicities of exponents {k} and {} differ: not a real operator",
                    d - k
                )));
            }
        }
        if d % 2 == 0 && mult[d / 2] % 2 == 1 {
            return Err(Error::invalid(
                "odd multiplicity of eigenvalue -1: determinant is not one",
            ));
        }
        let dim = mult.iter().sum();
        if dim == 0 {
            return Err(Error::invalid("spectral type of a zero-dimensional space"));
        }
        Ok(SpectralType { order, dim, mult })
    }

    pub fn identity(n: usize) -> Self {
        SpectralType {
            order: 1,
            dim: n,
            mult: vec![n],
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mult(&self) -> &[usize] {
        &self.mult
    }

    /// Multiplicity of the eigenvalue `-1` (zero for odd order).
    pub fn minus_one_mult(&self) -> usize {
        if self.order % 2 == 0 {
            self.mult[self.order as usize / 2]
        } else {
            0
        }
    }

    /// True when the exponents present generate `Z/d`, i.e. the operator has
    /// order exactly `d` rather than a proper divisor.
    pub fn has_exact_order(&self) -> bool {
        let g = self
            .mult
            .iter()
            .enumerate()
            .filter(|(_, &t)| t > 0)
            .fold(self.order as u64, |g, (k, _)| g.gcd(&(k as u64)));
        g == 1
    }

    /// Exponents `k` with multiplicity, in increasing order.
    pub fn exponents(&self) -> Vec<u32> {
        self.mult
            .iter()
            .enumerate()
            .flat_map(|(k, &t)| std::iter::repeat_n(k as u32, t))
            .collect()
    }

    /// Spectrum of the block sum of two operators of the same order.
    pub fn direct_sum(&self, other: &SpectralType) -> Result<SpectralType> {
        if self.order != other.order {
            return Err(Error::invalid(format!(
                "cannot add spectra of orders {} and {}",
                self.order, other.order
            )));
        }
        let mult = self
            .mult
            .iter()
            .zip(&other.mult)
            .map(|(a, b)| a + b)
            .collect();
        SpectralType::new(self.order, mult)
    }

    /// Relabels exponents by `k -> a k mod d` for `a` coprime to `d`.
    pub fn relabel(&self, a: u32) -> Result<SpectralType> {
        let d = self.order as usize;
        if (a as usize).gcd(&d) != 1 {
            return Err(Error::invalid(format!("{a} is not a unit modulo {d}")));
        }
        let mut mult = vec![0; d];
        for (k, &t) in self.mult.iter().enumerate() {
            mult[(a as usize * k) % d] += t;
        }
        SpectralType::new(self.order, mult)
    }
}

fn choose2(t: usize) -> usize {
    t * t.saturating_sub(1) / 2
}

/// Dimension of the `+1` eigenspace of the induced operator on `∧²`:
/// `C(t_1,2) + C(t_{-1},2) + ½ Σ_{λ≠±1} t_λ t_λ̄`.
pub fn wedge2_fixed_dim(s: &SpectralType) -> usize {
    let d = s.order as usize;
    let mut dim = choose2(s.mult[0]) + choose2(s.minus_one_mult());
    // Each unordered pair {λ, λ̄} is counted once, which is the ½ Σ.
    for k in 1..d {
        if 2 * k < d {
            dim += s.mult[k] * s.mult[d - k];
        }
    }
    dim
}

/// `dim so(p,q)^{<x>}` for an element with spectral type `s` on the natural module.
pub fn adjoint_fixed_dim(s: &SpectralType) -> usize {
    wedge2_fixed_dim(s)
}

/// Multiplicities within `n/d + O(1)` satisfying symmetry and determinant parity.
///
/// Every exponent starts at `⌊n/d⌋`; the remainder goes two at a time to the
/// conjugate pairs `{k, d-k}` in increasing `k`, any single unit left goes to
/// `t_1`, and finally one unit moves between `t_1` and `t_{-1}` if `t_{-1}` is odd.
pub fn balanced_spectrum(n: usize, d: u32) -> Result<SpectralType> {
    if n == 0 || d == 0 {
        return Err(Error::invalid("balanced spectrum needs n >= 1 and d >= 1"));
    }
    let du = d as usize;
    let base = n / du;
    let mut rem = n - base * du;
    let mut mult = vec![base; du];
    let mut k = 1;
    while rem >= 2 && 2 * k < du {
        mult[k] += 1;
        mult[du - k] += 1;
        rem -= 2;
        k += 1;
    }
    mult[0] += rem;
    if du % 2 == 0 && mult[du / 2] % 2 == 1 {
        if mult[0] > 0 {
            mult[0] -= 1;
            mult[du / 2] += 1;
        } else {
            mult[du / 2] -= 1;
            mult[0] += 1;
        }
    }
    let s = SpectralType::new(d, mult)?;
    if !s.has_exact_order() {
        return Err(Error::Infeasible(format!(
            "no balanced spectrum of exact order {d} in dimension {n}"
        )));
    }
    Ok(s)
}

fn check_adjoint_group(s: &SpectralType, g: &GroupDescriptor) -> Result<()> {
    if let GroupFamily::Product { .. } = g.family {
        return Err(Error::invalid(
            "defect terms are defined for SO(p,q) or SO(n), not for a block product",
        ));
    }
    if s.dim != g.natural_dim {
        return Err(Error::DimensionMismatch {
            expected: g.natural_dim,
            found: s.dim,
        });
    }
    Ok(())
}

/// `dim G / d - dim g^{<x>}`.
pub fn defect_term(s: &SpectralType, g: &GroupDescriptor) -> Result<Rational> {
    check_adjoint_group(s, g)?;
    Ok(Rational::new(g.dim as i64, s.order as i64)
        - Rational::from_integer(adjoint_fixed_dim(s) as i64))
}

/// Sum of defect terms over the torsion generators.
pub fn error_term_sum(
    sig: &FuchsianSignature,
    spectra: &[SpectralType],
    g: &GroupDescriptor,
) -> Result<Rational> {
    if spectra.len() != sig.torsion_count() {
        return Err(Error::ArityMismatch {
            expected: sig.torsion_count(),
            found: spectra.len(),
        });
    }
    let mut total = Rational::from_integer(0);
    for (s, &d) in spectra.iter().zip(sig.periods()) {
        if s.order != d {
            return Err(Error::invalid(format!(
                "spectrum of order {} given for period {d}",
                s.order
            )));
        }
        total += defect_term(s, g)?;
    }
    Ok(total)
}

/// Spectrum of the block element `σ(x) ⊕ τ(x)` with both blocks balanced.
pub fn balanced_product_spectrum(p: usize, q: usize, d: u32) -> Result<SpectralType> {
    balanced_spectrum(p, d)?.direct_sum(&balanced_spectrum(q, d)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use proptest::prelude::*;

    /// Counts pairs `i < j` of eigenvalue exponents with `k_i + k_j ≡ 0 (mod d)`,
    /// the eigenvalue-one basis vectors `e_i ∧ e_j` of `∧²`.
    fn pair_count_oracle(s: &SpectralType) -> usize {
        let e = s.exponents();
        let d = s.order();
        let mut count = 0;
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                if (e[i] + e[j]) % d == 0 {
                    count += 1;
                }
            }
        }
        count
    }

    fn st(d: u32, mult: &[usize]) -> SpectralType {
        SpectralType::new(d, mult.to_vec()).unwrap()
    }

    #[test]
    fn wedge2_examples() {
        assert_eq!(wedge2_fixed_dim(&SpectralType::identity(5)), 10);
        assert_eq!(wedge2_fixed_dim(&st(4, &[0, 2, 0, 2])), 4);
        assert_eq!(wedge2_fixed_dim(&st(2, &[3, 2])), 4);
        for s in [st(4, &[0, 2, 0, 2]), st(2, &[3, 2])] {
            assert_eq!(wedge2_fixed_dim(&s), pair_count_oracle(&s));
        }
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(adjoint_fixed_dim(&st(7, &[1, 1, 0, 0, 0, 0, 1])), 1);
        assert_eq!(adjoint_fixed_dim(&SpectralType::identity(7)), 21);
        let s = st(3, &[2, 2, 2]);
        assert_eq!(adjoint_fixed_dim(&s), 5);
        assert_eq!(pair_count_oracle(&s), 5);
    }

    #[test]
    fn balanced_examples() {
        assert_eq!(balanced_spectrum(6, 3).unwrap().mult(), [2, 2, 2]);
        assert_eq!(balanced_spectrum(7, 2).unwrap().mult(), [3, 4]);
        assert_eq!(balanced_spectrum(5, 4).unwrap().mult(), [1, 1, 2, 1]);
        assert_eq!(
            balanced_spectrum(3, 7).unwrap().mult(),
            [1, 1, 0, 0, 0, 0, 1]
        );
        assert_eq!(balanced_spectrum(3, 2).unwrap().mult(), [1, 2]);
        // n = 6, d = 2 cannot stay inside ⌊n/d⌋..⌊n/d⌋+2; t_1 drops to 2.
        assert_eq!(balanced_spectrum(6, 2).unwrap().mult(), [2, 4]);
    }

    #[test]
    fn balanced_rejects_degenerate() {
        assert!(matches!(balanced_spectrum(1, 3), Err(Error::Infeasible(_))));
        assert!(balanced_spectrum(0, 3).is_err());
    }

    #[test]
    fn defect_examples() {
        let so3 = GroupDescriptor::so(3).unwrap();
        let s2 = st(2, &[1, 2]);
        let s3 = balanced_spectrum(3, 3).unwrap();
        let s7 = balanced_spectrum(3, 7).unwrap();
        assert_eq!(defect_term(&s2, &so3).unwrap(), Rational::new(1, 2));
        assert_eq!(defect_term(&s3, &so3).unwrap(), Rational::from_integer(0));
        assert_eq!(defect_term(&s7, &so3).unwrap(), Rational::new(-4, 7));

        let sig = FuchsianSignature::new(0, vec![2, 3, 7]).unwrap();
        let sum = error_term_sum(&sig, &[s2.clone(), s3.clone(), s7.clone()], &so3).unwrap();
        assert_eq!(sum, Rational::new(-1, 14));

        let so4 = GroupDescriptor::so(4).unwrap();
        assert!(matches!(
            defect_term(&s2, &so4),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            error_term_sum(&sig, &[s2.clone()], &so3),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(error_term_sum(&sig, &[s3, s2, s7], &so3).is_err());
        let prod = GroupDescriptor::product(2, 2).unwrap();
        assert!(defect_term(&st(2, &[2, 2]), &prod).is_err());
    }

    #[test]
    fn empty_error_sum() {
        let sig = FuchsianSignature::new(2, vec![]).unwrap();
        let g = GroupDescriptor::so_pq(5, 8).unwrap();
        assert_eq!(
            error_term_sum(&sig, &[], &g).unwrap(),
            Rational::from_integer(0)
        );
    }

    #[test]
    fn four_involutions_linear_bound() {
        // (0;2,2,2,2,2): the error sum grows at most linearly in n.
        let sig = FuchsianSignature::new(0, vec![2, 2, 2, 2, 2]).unwrap();
        let mut ratios = Vec::new();
        for n in 3..=40 {
            let g = GroupDescriptor::so(n).unwrap();
            let s = balanced_spectrum(n, 2).unwrap();
            let sum = error_term_sum(&sig, &vec![s; 5], &g).unwrap();
            ratios.push((sum / Rational::from_integer(n as i64)).abs());
        }
        let beta = ratios.iter().max().unwrap();
        assert!(*beta <= Rational::from_integer(2), "beta = {beta}");
    }

    #[test]
    fn spectrum_validation() {
        assert!(SpectralType::new(4, vec![1, 1, 0, 0]).is_err());
        assert!(SpectralType::new(2, vec![1, 1]).is_err());
        assert!(SpectralType::new(3, vec![1, 1]).is_err());
        assert!(st(6, &[0, 0, 1, 0, 1, 0]).has_exact_order() == false);
        assert!(st(7, &[1, 0, 1, 0, 0, 1, 0]).has_exact_order());
        let json = r#"{"order":3,"dim":6,"mult":[2,2,2]}"#;
        let s: SpectralType = serde_json::from_str(json).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), json);
        assert!(
            serde_json::from_str::<SpectralType>(r#"{"order":3,"dim":5,"mult":[2,2,2]}"#).is_err()
        );
    }

    fn arb_spectrum() -> impl Strategy<Value = SpectralType> {
        (1u32..=12).prop_flat_map(|d| {
            let du = d as usize;
            let pairs = (du - 1) / 2;
            (
                Just(d),
                0usize..=4,
                prop::collection::vec(0usize..=3, pairs),
                0usize..=2,
            )
                .prop_filter_map("empty", move |(d, t0, pair_mult, half)| {
                    let du = d as usize;
                    let mut mult = vec![0; du];
                    mult[0] = t0;
                    for (i, &t) in pair_mult.iter().enumerate() {
                        mult[i + 1] = t;
                        mult[du - i - 1] = t;
                    }
                    if du % 2 == 0 {
                        mult[du / 2] = 2 * half;
                    }
                    SpectralType::new(d, mult).ok()
                })
        })
    }

    proptest! {
        #[test]
        fn wedge2_matches_pair_count(s in arb_spectrum()) {
            prop_assert_eq!(wedge2_fixed_dim(&s), pair_count_oracle(&s));
        }

        #[test]
        fn wedge2_invariant_under_unit_relabeling(s in arb_spectrum(), a in 1u32..40) {
            if let Ok(r) = s.relabel(a) {
                prop_assert_eq!(wedge2_fixed_dim(&s), wedge2_fixed_dim(&r));
            }
        }

        #[test]
        fn balanced_is_valid_and_near_mean(n in 2usize..80, d in 2u32..16) {
            let s = balanced_spectrum(n, d).unwrap();
            prop_assert_eq!(s.dim(), n);
            prop_assert!(s.has_exact_order());
            for &t in s.mult() {
                let dev = (t as f64 - n as f64 / d as f64).abs();
                prop_assert!(dev <= 2.0, "t = {}, n/d = {}", t, n as f64 / d as f64);
            }
            prop_assert_eq!(s, balanced_spectrum(n, d).unwrap());
        }
    }
}
