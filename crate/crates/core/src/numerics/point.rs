//! Explicit representations `ρ: Γ → SO(p,q)` and their JSON file format.
//!
//! ```json
//! {
//!   "signature": {"genus": 0, "periods": [2, 3, 7]},
//!   "p": 3, "q": 0,
//!   "tolerance": 1e-8,
//!   "seed": 7,
//!   "generators": {"x1": [["0x1p+0", ...], ...], ...},
//!   "residuals": {...}
//! }
//! ```
//!
//! Matrices are row-major with entries as canonical hex floats, so a file
//! reproduces the doubles bit for bit. Plain JSON numbers are accepted on
//! input for hand-written files. Residuals are informational: they are always
//! recomputed on load.

use indexmap::IndexMap;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::hexfloat;
use super::quadratic::{membership_residual, QuadraticSpace};
use crate::error::{Error, Result};
use crate::presentation::{FuchsianSignature, Word};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `‖ρ(w) - I‖_F` per relator, in relator order.
    pub relators: Vec<f64>,
    /// `‖Sᵀ J S - J‖_F` per generator.
    pub form: Vec<f64>,
    /// `|det S - 1|` per generator.
    pub det: Vec<f64>,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.relators
            .iter()
            .chain(&self.form)
            .chain(&self.det)
            .fold(0.0, |a, &b| a.max(b))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationPoint {
    signature: FuchsianSignature,
    space: QuadraticSpace,
    images: Vec<DMatrix<f64>>,
    tolerance: f64,
    seed: Option<u64>,
    residuals: Residuals,
}

/// Evaluates a word on generator images, using `inverses` for inverted letters.
pub fn eval_word(w: &Word, images: &[DMatrix<f64>], inverses: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n = images.first().map_or(0, |m| m.nrows());
    let mut acc = DMatrix::identity(n, n);
    for l in w.letters() {
        let g = if l.inverse {
            &inverses[l.generator]
        } else {
            &images[l.generator]
        };
        acc *= g;
    }
    acc
}

pub fn inverses(images: &[DMatrix<f64>]) -> Result<Vec<DMatrix<f64>>> {
    images
        .iter()
        .map(|m| {
            m.clone()
                .try_inverse()
                .ok_or_else(|| Error::invalid("generator image is singular"))
        })
        .collect()
}

impl RepresentationPoint {
    /// Computes residuals; does not reject large ones (see [`Self::check`]).
    pub fn new(
        signature: FuchsianSignature,
        space: QuadraticSpace,
        images: Vec<DMatrix<f64>>,
        tolerance: f64,
        seed: Option<u64>,
    ) -> Result<Self> {
        if images.len() != signature.generator_count() {
            return Err(Error::ArityMismatch {
                expected: signature.generator_count(),
                found: images.len(),
            });
        }
        let n = space.dim();
        for m in &images {
            if m.shape() != (n, n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.nrows(),
                });
            }
        }
        let residuals = compute_residuals(&signature, &space, &images)?;
        Ok(RepresentationPoint {
            signature,
            space,
            images,
            tolerance,
            seed,
            residuals,
        })
    }

    /// The representation sending every generator to the identity.
    pub fn trivial(signature: FuchsianSignature, space: QuadraticSpace) -> Result<Self> {
        let n = space.dim();
        let images = vec![DMatrix::identity(n, n); signature.generator_count()];
        Self::new(signature, space, images, 1e-10, None)
    }

    pub fn signature(&self) -> &FuchsianSignature {
        &self.signature
    }

    pub fn space(&self) -> QuadraticSpace {
        self.space
    }

    pub fn images(&self) -> &[DMatrix<f64>] {
        &self.images
    }

    /// The same point checked against a different tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn residuals(&self) -> &Residuals {
        &self.residuals
    }

    /// Fails with the first residual above tolerance, naming the relator or generator.
    pub fn check(&self) -> Result<()> {
        let alphabet = self.signature.alphabet();
        let relators = self.signature.relators();
        let tol = self.tolerance;
        let fail = |stage: String, residual: f64| Error::Residual {
            stage,
            residual,
            tolerance: tol,
        };
        for (w, &r) in relators.iter().zip(&self.residuals.relators) {
            if !(r <= tol) {
                return Err(fail(format!("relator {}", w.format(&alphabet)), r));
            }
        }
        for (k, (&f, &d)) in self
            .residuals
            .form
            .iter()
            .zip(&self.residuals.det)
            .enumerate()
        {
            if !(f <= tol) {
                return Err(fail(
                    format!("form preservation of {}", alphabet.name(k)),
                    f,
                ));
            }
            if !(d <= tol) {
                return Err(fail(format!("determinant of {}", alphabet.name(k)), d));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let file = PointFile::from(self);
        serde_json::to_string_pretty(&file).expect("point file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PointFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("point file: {e}")))?;
        file.try_into()
    }
}

fn compute_residuals(
    sig: &FuchsianSignature,
    space: &QuadraticSpace,
    images: &[DMatrix<f64>],
) -> Result<Residuals> {
    let n = space.dim();
    let inv = inverses(images)?;
    let id = DMatrix::<f64>::identity(n, n);
    let relators = sig
        .relators()
        .iter()
        .map(|w| (eval_word(w, images, &inv) - &id).norm())
        .collect();
    let mut form = Vec::with_capacity(images.len());
    let mut det = Vec::with_capacity(images.len());
    for m in images {
        let (f, d) = membership_residual(m, space)?;
        form.push(f);
        det.push(d);
    }
    Ok(Residuals {
        relators,
        form,
        det,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Hex(String),
    Number(f64),
}

impl Entry {
    fn value(&self) -> Result<f64> {
        match self {
            Entry::Hex(s) => hexfloat::parse(s),
            Entry::Number(x) => Ok(*x),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PointFile {
    signature: FuchsianSignature,
    p: usize,
    q: usize,
    tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    generators: IndexMap<String, Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    residuals: Option<Residuals>,
}

impl From<&RepresentationPoint> for PointFile {
    fn from(rep: &RepresentationPoint) -> Self {
        let alphabet = rep.signature.alphabet();
        let generators = rep
            .images
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let rows = (0..m.nrows())
                    .map(|i| {
                        (0..m.ncols())
                            .map(|j| Entry::Hex(hexfloat::format(m[(i, j)])))
                            .collect()
                    })
                    .collect();
                (alphabet.name(k), rows)
            })
            .collect();
        PointFile {
            signature: rep.signature.clone(),
            p: rep.space.p,
            q: rep.space.q,
            tolerance: rep.tolerance,
            seed: rep.seed,
            generators,
            residuals: Some(rep.residuals.clone()),
        }
    }
}

impl TryFrom<PointFile> for RepresentationPoint {
    type Error = Error;

    fn try_from(file: PointFile) -> Result<Self> {
        let space = QuadraticSpace::new(file.p, file.q)?;
        let alphabet = file.signature.alphabet();
        let n = space.dim();
        let mut images = vec![None; alphabet.len()];
        for (name, rows) in &file.generators {
            let k = alphabet
                .index(name)
                .ok_or_else(|| Error::Parse(format!("unknown generator {name:?}")))?;
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::Parse(format!("{name} is not a {n}x{n} matrix")));
            }
            let mut m = DMatrix::zeros(n, n);
            for (i, row) in rows.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    m[(i, j)] = e.value()?;
                }
            }
            images[k] = Some(m);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(k, m)| m.ok_or_else(|| Error::Parse(format!("missing {}", alphabet.name(k)))))
            .collect::<Result<Vec<_>>>()?;
        RepresentationPoint::new(file.signature, space, images, file.tolerance, file.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot2(t: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()])
    }

    #[test]
    fn trivial_point_has_zero_residuals() {
        let sig = FuchsianSignature::new(2, vec![3]).unwrap();
        let rep = RepresentationPoint::trivial(sig, QuadraticSpace::new(2, 1).unwrap()).unwrap();
        assert_eq!(rep.residuals().max(), 0.0);
        rep.check().unwrap();
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let sig = FuchsianSignature::new(1, vec![3]).unwrap();
        let space = QuadraticSpace::new(2, 0).unwrap();
        let x = rot2(std::f64::consts::TAU / 3.0);
        let images = vec![x, rot2(0.1234567), rot2(-2.5)];
        let rep = RepresentationPoint::new(sig, space, images, 1e-8, Some(11)).unwrap();
        let text = rep.to_json();
        assert!(text.contains("\"x1\""));
        let back = RepresentationPoint::from_json(&text).unwrap();
        for (a, b) in rep.images().iter().zip(back.images()) {
            for (u, v) in a.iter().zip(b.iter()) {
                assert_eq!(u.to_bits(), v.to_bits());
            }
        }
        assert_eq!(back, rep);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn residual_failure_names_the_relator() {
        let sig = FuchsianSignature::new(1, vec![3]).unwrap();
        let space = QuadraticSpace::new(2, 0).unwrap();
        // x1 of order 4, not 3
        let images = vec![rot2(std::f64::consts::FRAC_PI_2), rot2(0.0), rot2(0.0)];
        let rep = RepresentationPoint::new(sig, space, images, 1e-8, None).unwrap();
        match rep.check() {
            Err(Error::Residual { stage, .. }) => assert_eq!(stage, "relator x1^3"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hand_written_numbers_and_missing_generators() {
        let text = r#"{"signature":{"genus":1,"periods":[2]},"p":2,"q":0,"tolerance":1e-8,
            "generators":{"x1":[[-1,0],[0,-1]],"y1":[[1,0],[0,1]],"z1":[[1,0],[0,1]]}}"#;
        let rep = RepresentationPoint::from_json(text).unwrap();
        // x1 [y1,z1] = -I, not I
        assert!(rep.check().is_err());
        let missing = r#"{"signature":{"genus":1,"periods":[2]},"p":2,"q":0,"tolerance":1e-8,
            "generators":{"x1":[[-1,0],[0,-1]]}}"#;
        assert!(RepresentationPoint::from_json(missing).is_err());
    }
}
