//! Fuchsian signatures, words in the standard presentation generators and
//! Fox free differential calculus.
//!
//! Generator order is fixed across the crate and all file formats:
//! `x_1..x_m` occupy indices `0..m`, then the genus pairs follow as
//! `y_1, z_1, y_2, z_2, ..` at indices `m, m+1, m+2, ..`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Rational;

/// Genus and torsion orders of a cocompact oriented Fuchsian group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSignature", into = "RawSignature")]
pub struct FuchsianSignature {
    genus: u32,
    periods: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct RawSignature {
    genus: u32,
    #[serde(default)]
    periods: Vec<u32>,
}

impl TryFrom<RawSignature> for FuchsianSignature {
    type Error = Error;

    fn try_from(raw: RawSignature) -> Result<Self> {
        FuchsianSignature::new(raw.genus, raw.periods)
    }
}

impl From<FuchsianSignature> for RawSignature {
    fn from(sig: FuchsianSignature) -> Self {
        RawSignature {
            genus: sig.genus,
            periods: sig.periods,
        }
    }
}

impl FuchsianSignature {
    /// Validates the periods and rejects signatures whose Euler characteristic
    /// is not negative.
    pub fn new(genus: u32, periods: Vec<u32>) -> Result<Self> {
        if let Some(&bad) = periods.iter().find(|&&d| d < 2) {
            return Err(Error::invalid(format!("period {bad} is below 2")));
        }
        let sig = FuchsianSignature { genus, periods };
        let chi = sig.euler_char();
        if chi >= Rational::zero() {
            return Err(Error::NonHyperbolic {
                chi: chi.to_string(),
            });
        }
        Ok(sig)
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn periods(&self) -> &[u32] {
        &self.periods
    }

    /// Number of torsion generators `m`.
    pub fn torsion_count(&self) -> usize {
        self.periods.len()
    }

    /// Total number of presentation generators, `m + 2g`.
    pub fn generator_count(&self) -> usize {
        self.periods.len() + 2 * self.genus as usize
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet {
            torsion: self.periods.len(),
            genus: self.genus as usize,
        }
    }

    /// `2 - 2g - sum (1 - 1/d_i)`.
    pub fn euler_char(&self) -> Rational {
        let mut chi = Rational::from_integer(2 - 2 * self.genus as i64);
        for &d in &self.periods {
            chi -= Rational::one() - Rational::new(1, d as i64);
        }
        chi
    }

    /// The `m` torsion relators `x_i^{d_i}` followed by the long relator
    /// `x_1..x_m [y_1,z_1]..[y_g,z_g]`.
    pub fn relators(&self) -> Vec<Word> {
        let alphabet = self.alphabet();
        let mut out: Vec<Word> = self
            .periods
            .iter()
            .enumerate()
            .map(|(i, &d)| Word::generator(i).pow(d as i32))
            .collect();
        let mut long = Word::identity();
        for i in 0..self.torsion_count() {
            long = &long * &Word::generator(i);
        }
        for j in 0..self.genus as usize {
            let (y, z) = alphabet.pair(j);
            long = &long * &Word::commutator(&Word::generator(y), &Word::generator(z));
        }
        out.push(long);
        out
    }
}

impl fmt::Display for FuchsianSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.genus)?;
        if self.periods.is_empty() {
            write!(f, "-")?;
        } else {
            let parts: Vec<String> = self.periods.iter().map(|d| d.to_string()).collect();
            write!(f, "{}", parts.join(","))?;
        }
        write!(f, ")")
    }
}

pub fn euler_char(sig: &FuchsianSignature) -> Rational {
    sig.euler_char()
}

pub fn relators(sig: &FuchsianSignature) -> Vec<Word> {
    sig.relators()
}

/// Generator naming for a presentation with `torsion` x's and `genus` y/z pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet {
    pub torsion: usize,
    pub genus: usize,
}

impl Alphabet {
    pub fn len(&self) -> usize {
        self.torsion + 2 * self.genus
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Indices of `(y_{j+1}, z_{j+1})`.
    pub fn pair(&self, j: usize) -> (usize, usize) {
        (self.torsion + 2 * j, self.torsion + 2 * j + 1)
    }

    pub fn name(&self, index: usize) -> String {
        if index < self.torsion {
            format!("x{}", index + 1)
        } else {
            let k = index - self.torsion;
            let letter = if k % 2 == 0 { 'y' } else { 'z' };
            format!("{}{}", letter, k / 2 + 1)
        }
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.len()).map(|i| self.name(i)).collect()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        let mut chars = name.chars();
        let letter = chars.next()?;
        let k: usize = chars.as_str().parse().ok()?;
        if k == 0 {
            return None;
        }
        match letter {
            'x' if k <= self.torsion => Some(k - 1),
            'y' if k <= self.genus => Some(self.pair(k - 1).0),
            'z' if k <= self.genus => Some(self.pair(k - 1).1),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn inv(self) -> Letter {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }
}

/// A freely reduced word in the presentation generators.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(index: usize) -> Self {
        Word(vec![Letter {
            generator: index,
            inverse: false,
        }])
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn pow(&self, k: i32) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    /// `a b a^-1 b^-1`.
    pub fn commutator(a: &Word, b: &Word) -> Word {
        &(&(a * b) * &a.inverse()) * &b.inverse()
    }

    /// `u w u^-1`.
    pub fn conjugate_by(&self, u: &Word) -> Word {
        &(u * self) * &u.inverse()
    }

    pub fn format(&self, alphabet: &Alphabet) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut run = 1;
            while i + run < self.0.len() && self.0[i + run] == l {
                run += 1;
            }
            let exp = if l.inverse { -(run as i64) } else { run as i64 };
            let name = alphabet.name(l.generator);
            if exp == 1 {
                parts.push(name);
            } else {
                parts.push(format!("{name}^{exp}"));
            }
            i += run;
        }
        parts.join(" ")
    }

    /// Parses strings such as `"x1^2"` or `"y1 z1 y1^-1 z1^-1"`; `"1"` is the identity.
    pub fn parse(s: &str, alphabet: &Alphabet) -> Result<Word> {
        let mut letters = Vec::new();
        for token in s.split_whitespace() {
            if token == "1" {
                continue;
            }
            let (name, exp) = match token.split_once('^') {
                Some((n, e)) => {
                    let e: i64 = e
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in {token:?}")))?;
                    (n, e)
                }
                None => (token, 1),
            };
            let generator = alphabet
                .index(name)
                .ok_or_else(|| Error::Parse(format!("unknown generator {name:?}")))?;
            let letter = Letter {
                generator,
                inverse: exp < 0,
            };
            for _ in 0..exp.unsigned_abs() {
                letters.push(letter);
            }
        }
        Ok(Word::from_letters(letters))
    }
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inv()) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl Mul for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &rhs.0 {
            push_reduced(&mut out, l);
        }
        Word(out)
    }
}

/// Finite integer combination of words, kept with reduced words and no zero
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupRingElement {
    terms: BTreeMap<Word, i64>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_word(Word::identity())
    }

    pub fn from_word(w: Word) -> Self {
        Self::from_term(w, 1)
    }

    pub fn from_term(w: Word, coeff: i64) -> Self {
        let mut e = Self::zero();
        e.add_term(w, coeff);
        e
    }

    pub fn add_term(&mut self, w: Word, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry(w).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.terms.retain(|_, c| *c != 0);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Augmentation: the sum of coefficients.
    pub fn augmentation(&self) -> i64 {
        self.terms.values().sum()
    }

    /// Left multiplication by a single word.
    pub fn left_mul(&self, u: &Word) -> Self {
        let mut out = Self::zero();
        for (w, c) in self.terms() {
            out.add_term(u * w, c);
        }
        out
    }

    pub fn format(&self, alphabet: &Alphabet) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (w, c)) in self.terms().enumerate() {
            let sign = if c < 0 {
                "-"
            } else if i > 0 {
                "+"
            } else {
                ""
            };
            if i > 0 {
                s.push(' ');
            }
            s.push_str(sign);
            if c.abs() != 1 {
                s.push_str(&c.abs().to_string());
                s.push('*');
            }
            s.push_str(&w.format(alphabet));
        }
        s
    }
}

impl Add for &GroupRingElement {
    type Output = GroupRingElement;

    fn add(self, rhs: &GroupRingElement) -> GroupRingElement {
        let mut out = self.clone();
        for (w, c) in rhs.terms() {
            out.add_term(w.clone(), c);
        }
        out
    }
}

impl Sub for &GroupRingElement {
    type Output = GroupRingElement;

    fn sub(self, rhs: &GroupRingElement) -> GroupRingElement {
        self + &(-rhs)
    }
}

impl Neg for &GroupRingElement {
    type Output = GroupRingElement;

    fn neg(self) -> GroupRingElement {
        GroupRingElement {
            terms: self.terms.iter().map(|(w, &c)| (w.clone(), -c)).collect(),
        }
    }
}

impl Mul for &GroupRingElement {
    type Output = GroupRingElement;

    fn mul(self, rhs: &GroupRingElement) -> GroupRingElement {
        let mut out = GroupRingElement::zero();
        for (a, ca) in self.terms() {
            for (b, cb) in rhs.terms() {
                out.add_term(a * b, ca * cb);
            }
        }
        out
    }
}

/// Fox derivative of a reduced word with respect to one generator.
///
/// Walks the word left to right: an occurrence of `g` contributes the prefix
/// before it, an occurrence of `g^-1` contributes minus the prefix including it.
pub fn fox_derivative(w: &Word, generator: usize) -> GroupRingElement {
    let mut out = GroupRingElement::zero();
    let mut prefix: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w.letters() {
        if l.generator == generator && !l.inverse {
            out.add_term(Word(prefix.clone()), 1);
        }
        prefix.push(l);
        if l.generator == generator && l.inverse {
            out.add_term(Word(prefix.clone()), -1);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(g: u32, periods: &[u32]) -> FuchsianSignature {
        FuchsianSignature::new(g, periods.to_vec()).unwrap()
    }

    #[test]
    fn euler_characteristic_examples() {
        assert_eq!(sig(0, &[2, 3, 7]).euler_char(), Rational::new(-1, 42));
        assert_eq!(sig(2, &[]).euler_char(), Rational::from_integer(-2));
        assert_eq!(sig(1, &[2]).euler_char(), Rational::new(-1, 2));
    }

    #[test]
    fn rejects_non_hyperbolic_and_small_periods() {
        assert!(matches!(
            FuchsianSignature::new(0, vec![2, 3, 5]),
            Err(Error::NonHyperbolic { .. })
        ));
        assert!(matches!(
            FuchsianSignature::new(1, vec![]),
            Err(Error::NonHyperbolic { .. })
        ));
        assert!(matches!(
            FuchsianSignature::new(2, vec![1]),
            Err(Error::Invalid(_))
        ));
        let json = r#"{"genus":0,"periods":[2,3,6]}"#;
        assert!(serde_json::from_str::<FuchsianSignature>(json).is_err());
    }

    #[test]
    fn signature_json_round_trip() {
        let s = sig(1, &[2, 2]);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"genus":1,"periods":[2,2]}"#);
        let back: FuchsianSignature = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        let g2: FuchsianSignature = serde_json::from_str(r#"{"genus":2}"#).unwrap();
        assert_eq!(g2, sig(2, &[]));
    }

    #[test]
    fn relator_examples() {
        let s = sig(0, &[2, 3, 7]);
        let a = s.alphabet();
        let rel: Vec<String> = s.relators().iter().map(|w| w.format(&a)).collect();
        assert_eq!(rel, ["x1^2", "x2^3", "x3^7", "x1 x2 x3"]);

        let s = sig(2, &[]);
        let a = s.alphabet();
        let rel: Vec<String> = s.relators().iter().map(|w| w.format(&a)).collect();
        assert_eq!(rel, ["y1 z1 y1^-1 z1^-1 y2 z2 y2^-1 z2^-1"]);

        let s = sig(1, &[2]);
        let a = s.alphabet();
        let rel: Vec<String> = s.relators().iter().map(|w| w.format(&a)).collect();
        assert_eq!(rel, ["x1^2", "x1 y1 z1 y1^-1 z1^-1"]);
    }

    #[test]
    fn generator_ordering() {
        let a = sig(2, &[2, 3]).alphabet();
        assert_eq!(a.names(), ["x1", "x2", "y1", "z1", "y2", "z2"]);
        for (i, n) in a.names().iter().enumerate() {
            assert_eq!(a.index(n), Some(i));
        }
        assert_eq!(a.index("x3"), None);
        assert_eq!(a.index("y0"), None);
        assert_eq!(a.index("w1"), None);
    }

    #[test]
    fn word_parse_and_reduce() {
        let a = sig(1, &[2]).alphabet();
        let w = Word::parse("y1 z1 y1^-1 z1^-1", &a).unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.format(&a), "y1 z1 y1^-1 z1^-1");
        let cancel = Word::parse("x1 y1 y1^-1 x1^-1", &a).unwrap();
        assert!(cancel.is_identity());
        assert_eq!(cancel.format(&a), "1");
        assert_eq!(Word::parse("x1^3 x1^-1", &a).unwrap().format(&a), "x1^2");
        assert!(Word::parse("q7", &a).is_err());
        assert!(Word::parse("x1^a", &a).is_err());
    }

    #[test]
    fn fox_examples() {
        let a = Alphabet {
            torsion: 1,
            genus: 1,
        };
        let x = Word::generator(0);
        // d(x^d)/dx = 1 + x + ... + x^{d-1}
        let d = fox_derivative(&x.pow(5), 0);
        let mut expected = GroupRingElement::zero();
        for k in 0..5 {
            expected.add_term(x.pow(k), 1);
        }
        assert_eq!(d, expected);

        let (y, z) = (Word::generator(1), Word::generator(2));
        let c = Word::commutator(&y, &z);
        let dy = fox_derivative(&c, 1);
        let expected =
            &GroupRingElement::one() - &GroupRingElement::from_word(&(&y * &z) * &y.inverse());
        assert_eq!(dy, expected);
        assert_eq!(dy.format(&a), "1 -y1 z1 y1^-1");

        let xy = &x * &y;
        assert_eq!(
            fox_derivative(&xy, 1),
            GroupRingElement::from_word(x.clone())
        );
        assert_eq!(
            fox_derivative(&x.inverse(), 0),
            GroupRingElement::from_term(x.inverse(), -1)
        );
    }

    #[test]
    fn fox_fundamental_formula() {
        // w - 1 = sum_k (dw/dg_k)(g_k - 1) in the group ring.
        let s = sig(2, &[3, 4]);
        for w in s.relators() {
            let mut total = GroupRingElement::zero();
            for k in 0..s.generator_count() {
                let gk =
                    &GroupRingElement::from_word(Word::generator(k)) - &GroupRingElement::one();
                total = &total + &(&fox_derivative(&w, k) * &gk);
            }
            let lhs = &GroupRingElement::from_word(w.clone()) - &GroupRingElement::one();
            assert_eq!(total, lhs);
        }
    }
}
