use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::scalar::Scalar;

/// A monomial: a sequence of 0-based generator indices. The empty word is
/// the unit.
///
/// Words order by length first and lexicographically within a length, so
/// polynomial terms iterate in degree order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    pub fn letter(g: usize) -> Self {
        Word(vec![g as u8])
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn reversed(&self) -> Self {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Largest generator index used plus one.
    pub fn generator_span(&self) -> usize {
        self.0.iter().map(|&g| g as usize + 1).max().unwrap_or(0)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "A{}", g + 1)?;
        }
        Ok(())
    }
}

/// Element of the free associative algebra over `generators` symbols with
/// exact complex-rational coefficients. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct NcPolynomial {
    generators: usize,
    terms: BTreeMap<Word, Scalar>,
}

impl NcPolynomial {
    pub fn zero(generators: usize) -> Self {
        NcPolynomial { generators, terms: BTreeMap::new() }
    }

    pub fn constant(generators: usize, c: Scalar) -> Self {
        NcPolynomial::monomial(generators, Word::unit(), c)
    }

    pub fn one(generators: usize) -> Self {
        NcPolynomial::constant(generators, Scalar::one())
    }

    /// The generator `A_{g+1}` (0-based index `g`).
    pub fn generator(generators: usize, g: usize) -> Self {
        NcPolynomial::monomial(generators.max(g + 1), Word::letter(g), Scalar::one())
    }

    pub fn monomial(generators: usize, w: Word, c: Scalar) -> Self {
        let mut p = NcPolynomial::zero(generators.max(w.generator_span()));
        if !c.is_zero() {
            p.terms.insert(w, c);
        }
        p
    }

    pub fn from_terms(generators: usize, terms: impl IntoIterator<Item = (Word, Scalar)>) -> Self {
        let mut p = NcPolynomial::zero(generators);
        for (w, c) in terms {
            p.add_term(w, &c);
        }
        p
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn with_generators(mut self, generators: usize) -> Self {
        self.generators = self.generators.max(generators);
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum stored word length; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, w: Word, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        self.generators = self.generators.max(w.generator_span());
        match self.terms.get_mut(&w) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c.clone());
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return NcPolynomial::zero(self.generators);
        }
        NcPolynomial {
            generators: self.generators,
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    /// Degree-`d` homogeneous part.
    pub fn homogeneous_part(&self, d: usize) -> Self {
        NcPolynomial {
            generators: self.generators,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.degree() == d)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// The *-involution: reverses every word and conjugates every coefficient.
    pub fn adjoint(&self) -> Self {
        NcPolynomial {
            generators: self.generators,
            terms: self.terms.iter().map(|(w, c)| (w.reversed(), c.conj())).collect(),
        }
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.terms.iter().all(|(w, c)| self.coeff(&w.reversed()) == c.conj())
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = NcPolynomial::one(self.generators);
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Evaluates on commuting real scalars `x[g]` for generator `g`.
    pub fn evaluate_scalar(&self, x: &[f64]) -> Complex64 {
        let mut acc = Complex64::zero();
        for (w, c) in &self.terms {
            let prod: f64 = w.0.iter().map(|&g| x[g as usize]).product();
            acc += c.to_complex64() * prod;
        }
        acc
    }

    /// Exact evaluation on commuting rational scalars.
    pub fn evaluate_exact(&self, x: &[BigRational]) -> Scalar {
        let mut acc = Scalar::zero();
        for (w, c) in &self.terms {
            let mut prod = BigRational::one();
            for &g in &w.0 {
                prod *= &x[g as usize];
            }
            acc += &(c * &Scalar::from_rational(prod));
        }
        acc
    }

    /// Coefficients converted to double precision, in term order.
    pub fn to_complex_terms(&self) -> Vec<(Word, Complex64)> {
        self.terms.iter().map(|(w, c)| (w.clone(), c.to_complex64())).collect()
    }
}

impl fmt::Display for NcPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let neg_real = c.is_real() && c.re() < &BigRational::zero();
            let shown = if neg_real { -c } else { c.clone() };
            if i == 0 {
                if neg_real {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg_real { '-' } else { '+' })?;
            }
            let unit = shown == Scalar::one();
            match (w.degree(), unit, shown.is_real()) {
                (0, _, true) => write!(f, "{shown}")?,
                (0, _, false) => write!(f, "({shown})")?,
                (_, true, _) => write!(f, "{w}")?,
                (_, false, true) => write!(f, "{shown}*{w}")?,
                (_, false, false) => write!(f, "({shown})*{w}")?,
            }
        }
        Ok(())
    }
}

impl Add<&NcPolynomial> for &NcPolynomial {
    type Output = NcPolynomial;
    fn add(self, rhs: &NcPolynomial) -> NcPolynomial {
        let mut out = self.clone().with_generators(rhs.generators);
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c);
        }
        out
    }
}

impl Sub<&NcPolynomial> for &NcPolynomial {
    type Output = NcPolynomial;
    fn sub(self, rhs: &NcPolynomial) -> NcPolynomial {
        let mut out = self.clone().with_generators(rhs.generators);
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), &-c);
        }
        out
    }
}

impl Mul<&NcPolynomial> for &NcPolynomial {
    type Output = NcPolynomial;
    fn mul(self, rhs: &NcPolynomial) -> NcPolynomial {
        let mut out = NcPolynomial::zero(self.generators.max(rhs.generators));
        for (wl, cl) in &self.terms {
            for (wr, cr) in &rhs.terms {
                out.add_term(wl.concat(wr), &(cl * cr));
            }
        }
        out
    }
}

impl Neg for &NcPolynomial {
    type Output = NcPolynomial;
    fn neg(self) -> NcPolynomial {
        self.scale(&-Scalar::one())
    }
}

impl Add for NcPolynomial {
    type Output = NcPolynomial;
    fn add(self, rhs: NcPolynomial) -> NcPolynomial {
        &self + &rhs
    }
}

impl Sub for NcPolynomial {
    type Output = NcPolynomial;
    fn sub(self, rhs: NcPolynomial) -> NcPolynomial {
        &self - &rhs
    }
}

impl Mul for NcPolynomial {
    type Output = NcPolynomial;
    fn mul(self, rhs: NcPolynomial) -> NcPolynomial {
        &self * &rhs
    }
}
