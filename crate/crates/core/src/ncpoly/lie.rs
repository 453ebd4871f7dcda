//! Free Lie algebra on the generators, with the Lyndon-word basis bracketed
//! by standard factorization.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::poly::{NcPolynomial, Word};
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// True if `w` is strictly smaller than each of its proper rotations.
pub fn is_lyndon(w: &[u8]) -> bool {
    let n = w.len();
    if n == 0 {
        return false;
    }
    (1..n).all(|r| {
        let rotated = w[r..].iter().chain(&w[..r]);
        w.iter().lt(rotated)
    })
}

/// All Lyndon words over `generators` letters with length `1..=max_degree`,
/// ordered by (length, lexicographic). Duval's generation algorithm.
pub fn lyndon_words(generators: usize, max_degree: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if generators == 0 || max_degree == 0 {
        return out;
    }
    let top = (generators - 1) as u8;
    let mut w: Vec<u8> = vec![0];
    while !w.is_empty() {
        out.push(Word(w.clone()));
        let m = w.len();
        while w.len() < max_degree {
            let c = w[w.len() - m];
            w.push(c);
        }
        while w.last() == Some(&top) {
            w.pop();
        }
        if let Some(last) = w.last_mut() {
            *last += 1;
        }
    }
    out.sort();
    out
}

/// Splits a Lyndon word of length ≥ 2 as `u·v` with `v` its longest proper
/// Lyndon suffix.
pub fn standard_factorization(w: &Word) -> Option<(Word, Word)> {
    let letters = w.letters();
    if letters.len() < 2 {
        return None;
    }
    (1..letters.len())
        .find(|&i| is_lyndon(&letters[i..]))
        .map(|i| (Word(letters[..i].to_vec()), Word(letters[i..].to_vec())))
}

/// Expansion of the bracketed basis element of a Lyndon word.
pub fn bracket_expansion(w: &Word, generators: usize) -> NcPolynomial {
    match standard_factorization(w) {
        None => NcPolynomial::monomial(generators, w.clone(), Scalar::one()),
        Some((u, v)) => {
            bracket_expansion(&u, generators).commutator(&bracket_expansion(&v, generators))
        }
    }
}

/// Bracketed display of a Lyndon word, e.g. `[A1,[A1,A2]]`.
pub fn bracket_string(w: &Word) -> String {
    match standard_factorization(w) {
        None => w.to_string(),
        Some((u, v)) => format!("[{},{}]", bracket_string(&u), bracket_string(&v)),
    }
}

/// A linear combination of Lyndon basis brackets, with its expansion into
/// the free associative algebra cached.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LieElement {
    generators: usize,
    coeffs: BTreeMap<Word, Scalar>,
    expansion: NcPolynomial,
}

impl LieElement {
    /// Builds from Lyndon-word coordinates. Errors if a key is not Lyndon.
    pub fn new(generators: usize, coeffs: impl IntoIterator<Item = (Word, Scalar)>) -> Result<Self> {
        let mut map: BTreeMap<Word, Scalar> = BTreeMap::new();
        for (w, c) in coeffs {
            if !is_lyndon(w.letters()) {
                return Err(Error::InvalidInput(format!("{w} is not a Lyndon word")));
            }
            let entry = map.entry(w).or_default();
            *entry += &c;
        }
        map.retain(|_, c| !c.is_zero());
        let generators = map.keys().map(Word::generator_span).fold(generators, usize::max);
        let mut expansion = NcPolynomial::zero(generators);
        for (w, c) in &map {
            expansion = &expansion + &bracket_expansion(w, generators).scale(c);
        }
        Ok(LieElement { generators, coeffs: map, expansion })
    }

    pub fn zero(generators: usize) -> Self {
        LieElement { generators, coeffs: BTreeMap::new(), expansion: NcPolynomial::zero(generators) }
    }

    /// The basis bracket of a single Lyndon word.
    pub fn basis(generators: usize, w: Word) -> Result<Self> {
        LieElement::new(generators, [(w, Scalar::one())])
    }

    pub fn generator(generators: usize, g: usize) -> Self {
        LieElement::basis(generators, Word::letter(g)).expect("single letters are Lyndon")
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn coeffs(&self) -> &BTreeMap<Word, Scalar> {
        &self.coeffs
    }

    pub fn expansion(&self) -> &NcPolynomial {
        &self.expansion
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest bracket degree present; 0 for the zero element.
    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(Word::degree).max().unwrap_or(0)
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.expansion.is_self_adjoint()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        LieElement::new(self.generators, self.coeffs.iter().map(|(w, v)| (w.clone(), v * c)))
            .expect("keys already Lyndon")
    }

    pub fn add(&self, other: &Self) -> Self {
        let gens = self.generators.max(other.generators);
        LieElement::new(gens, self.coeffs.iter().chain(&other.coeffs).map(|(w, c)| (w.clone(), c.clone())))
            .expect("keys already Lyndon")
    }

    /// Degree-`d` part, as a Lie element.
    pub fn homogeneous_part(&self, d: usize) -> Self {
        LieElement::new(
            self.generators,
            self.coeffs.iter().filter(|(w, _)| w.degree() == d).map(|(w, c)| (w.clone(), c.clone())),
        )
        .expect("keys already Lyndon")
    }

    /// `[B_1, …, B_d]` where `B_k` is the degree-`k` part and `d` the degree.
    pub fn homogeneous_components(&self) -> Vec<LieElement> {
        (1..=self.degree()).map(|d| self.homogeneous_part(d)).collect()
    }

    /// Degree-`d` component weighted by `N^{(1-d)/2}`.
    pub fn rescale_components(&self, samples: u64) -> RescaledLie {
        RescaledLie { components: self.homogeneous_components(), samples }
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *c == Scalar::one() {
                write!(f, "{}", bracket_string(w))?;
            } else {
                write!(f, "({c})*{}", bracket_string(w))?;
            }
        }
        Ok(())
    }
}

/// `C = Σ_d N^{(1-d)/2} B_d`: a Lie element with its homogeneous components
/// carrying symbolic sample-count weights, evaluated on demand.
#[derive(Clone, Debug)]
pub struct RescaledLie {
    components: Vec<LieElement>,
    samples: u64,
}

impl RescaledLie {
    pub fn components(&self) -> &[LieElement] {
        &self.components
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    /// `N^{(1-d)/2}` for a degree-`d` component.
    pub fn weight(&self, degree: usize) -> f64 {
        (self.samples as f64).powf((1.0 - degree as f64) / 2.0)
    }

    /// Exact weight when it is rational: always for odd `d`, and for even `d`
    /// only when `N` is a perfect square.
    pub fn exact_weight(&self, degree: usize) -> Option<Scalar> {
        let n = self.samples as i64;
        let steps = degree.saturating_sub(1) as u32; // weight = N^{-steps/2}
        if steps % 2 == 0 {
            return Some(Scalar::from_ratio(1, n.pow(steps / 2)));
        }
        let r = (n as f64).sqrt().round() as i64;
        (r * r == n).then(|| Scalar::from_ratio(1, r.pow(steps)))
    }

    /// Exact Lie element, when every nonzero component weight is rational.
    pub fn to_exact(&self) -> Option<LieElement> {
        let mut acc = LieElement::zero(self.components.first().map_or(0, LieElement::generators));
        for (i, comp) in self.components.iter().enumerate() {
            if comp.is_zero() {
                continue;
            }
            acc = acc.add(&comp.scale(&self.exact_weight(i + 1)?));
        }
        Some(acc)
    }

    /// Weighted word expansion in double precision.
    pub fn to_complex_terms(&self) -> Vec<(Word, Complex64)> {
        let mut acc: BTreeMap<Word, Complex64> = BTreeMap::new();
        for (i, comp) in self.components.iter().enumerate() {
            let wgt = self.weight(i + 1);
            for (w, c) in comp.expansion().terms() {
                *acc.entry(w.clone()).or_default() += c.to_complex64() * wgt;
            }
        }
        acc.into_iter().filter(|(_, c)| *c != Complex64::new(0.0, 0.0)).collect()
    }
}
