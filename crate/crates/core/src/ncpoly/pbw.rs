//! Symmetrization from the symmetric algebra of the free Lie algebra to the
//! free associative algebra, and its exact inverse on graded pieces.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::exact::{self, RationalMatrix};
use super::lie::{bracket_expansion, bracket_string, lyndon_words, LieElement};
use super::poly::{NcPolynomial, Word};
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Default cap on polynomial degree for PBW and power-sum work.
pub const DEFAULT_DEGREE_CAP: usize = 5;

/// Commutative monomial in Lyndon basis brackets: a multiset of Lyndon words,
/// stored sorted by (degree, lexicographic).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<Word>);

impl Monomial {
    pub fn new(mut factors: Vec<Word>) -> Self {
        factors.sort();
        Monomial(factors)
    }

    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn factors(&self) -> &[Word] {
        &self.0
    }

    /// Sum of bracket degrees.
    pub fn weight(&self) -> usize {
        self.0.iter().map(Word::degree).sum()
    }

    /// Distinct factors with multiplicities, in key order.
    pub fn grouped(&self) -> Vec<(Word, u32)> {
        let mut out: Vec<(Word, u32)> = Vec::new();
        for w in &self.0 {
            match out.last_mut() {
                Some((last, k)) if last == w => *k += 1,
                _ => out.push((w.clone(), 1)),
            }
        }
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight().cmp(&other.weight()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .grouped()
            .into_iter()
            .map(|(w, k)| if k == 1 { bracket_string(&w) } else { format!("{}^{k}", bracket_string(&w)) })
            .collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// Element of the symmetric algebra S(L), L the free Lie algebra.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CommutativeMonomialCombination {
    generators: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl CommutativeMonomialCombination {
    pub fn new(generators: usize) -> Self {
        CommutativeMonomialCombination { generators, terms: BTreeMap::new() }
    }

    pub fn from_terms(generators: usize, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut out = CommutativeMonomialCombination::new(generators);
        for (m, c) in terms {
            out.add_term(m, &c);
        }
        out
    }

    pub fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Commutative product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = CommutativeMonomialCombination::new(self.generators.max(other.generators));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut f = ma.0.clone();
                f.extend(mb.0.iter().cloned());
                out.add_term(Monomial::new(f), &(ca * cb));
            }
        }
        out
    }
}

/// The standard basis of the free Lie algebra up to `max_degree`: one
/// bracketed element per Lyndon word.
pub fn lyndon_basis(generators: usize, max_degree: usize, degree_cap: usize) -> Result<Vec<LieElement>> {
    if generators == 0 || max_degree == 0 {
        return Err(Error::InvalidInput("lyndon basis needs at least one generator and degree ≥ 1".into()));
    }
    if max_degree > degree_cap {
        return Err(Error::DegreeCap { degree: max_degree, cap: degree_cap });
    }
    Ok(lyndon_words(generators, max_degree)
        .into_iter()
        .map(|w| LieElement::basis(generators, w).expect("generated words are Lyndon"))
        .collect())
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, k| acc * BigInt::from(k))
}

/// Calls `visit` once per distinct arrangement of a multiset given as counts.
fn distinct_arrangements(counts: &mut [u32], current: &mut Vec<usize>, total: usize, visit: &mut impl FnMut(&[usize])) {
    if current.len() == total {
        visit(current);
        return;
    }
    for i in 0..counts.len() {
        if counts[i] == 0 {
            continue;
        }
        counts[i] -= 1;
        current.push(i);
        distinct_arrangements(counts, current, total, visit);
        current.pop();
        counts[i] += 1;
    }
}

/// Φ of a single monomial: the average over all orderings of the product of
/// its factor expansions.
pub fn symmetrize_monomial(m: &Monomial, generators: usize) -> NcPolynomial {
    let grouped = m.grouped();
    let n = m.factors().len();
    if n == 0 {
        return NcPolynomial::one(generators);
    }
    let expansions: Vec<NcPolynomial> = grouped.iter().map(|(w, _)| bracket_expansion(w, generators)).collect();
    let mut counts: Vec<u32> = grouped.iter().map(|(_, k)| *k).collect();
    let mut sum = NcPolynomial::zero(generators);
    distinct_arrangements(&mut counts, &mut Vec::with_capacity(n), n, &mut |seq| {
        let mut prod = expansions[seq[0]].clone();
        for &i in &seq[1..] {
            prod = &prod * &expansions[i];
        }
        sum = &sum + &prod;
    });
    // each distinct arrangement stands for Π k! permutations
    let repeats = grouped.iter().fold(BigInt::from(1), |acc, (_, k)| acc * factorial(*k as usize));
    let weight = Scalar::from_rational(BigRational::new(repeats, factorial(n)));
    sum.scale(&weight)
}

/// Φ(X₁⋯X_n) = (1/n!) Σ_π X_{π(1)}⋯X_{π(n)}, extended linearly.
pub fn symmetrize(m: &CommutativeMonomialCombination) -> NcPolynomial {
    let mut out = NcPolynomial::zero(m.generators);
    for (mono, c) in &m.terms {
        out = &out + &symmetrize_monomial(mono, m.generators).scale(c);
    }
    out
}

/// All multisets of Lyndon words (from `basis`) with total length `d`.
fn monomials_of_weight(basis: &[Word], d: usize) -> Vec<Monomial> {
    fn rec(basis: &[Word], start: usize, remaining: usize, cur: &mut Vec<Word>, out: &mut Vec<Monomial>) {
        if remaining == 0 {
            out.push(Monomial::new(cur.clone()));
            return;
        }
        for i in start..basis.len() {
            let deg = basis[i].degree();
            if deg > remaining {
                continue;
            }
            cur.push(basis[i].clone());
            rec(basis, i, remaining - deg, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(basis, 0, d, &mut Vec::new(), &mut out);
    out.sort();
    out
}

fn word_index(w: &Word, generators: usize) -> usize {
    w.letters().iter().fold(0, |acc, &g| acc * generators + g as usize)
}

struct DegreeTable {
    monomials: Vec<Monomial>,
    inverse: RationalMatrix,
}

/// Exact inverse of Φ on each graded piece, built lazily per degree.
pub struct PbwSolver {
    generators: usize,
    max_degree: usize,
    basis: Vec<Word>,
    tables: Vec<OnceLock<std::result::Result<DegreeTable, String>>>,
}

impl PbwSolver {
    pub fn new(generators: usize, max_degree: usize, degree_cap: usize) -> Result<Self> {
        if generators == 0 || generators > u8::MAX as usize {
            return Err(Error::InvalidInput(format!("generator count {generators} out of range")));
        }
        if max_degree > degree_cap {
            return Err(Error::DegreeCap { degree: max_degree, cap: degree_cap });
        }
        Ok(PbwSolver {
            generators,
            max_degree,
            basis: lyndon_words(generators, max_degree.max(1)),
            tables: (0..=max_degree).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    fn table(&self, d: usize) -> Result<&DegreeTable> {
        self.tables[d]
            .get_or_init(|| {
                let monomials = monomials_of_weight(&self.basis, d);
                let rows = self.generators.pow(d as u32);
                if monomials.len() != rows {
                    return Err(format!("degree {d}: {} monomials for {rows} words", monomials.len()));
                }
                let mut m = vec![vec![BigRational::zero(); rows]; rows];
                for (col, mono) in monomials.iter().enumerate() {
                    for (w, c) in symmetrize_monomial(mono, self.generators).terms() {
                        debug_assert!(c.is_real());
                        m[word_index(w, self.generators)][col] = c.re().clone();
                    }
                }
                let inverse = exact::invert(&m).ok_or_else(|| format!("degree {d}: symmetrization matrix is singular"))?;
                Ok(DegreeTable { monomials, inverse })
            })
            .as_ref()
            .map_err(|e| Error::Internal(e.clone()))
    }

    /// PBW coordinates of `p`: the unique element of S(L) whose
    /// symmetrization is `p`.
    pub fn coordinates(&self, p: &NcPolynomial) -> Result<CommutativeMonomialCombination> {
        if p.generators() > self.generators {
            return Err(Error::InvalidInput(format!(
                "polynomial uses {} generators, basis has {}",
                p.generators(),
                self.generators
            )));
        }
        if p.degree() > self.max_degree {
            return Err(Error::DegreeCap { degree: p.degree(), cap: self.max_degree });
        }
        let mut out = CommutativeMonomialCombination::new(self.generators);
        for d in 0..=p.degree() {
            let part = p.homogeneous_part(d);
            if part.is_zero() {
                continue;
            }
            let table = self.table(d)?;
            let rows = table.monomials.len();
            let mut re = vec![BigRational::zero(); rows];
            let mut im = vec![BigRational::zero(); rows];
            for (w, c) in part.terms() {
                let idx = word_index(w, self.generators);
                re[idx] = c.re().clone();
                im[idx] = c.im().clone();
            }
            let x_re = exact::mat_vec(&table.inverse, &re);
            let x_im = exact::mat_vec(&table.inverse, &im);
            for ((mono, r), i) in table.monomials.iter().zip(x_re).zip(x_im) {
                out.add_term(mono.clone(), &Scalar::new(r, i));
            }
        }
        Ok(out)
    }
}

/// Convenience wrapper building a solver sized for `p`.
pub fn pbw_coordinates(p: &NcPolynomial, degree_cap: usize) -> Result<CommutativeMonomialCombination> {
    PbwSolver::new(p.generators().max(1), p.degree(), degree_cap)?.coordinates(p)
}
