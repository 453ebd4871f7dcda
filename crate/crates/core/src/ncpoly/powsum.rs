//! Decomposition of a noncommutative polynomial into a linear combination of
//! powers of free Lie algebra elements.
//!
//! Pipeline: PBW coordinates in S(L) with respect to the self-adjoint Lyndon
//! basis, then every commutative monomial is rewritten as a combination of
//! powers by repeated Vandermonde merges, then symmetrization (which fixes
//! powers) carries the result back to the free associative algebra.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use super::exact;
use super::lie::{bracket_string, LieElement};
use super::pbw::{PbwSolver, DEFAULT_DEGREE_CAP};
use super::poly::{NcPolynomial, Word};
use super::scalar::{fmt_rational, Scalar};
use crate::error::{Error, Result};

pub const DEFAULT_TERM_CAP: usize = 10_000;

#[derive(Clone, Debug)]
pub struct DecomposeOptions {
    /// Vandermonde node ratio, must exceed 1.
    pub q: BigRational,
    pub degree_cap: usize,
    pub term_cap: usize,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            q: BigRational::from_integer(2.into()),
            degree_cap: DEFAULT_DEGREE_CAP,
            term_cap: DEFAULT_TERM_CAP,
        }
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Coefficients `t_0..t_{α+β}` with `X^α Y^β = Σ_n t_n (X + q^n Y)^{α+β}` for
/// commuting `X, Y`. They solve `Σ_n t_n q^{nk} = δ_{kβ} / C(α+β, β)`.
pub fn powsum_merge(alpha: u32, beta: u32, q: &BigRational) -> Result<Vec<BigRational>> {
    if *q <= BigRational::one() {
        return Err(Error::InvalidInput(format!("merge ratio q = {} must exceed 1", fmt_rational(q))));
    }
    let s = alpha + beta;
    let size = s as usize + 1;
    let nodes: Vec<BigRational> = (0..size).map(|n| num_traits::pow(q.clone(), n)).collect();
    let matrix: Vec<Vec<BigRational>> =
        (0..size).map(|k| nodes.iter().map(|node| num_traits::pow(node.clone(), k)).collect()).collect();
    let mut rhs = vec![BigRational::zero(); size];
    rhs[beta as usize] = BigRational::new(BigInt::one(), binomial(s, beta));
    exact::solve(&matrix, &rhs).ok_or_else(|| Error::Internal("singular Vandermonde system".into()))
}

/// One term `t · B^β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSumTerm {
    pub coeff: Scalar,
    pub base: LieElement,
    pub exponent: u32,
}

impl PowerSumTerm {
    pub fn expand(&self) -> NcPolynomial {
        self.base.expansion().clone().with_generators(self.base.generators()).pow(self.exponent).scale(&self.coeff)
    }
}

/// `p = Σ t_n B_n^{β_n}` with every `B_n` in the free Lie algebra.
#[derive(Clone, Debug)]
pub struct PowerSumDecomposition {
    generators: usize,
    terms: Vec<PowerSumTerm>,
    self_adjoint: bool,
}

impl PowerSumDecomposition {
    pub fn terms(&self) -> &[PowerSumTerm] {
        &self.terms
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    /// Set when the source polynomial was self-adjoint; then every
    /// coefficient is real and every base self-adjoint.
    pub fn self_adjoint(&self) -> bool {
        self.self_adjoint
    }

    pub fn expand(&self) -> NcPolynomial {
        self.terms.iter().fold(NcPolynomial::zero(self.generators), |acc, t| &acc + &t.expand())
    }

    /// Structured report: `{terms: [{t, beta, B}], self_adjoint}`.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|t| {
                let mut b = Map::new();
                for (w, c) in t.base.coeffs() {
                    b.insert(bracket_string(w), scalar_json(c));
                }
                json!({ "t": scalar_json(&t.coeff), "beta": t.exponent, "B": Value::Object(b) })
            })
            .collect();
        json!({ "terms": terms, "self_adjoint": self.self_adjoint })
    }
}

/// Real scalars as a rational string, others as `{re, im}`.
pub fn scalar_json(c: &Scalar) -> Value {
    if c.is_real() {
        Value::String(fmt_rational(c.re()))
    } else {
        json!({ "re": fmt_rational(c.re()), "im": fmt_rational(c.im()) })
    }
}

/// Real-coefficient combination of self-adjoint basis elements
/// `s_w = i^{[|w| even]} [w]`.
type SaCombination = BTreeMap<Word, BigRational>;

fn sa_to_lie(generators: usize, y: &SaCombination) -> LieElement {
    LieElement::new(
        generators,
        y.iter().map(|(w, c)| {
            let unit = if w.degree() % 2 == 0 { Scalar::i() } else { Scalar::one() };
            (w.clone(), &Scalar::from_rational(c.clone()) * &unit)
        }),
    )
    .expect("basis words are Lyndon")
}

struct MergeCache<'a> {
    q: &'a BigRational,
    coeffs: BTreeMap<(u32, u32), Vec<BigRational>>,
}

impl MergeCache<'_> {
    fn get(&mut self, alpha: u32, beta: u32) -> Result<&[BigRational]> {
        if !self.coeffs.contains_key(&(alpha, beta)) {
            let t = powsum_merge(alpha, beta, self.q)?;
            self.coeffs.insert((alpha, beta), t);
        }
        Ok(&self.coeffs[&(alpha, beta)])
    }
}

/// Decomposes `p` into power sums of Lie elements, verified by exact
/// re-expansion.
pub fn decompose_to_power_sums(p: &NcPolynomial, opts: &DecomposeOptions) -> Result<PowerSumDecomposition> {
    let generators = p.generators().max(1);
    let solver = PbwSolver::new(generators, p.degree(), opts.degree_cap)?;
    decompose_with(&solver, p, opts)
}

/// As [`decompose_to_power_sums`], reusing a solver's cached tables.
pub fn decompose_with(solver: &PbwSolver, p: &NcPolynomial, opts: &DecomposeOptions) -> Result<PowerSumDecomposition> {
    if opts.q <= BigRational::one() {
        return Err(Error::InvalidInput(format!("merge ratio q = {} must exceed 1", fmt_rational(&opts.q))));
    }
    let generators = solver.generators();
    let coords = solver.coordinates(p)?;
    let mut merges = MergeCache { q: &opts.q, coeffs: BTreeMap::new() };

    // (base in self-adjoint coordinates, exponent) -> coefficient
    let mut acc: BTreeMap<(SaCombination, u32), Scalar> = BTreeMap::new();
    let mut produced = 0usize;

    for (mono, c) in coords.terms() {
        let grouped = mono.grouped();
        let even_factors = grouped.iter().filter(|(w, _)| w.degree() % 2 == 0).map(|(_, k)| *k as i64).sum::<i64>();
        // [w] = -i s_w for even |w|
        let coeff = c * &Scalar::i_pow(-even_factors);

        let mut partial: Vec<(Scalar, SaCombination, u32)> = match grouped.first() {
            None => vec![(coeff, SaCombination::new(), 0)],
            Some((w, k)) => vec![(coeff, SaCombination::from([(w.clone(), BigRational::one())]), *k)],
        };
        for (w, k) in grouped.iter().skip(1) {
            let mut next = Vec::with_capacity(partial.len() * 4);
            for (t, y, alpha) in &partial {
                let merge = merges.get(*alpha, *k)?;
                let mut qn = BigRational::one();
                for tn in merge {
                    if !tn.is_zero() {
                        let mut base = y.clone();
                        let slot = base.entry(w.clone()).or_insert_with(BigRational::zero);
                        *slot += &qn;
                        next.push((t * &Scalar::from_rational(tn.clone()), base, alpha + k));
                    }
                    qn *= &opts.q;
                }
            }
            produced += next.len();
            if produced > opts.term_cap {
                return Err(Error::TermCap { cap: opts.term_cap });
            }
            partial = next;
        }
        for (t, y, beta) in partial {
            let entry = acc.entry((y, beta)).or_default();
            *entry += &t;
        }
    }

    let terms: Vec<PowerSumTerm> = acc
        .into_iter()
        .filter(|(_, t)| !t.is_zero())
        .map(|((y, beta), coeff)| PowerSumTerm { coeff, base: sa_to_lie(generators, &y), exponent: beta })
        .collect();
    if terms.len() > opts.term_cap {
        return Err(Error::TermCap { cap: opts.term_cap });
    }

    let decomposition = PowerSumDecomposition { generators, terms, self_adjoint: p.is_self_adjoint() };
    if decomposition.expand() != p.clone().with_generators(generators) {
        return Err(Error::Internal("power-sum decomposition failed exact re-expansion".into()));
    }
    Ok(decomposition)
}
