//! Exact finite-N moments of words in sample averages, by expanding over set
//! partitions of the word positions, and Gaussian moments by Wick pairing.
//!
//! Grouping the positions of `Ã_{w₁}⋯Ã_{w_m}` by tensor site gives
//! `ρ^{⊗N}(Ã_{w₁}⋯Ã_{w_m}) = N^{−m/2} Σ_π (N)_{|π|} Π_{b∈π} ρ(Π_{i∈b} A_{w_i})`,
//! where each block product keeps position order and `(N)_r` is the falling
//! factorial.

use std::collections::HashMap;
use std::sync::RwLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::matalg::{identity, HermitianOperator, Matrix, TraceState};
use crate::ncpoly::{NcPolynomial, Word};

/// Default limit on word length.
pub const DEFAULT_PARTITION_CAP: usize = 10;

/// Word of generator indices (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MomentWord(pub Vec<u8>);

impl MomentWord {
    /// From 1-based generator indices.
    pub fn from_one_based(letters: &[usize]) -> Self {
        MomentWord(letters.iter().map(|&g| (g - 1) as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<&Word> for MomentWord {
    fn from(w: &Word) -> Self {
        MomentWord(w.letters().to_vec())
    }
}

/// Set partition of `{0..m}` as a restricted growth string: `labels[i]` is
/// the block of position `i`, and blocks are numbered by first appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetPartition {
    labels: Vec<usize>,
    blocks: usize,
}

impl SetPartition {
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks
    }

    /// Positions of each block, ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.blocks];
        for (i, &b) in self.labels.iter().enumerate() {
            out[b].push(i);
        }
        out
    }
}

/// Iterator over all set partitions of `{0..m}` in lexicographic order of
/// their restricted growth strings.
pub struct SetPartitions {
    labels: Vec<usize>,
    maxes: Vec<usize>,
    done: bool,
}

impl Iterator for SetPartitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let m = self.labels.len();
        let blocks = if m == 0 { 0 } else { self.maxes[m - 1] + 1 };
        let out = SetPartition { labels: self.labels.clone(), blocks };
        // advance: rightmost position that can grow
        let mut i = m;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.labels[i] <= self.maxes[i - 1] {
                self.labels[i] += 1;
                self.maxes[i] = self.maxes[i - 1].max(self.labels[i]);
                for j in i + 1..m {
                    self.labels[j] = 0;
                    self.maxes[j] = self.maxes[i];
                }
                break;
            }
        }
        Some(out)
    }
}

/// All set partitions of an `m`-element set; `Bell(m)` items.
pub fn set_partitions(m: usize, cap: usize) -> Result<SetPartitions> {
    if m > cap {
        return Err(Error::PartitionCap { len: m, cap });
    }
    Ok(SetPartitions { labels: vec![0; m], maxes: vec![0; m], done: false })
}

/// Neumaier compensated sum.
#[derive(Clone, Copy, Debug, Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `c_r = Σ_{|π| = r} Π_b ρ(block product)` for a word of length `m`; the
/// moment at `N` is `N^{−m/2} Σ_r (N)_r c_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentValue {
    length: usize,
    by_blocks: Vec<Complex64>,
}

impl MomentValue {
    /// Partition sums indexed by block count (index 0 unused).
    pub fn block_sums(&self) -> &[Complex64] {
        &self.by_blocks
    }

    /// `ρ^{⊗N}(Ã_{w₁}⋯Ã_{w_m})`.
    pub fn at(&self, n: u64) -> Complex64 {
        if self.length == 0 {
            return Complex64::new(1.0, 0.0);
        }
        let nf = n as f64;
        let half = self.length as f64 / 2.0;
        let (mut re, mut im) = (Compensated::default(), Compensated::default());
        for (r, c) in self.by_blocks.iter().enumerate().skip(1) {
            if r as u64 > n || *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            // (N)_r / N^{m/2} = Π_{i<r} (1 − i/N) · N^{r − m/2}
            let falling: f64 = (0..r).map(|i| 1.0 - i as f64 / nf).product();
            let w = falling * nf.powf(r as f64 - half);
            re.add(w * c.re);
            im.add(w * c.im);
        }
        Complex64::new(re.value(), im.value())
    }
}

/// Moment engine for a fixed tracial state and generator list, caching
/// block traces by their letter sequence.
pub struct MomentEngine<'a> {
    rho: &'a TraceState,
    ops: Vec<&'a HermitianOperator>,
    cap: usize,
    cache: RwLock<HashMap<Vec<u8>, Complex64>>,
}

impl<'a> MomentEngine<'a> {
    pub fn new(rho: &'a TraceState, ops: &[&'a HermitianOperator]) -> Result<Self> {
        Self::with_cap(rho, ops, DEFAULT_PARTITION_CAP)
    }

    pub fn with_cap(rho: &'a TraceState, ops: &[&'a HermitianOperator], cap: usize) -> Result<Self> {
        rho.require_tracial()?;
        for op in ops {
            crate::matalg::check_square(op.matrix(), rho.dim())?;
        }
        Ok(MomentEngine { rho, ops: ops.to_vec(), cap, cache: RwLock::new(HashMap::new()) })
    }

    pub fn generators(&self) -> usize {
        self.ops.len()
    }

    fn block_trace(&self, letters: &[u8]) -> Result<Complex64> {
        if let Some(v) = self.cache.read().expect("cache lock").get(letters) {
            return Ok(*v);
        }
        let mut prod: Matrix = identity(self.rho.dim());
        for &g in letters {
            prod = &prod * self.ops[g as usize].matrix();
        }
        let v = self.rho.expect(&prod)?;
        self.cache.write().expect("cache lock").insert(letters.to_vec(), v);
        Ok(v)
    }

    /// Partition sums of `w`, reusable for any `N`.
    pub fn moment_value(&self, w: &MomentWord) -> Result<MomentValue> {
        let m = w.len();
        if let Some(&g) = w.0.iter().find(|&&g| g as usize >= self.ops.len()) {
            return Err(Error::GeneratorOutOfRange { index: g as usize + 1, count: self.ops.len() });
        }
        let mut sums = vec![(Compensated::default(), Compensated::default()); m + 1];
        let mut scratch: Vec<Vec<u8>> = vec![Vec::with_capacity(m); m];
        for part in set_partitions(m, self.cap)? {
            for b in scratch.iter_mut() {
                b.clear();
            }
            for (i, &b) in part.labels().iter().enumerate() {
                scratch[b].push(w.0[i]);
            }
            let mut prod = Complex64::new(1.0, 0.0);
            for block in &scratch[..part.num_blocks()] {
                prod *= self.block_trace(block)?;
                if prod == Complex64::new(0.0, 0.0) {
                    break;
                }
            }
            let r = part.num_blocks();
            sums[r].0.add(prod.re);
            sums[r].1.add(prod.im);
        }
        Ok(MomentValue { length: m, by_blocks: sums.iter().map(|(re, im)| Complex64::new(re.value(), im.value())).collect() })
    }

    /// `ρ^{⊗N}(Ã_{w₁}⋯Ã_{w_m})`.
    pub fn moment(&self, w: &MomentWord, n: u64) -> Result<Complex64> {
        if n == 0 {
            return Err(Error::InvalidInput("N must be at least 1".into()));
        }
        Ok(self.moment_value(w)?.at(n))
    }

    /// `ρ^{⊗N}(p(Ã⃗)^order)` by symbolic expansion into words.
    pub fn polynomial_power(&self, p: &NcPolynomial, n: u64, order: u32) -> Result<Complex64> {
        let expanded = self.expand_power(p, order)?;
        let (mut re, mut im) = (Compensated::default(), Compensated::default());
        for (w, c) in expanded.to_complex_terms() {
            let v = c * self.moment(&MomentWord::from(&w), n)?;
            re.add(v.re);
            im.add(v.im);
        }
        Ok(Complex64::new(re.value(), im.value()))
    }

    fn expand_power(&self, p: &NcPolynomial, order: u32) -> Result<NcPolynomial> {
        if p.generators() != self.ops.len() {
            return Err(Error::DimensionMismatch { expected: self.ops.len(), got: p.generators() });
        }
        let degree = p.degree() * order as usize;
        if degree > self.cap {
            return Err(Error::PartitionCap { len: degree, cap: self.cap });
        }
        Ok(p.pow(order))
    }

    /// Rejects generators with `|ρ(A_j)| > 1e−10`.
    pub fn require_mean_zero(&self) -> Result<()> {
        for (j, op) in self.ops.iter().enumerate() {
            let mean = self.rho.expect(op.matrix())?;
            if mean.norm() > 1e-10 {
                return Err(Error::InvalidInput(format!("generator A{} has nonzero mean {}", j + 1, mean)));
            }
        }
        Ok(())
    }
}

/// `ρ^{⊗N}(Ã_{w₁}⋯Ã_{w_m})` under a tracial product state. Generally complex
/// for words with three or more distinct letters.
pub fn exact_mixed_moment(rho: &TraceState, ops: &[&HermitianOperator], w: &MomentWord, n: u64) -> Result<Complex64> {
    MomentEngine::new(rho, ops)?.moment(w, n)
}

/// `ρ^{⊗N}(p(Ã⃗)^order)`.
pub fn moment_of_polynomial_power(
    rho: &TraceState,
    ops: &[&HermitianOperator],
    p: &NcPolynomial,
    n: u64,
    order: u32,
) -> Result<Complex64> {
    MomentEngine::new(rho, ops)?.polynomial_power(p, n, order)
}

/// Isserlis moment `E[X_{w₁}⋯X_{w_m}] = Σ_{pairings} Π M_{pair}`.
pub fn wick_moment(m: &CovarianceMatrix, w: &MomentWord) -> Result<f64> {
    if let Some(&g) = w.0.iter().find(|&&g| g as usize >= m.dim()) {
        return Err(Error::GeneratorOutOfRange { index: g as usize + 1, count: m.dim() });
    }
    if w.len() % 2 == 1 {
        return Ok(0.0);
    }
    fn pairings(m: &CovarianceMatrix, rest: &mut Vec<u8>) -> f64 {
        if rest.is_empty() {
            return 1.0;
        }
        let first = rest.remove(0);
        let mut acc = 0.0;
        for i in 0..rest.len() {
            let partner = rest.remove(i);
            let c = m.get(first as usize, partner as usize);
            if c != 0.0 {
                acc += c * pairings(m, rest);
            }
            rest.insert(i, partner);
        }
        rest.insert(0, first);
        acc
    }
    let mut letters = w.0.clone();
    Ok(pairings(m, &mut letters))
}

/// `E[p(X⃗)^order]` for Gaussian `X⃗ ~ N(0, M)` with commuting coordinates.
pub fn wick_polynomial_power(m: &CovarianceMatrix, p: &NcPolynomial, order: u32) -> Result<Complex64> {
    let (mut re, mut im) = (Compensated::default(), Compensated::default());
    for (w, c) in p.pow(order).to_complex_terms() {
        let v = c * wick_moment(m, &MomentWord::from(&w))?;
        re.add(v.re);
        im.add(v.im);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// One row of [`convergence_table`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub order: u32,
    pub n: u64,
    pub exact: f64,
    pub wick: f64,
    pub gap: f64,
}

/// Exact finite-N moments of `p(Ã⃗)` against the Gaussian values with
/// `M_{jk} = ρ(A_jA_k)`. Generators must be mean-zero.
pub fn convergence_table(
    rho: &TraceState,
    ops: &[&HermitianOperator],
    p: &NcPolynomial,
    orders: &[u32],
    ns: &[u64],
) -> Result<Vec<ConvergenceRow>> {
    convergence_table_with_cap(rho, ops, p, orders, ns, DEFAULT_PARTITION_CAP)
}

/// As [`convergence_table`] with an explicit partition cap.
pub fn convergence_table_with_cap(
    rho: &TraceState,
    ops: &[&HermitianOperator],
    p: &NcPolynomial,
    orders: &[u32],
    ns: &[u64],
    cap: usize,
) -> Result<Vec<ConvergenceRow>> {
    let engine = MomentEngine::with_cap(rho, ops, cap)?;
    engine.require_mean_zero()?;
    let cov = crate::gaussian::covariance_from_state(rho, ops)?;
    let mut rows = Vec::new();
    for &order in orders {
        let expanded = engine.expand_power(p, order)?;
        let terms: Vec<(MomentValue, Complex64)> = expanded
            .to_complex_terms()
            .into_iter()
            .map(|(w, c)| Ok((engine.moment_value(&MomentWord::from(&w))?, c)))
            .collect::<Result<_>>()?;
        let wick = wick_polynomial_power(&cov, p, order)?.re;
        for &n in ns {
            if n == 0 {
                return Err(Error::InvalidInput("N must be at least 1".into()));
            }
            let mut acc = Compensated::default();
            for (v, c) in &terms {
                acc.add((c * v.at(n)).re);
            }
            let exact = acc.value();
            rows.push(ConvergenceRow { order, n, exact, wick, gap: exact - wick });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matalg::presets;
    use crate::ncpoly::parse_polynomial;

    fn h(m: Matrix) -> HermitianOperator {
        HermitianOperator::new(m).unwrap()
    }

    /// Brute-force canonical labelings of all maps position → label.
    fn brute_partitions(m: usize) -> Vec<Vec<usize>> {
        let mut seen = std::collections::BTreeSet::new();
        for code in 0..m.pow(m as u32).max(1) {
            let raw: Vec<usize> = (0..m).map(|i| (code / m.pow(i as u32)) % m).collect();
            let mut relabel = HashMap::new();
            let canon: Vec<usize> = raw
                .iter()
                .map(|x| {
                    let next = relabel.len();
                    *relabel.entry(*x).or_insert(next)
                })
                .collect();
            seen.insert(canon);
        }
        seen.into_iter().collect()
    }

    #[test]
    fn partition_counts() {
        let bell = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975];
        for (m, &b) in bell.iter().enumerate() {
            assert_eq!(set_partitions(m, 10).unwrap().count(), b, "m={m}");
        }
        for m in 1..=5 {
            let got: Vec<Vec<usize>> = set_partitions(m, 10).unwrap().map(|p| p.labels().to_vec()).collect();
            assert_eq!(got, brute_partitions(m));
        }
        assert!(matches!(set_partitions(11, 10), Err(Error::PartitionCap { .. })));
        let p = set_partitions(3, 10).unwrap().nth(2).unwrap();
        assert_eq!(p.blocks(), vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn moment_examples() {
        let (x, z) = (h(presets::pauli_x()), h(presets::pauli_z()));
        let rho = TraceState::tracial(2);
        let ops = [&x, &z];
        for n in [1, 2, 5, 100] {
            assert_eq!(exact_mixed_moment(&rho, &ops, &MomentWord(vec![0]), n).unwrap(), Complex64::new(0.0, 0.0));
            let sq = exact_mixed_moment(&rho, &ops, &MomentWord(vec![1, 1]), n).unwrap();
            assert!((sq - 1.0).norm() < 1e-15);
        }
        for n in [1u64, 2, 3, 10, 1000, 1_000_000] {
            let v = exact_mixed_moment(&rho, &ops, &MomentWord(vec![0; 4]), n).unwrap();
            assert!((v.re - (3.0 - 2.0 / n as f64)).abs() < 1e-12, "N={n}: {v}");
        }
        let skewed = TraceState::with_density(crate::matalg::from_real_rows(&[&[0.7, 0.0], &[0.0, 0.3]])).unwrap();
        assert!(matches!(exact_mixed_moment(&skewed, &ops, &MomentWord(vec![0]), 2), Err(Error::NotTracial)));
        assert!(exact_mixed_moment(&rho, &ops, &MomentWord(vec![0; 11]), 2).is_err());
    }

    #[test]
    fn non_mean_zero_generators() {
        // A = diag(1, 0): Ã = √N·P where P averages projections; ρ(Ã) = √N/2
        let a = h(crate::matalg::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]));
        let rho = TraceState::tracial(2);
        for n in [1u64, 4, 9] {
            let v = exact_mixed_moment(&rho, &[&a], &MomentWord(vec![0]), n).unwrap();
            assert!((v.re - (n as f64).sqrt() / 2.0).abs() < 1e-12);
        }
        let engine = MomentEngine::new(&rho, &[&a]).unwrap();
        assert!(engine.require_mean_zero().is_err());
    }

    #[test]
    fn polynomial_power_examples() {
        let (x, z) = (h(presets::pauli_x()), h(presets::pauli_z()));
        let rho = TraceState::tracial(2);
        let ops = [&x, &z];
        let a1 = parse_polynomial("A1", 2).unwrap();
        assert!((moment_of_polynomial_power(&rho, &ops, &a1, 7, 2).unwrap() - 1.0).norm() < 1e-14);
        let anti = parse_polynomial("A1*A2 + A2*A1", 2).unwrap();
        for n in [1, 2, 10] {
            assert!(moment_of_polynomial_power(&rho, &ops, &anti, n, 1).unwrap().norm() < 1e-14);
        }
        let big = moment_of_polynomial_power(&rho, &ops, &anti, 1_000_000, 2).unwrap();
        assert!((big.re - 4.0).abs() < 1e-4);
    }

    #[test]
    fn wick_examples() {
        let m = CovarianceMatrix::new(&[vec![2.0, 0.5], vec![0.5, 3.0]]).unwrap();
        assert_eq!(wick_moment(&m, &MomentWord(vec![0, 0])).unwrap(), 2.0);
        assert_eq!(wick_moment(&m, &MomentWord(vec![0, 1, 1])).unwrap(), 0.0);
        assert!((wick_moment(&m, &MomentWord(vec![0, 1, 0, 1])).unwrap() - (6.0 + 2.0 * 0.25)).abs() < 1e-15);
        assert_eq!(wick_moment(&CovarianceMatrix::identity(1), &MomentWord(vec![0; 6])).unwrap(), 15.0);
        assert!(wick_moment(&m, &MomentWord(vec![2, 2])).is_err());
    }

    #[test]
    fn convergence_table_examples() {
        let (x, z) = (h(presets::pauli_x()), h(presets::pauli_z()));
        let rho = TraceState::tracial(2);
        let ops = [&x, &z];
        let a1 = parse_polynomial("A1", 2).unwrap();
        let rows = convergence_table(&rho, &ops, &a1, &[2, 4], &[1, 3, 50]).unwrap();
        for r in &rows {
            if r.order == 2 {
                assert_eq!(r.gap, 0.0);
            } else {
                assert!((r.exact - (3.0 - 2.0 / r.n as f64)).abs() < 1e-12);
                assert!((r.gap + 2.0 / r.n as f64).abs() < 1e-12);
            }
        }
        // A1² − 1: exact second moment ρ((Ã²−1)²) = 2 − 2/N, Gaussian value 2
        let centered = parse_polynomial("A1^2 - 1", 2).unwrap();
        for r in convergence_table(&rho, &ops, &centered, &[2], &[1, 2, 10, 100]).unwrap() {
            assert!((r.gap + 2.0 / r.n as f64).abs() < 1e-12, "{r:?}");
        }
        let shifted = h(crate::matalg::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]));
        assert!(convergence_table(&rho, &[&shifted], &parse_polynomial("A1", 1).unwrap(), &[2], &[2]).is_err());
    }

    #[test]
    fn three_letter_words_can_be_complex() {
        let ops: Vec<HermitianOperator> =
            [presets::pauli_x(), presets::pauli_y(), presets::pauli_z()].into_iter().map(h).collect();
        let refs: Vec<&HermitianOperator> = ops.iter().collect();
        let v = exact_mixed_moment(&TraceState::tracial(2), &refs, &MomentWord(vec![0, 1, 2]), 1).unwrap();
        assert!((v - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }
}
