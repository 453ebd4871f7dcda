//! Classical Gaussian side: covariances from a state, seeded sampling of
//! `p(X⃗)` for `X⃗ ~ N(0, M)`, and Kolmogorov–Smirnov distances.

use faer::{Mat, Side};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matalg::{HermitianOperator, SpectralMeasure, TraceState};
use crate::ncpoly::NcPolynomial;

const SYMMETRY_TOL: f64 = 1e-10;

/// Samples per random stream; stream `b` covers samples `b·BLOCK..(b+1)·BLOCK`.
pub const SAMPLE_BLOCK: usize = 1 << 16;

/// Real symmetric positive semidefinite `a×a` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl CovarianceMatrix {
    /// Checks symmetry and `λ_min ≥ −1e−10`, then symmetrizes.
    pub fn new(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: bad.len() });
        }
        for i in 0..dim {
            for j in 0..i {
                if (rows[i][j] - rows[j][i]).abs() > SYMMETRY_TOL {
                    return Err(Error::InvalidInput(format!(
                        "covariance not symmetric at ({}, {}): {} vs {}",
                        i + 1,
                        j + 1,
                        rows[i][j],
                        rows[j][i]
                    )));
                }
            }
        }
        let entries: Vec<f64> =
            (0..dim * dim).map(|ij| (rows[ij / dim][ij % dim] + rows[ij % dim][ij / dim]) / 2.0).collect();
        let m = CovarianceMatrix { dim, entries };
        let (values, _) = m.eigen()?;
        if let Some(&min) = values.first() {
            if min < -SYMMETRY_TOL {
                return Err(Error::InvalidInput(format!("covariance has negative eigenvalue {min:.3e}")));
            }
        }
        Ok(m)
    }

    pub fn identity(dim: usize) -> Self {
        let entries = (0..dim * dim).map(|ij| if ij / dim == ij % dim { 1.0 } else { 0.0 }).collect();
        CovarianceMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.dim.max(1)).map(<[f64]>::to_vec).take(self.dim).collect()
    }

    fn eigen(&self) -> Result<(Vec<f64>, Mat<f64>)> {
        if self.dim == 0 {
            return Ok((Vec::new(), Mat::zeros(0, 0)));
        }
        let m = Mat::from_fn(self.dim, self.dim, |i, j| self.get(i, j));
        let e = m.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
        Ok((e.S().column_vector().iter().copied().collect(), e.U().to_owned()))
    }

    /// Spectral square root `L = V √Λ₊ Vᵀ`, so that `L Lᵀ = M` with
    /// negative round-off eigenvalues clamped to zero.
    pub fn sqrt(&self) -> Result<Vec<f64>> {
        let (values, v) = self.eigen()?;
        let a = self.dim;
        let mut out = vec![0.0; a * a];
        for (l, &lam) in values.iter().enumerate() {
            let s = lam.max(0.0).sqrt();
            if s == 0.0 {
                continue;
            }
            for i in 0..a {
                for j in 0..a {
                    out[i * a + j] += v[(i, l)] * s * v[(j, l)];
                }
            }
        }
        Ok(out)
    }
}

/// `M_{jk} = ρ(A_j A_k)`.
pub fn covariance_from_state(rho: &TraceState, ops: &[&HermitianOperator]) -> Result<CovarianceMatrix> {
    let a = ops.len();
    let mut raw = vec![vec![Complex64::new(0.0, 0.0); a]; a];
    for j in 0..a {
        for k in 0..a {
            raw[j][k] = rho.expect(&(ops[j].matrix() * ops[k].matrix()))?;
        }
    }
    for j in 0..a {
        for k in 0..a {
            if raw[j][k].im.abs() > SYMMETRY_TOL || (raw[j][k] - raw[k][j]).norm() > SYMMETRY_TOL {
                return Err(Error::InvalidInput(format!(
                    "state gives ρ(A{}A{}) = {} and ρ(A{}A{}) = {}: not a real symmetric covariance",
                    j + 1,
                    k + 1,
                    raw[j][k],
                    k + 1,
                    j + 1,
                    raw[k][j]
                )));
            }
        }
    }
    CovarianceMatrix::new(&raw.iter().map(|r| r.iter().map(|z| z.re).collect()).collect::<Vec<_>>())
}

/// Sorted samples with the seed that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
    seed: u64,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>, seed: u64) -> Self {
        samples.sort_by(f64::total_cmp);
        EmpiricalDistribution { samples, seed }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `#{x_i ≤ x} / n`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.samples.partition_point(|&s| s <= x) as f64 / self.samples.len() as f64
    }

    /// `(1/n) Σ x_i^p`.
    pub fn moment(&self, p: i32) -> f64 {
        self.samples.iter().map(|x| x.powi(p)).sum::<f64>() / self.samples.len() as f64
    }
}

fn check_sa(p: &NcPolynomial) -> Result<()> {
    if p.is_self_adjoint() {
        Ok(())
    } else {
        Err(Error::InvalidInput("pushforward requires a self-adjoint polynomial".into()))
    }
}

fn sample_block(terms: &[(Vec<u8>, f64)], root: &[f64], a: usize, seed: u64, block: usize, len: usize) -> Vec<f64> {
    let mut rng = crate::seed::stream_rng(seed, block as u64);
    let mut g = vec![0.0; a];
    let mut x = vec![0.0; a];
    (0..len)
        .map(|_| {
            for gi in g.iter_mut() {
                *gi = StandardNormal.sample(&mut rng);
            }
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = (0..a).map(|j| root[i * a + j] * g[j]).sum();
            }
            terms.iter().map(|(w, c)| c * w.iter().map(|&l| x[l as usize]).product::<f64>()).sum()
        })
        .collect()
}

/// `n` samples of `p(X⃗)` with `X⃗ ~ N(0, M)`, drawn as `X⃗ = L g⃗` for the
/// spectral square root `L` and standard normal `g⃗`. Sample block `b` uses
/// stream `b` of `seed`, so the result does not depend on `jobs`.
pub fn sample_pushforward(
    p: &NcPolynomial,
    m: &CovarianceMatrix,
    n: usize,
    seed: u64,
    jobs: usize,
) -> Result<EmpiricalDistribution> {
    check_sa(p)?;
    if p.generators() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), got: p.generators() });
    }
    let root = m.sqrt()?;
    let a = m.dim();
    // Self-adjoint p has real values on commuting real arguments; the real
    // parts of the coefficients carry them.
    let terms: Vec<(Vec<u8>, f64)> =
        p.to_complex_terms().into_iter().map(|(w, c)| (w.letters().to_vec(), c.re)).filter(|t| t.1 != 0.0).collect();
    let blocks: Vec<(usize, usize)> =
        (0..n.div_ceil(SAMPLE_BLOCK)).map(|b| (b, SAMPLE_BLOCK.min(n - b * SAMPLE_BLOCK))).collect();
    let jobs = jobs.max(1).min(blocks.len().max(1));
    let mut parts: Vec<Vec<f64>> = vec![Vec::new(); blocks.len()];
    let per = blocks.len().div_ceil(jobs).max(1);
    std::thread::scope(|s| {
        for (chunk, out) in blocks.chunks(per).zip(parts.chunks_mut(per)) {
            let (terms, root) = (&terms, &root);
            s.spawn(move || {
                for (&(b, len), slot) in chunk.iter().zip(out.iter_mut()) {
                    *slot = sample_block(terms, root, a, seed, b, len);
                }
            });
        }
    });
    Ok(EmpiricalDistribution::new(parts.concat(), seed))
}

/// Left argument of [`ks_distance`].
#[derive(Clone, Copy, Debug)]
pub enum DistributionRef<'a> {
    Spectral(&'a SpectralMeasure),
    Empirical(&'a EmpiricalDistribution),
}

impl<'a> From<&'a SpectralMeasure> for DistributionRef<'a> {
    fn from(m: &'a SpectralMeasure) -> Self {
        DistributionRef::Spectral(m)
    }
}

impl<'a> From<&'a EmpiricalDistribution> for DistributionRef<'a> {
    fn from(e: &'a EmpiricalDistribution) -> Self {
        DistributionRef::Empirical(e)
    }
}

/// Sorted `(jump point, mass)` steps of a distribution.
fn steps(d: DistributionRef<'_>) -> Vec<(f64, f64)> {
    match d {
        DistributionRef::Spectral(m) => m.atoms().to_vec(),
        DistributionRef::Empirical(e) => {
            let w = 1.0 / e.len() as f64;
            let mut out: Vec<(f64, f64)> = Vec::new();
            for &x in e.samples() {
                match out.last_mut() {
                    Some(last) if last.0 == x => last.1 += w,
                    _ => out.push((x, w)),
                }
            }
            out
        }
    }
}

/// `sup_x |F_P(x) − F_Q(x)|` over right-continuous CDFs. Both CDFs are
/// constant between consecutive jump points, so evaluating at every jump
/// of either argument is exact.
pub fn ks_distance<'a>(p: impl Into<DistributionRef<'a>>, q: &EmpiricalDistribution) -> Result<f64> {
    let p = p.into();
    if q.is_empty() || matches!(p, DistributionRef::Empirical(e) if e.is_empty()) {
        return Err(Error::InvalidInput("KS distance of an empty sample".into()));
    }
    let (a, b) = (steps(p), steps(DistributionRef::Empirical(q)));
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut sup = 0.0f64;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(u), Some(v)) => u.0.min(v.0),
            (Some(u), None) => u.0,
            (None, Some(v)) => v.0,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i].0 == x {
            fa += a[i].1;
            i += 1;
        }
        while j < b.len() && b[j].0 == x {
            fb += b[j].1;
            j += 1;
        }
        sup = sup.max((fa - fb).abs());
    }
    Ok(sup.min(1.0))
}
