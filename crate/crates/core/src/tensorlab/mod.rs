//! N-fold tensor products of a finite matrix algebra, sample averages and
//! the finite-N experiments built on them.
//!
//! Operators that are sums of single-site terms are never multiplied as
//! dense matrices: they are applied site by site, which costs `O(N·k·D²)` on
//! a dense `D×D` operand instead of `O(D³)`.

mod experiments;

use faer::Mat;
use num_complex::Complex64;

pub use experiments::{
    clt_spectrum, commutator_decay, commutator_norm, evaluate_nc_tensor, ordered_cf_tensor, reorder_check,
    reorder_defect, ReorderCheck,
};

use crate::error::{Error, Result};
use crate::matalg::{HermitianOperator, Matrix};

/// Default limit on the total dimension `k^N`.
pub const DEFAULT_DIM_CAP: usize = 1 << 13;

/// `N` copies of a `k`-dimensional matrix algebra with the product trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorSystem {
    base: usize,
    copies: usize,
    dim: usize,
}

impl TensorSystem {
    pub fn new(base: usize, copies: usize) -> Result<Self> {
        Self::with_cap(base, copies, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(base: usize, copies: usize, cap: usize) -> Result<Self> {
        if base == 0 || copies == 0 {
            return Err(Error::InvalidInput("tensor system needs k ≥ 1 and N ≥ 1".into()));
        }
        let dim = u32::try_from(copies)
            .ok()
            .and_then(|n| base.checked_pow(n))
            .filter(|&d| d <= cap)
            .ok_or(Error::DimensionCap { dim: base.saturating_pow(copies.min(64) as u32), cap })?;
        Ok(TensorSystem { base, copies, dim })
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Index stride of site `j` (1-based, site 1 most significant).
    fn stride(&self, j: usize) -> usize {
        self.base.pow((self.copies - j) as u32)
    }

    fn check_site_op(&self, a: &Matrix) -> Result<()> {
        if a.nrows() != self.base || a.ncols() != self.base {
            return Err(Error::DimensionMismatch { expected: self.base, got: a.nrows() });
        }
        Ok(())
    }
}

/// `I^{⊗(j−1)} ⊗ A ⊗ I^{⊗(N−j)}` as a dense matrix, `1 ≤ j ≤ N`.
pub fn kth_copy(a: &HermitianOperator, j: usize, sys: &TensorSystem) -> Result<Matrix> {
    sys.check_site_op(a.matrix())?;
    if j == 0 || j > sys.copies {
        return Err(Error::InvalidInput(format!("site {j} outside 1..={}", sys.copies)));
    }
    let k = sys.base;
    let stride = sys.stride(j);
    let m = a.matrix();
    Ok(Mat::from_fn(sys.dim, sys.dim, |r, c| {
        let (dr, dc) = ((r / stride) % k, (c / stride) % k);
        if r - dr * stride == c - dc * stride {
            m[(dr, dc)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// `Ã = (Σ_j A^{(j)})/√N` as a dense matrix.
pub fn averaged(a: &HermitianOperator, sys: &TensorSystem) -> Result<Matrix> {
    sys.check_site_op(a.matrix())?;
    Ok(SiteSum::averaged(a.matrix(), sys).apply(&crate::matalg::identity(sys.dim), sys))
}

/// `scale · Σ_j h^{(j)}` for a single-site matrix `h`.
#[derive(Clone, Debug)]
pub(crate) struct SiteSum {
    pub h: Matrix,
    pub scale: f64,
}

impl SiteSum {
    pub fn averaged(h: &Matrix, sys: &TensorSystem) -> Self {
        SiteSum { h: h.clone(), scale: 1.0 / (sys.copies as f64).sqrt() }
    }

    /// `(scale · Σ_j h^{(j)}) · x`.
    pub fn apply(&self, x: &Matrix, sys: &TensorSystem) -> Matrix {
        let k = sys.base;
        let h: Vec<Complex64> = (0..k * k).map(|i| self.h[(i / k, i % k)] * self.scale).collect();
        let mut out = Matrix::zeros(x.nrows(), x.ncols());
        let mut buf = vec![Complex64::new(0.0, 0.0); k];
        for c in 0..x.ncols() {
            let src = x.col_as_slice(c);
            let dst = out.col_as_slice_mut(c);
            for j in 1..=sys.copies {
                let stride = sys.stride(j);
                let block = stride * k;
                for outer in (0..sys.dim).step_by(block) {
                    for inner in 0..stride {
                        let base = outer + inner;
                        for (v, b) in buf.iter_mut().enumerate() {
                            *b = src[base + v * stride];
                        }
                        for u in 0..k {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for v in 0..k {
                                acc += h[u * k + v] * buf[v];
                            }
                            dst[base + u * stride] += acc;
                        }
                    }
                }
            }
        }
        out
    }
}

/// `u^{⊗N} · x` for a single-site matrix `u`.
pub(crate) fn apply_product(u: &Matrix, x: &Matrix, sys: &TensorSystem) -> Matrix {
    let k = sys.base;
    let m: Vec<Complex64> = (0..k * k).map(|i| u[(i / k, i % k)]).collect();
    let mut out = x.clone();
    let mut buf = vec![Complex64::new(0.0, 0.0); k];
    for c in 0..out.ncols() {
        let col = out.col_as_slice_mut(c);
        for j in 1..=sys.copies {
            let stride = sys.stride(j);
            let block = stride * k;
            for outer in (0..sys.dim).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (v, b) in buf.iter_mut().enumerate() {
                        *b = col[base + v * stride];
                    }
                    for u in 0..k {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for v in 0..k {
                            acc += m[u * k + v] * buf[v];
                        }
                        col[base + u * stride] = acc;
                    }
                }
            }
        }
    }
    out
}
