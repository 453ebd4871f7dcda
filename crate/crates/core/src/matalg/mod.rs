//! Finite-dimensional matrix *-algebra numerics: states, spectral measures,
//! GNS norms, ordered characteristic functions and commutator estimates.

mod functions;
mod lemmas;
mod operator;
pub mod presets;
mod spectral;
mod state;

use faer::Mat;
use num_complex::Complex64;

pub use functions::{expm, ordered_cf, ordered_joint_expectation, unitary_exp, OrderedCf};
pub use lemmas::{cint_check, gauss_legendre, spec_bound_check, CintCheck, DEFAULT_CINT_NODES};
pub use operator::{Eigen, EigenBasis, HermitianOperator, HERMITIAN_TOL};
pub use spectral::{spectral_measure, SpectralMeasure};
pub use state::TraceState;

use crate::error::{Error, Result};

/// Dense complex matrix.
pub type Matrix = Mat<Complex64>;

pub fn identity(k: usize) -> Matrix {
    Mat::from_fn(k, k, |i, j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
}

/// Builds a matrix from row-major rows.
pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Matrix> {
    let n = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: bad.len() });
    }
    Ok(Mat::from_fn(n, n, |i, j| rows[i][j]))
}

/// Builds a real matrix from row-major rows.
pub fn from_real_rows(rows: &[&[f64]]) -> Matrix {
    Mat::from_fn(rows.len(), rows.len(), |i, j| Complex64::new(rows[i][j], 0.0))
}

pub fn adjoint(a: &Matrix) -> Matrix {
    Mat::from_fn(a.ncols(), a.nrows(), |i, j| a[(j, i)].conj())
}

pub fn mul(a: &Matrix, b: &Matrix) -> Matrix {
    a * b
}

pub fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a + b
}

pub fn sub(a: &Matrix, b: &Matrix) -> Matrix {
    a - b
}

pub fn scale(a: &Matrix, c: Complex64) -> Matrix {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * c)
}

/// `[a, b] = ab − ba`.
pub fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    &(a * b) - &(b * a)
}

pub fn max_abs(a: &Matrix) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    max_abs(&(a - b))
}

pub fn trace(a: &Matrix) -> Complex64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// `Tr(a·b)` without forming the product.
pub fn trace_of_product(a: &Matrix, b: &Matrix) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Largest singular value.
pub fn op_norm(a: &Matrix) -> Result<f64> {
    if a.nrows() == 0 {
        return Ok(0.0);
    }
    let s = a.singular_values().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    Ok(s.first().copied().unwrap_or(0.0))
}

pub(crate) fn check_square(a: &Matrix, dim: usize) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidInput(format!("matrix is {}x{}, not square", a.nrows(), a.ncols())));
    }
    if a.nrows() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: a.nrows() });
    }
    Ok(())
}
