use std::sync::OnceLock;

use faer::{Mat, Side};
use num_complex::Complex64;

use super::{adjoint, Matrix};
use crate::error::{Error, Result};

/// Relative Hermiticity tolerance: `‖A − A*‖_max ≤ HERMITIAN_TOL · (1 + ‖A‖_max)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvectors, kept real when the operator is real symmetric.
#[derive(Clone, Debug)]
pub enum EigenBasis {
    Real(Mat<f64>),
    Complex(Matrix),
}

impl EigenBasis {
    pub fn dim(&self) -> usize {
        match self {
            EigenBasis::Real(v) => v.nrows(),
            EigenBasis::Complex(v) => v.nrows(),
        }
    }

    pub fn to_complex(&self) -> Matrix {
        match self {
            EigenBasis::Real(v) => Mat::from_fn(v.nrows(), v.ncols(), |i, j| Complex64::new(v[(i, j)], 0.0)),
            EigenBasis::Complex(v) => v.clone(),
        }
    }

    /// `V_self* · V_other`.
    pub fn overlap(&self, other: &EigenBasis) -> Matrix {
        match (self, other) {
            (EigenBasis::Real(a), EigenBasis::Real(b)) => {
                let o = a.transpose() * b;
                Mat::from_fn(o.nrows(), o.ncols(), |i, j| Complex64::new(o[(i, j)], 0.0))
            }
            _ => {
                let a = self.to_complex();
                let b = other.to_complex();
                a.adjoint() * &b
            }
        }
    }

    /// `V · diag(f) · V*`.
    pub fn reconstruct(&self, f: &[Complex64]) -> Matrix {
        if let EigenBasis::Real(v) = self {
            let part = |g: &dyn Fn(Complex64) -> f64| -> Option<Mat<f64>> {
                if f.iter().all(|z| g(*z) == 0.0) {
                    return None;
                }
                let scaled = Mat::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * g(f[j]));
                Some(&scaled * v.transpose())
            };
            let re = part(&|z| z.re);
            let im = part(&|z| z.im);
            return Mat::from_fn(v.nrows(), v.nrows(), |i, j| {
                Complex64::new(re.as_ref().map_or(0.0, |m| m[(i, j)]), im.as_ref().map_or(0.0, |m| m[(i, j)]))
            });
        }
        let v = self.to_complex();
        let scaled = Mat::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * f[j]);
        &scaled * v.adjoint()
    }

    /// `v_j* M v_j` for column `j`.
    pub fn quadratic_form(&self, m: &Matrix, j: usize) -> Complex64 {
        let v = self.to_complex();
        let col: Vec<Complex64> = (0..v.nrows()).map(|i| v[(i, j)]).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..m.nrows() {
            let mut row = Complex64::new(0.0, 0.0);
            for c in 0..m.ncols() {
                row += m[(r, c)] * col[c];
            }
            acc += col[r].conj() * row;
        }
        acc
    }
}

/// Eigendecomposition `A = V diag(λ) V*`, eigenvalues nondecreasing.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: EigenBasis,
}

/// A self-adjoint operator with lazily cached spectral data.
#[derive(Debug)]
pub struct HermitianOperator {
    mat: Matrix,
    real: bool,
    eigen: OnceLock<std::result::Result<Eigen, String>>,
    values: OnceLock<std::result::Result<Vec<f64>, String>>,
}

impl Clone for HermitianOperator {
    fn clone(&self) -> Self {
        HermitianOperator {
            mat: self.mat.clone(),
            real: self.real,
            eigen: self.eigen.clone(),
            values: self.values.clone(),
        }
    }
}

impl HermitianOperator {
    /// Accepts `m` when its anti-Hermitian residual is within tolerance and
    /// stores the symmetrized `(m + m*)/2`.
    pub fn new(m: Matrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidInput(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
        }
        let n = m.nrows();
        let mut residual = 0.0f64;
        let mut scale = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                residual = residual.max((m[(i, j)] - m[(j, i)].conj()).norm());
                scale = scale.max(m[(i, j)].norm());
            }
        }
        if residual > HERMITIAN_TOL * (1.0 + scale) {
            return Err(Error::NotHermitian { residual });
        }
        let mat = Mat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
        let real = (0..n).all(|j| (0..n).all(|i| mat[(i, j)].im == 0.0));
        Ok(HermitianOperator { mat, real, eigen: OnceLock::new(), values: OnceLock::new() })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        HermitianOperator::new(super::from_real_rows(rows))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn into_matrix(self) -> Matrix {
        self.mat
    }

    /// True when every entry has an exactly zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.real
    }

    fn real_part(&self) -> Mat<f64> {
        Mat::from_fn(self.dim(), self.dim(), |i, j| self.mat[(i, j)].re)
    }

    pub fn eigen(&self) -> Result<&Eigen> {
        self.eigen
            .get_or_init(|| {
                let (values, vectors) = if self.real {
                    let e = self.real_part().self_adjoint_eigen(Side::Lower).map_err(|e| format!("{e:?}"))?;
                    let vals = e.S().column_vector().iter().copied().collect();
                    (vals, EigenBasis::Real(e.U().to_owned()))
                } else {
                    let e = self.mat.self_adjoint_eigen(Side::Lower).map_err(|e| format!("{e:?}"))?;
                    let vals = e.S().column_vector().iter().map(|z| z.re).collect();
                    (vals, EigenBasis::Complex(e.U().to_owned()))
                };
                Ok(Eigen { values, vectors })
            })
            .as_ref()
            .map_err(|e| Error::Eigen(e.clone()))
    }

    /// Eigenvalues in nondecreasing order, without computing eigenvectors
    /// unless they are already cached.
    pub fn eigenvalues(&self) -> Result<&[f64]> {
        if let Some(Ok(e)) = self.eigen.get() {
            return Ok(&e.values);
        }
        self.values
            .get_or_init(|| {
                if self.real {
                    self.real_part().self_adjoint_eigenvalues(Side::Lower).map_err(|e| format!("{e:?}"))
                } else {
                    self.mat.self_adjoint_eigenvalues(Side::Lower).map_err(|e| format!("{e:?}"))
                }
            })
            .as_ref()
            .map(Vec::as_slice)
            .map_err(|e| Error::Eigen(e.clone()))
    }

    /// `max |λ|`.
    pub fn op_norm(&self) -> Result<f64> {
        let v = self.eigenvalues()?;
        Ok(v.iter().fold(0.0f64, |m, x| m.max(x.abs())))
    }

    /// Functional calculus `f(A) = V f(Λ) V*`.
    pub fn apply_function(&self, f: impl Fn(f64) -> Complex64) -> Result<Matrix> {
        let e = self.eigen()?;
        let fv: Vec<Complex64> = e.values.iter().map(|&x| f(x)).collect();
        Ok(e.vectors.reconstruct(&fv))
    }

    /// Largest deviation of `V V*` from the identity.
    pub fn unitary_residual(&self) -> Result<f64> {
        let v = self.eigen()?.vectors.to_complex();
        let prod = &v * adjoint(&v);
        Ok(super::max_abs_diff(&prod, &super::identity(self.dim())))
    }
}
