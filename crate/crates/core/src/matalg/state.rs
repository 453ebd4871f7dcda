use num_complex::Complex64;

use super::{check_square, identity, max_abs_diff, scale, trace_of_product, HermitianOperator, Matrix};
use crate::error::{Error, Result};

const STATE_TOL: f64 = 1e-12;

/// A state `ρ(A) = Tr(D·A)` on `k×k` matrices. Without an explicit density
/// matrix this is the normalized trace `Tr/k`.
#[derive(Clone, Debug)]
pub struct TraceState {
    dim: usize,
    density: Option<Matrix>,
    tracial: bool,
}

impl TraceState {
    /// The tracial state `Tr/k`.
    pub fn tracial(dim: usize) -> Self {
        TraceState { dim, density: None, tracial: true }
    }

    /// State with density matrix `d`: Hermitian, PSD and unit trace.
    pub fn with_density(d: Matrix) -> Result<Self> {
        let k = d.nrows();
        let h = HermitianOperator::new(d)?;
        let tr: f64 = (0..k).map(|i| h.matrix()[(i, i)].re).sum();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput(format!("density matrix trace {tr} ≠ 1")));
        }
        let min = h.eigenvalues()?.first().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return Err(Error::InvalidInput(format!("density matrix has negative eigenvalue {min}")));
        }
        let uniform = scale(&identity(k), Complex64::new(1.0 / k as f64, 0.0));
        let tracial = max_abs_diff(h.matrix(), &uniform) <= STATE_TOL;
        Ok(TraceState { dim: k, density: Some(h.into_matrix()), tracial })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_tracial(&self) -> bool {
        self.tracial
    }

    pub fn density(&self) -> Option<&Matrix> {
        self.density.as_ref()
    }

    pub fn require_tracial(&self) -> Result<()> {
        if self.tracial {
            Ok(())
        } else {
            Err(Error::NotTracial)
        }
    }

    /// `ρ(A) = Tr(D·A)`.
    pub fn expect(&self, a: &Matrix) -> Result<Complex64> {
        check_square(a, self.dim)?;
        Ok(match &self.density {
            Some(d) if !self.tracial => trace_of_product(d, a),
            _ => super::trace(a) / self.dim as f64,
        })
    }

    /// GNS (semi-)norm `√ρ(A*A)`.
    pub fn gns_norm(&self, a: &Matrix) -> Result<f64> {
        check_square(a, self.dim)?;
        let radicand = match &self.density {
            Some(d) if !self.tracial => {
                // Tr(D A* A) = Σ_{ij} (A D)_{ij} conj(A_{ij})
                let ad = a * d;
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..self.dim {
                    for i in 0..self.dim {
                        acc += ad[(i, j)] * a[(i, j)].conj();
                    }
                }
                acc.re
            }
            _ => {
                let mut acc = 0.0;
                for j in 0..self.dim {
                    for i in 0..self.dim {
                        acc += a[(i, j)].norm_sqr();
                    }
                }
                acc / self.dim as f64
            }
        };
        if radicand < -1e-12 {
            return Err(Error::Numerical(format!("negative GNS radicand {radicand:.3e}")));
        }
        Ok(radicand.max(0.0).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matalg::{from_real_rows, identity, presets};

    #[test]
    fn expectations_of_paulis() {
        let rho = TraceState::tracial(2);
        let (x, z) = (presets::pauli_x(), presets::pauli_z());
        assert!(rho.expect(&x).unwrap().norm() < 1e-15);
        assert!((rho.expect(&identity(2)).unwrap() - 1.0).norm() < 1e-15);
        assert!(rho.expect(&(&x * &z)).unwrap().norm() < 1e-15);
        assert!(matches!(rho.expect(&identity(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn gns_norms() {
        let rho = TraceState::tracial(2);
        assert!((rho.gns_norm(&identity(2)).unwrap() - 1.0).abs() < 1e-15);
        assert!((rho.gns_norm(&presets::pauli_x()).unwrap() - 1.0).abs() < 1e-15);

        let pure = TraceState::with_density(from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]])).unwrap();
        assert!(!pure.is_tracial());
        assert!((pure.gns_norm(&identity(2)).unwrap() - 1.0).abs() < 1e-15);
        let a = from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(pure.gns_norm(&a).unwrap(), 0.0);
    }

    #[test]
    fn density_validation() {
        assert!(TraceState::with_density(from_real_rows(&[&[1.0, 0.0], &[0.0, 1.0]])).is_err());
        assert!(TraceState::with_density(from_real_rows(&[&[1.5, 0.0], &[0.0, -0.5]])).is_err());
        let uniform = TraceState::with_density(from_real_rows(&[&[0.5, 0.0], &[0.0, 0.5]])).unwrap();
        assert!(uniform.is_tracial());
        assert!(TraceState::with_density(from_real_rows(&[&[0.6, 0.0], &[0.0, 0.4]])).unwrap().require_tracial().is_err());
    }
}
