//! Named matrices: Pauli and Gell-Mann matrices and seeded random Hermitian
//! and unitary matrices.

use faer::Mat;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use super::{op_norm, HermitianOperator, Matrix};
use crate::error::{Error, Result};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sparse(dim: usize, entries: &[(usize, usize, Complex64)]) -> Matrix {
    let mut m = Matrix::zeros(dim, dim);
    for &(i, j, z) in entries {
        m[(i, j)] = z;
    }
    m
}

pub fn pauli_x() -> Matrix {
    sparse(2, &[(0, 1, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))])
}

pub fn pauli_y() -> Matrix {
    sparse(2, &[(0, 1, c(0.0, -1.0)), (1, 0, c(0.0, 1.0))])
}

pub fn pauli_z() -> Matrix {
    sparse(2, &[(0, 0, c(1.0, 0.0)), (1, 1, c(-1.0, 0.0))])
}

/// Gell-Mann matrix `λ_k`, `k = 1..8`.
pub fn gellmann(k: usize) -> Result<Matrix> {
    let one = c(1.0, 0.0);
    let (i, mi) = (c(0.0, 1.0), c(0.0, -1.0));
    Ok(match k {
        1 => sparse(3, &[(0, 1, one), (1, 0, one)]),
        2 => sparse(3, &[(0, 1, mi), (1, 0, i)]),
        3 => sparse(3, &[(0, 0, one), (1, 1, -one)]),
        4 => sparse(3, &[(0, 2, one), (2, 0, one)]),
        5 => sparse(3, &[(0, 2, mi), (2, 0, i)]),
        6 => sparse(3, &[(1, 2, one), (2, 1, one)]),
        7 => sparse(3, &[(1, 2, mi), (2, 1, i)]),
        8 => {
            let s = 1.0 / 3f64.sqrt();
            sparse(3, &[(0, 0, c(s, 0.0)), (1, 1, c(s, 0.0)), (2, 2, c(-2.0 * s, 0.0))])
        }
        _ => return Err(Error::Config(format!("gellmann index {k} outside 1..8"))),
    })
}

/// Seeded Hermitian matrix with Gaussian entries, scaled to operator norm 1.
pub fn random_hermitian(dim: usize, seed: u64) -> Matrix {
    let mut rng = crate::seed::stream_rng(seed, 0);
    let mut g = || -> f64 { StandardNormal.sample(&mut rng) };
    let raw = Mat::from_fn(dim, dim, |_, _| c(g(), g()));
    let h = Mat::from_fn(dim, dim, |i, j| (raw[(i, j)] + raw[(j, i)].conj()) * 0.5);
    let norm = op_norm(&h).unwrap_or(1.0);
    if norm == 0.0 {
        return h;
    }
    Mat::from_fn(dim, dim, |i, j| h[(i, j)] / norm)
}

/// Seeded unitary `e^{iπH}` for a random Hermitian `H`.
pub fn random_unitary(dim: usize, seed: u64) -> Matrix {
    let h = HermitianOperator::new(random_hermitian(dim, seed)).expect("symmetrized input is Hermitian");
    super::unitary_exp(std::f64::consts::PI, &h).expect("eigensolver on a small dense matrix")
}

/// Resolves `pauli_x`, `pauli_y`, `pauli_z`, `gellmann_k` and
/// `random_hermitian(dim, seed)`.
pub fn by_name(name: &str) -> Result<Matrix> {
    let name = name.trim();
    match name {
        "pauli_x" => return Ok(pauli_x()),
        "pauli_y" => return Ok(pauli_y()),
        "pauli_z" => return Ok(pauli_z()),
        _ => {}
    }
    if let Some(k) = name.strip_prefix("gellmann_") {
        let k: usize = k.parse().map_err(|_| Error::Config(format!("bad preset {name:?}")))?;
        return gellmann(k);
    }
    if let Some(args) = name.strip_prefix("random_hermitian(").and_then(|r| r.strip_suffix(')')) {
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        if let [d, s] = parts.as_slice() {
            let dim: usize = d.parse().map_err(|_| Error::Config(format!("bad dimension in {name:?}")))?;
            let seed: u64 = s.parse().map_err(|_| Error::Config(format!("bad seed in {name:?}")))?;
            if dim == 0 {
                return Err(Error::Config("random_hermitian needs dim ≥ 1".into()));
            }
            return Ok(random_hermitian(dim, seed));
        }
    }
    Err(Error::Config(format!("unknown matrix preset {name:?}")))
}
