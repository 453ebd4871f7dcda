use num_complex::Complex64;

use super::{check_square, commutator, expm, identity, max_abs_diff, scale, HermitianOperator, Matrix, TraceState};
use crate::error::{Error, Result};

/// Default Gauss–Legendre order per axis for the triangle quadrature.
pub const DEFAULT_CINT_NODES: usize = 40;

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = (1.0 - x) / 2.0;
        nodes[n - 1 - i] = (1.0 + x) / 2.0;
        weights[i] = w / 2.0;
        weights[n - 1 - i] = w / 2.0;
    }
    (nodes, weights)
}

/// Both sides of `e^A e^B − e^{A+B} = ∫₀¹∫₀^{1−t} e^{t(A+B)} e^{(1−t−s)A} [A,B] e^{sA} e^{(1−t)B} ds dt`.
#[derive(Clone, Debug)]
pub struct CintCheck {
    pub defect: Matrix,
    pub integral: Matrix,
    /// Largest entrywise difference between the two sides.
    pub error: f64,
}

/// Evaluates the commutator integral by tensor-product Gauss–Legendre after
/// the substitution `s = (1 − t)u`. Intended for `‖A‖, ‖B‖ ≤ 2`.
pub fn cint_check(a: &Matrix, b: &Matrix, nodes: usize) -> Result<CintCheck> {
    check_square(b, a.nrows())?;
    check_square(a, a.nrows())?;
    let k = a.nrows();
    let sum = a + b;
    let defect = &(&expm(a) * &expm(b)) - &expm(&sum);
    let c = commutator(a, b);
    let (x, w) = gauss_legendre(nodes);
    let mut integral = Matrix::zeros(k, k);
    for (&t, &wt) in x.iter().zip(&w) {
        let left = expm(&scale(&sum, Complex64::new(t, 0.0)));
        let right = expm(&scale(b, Complex64::new(1.0 - t, 0.0)));
        let mut inner = Matrix::zeros(k, k);
        for (&u, &wu) in x.iter().zip(&w) {
            let s = (1.0 - t) * u;
            let pre = expm(&scale(a, Complex64::new(1.0 - t - s, 0.0)));
            let post = expm(&scale(a, Complex64::new(s, 0.0)));
            let term = &(&pre * &c) * &post;
            inner = &inner + &scale(&term, Complex64::new(wu, 0.0));
        }
        let outer = &(&left * &inner) * &right;
        integral = &integral + &scale(&outer, Complex64::new(wt * (1.0 - t), 0.0));
    }
    let error = max_abs_diff(&defect, &integral);
    Ok(CintCheck { defect, integral, error })
}

/// `(lhs, rhs)` with `lhs = ‖e^{iA₁}⋯e^{iA_a} − e^{i(A₁+⋯+A_a)}‖_ρ` and
/// `rhs = Σ_{j<k} ‖[A_j, A_k]‖_ρ / 2`. Requires a tracial state.
pub fn spec_bound_check(rho: &TraceState, ops: &[&HermitianOperator]) -> Result<(f64, f64)> {
    rho.require_tracial()?;
    let k = rho.dim();
    if ops.len() < 2 {
        return Ok((0.0, 0.0));
    }
    let mut prod = identity(k);
    let mut total = Matrix::zeros(k, k);
    for op in ops {
        check_square(op.matrix(), k)?;
        prod = &prod * &super::unitary_exp(1.0, op)?;
        total = &total + op.matrix();
    }
    let total = HermitianOperator::new(total).map_err(|e| Error::Numerical(e.to_string()))?;
    let lhs = rho.gns_norm(&(&prod - &super::unitary_exp(1.0, &total)?))?;
    let mut rhs = 0.0;
    for j in 0..ops.len() {
        for l in j + 1..ops.len() {
            rhs += rho.gns_norm(&commutator(ops[j].matrix(), ops[l].matrix()))? / 2.0;
        }
    }
    Ok((lhs, rhs))
}
