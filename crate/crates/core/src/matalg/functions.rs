use faer::Mat;
use num_complex::Complex64;

use super::{check_square, identity, HermitianOperator, Matrix, TraceState};
use crate::error::{Error, Result};

/// `e^{itA}` through the eigendecomposition of `A`.
pub fn unitary_exp(t: f64, a: &HermitianOperator) -> Result<Matrix> {
    a.apply_function(|x| Complex64::from_polar(1.0, t * x))
}

/// Matrix exponential of an arbitrary square matrix by scaling and squaring
/// with a truncated Taylor series.
pub fn expm(a: &Matrix) -> Matrix {
    let n = a.nrows();
    // 1-norm bound
    let norm = (0..n).map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let s = 2f64.powi(-squarings);
    let x = Mat::from_fn(n, n, |i, j| a[(i, j)] * s);
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=20 {
        term = &term * &x;
        term = Mat::from_fn(n, n, |i, j| term[(i, j)] / k as f64);
        result = &result + &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Ordered characteristic function `ρ(e^{it₁A₁}⋯e^{it_aA_a})`, prepared once
/// for many evaluations.
///
/// Under a tracial state it works in the eigenbases: with `O_{jk} = V_j* V_k`,
/// the value is `Tr(e^{it₁Λ₁} O₁₂ e^{it₂Λ₂} ⋯ O_{a1}) / k`, and for `a = 2` it
/// reduces to a weighted double sum over `|O₁₂|²`.
pub struct OrderedCf<'a> {
    rho: &'a TraceState,
    ops: &'a [&'a HermitianOperator],
    overlaps: Vec<Matrix>,
    two_point: Option<Mat<f64>>,
}

impl<'a> OrderedCf<'a> {
    pub fn new(rho: &'a TraceState, ops: &'a [&'a HermitianOperator]) -> Result<Self> {
        for op in ops {
            check_square(op.matrix(), rho.dim())?;
        }
        let mut overlaps = Vec::new();
        let mut two_point = None;
        if rho.is_tracial() && ops.len() >= 2 {
            let eig: Vec<_> = ops.iter().map(|op| op.eigen()).collect::<Result<_>>()?;
            if ops.len() == 2 {
                let o = eig[0].vectors.overlap(&eig[1].vectors);
                two_point = Some(Mat::from_fn(o.nrows(), o.ncols(), |i, j| o[(i, j)].norm_sqr()));
            } else {
                for j in 0..ops.len() {
                    let next = (j + 1) % ops.len();
                    overlaps.push(eig[j].vectors.overlap(&eig[next].vectors));
                }
            }
        }
        Ok(OrderedCf { rho, ops, overlaps, two_point })
    }

    pub fn eval(&self, t: &[f64]) -> Result<Complex64> {
        if t.len() != self.ops.len() {
            return Err(Error::DimensionMismatch { expected: self.ops.len(), got: t.len() });
        }
        let k = self.rho.dim() as f64;
        if self.ops.is_empty() {
            return Ok(Complex64::new(1.0, 0.0));
        }
        if !self.rho.is_tracial() {
            let mut prod = identity(self.rho.dim());
            for (op, &tj) in self.ops.iter().zip(t) {
                prod = &prod * &unitary_exp(tj, op)?;
            }
            return self.rho.expect(&prod);
        }
        if self.ops.len() == 1 {
            let vals = self.ops[0].eigenvalues()?;
            return Ok(vals.iter().map(|&x| Complex64::from_polar(1.0, t[0] * x)).sum::<Complex64>() / k);
        }
        let phases: Vec<Vec<Complex64>> = self
            .ops
            .iter()
            .zip(t)
            .map(|(op, &tj)| Ok(op.eigen()?.values.iter().map(|&x| Complex64::from_polar(1.0, tj * x)).collect()))
            .collect::<Result<_>>()?;
        if let Some(w) = &self.two_point {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..w.ncols() {
                let mut col = 0.0f64;
                let mut col_im = 0.0f64;
                for a in 0..w.nrows() {
                    let z = phases[0][a] * w[(a, b)];
                    col += z.re;
                    col_im += z.im;
                }
                acc += Complex64::new(col, col_im) * phases[1][b];
            }
            return Ok(acc / k);
        }
        // D₁ O₁₂ D₂ O₂₃ ⋯ D_a O_{a1}
        let n = self.rho.dim();
        let mut m = Mat::from_fn(n, n, |i, j| phases[0][i] * self.overlaps[0][(i, j)]);
        for j in 1..self.ops.len() {
            let factor = Mat::from_fn(n, n, |r, c| phases[j][r] * self.overlaps[j][(r, c)]);
            m = &m * &factor;
        }
        Ok(super::trace(&m) / k)
    }
}

/// `ρ(e^{it₁A₁} e^{it₂A₂} ⋯ e^{it_aA_a})`.
pub fn ordered_cf(rho: &TraceState, ops: &[&HermitianOperator], t: &[f64]) -> Result<Complex64> {
    OrderedCf::new(rho, ops)?.eval(t)
}

/// `ρ(f₁(A₁) f₂(A₂) ⋯ f_a(A_a))`; generally complex.
pub fn ordered_joint_expectation(
    rho: &TraceState,
    ops: &[&HermitianOperator],
    fs: &[&dyn Fn(f64) -> Complex64],
) -> Result<Complex64> {
    if ops.len() != fs.len() {
        return Err(Error::DimensionMismatch { expected: ops.len(), got: fs.len() });
    }
    let mut prod = identity(rho.dim());
    for (op, f) in ops.iter().zip(fs) {
        check_square(op.matrix(), rho.dim())?;
        prod = &prod * &op.apply_function(f)?;
    }
    rho.expect(&prod)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matalg::{from_real_rows, max_abs_diff, op_norm, presets, spectral_measure};

    fn h(m: Matrix) -> HermitianOperator {
        HermitianOperator::new(m).unwrap()
    }

    #[test]
    fn unitary_exp_cases() {
        let z = h(presets::pauli_z());
        assert!(max_abs_diff(&unitary_exp(0.0, &z).unwrap(), &identity(2)) < 1e-15);
        let u = unitary_exp(std::f64::consts::PI, &z).unwrap();
        assert!(max_abs_diff(&u, &super::super::scale(&identity(2), Complex64::new(-1.0, 0.0))) < 1e-12);
        let r = h(presets::random_hermitian(4, 11));
        let u = unitary_exp(0.83, &r).unwrap();
        assert!((op_norm(&u).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn expm_matches_spectral_exponential() {
        let r = h(presets::random_hermitian(3, 5));
        let via_eigen = r.apply_function(|x| Complex64::new(x.exp(), 0.0)).unwrap();
        assert!(max_abs_diff(&expm(r.matrix()), &via_eigen) < 1e-12);
        let nilpotent = from_real_rows(&[&[0.0, 3.0], &[0.0, 0.0]]);
        let e = expm(&nilpotent);
        assert!(max_abs_diff(&e, &from_real_rows(&[&[1.0, 3.0], &[0.0, 1.0]])) < 1e-13);
    }

    #[test]
    fn univariate_cf_matches_spectral_measure() {
        let rho = TraceState::tracial(4);
        let a = h(presets::random_hermitian(4, 3));
        let mu = spectral_measure(&rho, &a).unwrap();
        for t in [-1.7, 0.0, 0.4, 2.5] {
            let cf = ordered_cf(&rho, &[&a], &[t]).unwrap();
            assert!((cf - mu.characteristic(t)).norm() < 1e-12);
        }
        assert!((ordered_cf(&rho, &[&a, &a], &[0.0, 0.0]).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn commuting_diagonals_give_classical_cf() {
        let rho = TraceState::tracial(3);
        let d1 = [0.5, -1.0, 2.0];
        let d2 = [1.5, 0.25, -0.75];
        let a = h(from_real_rows(&[&[d1[0], 0.0, 0.0], &[0.0, d1[1], 0.0], &[0.0, 0.0, d1[2]]]));
        let b = h(from_real_rows(&[&[d2[0], 0.0, 0.0], &[0.0, d2[1], 0.0], &[0.0, 0.0, d2[2]]]));
        let (t1, t2) = (0.7, -1.3);
        let classical: Complex64 =
            (0..3).map(|i| Complex64::from_polar(1.0 / 3.0, t1 * d1[i] + t2 * d2[i])).sum();
        assert!((ordered_cf(&rho, &[&a, &b], &[t1, t2]).unwrap() - classical).norm() < 1e-12);
    }

    #[test]
    fn prepared_paths_agree_with_direct_products() {
        let rho = TraceState::tracial(3);
        let ops: Vec<HermitianOperator> = (0..3).map(|s| h(presets::random_hermitian(3, 40 + s))).collect();
        let refs: Vec<&HermitianOperator> = ops.iter().collect();
        let t = [0.3, -1.1, 2.2];
        let mut prod = identity(3);
        for (op, &tj) in refs.iter().zip(&t) {
            prod = &prod * &unitary_exp(tj, op).unwrap();
        }
        let direct = rho.expect(&prod).unwrap();
        assert!((ordered_cf(&rho, &refs, &t).unwrap() - direct).norm() < 1e-12);
        let two = ordered_cf(&rho, &refs[..2], &t[..2]).unwrap();
        let direct_two = rho.expect(&(&unitary_exp(t[0], refs[0]).unwrap() * &unitary_exp(t[1], refs[1]).unwrap())).unwrap();
        assert!((two - direct_two).norm() < 1e-12);
        assert!(two.norm() <= 1.0 + 1e-10);
    }

    #[test]
    fn ordered_joint_expectations() {
        let rho = TraceState::tracial(2);
        let (x, z) = (h(presets::pauli_x()), h(presets::pauli_z()));
        let one = |_: f64| Complex64::new(1.0, 0.0);
        let id = |v: f64| Complex64::new(v, 0.0);
        let sq = |v: f64| Complex64::new(v * v, 0.0);
        assert!((ordered_joint_expectation(&rho, &[&x, &z], &[&one, &one]).unwrap() - 1.0).norm() < 1e-12);
        assert!(ordered_joint_expectation(&rho, &[&x, &z], &[&id, &id]).unwrap().norm() < 1e-12);
        assert!((ordered_joint_expectation(&rho, &[&x, &z], &[&sq, &sq]).unwrap() - 1.0).norm() < 1e-12);
        let indicator = |v: f64| Complex64::new(if (v - 1.0).abs() < 1e-9 { 1.0 } else { 0.0 }, 0.0);
        assert!((ordered_joint_expectation(&rho, &[&z], &[&indicator]).unwrap() - 0.5).norm() < 1e-12);
    }

    #[test]
    fn ordered_joint_can_be_non_real() {
        // ρ(P_x P_y P_z) with spectral projections onto +1 eigenvectors
        let rho = TraceState::tracial(2);
        let ops = [h(presets::pauli_x()), h(presets::pauli_y()), h(presets::pauli_z())];
        let up = |v: f64| Complex64::new(if v > 0.0 { 1.0 } else { 0.0 }, 0.0);
        let v = ordered_joint_expectation(&rho, &[&ops[0], &ops[1], &ops[2]], &[&up, &up, &up]).unwrap();
        assert!(v.im.abs() > 1e-3);
    }
}
