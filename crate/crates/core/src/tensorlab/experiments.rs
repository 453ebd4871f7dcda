use num_complex::Complex64;

use super::{apply_product, SiteSum, TensorSystem};
use crate::error::{Error, Result};
use crate::matalg::{adjoint, identity, HermitianOperator, Matrix, OrderedCf, SpectralMeasure, TraceState};
use crate::ncpoly::{NcPolynomial, PowerSumDecomposition, Word};

fn check_ops(ops: &[&HermitianOperator], generators: usize, sys: &TensorSystem) -> Result<()> {
    if ops.len() != generators {
        return Err(Error::DimensionMismatch { expected: generators, got: ops.len() });
    }
    for op in ops {
        sys.check_site_op(op.matrix())?;
    }
    Ok(())
}

/// Frobenius norm divided by `√D`: the GNS norm under the normalized trace.
fn tracial_norm(a: &Matrix) -> f64 {
    let mut acc = 0.0;
    for c in 0..a.ncols() {
        acc += a.col_as_slice(c).iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    (acc / a.nrows() as f64).sqrt()
}

/// `P = c_∅·I + Σ_g L_g P_g`, where `P_g` collects the words starting with `g`.
fn horner(terms: &[(&[u8], Complex64)], sums: &[SiteSum], sys: &TensorSystem) -> Matrix {
    let constant: Complex64 = terms.iter().filter(|(w, _)| w.is_empty()).map(|(_, c)| c).sum();
    let mut acc = crate::matalg::scale(&identity(sys.dim()), constant);
    for (g, sum) in sums.iter().enumerate() {
        let tails: Vec<(&[u8], Complex64)> =
            terms.iter().filter(|(w, _)| w.first() == Some(&(g as u8))).map(|(w, c)| (&w[1..], *c)).collect();
        if tails.is_empty() {
            continue;
        }
        let inner = horner(&tails, sums, sys);
        acc = &acc + &sum.apply(&inner, sys);
    }
    acc
}

/// `p(Ã₁, …, Ã_a)` as a dense `k^N × k^N` matrix.
pub fn evaluate_nc_tensor(p: &NcPolynomial, ops: &[&HermitianOperator], sys: &TensorSystem) -> Result<Matrix> {
    check_ops(ops, p.generators(), sys)?;
    let sums: Vec<SiteSum> = ops.iter().map(|op| SiteSum::averaged(op.matrix(), sys)).collect();
    let terms = p.to_complex_terms();
    let borrowed: Vec<(&[u8], Complex64)> = terms.iter().map(|(w, c)| (w.letters(), *c)).collect();
    Ok(horner(&borrowed, &sums, sys))
}

/// Spectral measure of `p(Ã⃗)` under the product trace.
pub fn clt_spectrum(p: &NcPolynomial, ops: &[&HermitianOperator], sys: &TensorSystem) -> Result<SpectralMeasure> {
    if !p.is_self_adjoint() {
        return Err(Error::InvalidInput("spectrum requires a self-adjoint polynomial".into()));
    }
    let m = HermitianOperator::new(evaluate_nc_tensor(p, ops, sys)?)?;
    crate::matalg::spectral_measure(&TraceState::tracial(sys.dim()), &m)
}

/// `‖[Ã^α, B̃^β]‖` under the product trace.
pub fn commutator_norm(
    a: &HermitianOperator,
    b: &HermitianOperator,
    alpha: u32,
    beta: u32,
    sys: &TensorSystem,
) -> Result<f64> {
    sys.check_site_op(a.matrix())?;
    sys.check_site_op(b.matrix())?;
    let (sa, sb) = (SiteSum::averaged(a.matrix(), sys), SiteSum::averaged(b.matrix(), sys));
    let mut xy = identity(sys.dim());
    for _ in 0..beta {
        xy = sb.apply(&xy, sys);
    }
    for _ in 0..alpha {
        xy = sa.apply(&xy, sys);
    }
    // Ã^α and B̃^β are Hermitian, so B̃^βÃ^α = (Ã^αB̃^β)*.
    Ok(tracial_norm(&(&xy - &adjoint(&xy))))
}

/// `(N, ‖[Ã^α, B̃^β]‖)` for each `N` in `ns`.
pub fn commutator_decay(
    a: &HermitianOperator,
    b: &HermitianOperator,
    alpha: u32,
    beta: u32,
    ns: &[usize],
    cap: usize,
) -> Result<Vec<(usize, f64)>> {
    ns.iter()
        .map(|&n| {
            let sys = TensorSystem::with_cap(a.dim(), n, cap)?;
            Ok((n, commutator_norm(a, b, alpha, beta, &sys)?))
        })
        .collect()
}

/// `ρ^{⊗N}(e^{it₁Ã₁} ⋯ e^{it_aÃ_a})` at each point of `ts`.
pub fn ordered_cf_tensor(ops: &[&HermitianOperator], ts: &[Vec<f64>], sys: &TensorSystem) -> Result<Vec<Complex64>> {
    check_ops(ops, ops.len(), sys)?;
    let avg: Vec<HermitianOperator> =
        ops.iter().map(|op| HermitianOperator::new(super::averaged(op, sys)?)).collect::<Result<_>>()?;
    let refs: Vec<&HermitianOperator> = avg.iter().collect();
    let rho = TraceState::tracial(sys.dim());
    let cf = OrderedCf::new(&rho, &refs)?;
    ts.iter().map(|t| cf.eval(t)).collect()
}

/// Defect `‖Π_n e^{it_nB̃_n^{β_n}} − e^{i t⃗·B̃^β⃗}‖` and the commutator bound
/// `Σ_{j<k} ‖[t_jB̃_j^{β_j}, t_kB̃_k^{β_k}]‖/2`, both under the product trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReorderCheck {
    pub defect: f64,
    pub spec_bound: f64,
}

/// Single-site operator `C_n(A⃗)` of a decomposition base, with components
/// weighted by `N^{(1−d)/2}`.
fn site_operator(base_terms: &[(Word, Complex64)], ops: &[&HermitianOperator], k: usize) -> Result<HermitianOperator> {
    let mut acc = Matrix::zeros(k, k);
    for (w, c) in base_terms {
        let mut prod = identity(k);
        for &g in w.letters() {
            prod = &prod * ops[g as usize].matrix();
        }
        acc = &acc + &crate::matalg::scale(&prod, *c);
    }
    HermitianOperator::new(acc)
}

fn reorder(
    d: &PowerSumDecomposition,
    t: &[f64],
    ops: &[&HermitianOperator],
    sys: &TensorSystem,
    with_bound: bool,
) -> Result<ReorderCheck> {
    check_ops(ops, d.generators(), sys)?;
    if t.len() != d.terms().len() {
        return Err(Error::DimensionMismatch { expected: d.terms().len(), got: t.len() });
    }
    if d.terms().iter().any(|term| !term.base.is_self_adjoint()) {
        return Err(Error::InvalidInput("reorder defect needs self-adjoint bases".into()));
    }
    let (k, n, dim) = (sys.base(), sys.copies(), sys.dim());
    let sites: Vec<HermitianOperator> = d
        .terms()
        .iter()
        .map(|term| site_operator(&term.base.rescale_components(n as u64).to_complex_terms(), ops, k))
        .collect::<Result<_>>()?;
    let sums: Vec<SiteSum> = sites.iter().map(|c| SiteSum::averaged(c.matrix(), sys)).collect();
    let power = |j: usize| -> Matrix {
        let mut x = identity(dim);
        for _ in 0..d.terms()[j].exponent {
            x = sums[j].apply(&x, sys);
        }
        x
    };

    let mut total = Matrix::zeros(dim, dim);
    for j in 0..sites.len() {
        total = &total + &crate::matalg::scale(&power(j), Complex64::new(t[j], 0.0));
    }
    let joint = HermitianOperator::new(total)?.apply_function(|x| Complex64::from_polar(1.0, x))?;

    // Each B̃_n is diagonal in the product basis V_n^{⊗N}.
    let scale = 1.0 / (n as f64).sqrt();
    let mut product = identity(dim);
    for j in (0..sites.len()).rev() {
        let e = sites[j].eigen()?;
        let v = e.vectors.to_complex();
        let beta = d.terms()[j].exponent as i32;
        let phases: Vec<Complex64> = (0..dim)
            .map(|r| {
                let mut mu = 0.0;
                let mut rest = r;
                for _ in 0..n {
                    mu += e.values[rest % k];
                    rest /= k;
                }
                Complex64::from_polar(1.0, t[j] * (mu * scale).powi(beta))
            })
            .collect();
        let mut rotated = apply_product(&adjoint(&v), &product, sys);
        for c in 0..dim {
            for (x, ph) in rotated.col_as_slice_mut(c).iter_mut().zip(&phases) {
                *x *= ph;
            }
        }
        product = apply_product(&v, &rotated, sys);
    }
    let defect = tracial_norm(&(&product - &joint));
    drop((product, joint));

    let mut spec_bound = 0.0;
    if with_bound {
        for second in 1..sites.len() {
            let x2 = power(second);
            for first in 0..second {
                let mut xy = x2.clone();
                for _ in 0..d.terms()[first].exponent {
                    xy = sums[first].apply(&xy, sys);
                }
                let comm = &xy - &adjoint(&xy);
                spec_bound += (t[first] * t[second]).abs() * tracial_norm(&comm) / 2.0;
            }
        }
    }
    Ok(ReorderCheck { defect, spec_bound })
}

/// Reorder defect of a self-adjoint power-sum decomposition at parameters
/// `t⃗`, with each `B̃_n` built from the rescaled components of `B_n`.
pub fn reorder_defect(
    d: &PowerSumDecomposition,
    t: &[f64],
    ops: &[&HermitianOperator],
    sys: &TensorSystem,
) -> Result<f64> {
    Ok(reorder(d, t, ops, sys, false)?.defect)
}

/// Reorder defect together with its commutator bound.
pub fn reorder_check(
    d: &PowerSumDecomposition,
    t: &[f64],
    ops: &[&HermitianOperator],
    sys: &TensorSystem,
) -> Result<ReorderCheck> {
    reorder(d, t, ops, sys, true)
}
