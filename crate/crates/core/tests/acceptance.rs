//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails. Reference values come from closed
//! forms or from dense Kronecker-product constructions written here,
//! independent of the library's site-by-site tensor code.

use std::process::ExitCode;
use std::time::Instant;

use faer::Mat;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::Rng;
use rand_distr::StandardNormal;

use nclab::gaussian::{covariance_from_state, ks_distance, sample_pushforward};
use nclab::matalg::{
    cint_check, identity, max_abs, max_abs_diff, presets, scale, spec_bound_check, spectral_measure, HermitianOperator, Matrix,
    TraceState,
};
use nclab::moments::{convergence_table, exact_mixed_moment, wick_moment, MomentEngine, MomentWord};
use nclab::ncpoly::{decompose_to_power_sums, parse_polynomial, powsum_merge, DecomposeOptions, NcPolynomial, Scalar, Word};
use nclab::seed::{mix, stream_rng};
use nclab::tensorlab::{clt_spectrum, commutator_norm, ordered_cf_tensor, reorder_check, TensorSystem};

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn h(m: Matrix) -> HermitianOperator {
    HermitianOperator::new(m).unwrap()
}

fn paulis() -> (HermitianOperator, HermitianOperator) {
    (h(presets::pauli_x()), h(presets::pauli_z()))
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (p, q) = (a.nrows(), b.nrows());
    Mat::from_fn(p * q, p * q, |r, c| a[(r / q, c / q)] * b[(r % q, c % q)])
}

/// `(Σ_j I⊗…⊗A⊗…⊗I)/√N` by explicit Kronecker products.
fn dense_average(a: &Matrix, n: usize) -> Matrix {
    let k = a.nrows();
    let mut sum = Matrix::zeros(k.pow(n as u32), k.pow(n as u32));
    for j in 0..n {
        let mut term = if j == 0 { a.clone() } else { identity(k) };
        for l in 1..n {
            term = kron(&term, &if l == j { a.clone() } else { identity(k) });
        }
        sum = &sum + &term;
    }
    scale(&sum, Complex64::new(1.0 / (n as f64).sqrt(), 0.0))
}

fn normalized_trace(m: &Matrix) -> Complex64 {
    nclab::matalg::trace(m) / m.nrows() as f64
}

fn words(letters: u8, len: usize) -> Vec<Vec<u8>> {
    (0..(letters as usize).pow(len as u32))
        .map(|code| (0..len).map(|i| ((code / (letters as usize).pow(i as u32)) % letters as usize) as u8).collect())
        .collect()
}

fn slope(points: &[(f64, f64)]) -> f64 {
    nclab::harness::loglog_slope(points).unwrap_or(f64::NAN)
}

fn gaussian_rational(rng: &mut impl Rng) -> BigRational {
    let g: f64 = rng.sample(StandardNormal);
    BigRational::new(BigInt::from((g * 8.0).round() as i64), BigInt::from(8))
}

/// Self-adjoint `q + q*` for a random `q` with Gaussian-rational
/// coefficients, at most 3 generators and degree at most 4.
fn random_sa_polynomial(rng: &mut impl Rng) -> NcPolynomial {
    let a = rng.random_range(1..=3usize);
    let mut q = NcPolynomial::zero(a);
    for _ in 0..rng.random_range(1..=4) {
        let len = rng.random_range(1..=4usize);
        let w = Word((0..len).map(|_| rng.random_range(0..a as u8)).collect());
        q.add_term(w, &Scalar::new(gaussian_rational(rng), gaussian_rational(rng)));
    }
    &q + &q.adjoint()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = stream_rng(SEED, 1);
    let opts = DecomposeOptions::default();
    let mut exact = 0;
    let mut structured = 0;
    let mut nonzero = 0;
    for _ in 0..200 {
        let p = random_sa_polynomial(&mut rng);
        if !p.is_zero() {
            nonzero += 1;
        }
        let d = decompose_to_power_sums(&p, &opts).unwrap();
        if d.expand() == p.clone().with_generators(d.generators()) {
            exact += 1;
        }
        if d.terms().iter().all(|t| t.coeff.is_real() && t.base.is_self_adjoint()) {
            structured += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        exact == 200 && structured == 200 && secs <= 60.0,
        format!("{exact}/200 exact round trips, {structured}/200 real t and self-adjoint B ({nonzero} nonzero), {secs:.1} s"),
    )
}

fn criterion_2() -> Outcome {
    let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let q = r(2, 1);
    let t = powsum_merge(1, 1, &q).unwrap();
    let anchor = t == vec![r(-1, 1), r(5, 4), r(-1, 4)];
    // (X + q^nY)² = X² + 2q^n XY + q^{2n}Y² for commuting X, Y.
    let moment = |k: u32| -> BigRational { t.iter().enumerate().map(|(n, tn)| tn * num_traits::pow(q.clone(), n * k as usize)).sum() };
    let expands = moment(0) == r(0, 1) && moment(1) * r(2, 1) == r(1, 1) && moment(2) == r(0, 1);
    outcome(anchor && expands, format!("t = ({}), expansion reproduces XY: {expands}", t.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")))
}

fn criterion_3() -> Outcome {
    let (x, z) = paulis();
    let rho = TraceState::tracial(2);
    let engine = MomentEngine::new(&rho, &[&x, &z]).unwrap();
    let mut worst_tensor = 0.0f64;
    let mut worst_moment = 0.0f64;
    let mut worst_dense = 0.0f64;
    for n in 1..=10usize {
        let want = 2.0 / (n as f64).sqrt();
        let sys = TensorSystem::new(2, n).unwrap();
        worst_tensor = worst_tensor.max((commutator_norm(&x, &z, 1, 1, &sys).unwrap() - want).abs());
        // ‖C‖² = ρ(C*C) = −ρ(C²) for C = [Ã, B̃].
        let m = |w: [u8; 4]| engine.moment(&MomentWord(w.to_vec()), n as u64).unwrap();
        let c2 = m([0, 1, 0, 1]) - m([0, 1, 1, 0]) - m([1, 0, 0, 1]) + m([1, 0, 1, 0]);
        worst_moment = worst_moment.max(((-c2.re).sqrt() - want).abs());
        if n <= 8 {
            let (xa, za) = (dense_average(x.matrix(), n), dense_average(z.matrix(), n));
            let c = &(&xa * &za) - &(&za * &xa);
            let norm = normalized_trace(&(&nclab::matalg::adjoint(&c) * &c)).re.sqrt();
            worst_dense = worst_dense.max((norm - want).abs());
        }
    }
    outcome(
        worst_tensor <= 1e-9 && worst_moment <= 1e-9 && worst_dense <= 1e-9,
        format!("max |norm − 2/√N| over N=1..10: tensors {worst_tensor:.2e}, moments {worst_moment:.2e}, kron oracle {worst_dense:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let x = h(presets::pauli_x());
    let rho = TraceState::tracial(2);
    let engine = MomentEngine::new(&rho, &[&x]).unwrap();
    let value = engine.moment_value(&MomentWord(vec![0; 4])).unwrap();
    let mut worst = 0.0f64;
    for n in 1..=1_000_000u64 {
        let got = value.at(n);
        worst = worst.max((got - Complex64::new(3.0 - 2.0 / n as f64, 0.0)).norm());
    }
    let xa = dense_average(x.matrix(), 2);
    let dense = normalized_trace(&(&(&xa * &xa) * &(&xa * &xa)));
    let two = Complex64::new(2.0, 0.0);
    let hand = &scale(&kron(x.matrix(), x.matrix()), two) + &scale(&identity(4), two);
    let fourth = &(&xa * &xa) * &(&xa * &xa);
    let at2 = value.at(2);
    let pass = worst <= 1e-12 && (dense - at2).norm() <= 1e-10 && (at2.re - 2.0).abs() <= 1e-10 && max_abs_diff(&fourth, &hand) <= 1e-12;
    outcome(pass, format!("max |ρ(σ̃x⁴) − (3 − 2/N)| over N ≤ 10⁶: {worst:.2e}; N=2 dense {:.12}, engine {:.12}", dense.re, at2.re))
}

fn criterion_5() -> Outcome {
    let (x, z) = paulis();
    let rho = TraceState::tracial(2);
    let engine = MomentEngine::new(&rho, &[&x, &z]).unwrap();
    let cov = covariance_from_state(&rho, &[&x, &z]).unwrap();
    let ns = [100.0, 1000.0, 10000.0];
    let mut worst_ratio = 0.0f64;
    let mut failures = Vec::new();
    let mut checked = 0;
    for len in [2usize, 4, 6] {
        for w in words(2, len) {
            let mw = MomentWord(w.clone());
            let wick = wick_moment(&cov, &mw).unwrap();
            let gaps: Vec<f64> = ns.iter().map(|&n| (engine.moment(&mw, n as u64).unwrap() - wick).norm()).collect();
            // Least-squares residuals are orthogonal to 1/N, so the fit is
            // judged by its largest residual rather than pointwise.
            let c = gaps.iter().zip(&ns).map(|(g, n)| g / n).sum::<f64>() / ns.iter().map(|n| 1.0 / (n * n)).sum::<f64>();
            let residual = gaps.iter().zip(&ns).map(|(g, n)| (g - c / n).abs()).fold(0.0, f64::max);
            let allowed = (0.01 * gaps[0]).max(1e-12);
            checked += 1;
            if gaps[0] > 1e-12 {
                worst_ratio = worst_ratio.max(residual / gaps[0]);
            }
            if residual > allowed {
                failures.push(format!("{:?}", w.iter().map(|l| l + 1).collect::<Vec<_>>()));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{checked} words, worst residual/gap₁₀₀ {worst_ratio:.4}, failing {}",
            if failures.is_empty() { "none".to_string() } else { failures.join(" ") }
        ),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let (x, z) = paulis();
    let ops = [&x, &z];
    let rho = TraceState::tracial(2);
    let p = parse_polynomial("A1*A2 + A2*A1", 2).unwrap();
    let cov = covariance_from_state(&rho, &ops).unwrap();
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let samples = sample_pushforward(&p, &cov, 1_000_000, SEED, jobs).unwrap();
    let spectrum = |n: usize| clt_spectrum(&p, &ops, &TensorSystem::new(2, n).unwrap()).unwrap();
    let s2 = spectrum(2);
    let s12 = spectrum(12);
    let (ks2, ks12) = (ks_distance(&s2, &samples).unwrap(), ks_distance(&s12, &samples).unwrap());
    let rows = convergence_table(&rho, &ops, &p, &[2, 4], &[12]).unwrap();
    let (g2, g4) = (rows[0].gap, rows[1].gap);
    // Spectral moments of the N = 12 matrix must agree with the partition
    // engine, and the order-2 gap has the closed form −4/N.
    let consistent = (s12.moment(2) - rows[0].exact).abs() < 1e-9
        && (s12.moment(4) - rows[1].exact).abs() < 1e-8
        && (g2 + 4.0 / 12.0).abs() < 1e-12;
    let secs = start.elapsed().as_secs_f64();
    let pass = ks12 <= 0.05 && ks12 < ks2 && g2.abs() <= 0.2 && g4.abs() <= 0.2 && consistent && secs <= 600.0;
    outcome(
        pass,
        format!(
            "KS N=2 {ks2:.4}, N=12 {ks12:.4} (bound 0.05); gaps N=12 order 2 {g2:.4}, order 4 {g4:.4} (bound 0.2); \
             oracle consistency {consistent}; {secs:.0} s"
        ),
    )
}

fn criterion_7() -> Outcome {
    let (x, z) = paulis();
    let axis: Vec<f64> = (0..9).map(|i| -2.0 + 0.5 * i as f64).collect();
    let grid: Vec<Vec<f64>> = axis.iter().flat_map(|&a| axis.iter().map(move |&b| vec![a, b])).collect();
    let max_err = |n: usize| -> f64 {
        let values = ordered_cf_tensor(&[&x, &z], &grid, &TensorSystem::new(2, n).unwrap()).unwrap();
        grid.iter()
            .zip(values)
            .map(|(t, v)| (v - Complex64::new((-(t[0] * t[0] + t[1] * t[1]) / 2.0).exp(), 0.0)).norm())
            .fold(0.0, f64::max)
    };
    let (e5, e10) = (max_err(5), max_err(10));
    let mut worst_cos = 0.0f64;
    for n in 1..=10usize {
        let sys = TensorSystem::new(2, n).unwrap();
        let ts: Vec<Vec<f64>> = [-3.0, -1.1, 0.0, 0.4, 2.0, 5.5].iter().map(|&t| vec![t]).collect();
        for (t, v) in ts.iter().zip(ordered_cf_tensor(&[&x], &ts, &sys).unwrap()) {
            let want = (t[0] / (n as f64).sqrt()).cos().powi(n as i32);
            worst_cos = worst_cos.max((v - Complex64::new(want, 0.0)).norm());
        }
    }
    outcome(
        e10 < e5 && e10 <= 0.2 && worst_cos <= 1e-10,
        format!("max CF error N=5 {e5:.4}, N=10 {e10:.4} (bound 0.2); max |CF − cos(t/√N)^N| {worst_cos:.2e}"),
    )
}

fn criterion_8() -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_oracle = 0.0f64;
    let exp_real = |m: &Matrix| h(m.clone()).apply_function(|v| Complex64::new(v.exp(), 0.0)).unwrap();
    for i in 0..20u64 {
        let s = mix(SEED, 800 + i);
        let (a, b) = (presets::random_hermitian(3, mix(s, 0)), presets::random_hermitian(3, mix(s, 1)));
        let c = cint_check(&a, &b, 40).unwrap();
        worst = worst.max(c.error);
        // Spectral exponentials as an independent check of the defect side.
        let oracle = &(&exp_real(&a) * &exp_real(&b)) - &exp_real(&(&a + &b));
        worst_oracle = worst_oracle.max(max_abs_diff(&oracle, &c.defect));
    }
    let mut commuting = 0.0f64;
    for i in 0..10u64 {
        let a = presets::random_hermitian(3, mix(SEED, 900 + i));
        let b = &scale(&(&a * &a), Complex64::new(0.5, 0.0)) - &scale(&a, Complex64::new(0.25, 0.0));
        let c = cint_check(&a, &b, 40).unwrap();
        commuting = commuting.max(max_abs(&c.defect)).max(max_abs(&c.integral));
    }
    outcome(
        worst <= 1e-6 && worst_oracle <= 1e-12 && commuting <= 1e-12,
        format!("max entrywise quadrature error {worst:.2e}, defect vs spectral oracle {worst_oracle:.2e}, commuting pairs {commuting:.2e}"),
    )
}

fn criterion_9() -> Outcome {
    let mut min_slack = f64::INFINITY;
    for i in 0..100u64 {
        let k = [2, 3, 4][(i % 3) as usize];
        let s = mix(SEED, 9000 + i);
        let ops: Vec<HermitianOperator> = (0..3).map(|j| h(presets::random_hermitian(k, mix(s, j)))).collect();
        let refs: Vec<&HermitianOperator> = ops.iter().collect();
        let (lhs, rhs) = spec_bound_check(&TraceState::tracial(k), &refs).unwrap();
        min_slack = min_slack.min(rhs - lhs);
    }
    let mut worst_unitary = 0.0f64;
    for i in 0..100u64 {
        let k = [2, 3, 4][(i % 3) as usize];
        let s = mix(SEED, 9500 + i);
        let u = presets::random_unitary(k, mix(s, 0));
        let a = presets::random_hermitian(k, mix(s, 1));
        let rho = TraceState::tracial(k);
        worst_unitary = worst_unitary.max((rho.gns_norm(&(&u * &a)).unwrap() - rho.gns_norm(&a).unwrap()).abs());
    }
    outcome(
        min_slack >= -1e-12 && worst_unitary <= 1e-10,
        format!("min slack {min_slack:.3e}; max |‖UA‖ − ‖A‖| {worst_unitary:.2e}"),
    )
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let (x, z) = paulis();
    let p = parse_polynomial("A1*A2 + A2*A1", 2).unwrap();
    let d = decompose_to_power_sums(&p, &DecomposeOptions::default()).unwrap();
    let t: Vec<f64> = d.terms().iter().map(|term| term.coeff.to_complex64().re).collect();
    let mut points = Vec::new();
    let mut bound_ok = true;
    let mut cells = Vec::new();
    for n in 2..=12usize {
        let c = reorder_check(&d, &t, &[&x, &z], &TensorSystem::new(2, n).unwrap()).unwrap();
        bound_ok &= c.defect <= c.spec_bound + 1e-10;
        points.push((n as f64, c.defect));
        cells.push(format!("{n}:{:.4}", c.defect));
    }
    let s = slope(&points);
    outcome(
        s <= -0.35,
        format!(
            "log-log slope {s:.4} (bound −0.35); defects {}; commutator bound holds {bound_ok}; {:.0} s",
            cells.join(" "),
            start.elapsed().as_secs_f64()
        ),
    )
}

fn criterion_11() -> Outcome {
    let (x, z) = paulis();
    let rho = TraceState::tracial(2);
    let mut worst = 0.0f64;
    for n in 1..=6usize {
        let dense = [dense_average(x.matrix(), n), dense_average(z.matrix(), n)];
        for len in 1..=4 {
            for w in words(2, len) {
                let mut prod = identity(dense[0].nrows());
                for &l in &w {
                    prod = &prod * &dense[l as usize];
                }
                let got = exact_mixed_moment(&rho, &[&x, &z], &MomentWord(w.clone()), n as u64).unwrap();
                worst = worst.max((got - normalized_trace(&prod)).norm());
            }
        }
    }
    // N-fold convolution: ρ^{⊗N}(e^{itÃ}) = ρ(e^{itA/√N})^N.
    let a = h(presets::random_hermitian(3, mix(SEED, 11)));
    let mu = spectral_measure(&TraceState::tracial(3), &a).unwrap();
    let mut worst_conv = 0.0f64;
    for n in 1..=6usize {
        let ts: Vec<Vec<f64>> = [-4.0, -1.3, 0.2, 0.9, 3.7].iter().map(|&t| vec![t]).collect();
        let got = ordered_cf_tensor(&[&a], &ts, &TensorSystem::new(3, n).unwrap()).unwrap();
        for (t, v) in ts.iter().zip(got) {
            let want = mu.characteristic(t[0] / (n as f64).sqrt()).powi(n as i32);
            worst_conv = worst_conv.max((v - want).norm());
        }
    }
    outcome(
        worst <= 1e-9 && worst_conv <= 1e-10,
        format!("moments vs kron tensors max diff {worst:.2e} (30 words, N ≤ 6); convolution identity {worst_conv:.2e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 11] = [
        (1, "power-sum round trip", criterion_1),
        (2, "merge coefficient anchor", criterion_2),
        (3, "commutator decay anchor", criterion_3),
        (4, "exact fourth moment anchor", criterion_4),
        (5, "Wick limit at rate 1/N", criterion_5),
        (6, "spectral CLT at N = 12", criterion_6),
        (7, "ordered joint CF convergence", criterion_7),
        (8, "commutator integral quadrature", criterion_8),
        (9, "product exponential inequality", criterion_9),
        (10, "reorder defect decay", criterion_10),
        (11, "moment and convolution oracles", criterion_11),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {id:>2} {} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {failed} failing");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
