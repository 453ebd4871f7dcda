//! Configuration, experiment orchestration and CSV output for the `nclab`
//! command line.
//!
//! Every runner validates its configuration and computes all rows before
//! touching the output directory, so a failed run leaves no partial CSV.
//! Rows are produced in `n_list` order whatever the worker count.

mod config;

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use num_complex::Complex64;
use serde_json::{json, Value};

pub use config::{
    load_config, parse_rational, AlgebraConfig, Caps, DecayConfig, ExperimentConfig, LemmaConfig, MatrixSpec,
    OjcfConfig, OutputConfig, ReorderConfig,
};

use crate::error::{Error, Result};
use crate::gaussian::{covariance_from_state, ks_distance, sample_pushforward};
use crate::matalg::{cint_check, max_abs, presets, spec_bound_check, HermitianOperator, TraceState};
use crate::moments::{convergence_table_with_cap, MomentEngine};
use crate::ncpoly::{decompose_to_power_sums, parse_polynomial, DecomposeOptions, PowerSumDecomposition};
use crate::seed::mix;
use crate::tensorlab::{clt_spectrum, commutator_norm, ordered_cf_tensor, reorder_check, TensorSystem};

pub const SWEEP_HEADER: [&str; 7] = ["experiment_id", "N", "dim", "ks", "moment2_gap", "moment4_gap", "runtime_ms"];
pub const DECAY_HEADER: [&str; 7] = ["experiment_id", "N", "alpha", "beta", "gns_norm", "ratio_prev", "runtime_ms"];
pub const REORDER_HEADER: [&str; 5] = ["experiment_id", "N", "defect", "spec_bound", "runtime_ms"];
pub const OJCF_HEADER: [&str; 9] =
    ["experiment_id", "N", "t1", "t2", "re_cf", "im_cf", "gauss_limit", "abs_err", "runtime_ms"];
pub const LEMMAS_HEADER: [&str; 9] = ["experiment_id", "check", "dim", "seed", "lhs", "rhs", "defect", "pass", "runtime_ms"];

/// Slack allowed on the product-exponential inequality.
pub const SPEC_SLACK: f64 = 1e-12;
/// Tolerance on `‖UA‖_ρ = ‖A‖_ρ`.
pub const UNITARY_TOL: f64 = 1e-10;

/// Execution options shared by every runner.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker count, at least 1.
    pub jobs: usize,
    /// Overrides the configured output directory.
    pub out: Option<PathBuf>,
}

/// Outcome of one experiment run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub experiment: &'static str,
    pub path: PathBuf,
    pub rows: usize,
    /// Least-squares slope of the headline metric against `N` on log-log
    /// axes, over strictly positive values.
    pub fitted_slope: Option<f64>,
    /// Largest violation of the checked bound; positive means a failure.
    pub max_violation: Option<f64>,
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.6e}"));
        write!(
            f,
            "{}: {} rows -> {}; fitted slope {}; max violation {}",
            self.experiment,
            self.rows,
            self.path.display(),
            self.fitted_slope.map_or_else(|| "n/a".to_string(), |x| format!("{x:.4}")),
            opt(self.max_violation)
        )
    }
}

/// Decomposition together with its exact round-trip flag.
#[derive(Clone, Debug)]
pub struct DecomposeReport {
    pub decomposition: PowerSumDecomposition,
    pub round_trip_exact: bool,
}

impl DecomposeReport {
    pub fn to_json(&self) -> Value {
        let mut v = self.decomposition.to_json();
        v["round_trip"] = json!(if self.round_trip_exact { "exact" } else { "mismatch" });
        v
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in self.decomposition.terms() {
            out.push_str(&format!("({}) * ({})^{}\n", t.coeff, t.base, t.exponent));
        }
        out.push_str(&format!(
            "terms: {}\nself_adjoint: {}\nround_trip: {}\n",
            self.decomposition.terms().len(),
            self.decomposition.self_adjoint(),
            if self.round_trip_exact { "exact" } else { "mismatch" }
        ));
        out
    }
}

/// Parses `poly` over `a` generators and decomposes it into power sums.
pub fn run_decompose(poly: &str, a: usize, opts: &DecomposeOptions, require_sa: bool) -> Result<DecomposeReport> {
    if a == 0 {
        return Err(Error::Config("generator count must be at least 1".into()));
    }
    let p = parse_polynomial(poly, a)?;
    if require_sa && !p.is_self_adjoint() {
        return Err(Error::InvalidInput("polynomial is not self-adjoint".into()));
    }
    let decomposition = decompose_to_power_sums(&p, opts)?;
    let round_trip_exact = decomposition.expand() == p.with_generators(decomposition.generators());
    Ok(DecomposeReport { decomposition, round_trip_exact })
}

/// Least-squares slope of `log y` against `log x` over points with
/// `x, y > 0`; `None` with fewer than two such points.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite()).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

/// Applies `f` to every item on `jobs` workers, keeping input order.
fn par_map<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> Result<R> + Sync) -> Result<Vec<R>> {
    let jobs = jobs.max(1).min(items.len().max(1));
    if jobs == 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<R>>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                slots.lock().expect("result slots")[i] = Some(r);
            });
        }
    });
    slots.into_inner().expect("result slots").into_iter().map(|r| r.expect("every slot filled")).collect()
}

fn timed<R>(f: impl FnOnce() -> Result<R>) -> Result<(R, u128)> {
    let start = Instant::now();
    let r = f()?;
    Ok((r, start.elapsed().as_millis()))
}

fn write_csv(dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(path)
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Internal(format!("csv: {other:?}")),
    }
}

fn tensor_systems(cfg: &ExperimentConfig) -> Result<Vec<TensorSystem>> {
    cfg.n_list.iter().map(|&n| TensorSystem::with_cap(cfg.algebra.dim, n, cfg.caps.dim)).collect()
}

fn pair<'a>(ops: &'a [HermitianOperator], p: [usize; 2]) -> [&'a HermitianOperator; 2] {
    [&ops[p[0] - 1], &ops[p[1] - 1]]
}

fn max_opt(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    values.into_iter().fold(None, |m, v| Some(m.map_or(v, |m: f64| m.max(v))))
}

/// KS distance of the finite-N spectral measure of `p(Ã⃗)` to the Gaussian
/// pushforward, with order-2 and order-4 moment gaps, per `N`.
pub fn run_clt_sweep(cfg: &ExperimentConfig, run: &RunOptions) -> Result<RunReport> {
    let ops = cfg.operators()?;
    let refs: Vec<&HermitianOperator> = ops.iter().collect();
    let p = cfg.polynomial()?;
    let systems = tensor_systems(cfg)?;
    let longest = 4 * p.degree();
    if longest > cfg.caps.partition {
        return Err(Error::PartitionCap { len: longest, cap: cfg.caps.partition });
    }
    let rho = TraceState::tracial(cfg.algebra.dim);
    MomentEngine::new(&rho, &refs)?.require_mean_zero()?;
    if !p.is_self_adjoint() {
        return Err(Error::InvalidInput("sweep needs a self-adjoint polynomial".into()));
    }

    let mut rows = Vec::new();
    let mut ks_points = Vec::new();
    let mut max_gap: Option<f64> = None;
    if !systems.is_empty() {
        let cov = covariance_from_state(&rho, &refs)?;
        let samples = sample_pushforward(&p, &cov, cfg.samples, cfg.seed, run.jobs)?;
        let ns: Vec<u64> = cfg.n_list.iter().map(|&n| n as u64).collect();
        let gaps = convergence_table_with_cap(&rho, &refs, &p, &[2, 4], &ns, cfg.caps.partition)?;
        let results = par_map(&systems, run.jobs, |sys| {
            timed(|| {
                let spectrum = clt_spectrum(&p, &refs, sys)?;
                ks_distance(&spectrum, &samples)
            })
        })?;
        for (i, (sys, (ks, ms))) in systems.iter().zip(results).enumerate() {
            let (g2, g4) = (gaps[i].gap, gaps[ns.len() + i].gap);
            max_gap = max_opt(max_gap.into_iter().chain([g2.abs(), g4.abs()]));
            ks_points.push((sys.copies() as f64, ks));
            rows.push(vec![
                cfg.experiment_id.clone(),
                sys.copies().to_string(),
                sys.dim().to_string(),
                ks.to_string(),
                g2.to_string(),
                g4.to_string(),
                ms.to_string(),
            ]);
        }
    }
    let path = write_csv(&cfg.output_dir(run.out.as_deref()), "clt_sweep.csv", &SWEEP_HEADER, &rows)?;
    Ok(RunReport {
        experiment: "sweep",
        path,
        rows: rows.len(),
        fitted_slope: loglog_slope(&ks_points),
        max_violation: max_gap,
    })
}

/// `‖[Ã^α, B̃^β]‖` per `N` with the ratio to the previous row.
pub fn run_commutator_decay(cfg: &ExperimentConfig, run: &RunOptions) -> Result<RunReport> {
    let ops = cfg.operators()?;
    let [a, b] = pair(&ops, cfg.decay.pair);
    let systems = tensor_systems(cfg)?;
    let (alpha, beta) = (cfg.decay.alpha, cfg.decay.beta);
    let results = par_map(&systems, run.jobs, |sys| timed(|| commutator_norm(a, b, alpha, beta, sys)))?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    let mut prev: Option<f64> = None;
    for (sys, (norm, ms)) in systems.iter().zip(results) {
        points.push((sys.copies() as f64, norm));
        rows.push(vec![
            cfg.experiment_id.clone(),
            sys.copies().to_string(),
            alpha.to_string(),
            beta.to_string(),
            norm.to_string(),
            prev.map_or_else(String::new, |p| (norm / p).to_string()),
            ms.to_string(),
        ]);
        prev = Some(norm);
    }
    let path = write_csv(&cfg.output_dir(run.out.as_deref()), "decay.csv", &DECAY_HEADER, &rows)?;
    Ok(RunReport { experiment: "decay", path, rows: rows.len(), fitted_slope: loglog_slope(&points), max_violation: None })
}

/// Reorder defect of the power-sum decomposition and its commutator bound
/// per `N`. The violation is `defect − spec_bound`.
pub fn run_reorder_decay(cfg: &ExperimentConfig, run: &RunOptions) -> Result<RunReport> {
    let ops = cfg.operators()?;
    let refs: Vec<&HermitianOperator> = ops.iter().collect();
    let p = cfg.polynomial()?;
    if !p.is_self_adjoint() {
        return Err(Error::InvalidInput("reorder needs a self-adjoint polynomial".into()));
    }
    let systems = tensor_systems(cfg)?;
    let d = decompose_to_power_sums(&p, &cfg.decompose_options()?)?;
    let t = reorder_parameters(cfg, &d)?;
    let results = par_map(&systems, run.jobs, |sys| timed(|| reorder_check(&d, &t, &refs, sys)))?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    let mut violation: Option<f64> = None;
    for (sys, (check, ms)) in systems.iter().zip(results) {
        points.push((sys.copies() as f64, check.defect));
        violation = max_opt(violation.into_iter().chain([check.defect - check.spec_bound]));
        rows.push(vec![
            cfg.experiment_id.clone(),
            sys.copies().to_string(),
            check.defect.to_string(),
            check.spec_bound.to_string(),
            ms.to_string(),
        ]);
    }
    let path = write_csv(&cfg.output_dir(run.out.as_deref()), "reorder.csv", &REORDER_HEADER, &rows)?;
    Ok(RunReport {
        experiment: "reorder",
        path,
        rows: rows.len(),
        fitted_slope: loglog_slope(&points),
        max_violation: violation,
    })
}

/// `t_n` for the reorder experiment: the configured list, or `t_scale`
/// times the real decomposition coefficients.
pub fn reorder_parameters(cfg: &ExperimentConfig, d: &PowerSumDecomposition) -> Result<Vec<f64>> {
    match &cfg.reorder.t {
        Some(t) if t.len() != d.terms().len() => Err(Error::Config(format!(
            "reorder.t has {} entries, the decomposition has {} terms",
            t.len(),
            d.terms().len()
        ))),
        Some(t) => Ok(t.clone()),
        None => Ok(d.terms().iter().map(|term| cfg.reorder.t_scale * term.coeff.to_complex64().re).collect()),
    }
}

/// Ordered characteristic function of a generator pair on the configured
/// grid against `exp(−t⃗·M t⃗/2)`, `M_{jk} = ρ(A_jA_k)`. `runtime_ms` is
/// the time for the whole grid at that `N`.
pub fn run_ordered_cf(cfg: &ExperimentConfig, run: &RunOptions) -> Result<RunReport> {
    let ops = cfg.operators()?;
    let [a, b] = pair(&ops, cfg.ojcf.pair);
    let refs = [a, b];
    let systems = tensor_systems(cfg)?;
    let rho = TraceState::tracial(cfg.algebra.dim);
    MomentEngine::new(&rho, &refs)?.require_mean_zero()?;
    let cov = covariance_from_state(&rho, &refs)?;
    let axis = cfg.ojcf.grid();
    let grid: Vec<Vec<f64>> = axis.iter().flat_map(|&t1| axis.iter().map(move |&t2| vec![t1, t2])).collect();
    let limit: Vec<f64> = grid
        .iter()
        .map(|t| {
            let q: f64 = (0..2).flat_map(|j| (0..2).map(move |k| (j, k))).map(|(j, k)| t[j] * cov.get(j, k) * t[k]).sum();
            (-q / 2.0).exp()
        })
        .collect();
    let results = par_map(&systems, run.jobs, |sys| timed(|| ordered_cf_tensor(&refs, &grid, sys)))?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    let mut worst: Option<f64> = None;
    for (sys, (values, ms)) in systems.iter().zip(results) {
        let mut max_err = 0.0f64;
        for ((t, v), g) in grid.iter().zip(&values).zip(&limit) {
            let err = (v - Complex64::new(*g, 0.0)).norm();
            max_err = max_err.max(err);
            rows.push(vec![
                cfg.experiment_id.clone(),
                sys.copies().to_string(),
                t[0].to_string(),
                t[1].to_string(),
                v.re.to_string(),
                v.im.to_string(),
                g.to_string(),
                err.to_string(),
                ms.to_string(),
            ]);
        }
        points.push((sys.copies() as f64, max_err));
        worst = max_opt(worst.into_iter().chain([max_err]));
    }
    let path = write_csv(&cfg.output_dir(run.out.as_deref()), "ojcf.csv", &OJCF_HEADER, &rows)?;
    Ok(RunReport { experiment: "ojcf", path, rows: rows.len(), fitted_slope: loglog_slope(&points), max_violation: worst })
}

/// One lemma check row before formatting.
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaRow {
    pub check: &'static str,
    pub dim: usize,
    /// `None` for checks on the configured generators.
    pub seed: Option<u64>,
    pub lhs: f64,
    pub rhs: f64,
    pub defect: f64,
    pub pass: bool,
    pub runtime_ms: u128,
    /// Amount by which the check's tolerance is exceeded.
    violation: f64,
}

fn cint_row(a: &crate::matalg::Matrix, b: &crate::matalg::Matrix, seed: Option<u64>, l: &LemmaConfig) -> Result<LemmaRow> {
    let (c, ms) = timed(|| cint_check(a, b, l.nodes))?;
    Ok(LemmaRow {
        check: "cint",
        dim: a.nrows(),
        seed,
        lhs: max_abs(&c.defect),
        rhs: max_abs(&c.integral),
        defect: c.error,
        pass: c.error <= l.cint_tol,
        runtime_ms: ms,
        violation: c.error - l.cint_tol,
    })
}

fn spec_row(ops: &[&HermitianOperator], seed: Option<u64>) -> Result<LemmaRow> {
    let dim = ops[0].dim();
    let ((lhs, rhs), ms) = timed(|| spec_bound_check(&TraceState::tracial(dim), ops))?;
    Ok(LemmaRow {
        check: "spec",
        dim,
        seed,
        lhs,
        rhs,
        defect: lhs - rhs,
        pass: lhs - rhs <= SPEC_SLACK,
        runtime_ms: ms,
        violation: lhs - rhs - SPEC_SLACK,
    })
}

fn unitary_row(dim: usize, seed: u64) -> Result<LemmaRow> {
    let ((lhs, rhs), ms) = timed(|| {
        let rho = TraceState::tracial(dim);
        let u = presets::random_unitary(dim, mix(seed, 0));
        let a = presets::random_hermitian(dim, mix(seed, 1));
        Ok((rho.gns_norm(&(&u * &a))?, rho.gns_norm(&a)?))
    })?;
    let defect = (lhs - rhs).abs();
    Ok(LemmaRow {
        check: "gns_unitary",
        dim,
        seed: Some(seed),
        lhs,
        rhs,
        defect,
        pass: defect <= UNITARY_TOL,
        runtime_ms: ms,
        violation: defect - UNITARY_TOL,
    })
}

/// Rows of the lemma experiment: the commutator integral for every pair of
/// configured generators and the product-exponential inequality on all of
/// them, then the seeded random checks. Item `i` of seeded check `c` uses
/// seed `mix(master, 1_000_000·c + i)`; its operands come from streams
/// `mix(seed, 0)`, `mix(seed, 1)`, ….
pub fn lemma_rows(cfg: &ExperimentConfig, jobs: usize) -> Result<Vec<LemmaRow>> {
    let ops = cfg.operators()?;
    let refs: Vec<&HermitianOperator> = ops.iter().collect();
    let l = &cfg.lemmas;
    let mut rows = Vec::new();
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            rows.push(cint_row(ops[i].matrix(), ops[j].matrix(), None, l)?);
        }
    }
    if refs.len() >= 2 {
        rows.push(spec_row(&refs, None)?);
    }
    let seed_of = |check: u64, i: usize| mix(cfg.seed, 1_000_000 * check + i as u64);
    let items: Vec<(u64, usize)> = (0..l.pairs)
        .map(|i| (0, i))
        .chain((0..l.triples).map(|i| (1, i)))
        .chain((0..l.unitary_pairs).map(|i| (2, i)))
        .collect();
    rows.extend(par_map(&items, jobs, |&(check, i)| {
        let seed = seed_of(check, i);
        match check {
            0 => {
                let a = presets::random_hermitian(l.pair_dim, mix(seed, 0));
                let b = presets::random_hermitian(l.pair_dim, mix(seed, 1));
                cint_row(&a, &b, Some(seed), l)
            }
            1 => {
                let dim = l.triple_dims[i % l.triple_dims.len()];
                let ops: Vec<HermitianOperator> = (0..3)
                    .map(|s| HermitianOperator::new(presets::random_hermitian(dim, mix(seed, s))))
                    .collect::<Result<_>>()?;
                let refs: Vec<&HermitianOperator> = ops.iter().collect();
                spec_row(&refs, Some(seed))
            }
            _ => unitary_row(l.unitary_dim, seed),
        }
    })?);
    Ok(rows)
}

/// Lemma checks written to `lemmas.csv`.
pub fn run_lemma_checks(cfg: &ExperimentConfig, run: &RunOptions) -> Result<RunReport> {
    let rows = lemma_rows(cfg, run.jobs)?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                cfg.experiment_id.clone(),
                r.check.to_string(),
                r.dim.to_string(),
                r.seed.map_or_else(String::new, |s| s.to_string()),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.defect.to_string(),
                r.pass.to_string(),
                r.runtime_ms.to_string(),
            ]
        })
        .collect();
    let path = write_csv(&cfg.output_dir(run.out.as_deref()), "lemmas.csv", &LEMMAS_HEADER, &table)?;
    Ok(RunReport {
        experiment: "lemmas",
        path,
        rows: rows.len(),
        fitted_slope: None,
        max_violation: max_opt(rows.iter().map(|r| r.violation)),
    })
}
