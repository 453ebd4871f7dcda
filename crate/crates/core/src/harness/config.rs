use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::matalg::{from_rows, presets, HermitianOperator, Matrix};
use crate::moments::DEFAULT_PARTITION_CAP;
use crate::ncpoly::pbw::DEFAULT_DEGREE_CAP;
use crate::ncpoly::powsum::DEFAULT_TERM_CAP;
use crate::ncpoly::{parse_polynomial, DecomposeOptions, NcPolynomial};
use crate::tensorlab::DEFAULT_DIM_CAP;

/// Experiment configuration, read from TOML.
///
/// ```toml
/// experiment_id = "anticommutator"
/// seed = 1
/// polynomial = "A1*A2 + A2*A1"
/// n_list = [2, 4, 8, 12]
///
/// [algebra]
/// dim = 2
/// generators = ["pauli_x", "pauli_z"]
/// ```
///
/// A generator is either a preset name or a row-major list of `dim²`
/// `[re, im]` pairs. Every omitted key takes the default noted on its field.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Default `"run"`.
    #[serde(default = "default_id")]
    pub experiment_id: String,
    /// Master seed, default 0.
    #[serde(default)]
    pub seed: u64,
    pub algebra: AlgebraConfig,
    /// Required by `sweep` and `reorder`.
    #[serde(default)]
    pub polynomial: Option<String>,
    /// Merge ratio as a rational string, default `"2"`.
    #[serde(default = "default_q")]
    pub q: String,
    /// Default empty.
    #[serde(default)]
    pub n_list: Vec<usize>,
    /// Monte Carlo sample count for `sweep`, default 100000.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default)]
    pub decay: DecayConfig,
    #[serde(default)]
    pub reorder: ReorderConfig,
    #[serde(default)]
    pub ojcf: OjcfConfig,
    #[serde(default)]
    pub lemmas: LemmaConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraConfig {
    pub dim: usize,
    pub generators: Vec<MatrixSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Preset(String),
    Entries(Vec<[f64; 2]>),
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Caps {
    /// Default 5.
    pub degree: usize,
    /// Default 10000.
    pub terms: usize,
    /// Limit on `dim^N`, default 8192.
    pub dim: usize,
    /// Longest moment word, default 10.
    pub partition: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { degree: DEFAULT_DEGREE_CAP, terms: DEFAULT_TERM_CAP, dim: DEFAULT_DIM_CAP, partition: DEFAULT_PARTITION_CAP }
    }
}

/// `‖[Ã^α, B̃^β]‖` with `A`, `B` the generators at 1-based positions
/// `pair`. Defaults: `alpha = beta = 1`, `pair = [1, 2]`.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecayConfig {
    pub alpha: u32,
    pub beta: u32,
    pub pair: [usize; 2],
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig { alpha: 1, beta: 1, pair: [1, 2] }
    }
}

/// Parameters `t_n` of the reorder experiment: `t` verbatim when given,
/// otherwise `t_scale` times the decomposition coefficients. Default
/// `t_scale = 1`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReorderConfig {
    pub t: Option<Vec<f64>>,
    pub t_scale: f64,
}

impl Default for ReorderConfig {
    fn default() -> Self {
        ReorderConfig { t: None, t_scale: 1.0 }
    }
}

/// Square grid `{min, min+step, …, max}²` over the generator pair `pair`.
/// Defaults: `min = −2`, `max = 2`, `step = 0.5`, `pair = [1, 2]`.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OjcfConfig {
    pub min: f64,
    pub max: f64,
    pub step: f64,
    pub pair: [usize; 2],
}

impl Default for OjcfConfig {
    fn default() -> Self {
        OjcfConfig { min: -2.0, max: 2.0, step: 0.5, pair: [1, 2] }
    }
}

impl OjcfConfig {
    pub fn grid(&self) -> Vec<f64> {
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.min + i as f64 * self.step).collect()
    }
}

/// Seeded lemma checks on top of those run on the configured generators.
/// Defaults: 20 pairs of dimension 3, 100 triples cycling through
/// dimensions 2, 3, 4, 100 unitary pairs of dimension 3, 40 quadrature
/// nodes, entrywise quadrature tolerance 1e−6.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LemmaConfig {
    pub pairs: usize,
    pub pair_dim: usize,
    pub triples: usize,
    pub triple_dims: Vec<usize>,
    pub unitary_pairs: usize,
    pub unitary_dim: usize,
    pub nodes: usize,
    pub cint_tol: f64,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        LemmaConfig {
            pairs: 20,
            pair_dim: 3,
            triples: 100,
            triple_dims: vec![2, 3, 4],
            unitary_pairs: 100,
            unitary_dim: 3,
            nodes: crate::matalg::DEFAULT_CINT_NODES,
            cint_tol: 1e-6,
        }
    }
}

/// Output directory, default the working directory. `--out` overrides it.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

fn default_id() -> String {
    "run".into()
}

fn default_q() -> String {
    "2".into()
}

fn default_samples() -> usize {
    100_000
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    text.parse()
}

/// Parses `"p"` or `"p/q"` into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || config_err(format!("bad rational {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

impl ExperimentConfig {
    /// Structural checks that need no heavy computation. Experiment runners
    /// add their own before producing output.
    pub fn validate(&self) -> Result<()> {
        if self.experiment_id.is_empty() || self.experiment_id.contains([',', '"', '\n', '\r']) {
            return Err(config_err("experiment_id must be non-empty and free of commas, quotes and newlines"));
        }
        if self.algebra.dim == 0 {
            return Err(config_err("algebra.dim must be at least 1"));
        }
        if self.algebra.generators.is_empty() {
            return Err(config_err("algebra.generators is empty"));
        }
        self.operators()?;
        if let Some(p) = &self.polynomial {
            parse_polynomial(p, self.algebra.generators.len())?;
        }
        if parse_rational(&self.q)? <= BigRational::one() {
            return Err(config_err(format!("q = {} must exceed 1", self.q)));
        }
        if self.n_list.contains(&0) {
            return Err(config_err("n_list entries must be at least 1"));
        }
        if self.samples == 0 {
            return Err(config_err("samples must be at least 1"));
        }
        let a = self.algebra.generators.len();
        for (name, [i, j]) in [("decay.pair", self.decay.pair), ("ojcf.pair", self.ojcf.pair)] {
            if i == 0 || j == 0 || i > a || j > a {
                return Err(config_err(format!("{name} = [{i}, {j}] outside 1..={a}")));
            }
        }
        if self.reorder.t.as_ref().is_some_and(|t| t.iter().any(|x| !x.is_finite())) || !self.reorder.t_scale.is_finite() {
            return Err(config_err("reorder parameters must be finite"));
        }
        let g = &self.ojcf;
        if !(g.step > 0.0 && g.min.is_finite() && g.max.is_finite() && g.max >= g.min) {
            return Err(config_err("ojcf grid needs finite min ≤ max and step > 0"));
        }
        let l = &self.lemmas;
        if l.pair_dim == 0 || l.unitary_dim == 0 || l.triple_dims.contains(&0) {
            return Err(config_err("lemma dimensions must be at least 1"));
        }
        if l.triples > 0 && l.triple_dims.is_empty() {
            return Err(config_err("lemmas.triple_dims is empty"));
        }
        if l.nodes == 0 || !(l.cint_tol > 0.0) {
            return Err(config_err("lemmas.nodes and lemmas.cint_tol must be positive"));
        }
        Ok(())
    }

    /// Generator operators in configuration order.
    pub fn operators(&self) -> Result<Vec<HermitianOperator>> {
        let k = self.algebra.dim;
        self.algebra
            .generators
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                let m = match spec {
                    MatrixSpec::Preset(name) => presets::by_name(name)?,
                    MatrixSpec::Entries(e) => entries_matrix(e, k)?,
                };
                if m.nrows() != k {
                    return Err(config_err(format!("generator {} has dimension {}, algebra.dim is {k}", i + 1, m.nrows())));
                }
                HermitianOperator::new(m)
            })
            .collect()
    }

    pub fn polynomial(&self) -> Result<NcPolynomial> {
        let text = self.polynomial.as_deref().ok_or_else(|| config_err("polynomial is required"))?;
        parse_polynomial(text, self.algebra.generators.len())
    }

    pub fn decompose_options(&self) -> Result<DecomposeOptions> {
        Ok(DecomposeOptions { q: parse_rational(&self.q)?, degree_cap: self.caps.degree, term_cap: self.caps.terms })
    }

    /// `--out` when given, then `output.dir`, then the working directory.
    pub fn output_dir(&self, cli: Option<&Path>) -> PathBuf {
        cli.map(Path::to_path_buf).or_else(|| self.output.dir.clone()).unwrap_or_else(|| PathBuf::from("."))
    }
}

fn entries_matrix(e: &[[f64; 2]], k: usize) -> Result<Matrix> {
    if e.len() != k * k {
        return Err(config_err(format!("matrix literal has {} entries, expected {}", e.len(), k * k)));
    }
    let rows: Vec<Vec<Complex64>> =
        e.chunks(k).map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect()).collect();
    from_rows(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "[algebra]\ndim = 2\ngenerators = [\"pauli_x\", \"pauli_z\"]\n";

    #[test]
    fn defaults_and_literals() {
        let cfg: ExperimentConfig = BASE.parse().unwrap();
        assert_eq!(cfg.experiment_id, "run");
        assert_eq!(cfg.samples, 100_000);
        assert_eq!(cfg.caps.dim, 8192);
        assert_eq!(cfg.ojcf.grid().len(), 9);
        let lit = "[algebra]\ndim = 2\ngenerators = [[[1,0],[0,0],[0,0],[-1,0]], [[0,0],[0,-1],[0,1],[0,0]]]\n";
        let ops = lit.parse::<ExperimentConfig>().unwrap().operators().unwrap();
        assert_eq!(ops[1].matrix()[(0, 1)], Complex64::new(0.0, -1.0));
    }

    #[test]
    fn rejections() {
        let bad = [
            "[algebra]\ndim = 2\ngenerators = []\n".to_string(),
            "[algebra]\ndim = 3\ngenerators = [\"pauli_x\"]\n".into(),
            "[algebra]\ndim = 2\ngenerators = [[[0,0],[1,0],[0,0],[0,0]]]\n".into(),
            format!("{BASE}polynomial = \"A3\"\n"),
            format!("{BASE}q = \"1\"\n"),
            format!("{BASE}n_list = [0]\n"),
            format!("{BASE}unknown = 1\n"),
            format!("{BASE}[decay]\npair = [1, 3]\n"),
            "[algebra]\ndim = 2\ngenerators = [\"pauli_w\"]\n".into(),
        ];
        for text in bad {
            let err = text.parse::<ExperimentConfig>().unwrap_err();
            assert!(matches!(err, Error::Config(_) | Error::GeneratorOutOfRange { .. } | Error::NotHermitian { .. }), "{text}");
        }
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("5/2").unwrap(), BigRational::new(5.into(), 2.into()));
        assert_eq!(parse_rational(" 3 ").unwrap(), BigRational::from_integer(3.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
