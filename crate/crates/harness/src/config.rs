//! JSON experiment configuration.

use anyhow::{bail, ensure, Context, Result};
use lpdde::corpus::{history_corpus, CorpusOptions, HistorySpec};
use lpdde::nonlinear::RegistryParams;
use lpdde::{HistoryConfig, HistoryElement, Nonlinearity, QuadratureConfig};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub quadrature: Option<QuadratureSpec>,
    #[serde(default)]
    pub experiments: Vec<ExperimentConfig>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct QuadratureSpec {
    pub nodes_per_piece: usize,
    pub sup_samples_per_piece: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Solve,
    Dependence,
    Lipschitz,
    Smooth,
    Composition,
    Semiflow,
    Discontinuity,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: Kind,
    pub nonlinearity: NonlinearitySpec,
    #[serde(default = "one")]
    pub max_delay: f64,
    /// Delay `r`; defaults to `maxDelay`.
    #[serde(default)]
    pub delay: Option<f64>,
    #[serde(default = "two")]
    pub p: f64,
    /// Horizon `T`; defaults to `delay`.
    #[serde(default)]
    pub horizon: Option<f64>,
    /// Initial history; defaults to zero.
    #[serde(default)]
    pub history: Option<HistoryInput>,
    #[serde(default)]
    pub schedule: Option<Schedule>,
    /// Outer exponent for composition experiments.
    #[serde(default)]
    pub q: Option<f64>,
    /// Grid size of solve output.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Spot checks for solve experiments.
    #[serde(default)]
    pub checks: Vec<SpotCheck>,
    /// Random history pairs for lipschitz experiments.
    #[serde(default)]
    pub corpus: usize,
    /// `n` values for the discontinuity demonstration.
    #[serde(default)]
    pub n: Vec<u32>,
    /// Probe count for operator-norm lower bounds.
    #[serde(default = "default_probes")]
    pub probes: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    /// CSV file name; defaults to `<name>.csv`.
    #[serde(default)]
    pub output: Option<String>,
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn default_samples() -> usize {
    1001
}
fn default_probes() -> usize {
    16
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NonlinearitySpec {
    pub name: String,
    #[serde(default = "one_usize")]
    pub dim: usize,
    #[serde(default)]
    pub scale: Option<f64>,
    #[serde(default)]
    pub matrix: Option<Vec<f64>>,
    #[serde(default)]
    pub offset: Option<Vec<f64>>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub k: Option<u32>,
}

fn one_usize() -> usize {
    1
}

impl NonlinearitySpec {
    pub fn build(&self) -> Result<Nonlinearity> {
        let d = RegistryParams::default();
        let params = RegistryParams {
            dim: self.dim,
            scale: self.scale.unwrap_or(d.scale),
            matrix: self.matrix.clone(),
            offset: self.offset.clone(),
            beta: self.beta.unwrap_or(d.beta),
            k: self.k.unwrap_or(d.k),
        };
        Nonlinearity::from_registry(&self.name, &params).with_context(|| format!("nonlinearity `{}`", self.name))
    }
}

/// `{constant}`, `{breakpoints, pieces, endpointValue, pointValues}` or `{random}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum HistoryInput {
    Constant { constant: Vec<f64> },
    Pieces(PiecesSpec),
    Random { random: RandomSpec },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PiecesSpec {
    pub breakpoints: Vec<f64>,
    /// `pieces[i][j]`: monomial coefficients (in `t`) of component `j` on piece `i`.
    pub pieces: Vec<Vec<Vec<f64>>>,
    pub endpoint_value: Vec<f64>,
    #[serde(default)]
    pub point_values: Vec<(f64, Vec<f64>)>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RandomSpec {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "four")]
    pub pieces: usize,
    #[serde(default = "three")]
    pub degree: usize,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default)]
    pub continuous: bool,
}

fn three() -> usize {
    3
}
fn four() -> usize {
    4
}

impl HistoryInput {
    /// `stream` separates random histories drawn from the same seed.
    pub fn spec(&self, max_delay: f64, dim: usize, seed: u64, stream: u64) -> Result<HistorySpec> {
        let spec = match self {
            HistoryInput::Constant { constant } => HistorySpec::constant(max_delay, constant),
            HistoryInput::Pieces(p) => HistorySpec {
                breaks: p.breakpoints.clone(),
                coeffs: p.pieces.clone(),
                endpoint: p.endpoint_value.clone(),
                point_values: p.point_values.clone(),
            },
            HistoryInput::Random { random } => {
                let opts = CorpusOptions {
                    max_pieces: random.pieces,
                    max_degree: random.degree,
                    amplitude: random.amplitude,
                    continuous: random.continuous,
                    ..Default::default()
                };
                let seed = random.seed.unwrap_or(seed);
                history_corpus(max_delay, dim, stream as usize + 1, seed, &opts).swap_remove(stream as usize)
            }
        };
        ensure!(
            spec.dim() == dim,
            "history has dimension {}, nonlinearity has {dim}",
            spec.dim()
        );
        ensure!(
            spec.coeffs.iter().all(|c| c.len() == dim),
            "every piece needs {dim} coefficient arrays"
        );
        Ok(spec)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Schedule {
    /// Rows `k = 0..=k`.
    pub k: usize,
    /// Base perturbation (direction, second history or comparison history).
    pub perturbation: HistoryInput,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SpotCheck {
    pub t: f64,
    pub value: Vec<f64>,
    pub tolerance: f64,
}

impl SuiteConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: SuiteConfig = serde_json::from_str(text).context("invalid experiment config")?;
        Ok(cfg)
    }

    pub fn quadrature(&self) -> Result<QuadratureConfig> {
        match self.quadrature {
            None => Ok(QuadratureConfig::default()),
            Some(q) => Ok(QuadratureConfig::new(
                q.nodes_per_piece,
                q.sup_samples_per_piece,
                q.tolerance,
            )?),
        }
    }

    /// Checks every experiment before anything runs.
    pub fn validate(&self) -> Result<()> {
        self.quadrature()?;
        let mut names = std::collections::BTreeSet::new();
        for e in &self.experiments {
            ensure!(
                names.insert(e.output_file()),
                "duplicate output file `{}`",
                e.output_file()
            );
            e.validate(self.seed)
                .with_context(|| format!("experiment `{}`", e.name))?;
        }
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn delay(&self) -> f64 {
        self.delay.unwrap_or(self.max_delay)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon.unwrap_or(self.delay())
    }

    pub fn seed(&self, suite_seed: u64) -> u64 {
        self.seed.unwrap_or(suite_seed)
    }

    pub fn output_file(&self) -> String {
        self.output.clone().unwrap_or_else(|| format!("{}.csv", self.name))
    }

    pub fn history_config(&self) -> Result<HistoryConfig> {
        Ok(HistoryConfig::new(self.max_delay, self.p, self.nonlinearity.dim)?)
    }

    pub fn history(&self, suite_seed: u64) -> Result<HistoryElement> {
        let cfg = self.history_config()?;
        match &self.history {
            None => Ok(HistoryElement::zero(&cfg)),
            Some(h) => Ok(h.spec(self.max_delay, cfg.dim, self.seed(suite_seed), 0)?.build(&cfg)?),
        }
    }

    pub fn schedule(&self) -> Result<&Schedule> {
        self.schedule
            .as_ref()
            .context("this experiment kind needs a `schedule`")
    }

    pub fn perturbation(&self, suite_seed: u64, stream: u64) -> Result<HistoryElement> {
        let cfg = self.history_config()?;
        let s = self.schedule()?;
        Ok(s.perturbation
            .spec(self.max_delay, cfg.dim, self.seed(suite_seed), stream)?
            .build(&cfg)?)
    }

    fn validate(&self, suite_seed: u64) -> Result<()> {
        ensure!(!self.name.is_empty(), "experiment name must not be empty");
        ensure!(
            !self.output_file().contains(['/', '\\']),
            "output must be a bare file name"
        );
        let nl = self.nonlinearity.build()?;
        self.history(suite_seed)?;
        let r = self.delay();
        let t = self.horizon();
        ensure!(r > 0.0 && r <= self.max_delay, "delay must lie in (0, maxDelay]");
        ensure!(t > 0.0 && t.is_finite(), "horizon must be positive");
        match self.kind {
            Kind::Solve => {
                ensure!(self.samples >= 2, "solve needs at least two samples");
            }
            Kind::Dependence | Kind::Smooth | Kind::Semiflow => {
                ensure!(t <= r, "{:?} experiments need horizon <= delay", self.kind);
                ensure!(self.schedule()?.k >= 3, "schedules need k >= 3");
                self.perturbation(suite_seed, 1)?;
            }
            Kind::Lipschitz => {
                ensure!(t <= r, "lipschitz experiments need horizon <= delay");
                ensure!(nl.lip_f.is_some(), "`{}` is not globally Lipschitz", nl.name);
                if self.corpus == 0 {
                    self.perturbation(suite_seed, 1)?;
                }
            }
            Kind::Composition => {
                let q = self.q.context("composition experiments need `q`")?;
                lpdde::composition::CompositionContext::continuity(
                    nl.clone(),
                    q,
                    lpdde::composition::MeasureDomain::new(-self.max_delay, 0.0)?,
                )?;
                ensure!(self.schedule()?.k >= 3, "schedules need k >= 3");
                self.perturbation(suite_seed, 1)?;
            }
            Kind::Discontinuity => {
                ensure!(!self.n.is_empty(), "discontinuity needs a list `n`");
                ensure!(self.n.iter().all(|&n| n > 0), "n must be positive");
            }
        }
        if self.kind == Kind::Smooth {
            let alpha = nl
                .df_growth
                .with_context(|| format!("`{}` has no derivative growth certificate", nl.name))?
                .alpha;
            if self.p < alpha + 1.0 {
                bail!(
                    "smooth dependence needs p >= alpha + 1 = {}, got p = {}",
                    alpha + 1.0,
                    self.p
                );
            }
        }
        Ok(())
    }
}
