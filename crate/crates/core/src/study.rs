//! Monte Carlo study of the bias and MSE of the six estimators.
//!
//! Every path is simulated from its own substream `(seed, global_index)` and
//! all requested estimators are evaluated on that same path. Paths are
//! processed in parallel and reduced in index order, so the output is
//! identical for any worker count.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{correct_mle, expected_mle, ForwardMapCache, QuadratureSpec};
use crate::bayes::{posterior_from_likelihood, PriorKind, PriorSpec};
use crate::bridge::{simulate, BridgeParams, Generator, TimeGrid};
use crate::error::{Error, Result};
use crate::rng::RngSeed;
use crate::stats::{mle_from_statistics, LogLikelihood, QuadratureRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Mle,
    Cmle,
    JeffreysMean,
    JeffreysMedian,
    UniformMean,
    UniformMedian,
}

impl Estimator {
    pub const ALL: [Estimator; 6] = [
        Estimator::Mle,
        Estimator::Cmle,
        Estimator::JeffreysMean,
        Estimator::JeffreysMedian,
        Estimator::UniformMean,
        Estimator::UniformMedian,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Estimator::Mle => "mle",
            Estimator::Cmle => "cmle",
            Estimator::JeffreysMean => "jeffreys_mean",
            Estimator::JeffreysMedian => "jeffreys_median",
            Estimator::UniformMean => "uniform_mean",
            Estimator::UniformMedian => "uniform_median",
        }
    }

    fn prior(&self) -> Option<PriorKind> {
        match self {
            Estimator::JeffreysMean | Estimator::JeffreysMedian => Some(PriorKind::Jeffreys),
            Estimator::UniformMean | Estimator::UniformMedian => Some(PriorKind::Uniform),
            _ => None,
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn default_alphas() -> Vec<f64> {
    vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0, 8.0, 10.0]
}
fn default_t() -> f64 {
    0.8
}
fn default_paths() -> usize {
    10_000
}
fn default_grid() -> usize {
    300
}
fn default_estimators() -> Vec<Estimator> {
    Estimator::ALL.to_vec()
}
fn default_seed() -> u64 {
    20140101
}
fn default_jeffreys_upper() -> f64 {
    PriorSpec::DEFAULT_JEFFREYS_UPPER
}
fn default_uniform_upper() -> f64 {
    PriorSpec::DEFAULT_UNIFORM_UPPER
}
fn default_posterior_tol() -> f64 {
    1e-6
}

/// Study definition; every field has a default so partial JSON configs work.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(rename = "T", default = "default_t")]
    pub observation_end: f64,
    #[serde(default = "default_paths")]
    pub n_paths: usize,
    /// Observation points per path, both endpoints included.
    #[serde(default = "default_grid")]
    pub n_grid: usize,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<Estimator>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub generator: Generator,
    #[serde(default)]
    pub rule: QuadratureRule,
    #[serde(default = "default_jeffreys_upper")]
    pub jeffreys_upper: f64,
    #[serde(default = "default_uniform_upper")]
    pub uniform_upper: f64,
    #[serde(default = "default_posterior_tol")]
    pub posterior_tol: f64,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            alphas: default_alphas(),
            observation_end: default_t(),
            n_paths: default_paths(),
            n_grid: default_grid(),
            estimators: default_estimators(),
            seed: default_seed(),
            generator: Generator::Exact,
            rule: QuadratureRule::Rectangle,
            jeffreys_upper: default_jeffreys_upper(),
            uniform_upper: default_uniform_upper(),
            posterior_tol: default_posterior_tol(),
            quadrature: QuadratureSpec::default(),
        }
    }
}

impl ExperimentConfig {
    /// 100,000 paths per alpha.
    pub fn full_scale() -> Self {
        Self {
            n_paths: 100_000,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::InvalidConfig("n_paths must be >= 1".into()));
        }
        if self.n_grid < 2 {
            return Err(Error::InvalidConfig("n_grid must be >= 2".into()));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
            return Err(Error::InvalidConfig(format!("alphas must be >= 0, got {a}")));
        }
        if !(self.observation_end > 0.0 && self.observation_end < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "T must lie in (0, 1), got {}",
                self.observation_end
            )));
        }
        if !(self.posterior_tol > 0.0) {
            return Err(Error::InvalidConfig("posterior_tol must be positive".into()));
        }
        self.quadrature.validate()?;
        PriorSpec::new(PriorKind::Jeffreys, self.jeffreys_upper, self.observation_end)?;
        PriorSpec::new(PriorKind::Uniform, self.uniform_upper, self.observation_end)?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Everything computed for one path. `estimates` is aligned with the
/// configured estimator list; `None` marks a degenerate path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathRecord {
    pub global_index: u64,
    pub alpha_true: f64,
    pub i_t: f64,
    pub x_t: f64,
    pub estimates: Vec<Option<f64>>,
    pub cmle_clamped: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub alpha_true: f64,
    pub estimator: Estimator,
    pub bias: f64,
    pub mse: f64,
    /// `sd(error) / sqrt(n)`; NaN when fewer than two paths survive.
    pub mc_se_bias: f64,
    pub mc_se_mse: f64,
    pub n_effective: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub rows: Vec<SummaryRow>,
    pub records: Vec<PathRecord>,
    pub degenerate: usize,
}

fn run_path(
    config: &ExperimentConfig,
    grid: &TimeGrid,
    priors: (&PriorSpec, &PriorSpec),
    alpha: f64,
    global_index: u64,
) -> Result<PathRecord> {
    let params = BridgeParams::new(alpha)?;
    let seed = RngSeed::new(config.seed, global_index);
    let path = simulate(config.generator, &params, grid, seed)?;
    let ll = LogLikelihood::from_path(&path, config.rule)?;
    let mut record = PathRecord {
        global_index,
        alpha_true: alpha,
        i_t: ll.i_t,
        x_t: path.terminal(),
        estimates: vec![None; config.estimators.len()],
        cmle_clamped: None,
    };
    let alpha_hat = match mle_from_statistics(ll.i_t, ll.x_t_sq_over_gap, config.observation_end) {
        Ok(a) => a,
        Err(Error::DegeneratePath) => return Ok(record),
        Err(e) => return Err(e),
    };
    let mut jeffreys = None;
    let mut uniform = None;
    for (slot, est) in record.estimates.iter_mut().zip(&config.estimators) {
        let value = match est {
            Estimator::Mle => alpha_hat,
            Estimator::Cmle => {
                let c = correct_mle(alpha_hat, config.observation_end, &config.quadrature)?;
                record.cmle_clamped = Some(c.status == crate::analytic::CorrectionStatus::ClampedAtZero);
                c.alpha_cmle
            }
            _ => {
                let (cache, spec) = match est.prior() {
                    Some(PriorKind::Jeffreys) => (&mut jeffreys, priors.0),
                    _ => (&mut uniform, priors.1),
                };
                if cache.is_none() {
                    *cache = Some(posterior_from_likelihood(spec, &ll, config.posterior_tol)?.summary);
                }
                let s = cache.as_ref().unwrap();
                match est {
                    Estimator::JeffreysMean | Estimator::UniformMean => s.mean,
                    _ => s.median,
                }
            }
        };
        *slot = Some(value);
    }
    Ok(record)
}

fn summarize(alpha: f64, estimator: Estimator, errors: &[f64]) -> SummaryRow {
    let n = errors.len();
    let nf = n as f64;
    let bias = errors.iter().sum::<f64>() / nf;
    let mse = errors.iter().map(|e| e * e).sum::<f64>() / nf;
    let (mc_se_bias, mc_se_mse) = if n < 2 {
        (f64::NAN, f64::NAN)
    } else {
        let var_e = errors.iter().map(|e| (e - bias).powi(2)).sum::<f64>() / (nf - 1.0);
        let var_e2 = errors.iter().map(|e| (e * e - mse).powi(2)).sum::<f64>() / (nf - 1.0);
        ((var_e / nf).sqrt(), (var_e2 / nf).sqrt())
    };
    SummaryRow {
        alpha_true: alpha,
        estimator,
        bias,
        mse,
        mc_se_bias,
        mc_se_mse,
        n_effective: n,
    }
}

/// Runs the study on `workers` threads (all cores when `None`).
pub fn run_experiment(config: &ExperimentConfig, workers: Option<usize>) -> Result<ExperimentOutput> {
    config.validate()?;
    let grid = TimeGrid::uniform(config.observation_end, config.n_grid)?;
    let jeffreys = PriorSpec::new(PriorKind::Jeffreys, config.jeffreys_upper, config.observation_end)?;
    let uniform = PriorSpec::new(PriorKind::Uniform, config.uniform_upper, config.observation_end)?;
    if config.estimators.contains(&Estimator::Cmle) {
        // build the shared forward map once, before the workers start
        ForwardMapCache::global().get(config.observation_end, &config.quadrature)?;
    }

    let n_paths = config.n_paths as u64;
    let total = config.alphas.len() as u64 * n_paths;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let records = pool.install(|| {
        (0..total)
            .into_par_iter()
            .map(|g| {
                let alpha = config.alphas[(g / n_paths) as usize];
                run_path(config, &grid, (&jeffreys, &uniform), alpha, g)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let degenerate = records.iter().filter(|r| r.estimates.iter().all(Option::is_none)).count();
    if !config.estimators.is_empty() && degenerate as f64 > 0.01 * total as f64 {
        return Err(Error::TooManyDegenerate {
            degenerate,
            total: total as usize,
        });
    }

    let mut rows = Vec::new();
    for (ai, &alpha) in config.alphas.iter().enumerate() {
        let chunk = &records[ai * config.n_paths..(ai + 1) * config.n_paths];
        for (ei, &est) in config.estimators.iter().enumerate() {
            let errors: Vec<f64> = chunk
                .iter()
                .filter_map(|r| r.estimates[ei])
                .map(|v| v - alpha)
                .collect();
            if !errors.is_empty() {
                rows.push(summarize(alpha, est, &errors));
            }
        }
    }
    Ok(ExperimentOutput {
        config: config.clone(),
        rows,
        records,
        degenerate,
    })
}

pub const SUMMARY_HEADER: [&str; 7] = [
    "alpha",
    "estimator",
    "bias",
    "mse",
    "mc_se_bias",
    "mc_se_mse",
    "n_effective",
];

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.alpha_true.to_string(),
            r.estimator.to_string(),
            r.bias.to_string(),
            r.mse.to_string(),
            r.mc_se_bias.to_string(),
            r.mc_se_mse.to_string(),
            r.n_effective.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-path stream: `index,alpha,i_t,x_T,<estimator columns...>`; empty cells
/// mark degenerate paths.
pub fn write_records_csv<W: Write>(
    records: &[PathRecord],
    estimators: &[Estimator],
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["index".to_string(), "alpha".into(), "i_t".into(), "x_T".into()];
    header.extend(estimators.iter().map(|e| e.to_string()));
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.global_index.to_string(),
            r.alpha_true.to_string(),
            r.i_t.to_string(),
            r.x_t.to_string(),
        ];
        row.extend(r.estimates.iter().map(|e| e.map(|v| v.to_string()).unwrap_or_default()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Empirical MLE mean against the exact expectation at one alpha.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticComparison {
    pub alpha: f64,
    pub empirical_mean: f64,
    pub analytic: f64,
    pub mc_se: f64,
    pub z_score: f64,
    /// Allowance for the discretization bias of the path integrals.
    pub allowance: f64,
    /// `|empirical - analytic| <= 4 mc_se + allowance`
    pub consistent: bool,
}

pub fn compare_to_analytic(
    rows: &[SummaryRow],
    observation_end: f64,
    spec: &QuadratureSpec,
    allowance: f64,
) -> Result<Vec<AnalyticComparison>> {
    rows.iter()
        .filter(|r| r.estimator == Estimator::Mle)
        .map(|r| {
            let analytic = expected_mle(r.alpha_true, observation_end, spec)?;
            let empirical_mean = r.alpha_true + r.bias;
            let diff = empirical_mean - analytic;
            Ok(AnalyticComparison {
                alpha: r.alpha_true,
                empirical_mean,
                analytic,
                mc_se: r.mc_se_bias,
                z_score: diff / r.mc_se_bias,
                allowance,
                consistent: diff.abs() <= 4.0 * r.mc_se_bias + allowance,
            })
        })
        .collect()
}
