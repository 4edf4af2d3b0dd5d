//! Posterior inference for alpha under the Jeffreys and uniform priors.
//!
//! The log-likelihood is the quadratic `a alpha^2 + b alpha` with `a = -I_T/2`,
//! so the posterior is a prior-weighted Gaussian in alpha truncated to
//! `[0, support_upper]`. It is tabulated on panels that widen geometrically
//! away from the likelihood peak and integrated with composite Simpson.

use serde::{Deserialize, Serialize};

use crate::analytic::check_horizon;
use crate::bridge::SamplePath;
use crate::error::{Error, Result};
use crate::stats::{LogLikelihood, QuadratureRule};

/// `I_alpha(T) = E_alpha[I_T] = ((1-T)^{2a-1} - 1 - (2a-1) ln(1-T)) / (2a-1)^2`.
pub fn fisher_information(alpha: f64, big_t: f64) -> Result<f64> {
    check_horizon(big_t)?;
    let l = (-big_t).ln_1p();
    let x = (2.0 * alpha - 1.0) * l;
    // (e^x - 1 - x)/x^2
    let g = if x.abs() < 1e-3 {
        0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x * (1.0 / 120.0 + x / 720.0)))
    } else {
        (x.exp_m1() - x) / (x * x)
    };
    Ok(l * l * g)
}

/// The Jeffreys density exactly as it is usually printed,
/// `(2a-1)^{-1} sqrt((1-T)^{1/4-a/2} - 1 - ln((1-T)^{2a-1}))`.
///
/// Its `alpha = 1/2` branch `ln(1-T)/sqrt(2)` does not agree with the limit of
/// the general branch; [`fisher_information`] is the self-consistent form and
/// is what the priors use. Kept only for comparison.
pub fn jeffreys_density_printed(alpha: f64, big_t: f64) -> f64 {
    let gap = 1.0 - big_t;
    if alpha == 0.5 {
        return gap.ln() / std::f64::consts::SQRT_2;
    }
    let e = 2.0 * alpha - 1.0;
    (gap.powf(0.25 - alpha / 2.0) - 1.0 - e * gap.ln()).sqrt() / e
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorKind {
    Jeffreys,
    Uniform,
}

impl std::str::FromStr for PriorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jeffreys" => Ok(PriorKind::Jeffreys),
            "uniform" => Ok(PriorKind::Uniform),
            other => Err(Error::InvalidConfig(format!("unknown prior `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub kind: PriorKind,
    pub support_upper: f64,
    #[serde(rename = "T")]
    pub observation_end: f64,
}

impl PriorSpec {
    pub const DEFAULT_JEFFREYS_UPPER: f64 = 1e3;
    pub const DEFAULT_UNIFORM_UPPER: f64 = 10.0;

    pub fn new(kind: PriorKind, support_upper: f64, observation_end: f64) -> Result<Self> {
        if !(support_upper > 0.0 && support_upper.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "prior support bound must be positive, got {support_upper}"
            )));
        }
        check_horizon(observation_end)?;
        Ok(Self {
            kind,
            support_upper,
            observation_end,
        })
    }

    pub fn jeffreys(observation_end: f64) -> Result<Self> {
        Self::new(PriorKind::Jeffreys, Self::DEFAULT_JEFFREYS_UPPER, observation_end)
    }

    pub fn uniform(observation_end: f64) -> Result<Self> {
        Self::new(PriorKind::Uniform, Self::DEFAULT_UNIFORM_UPPER, observation_end)
    }

    /// Log of the unnormalized density; `-inf` off the support.
    pub fn log_density(&self, alpha: f64) -> f64 {
        if !(0.0..=self.support_upper).contains(&alpha) {
            return f64::NEG_INFINITY;
        }
        match self.kind {
            PriorKind::Uniform => 0.0,
            PriorKind::Jeffreys => 0.5
                * fisher_information(alpha, self.observation_end)
                    .expect("horizon validated at construction")
                    .ln(),
        }
    }
}

pub fn prior_density_unnormalized(spec: &PriorSpec, alpha: f64) -> f64 {
    spec.log_density(alpha).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub mean: f64,
    pub median: f64,
    /// Log of `int_0^upper prior * likelihood`.
    pub log_normalizer: f64,
    /// Upper bound on the posterior mass lost by truncating at the support bound.
    pub tail_mass_bound: f64,
    pub grid_size: usize,
}

/// Tabulated posterior: nodes, normalized density and CDF on the even nodes.
#[derive(Debug, Clone)]
pub struct Posterior {
    pub summary: PosteriorSummary,
    nodes: Vec<f64>,
    density: Vec<f64>,
}

impl Posterior {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Normalized density at [`nodes`](Self::nodes).
    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Grid node with the largest density.
    pub fn mode(&self) -> f64 {
        let i = self
            .density
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap();
        self.nodes[i]
    }
}

const PANEL_INTERVALS: usize = 128;
const MIN_NODES: usize = 512;

fn panel_breaks(center: f64, scale: f64, upper: f64) -> Vec<f64> {
    let mut pts = vec![0.0, upper];
    if center > 0.0 && center < upper {
        pts.push(center);
    }
    let mut step = scale / 4.0;
    loop {
        let (lo, hi) = (center - step, center + step);
        let mut inside = false;
        if lo > 0.0 {
            pts.push(lo);
            inside = true;
        }
        if hi < upper {
            pts.push(hi);
            inside = true;
        }
        if !inside {
            break;
        }
        step *= 2.0;
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Cubic Hermite on `[x0, x0 + h]` through `(F0, F1)` with slopes `(m0, m1)`.
fn hermite(t: f64, h: f64, f0: f64, f1: f64, m0: f64, m1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * f0
        + (t3 - 2.0 * t2 + t) * h * m0
        + (-2.0 * t3 + 3.0 * t2) * f1
        + (t3 - t2) * h * m1
}

/// Fritsch-Carlson limiter so the Hermite cubic stays monotone.
fn limit_slopes(secant: f64, m0: f64, m1: f64) -> (f64, f64) {
    if secant <= 0.0 {
        return (0.0, 0.0);
    }
    let (a, b) = (m0 / secant, m1 / secant);
    let r = a * a + b * b;
    if r > 9.0 {
        let tau = 3.0 / r.sqrt();
        (tau * m0, tau * m1)
    } else {
        (m0, m1)
    }
}

pub fn posterior(spec: &PriorSpec, path: &SamplePath, tol: f64) -> Result<PosteriorSummary> {
    let ll = LogLikelihood::from_path(path, QuadratureRule::Rectangle)?;
    Ok(posterior_from_likelihood(spec, &ll, tol)?.summary)
}

pub fn posterior_from_likelihood(spec: &PriorSpec, ll: &LogLikelihood, tol: f64) -> Result<Posterior> {
    let peak = ll.stationary_point()?;
    let upper = spec.support_upper;
    let sigma = 1.0 / ll.i_t.sqrt();
    let center = peak.clamp(0.0, upper);
    let slope = ll.score(center).abs();
    let scale = 1.0 / (slope + 1.0 / sigma);

    let breaks = panel_breaks(center, scale, upper);
    let panels = breaks.len() - 1;
    let per_panel = PANEL_INTERVALS.max((MIN_NODES / panels + 1).next_multiple_of(2));
    let mut nodes = Vec::with_capacity(panels * per_panel + 1);
    nodes.push(0.0);
    for w in breaks.windows(2) {
        let h = (w[1] - w[0]) / per_panel as f64;
        nodes.extend((1..per_panel).map(|i| w[0] + i as f64 * h));
        nodes.push(w[1]);
    }

    let log_post: Vec<f64> = nodes.iter().map(|&a| spec.log_density(a) + ll.eval(a)).collect();
    let peak_log = log_post.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut density: Vec<f64> = log_post.iter().map(|lp| (lp - peak_log).exp()).collect();

    // Simpson over each pair of intervals; cumulative mass at even nodes.
    let mut cdf = Vec::with_capacity(nodes.len() / 2 + 1);
    let mut cells = Vec::with_capacity(nodes.len() / 2);
    cdf.push(0.0);
    let (mut mass, mut first_moment) = (0.0, 0.0);
    let mut i = 0;
    while i + 2 < nodes.len() {
        let (x0, x1, x2) = (nodes[i], nodes[i + 1], nodes[i + 2]);
        let h = x2 - x0;
        let (f0, f1, f2) = (density[i], density[i + 1], density[i + 2]);
        mass += h / 6.0 * (f0 + 4.0 * f1 + f2);
        first_moment += h / 6.0 * (x0 * f0 + 4.0 * x1 * f1 + x2 * f2);
        cdf.push(mass);
        cells.push(i);
        i += 2;
    }
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::DegeneratePath);
    }
    for d in density.iter_mut() {
        *d /= mass;
    }
    for c in cdf.iter_mut() {
        *c /= mass;
    }
    let mean = first_moment / mass;

    let median = {
        let j = cdf.partition_point(|&c| c < 0.5).clamp(1, cells.len());
        let i = cells[j - 1];
        let (x0, x2) = (nodes[i], nodes[i + 2]);
        let h = x2 - x0;
        let (f0, f1) = (cdf[j - 1], cdf[j]);
        let (m0, m1) = limit_slopes((f1 - f0) / h, density[i], density[i + 2]);
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if hermite(mid, h, f0, f1, m0, m1) < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        x0 + 0.5 * (lo + hi) * h
    };

    let log_normalizer = mass.ln() + peak_log;
    let tail_mass_bound = match spec.kind {
        PriorKind::Uniform => 0.0,
        PriorKind::Jeffreys => {
            // Jeffreys density is decreasing, so on [upper, inf) it is at most its value
            // at `upper`; the likelihood is a Gaussian with mode `peak`, sd `sigma`.
            let ll_peak = ll.eval(peak);
            let z = (upper - peak) / sigma;
            let log_gauss_tail = if z > 1.0 {
                (sigma / z).ln() - 0.5 * z * z
            } else {
                (sigma * (2.0 * std::f64::consts::PI).sqrt()).ln()
            };
            (spec.log_density(upper) + ll_peak + log_gauss_tail - log_normalizer).exp()
        }
    };
    if !(tail_mass_bound < tol) {
        return Err(Error::TailMassTooLarge {
            bound: tail_mass_bound,
            tol,
        });
    }
    Ok(Posterior {
        summary: PosteriorSummary {
            mean,
            median,
            log_normalizer,
            tail_mass_bound,
            grid_size: nodes.len(),
        },
        nodes,
        density,
    })
}
