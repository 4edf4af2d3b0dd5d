//! Path functionals: the weighted energy `I_T = int_0^T X_s^2/(1-s)^2 ds`,
//! the closed-form MLE of alpha, and the log-likelihood.
//!
//! The likelihood is quadratic in alpha,
//! `l(a) = -a X_T^2 / (2(1-T)) + a(1-a)/2 I_T - a/2 ln(1-T)`,
//! so everything downstream only needs the pair `(I_T, X_T^2/(1-T))`.

use serde::{Deserialize, Serialize};

use crate::bridge::SamplePath;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadratureRule {
    /// Left-endpoint Riemann sum.
    #[default]
    Rectangle,
    Trapezoid,
}

impl std::fmt::Display for QuadratureRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            QuadratureRule::Rectangle => "rectangle",
            QuadratureRule::Trapezoid => "trapezoid",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyResult {
    pub i_t: f64,
    pub rule: QuadratureRule,
}

pub fn weighted_energy(path: &SamplePath, rule: QuadratureRule) -> Result<EnergyResult> {
    if path.grid().horizon() != 1.0 {
        return Err(Error::domain("weighted energy is defined for unit-horizon paths"));
    }
    let t = path.times();
    let x = path.values();
    if t.len() < 2 {
        return Err(Error::domain("weighted energy needs at least two grid points"));
    }
    let f = |i: usize| (x[i] / (1.0 - t[i])).powi(2);
    let i_t = match rule {
        QuadratureRule::Rectangle => (0..t.len() - 1).map(|i| f(i) * (t[i + 1] - t[i])).sum(),
        QuadratureRule::Trapezoid => (0..t.len() - 1)
            .map(|i| 0.5 * (f(i) + f(i + 1)) * (t[i + 1] - t[i]))
            .sum(),
    };
    Ok(EnergyResult { i_t, rule })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleResult {
    pub alpha_hat: f64,
    pub energy: EnergyResult,
    /// `X_T^2 / (1 - T)`
    pub x_t_sq_over_gap: f64,
    pub x_t: f64,
    pub observation_end: f64,
    pub n: usize,
}

impl MleResult {
    /// Serializable record `{alpha_hat, i_t, x_T, T, n, rule}`.
    pub fn record(&self) -> EstimateRecord {
        EstimateRecord {
            alpha_hat: self.alpha_hat,
            i_t: self.energy.i_t,
            x_t: self.x_t,
            t: self.observation_end,
            n: self.n,
            rule: self.energy.rule,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub alpha_hat: f64,
    pub i_t: f64,
    #[serde(rename = "x_T")]
    pub x_t: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub n: usize,
    pub rule: QuadratureRule,
}

/// `alpha_hat = (-X_T^2/(1-T) + I_T - ln(1-T)) / (2 I_T)`, from the sufficient pair.
pub fn mle_from_statistics(i_t: f64, x_t_sq_over_gap: f64, observation_end: f64) -> Result<f64> {
    if !(i_t > 0.0) {
        return Err(Error::DegeneratePath);
    }
    Ok((-x_t_sq_over_gap + i_t - (-observation_end).ln_1p()) / (2.0 * i_t))
}

pub fn mle(path: &SamplePath) -> Result<MleResult> {
    mle_with_rule(path, QuadratureRule::Rectangle)
}

pub fn mle_with_rule(path: &SamplePath, rule: QuadratureRule) -> Result<MleResult> {
    let energy = weighted_energy(path, rule)?;
    let big_t = path.observation_end();
    let x_t = path.terminal();
    let x_t_sq_over_gap = x_t * x_t / (1.0 - big_t);
    let alpha_hat = mle_from_statistics(energy.i_t, x_t_sq_over_gap, big_t)?;
    Ok(MleResult {
        alpha_hat,
        energy,
        x_t_sq_over_gap,
        x_t,
        observation_end: big_t,
        n: path.times().len(),
    })
}

/// The log-likelihood of a fixed path, as a quadratic `a alpha^2 + b alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLikelihood {
    pub i_t: f64,
    pub x_t_sq_over_gap: f64,
    /// `ln(1 - T)`
    pub log_gap: f64,
}

impl LogLikelihood {
    pub fn from_path(path: &SamplePath, rule: QuadratureRule) -> Result<Self> {
        let energy = weighted_energy(path, rule)?;
        let x_t = path.terminal();
        let big_t = path.observation_end();
        Ok(Self {
            i_t: energy.i_t,
            x_t_sq_over_gap: x_t * x_t / (1.0 - big_t),
            log_gap: (-big_t).ln_1p(),
        })
    }

    pub fn quadratic(&self) -> f64 {
        -0.5 * self.i_t
    }

    pub fn linear(&self) -> f64 {
        0.5 * (-self.x_t_sq_over_gap + self.i_t - self.log_gap)
    }

    pub fn eval(&self, alpha: f64) -> f64 {
        -alpha * self.x_t_sq_over_gap / 2.0 + alpha * (1.0 - alpha) / 2.0 * self.i_t
            - alpha / 2.0 * self.log_gap
    }

    pub fn score(&self, alpha: f64) -> f64 {
        2.0 * self.quadratic() * alpha + self.linear()
    }

    /// Stationary point of the quadratic; equals the MLE whenever `I_T > 0`.
    pub fn stationary_point(&self) -> Result<f64> {
        if !(self.i_t > 0.0) {
            return Err(Error::DegeneratePath);
        }
        Ok(self.linear() / self.i_t)
    }
}

pub fn log_likelihood(path: &SamplePath, alpha: f64) -> Result<f64> {
    Ok(LogLikelihood::from_path(path, QuadratureRule::Rectangle)?.eval(alpha))
}
