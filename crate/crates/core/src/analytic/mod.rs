//! Exact moments of the MLE, its asymptotic bias, and their inversion.
//!
//! With `L = ln(1-T) < 0` and `c = (1 - 2 alpha)/2`, the expectation of the MLE is
//! a pair of integrals over `u >= c` whose common denominator is
//! `D(u) = 2 cosh(uL) + (2c/u) sinh(uL)`.
//!
//! `D` is even in `u` while both numerators are odd, so for `alpha > 1/2`
//! (where `c < 0`) the piece over `[c, -c]` cancels and the integrals start at
//! `u0 = |c|`. This is also the range the substitution `u = sqrt(2t + c^2)`
//! actually sweeps. Writing `D = e^{|L|u} D~(u)` with
//! `D~(u) = 1 + e^{-2|L|u} - c (1 - e^{-2|L|u}) / u`
//! and absorbing the prefactor `(1-T)^{c/2}`, every integrand becomes
//! `exp(-|L|(w + max(2c, 0))/2) * O(u)` in `w = u - u0`, which cannot
//! overflow for any alpha or T.

mod correction;
mod laplace;

pub use correction::{correct_mle, CorrectedEstimate, CorrectionStatus, ForwardMap, ForwardMapCache};
pub use laplace::{joint_laplace, moment_ratio_oracle};

use std::f64::consts::SQRT_2;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{Estimate, Integrator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Below this `u`, `(1 - e^{-2|L|u})/u` is replaced by its Taylor series.
    pub singularity_width: f64,
    /// Extra `u` beyond the point where the analytic tail bound drops below `abs_tol`.
    pub tail_safety: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            singularity_width: 1e-6,
            tail_safety: 50.0,
            max_intervals: 4000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.singularity_width > 0.0) {
            return Err(Error::InvalidConfig(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if !(self.tail_safety >= 0.0) || self.max_intervals == 0 {
            return Err(Error::InvalidConfig("invalid truncation policy".into()));
        }
        Ok(())
    }

    pub(crate) fn integrator(&self) -> Integrator {
        Integrator {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_intervals: self.max_intervals,
        }
    }
}

pub(crate) fn check_horizon(big_t: f64) -> Result<()> {
    if !(big_t > 0.0 && big_t < 1.0) {
        return Err(Error::domain(format!("observation end T must lie in (0, 1), got {big_t}")));
    }
    Ok(())
}

/// Scaled integrand pieces for fixed `(alpha, T)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Kernel {
    /// `|ln(1-T)|`
    k: f64,
    log_gap: f64,
    c: f64,
    u0: f64,
    /// `c + u0 = max(2c, 0)`
    shift: f64,
    singularity_width: f64,
}

/// Values of the scaled integrands at one `w`.
#[derive(Debug, Clone, Copy)]
struct KernelPoint {
    u: f64,
    /// `exp(-|L|(w + shift)/2)`, the absorbed prefactor and `e^{-|L|u/2}`
    scale: f64,
    /// `1 - e^{-2|L|u}`
    q: f64,
    /// `D~(u)`
    d: f64,
}

impl Kernel {
    pub(crate) fn new(alpha: f64, big_t: f64, spec: &QuadratureSpec) -> Result<Self> {
        check_horizon(big_t)?;
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::domain(format!("alpha must be finite and >= 0, got {alpha}")));
        }
        let log_gap = (-big_t).ln_1p();
        let c = 0.5 - alpha;
        Ok(Self {
            k: -log_gap,
            log_gap,
            c,
            u0: c.abs(),
            shift: if c > 0.0 { 2.0 * c } else { 0.0 },
            singularity_width: spec.singularity_width,
        })
    }

    #[inline]
    fn at(&self, w: f64) -> KernelPoint {
        let u = self.u0 + w;
        let two_a = 2.0 * self.k * u;
        let q = -(-two_a).exp_m1();
        let q_over_u = if u < self.singularity_width {
            let ku = self.k * u;
            2.0 * self.k * (1.0 - ku + 2.0 / 3.0 * ku * ku)
        } else {
            q / u
        };
        let d = (2.0 - q) - self.c * q_over_u;
        KernelPoint {
            u,
            scale: (-0.5 * self.k * (w + self.shift)).exp(),
            q,
            d,
        }
    }

    /// `int_{u0}^inf 2 sinh(uL) / D^{3/2}` times the prefactor, as a function of `w`.
    #[inline]
    fn sinh_term(&self, w: f64) -> f64 {
        let p = self.at(w);
        -p.scale * p.q / (p.d * p.d.sqrt())
    }

    /// `u / sqrt(D)` times the prefactor.
    #[inline]
    fn linear_term(&self, w: f64) -> f64 {
        let p = self.at(w);
        p.u * p.scale / p.d.sqrt()
    }

    /// Breakpoints on `[0, w_max]` at e-folding spacing of `exp(-|L| w / 2)`,
    /// with `w_max` past the point where the tail bound drops below `abs_tol`.
    fn breakpoints(&self, spec: &QuadratureSpec) -> Vec<f64> {
        let efold = 2.0 / self.k;
        // |integrand| <= 4 (u0 + w + 1) max(1, |L|) e^{-|L| w/2}; its tail from W is
        // 4 max(1,|L|) e^{-|L|W/2} ((u0 + W + 1) efold + efold^2).
        let tail = |w: f64| {
            4.0 * self.k.max(1.0)
                * (-w / efold).exp()
                * ((self.u0 + w + 1.0) * efold + efold * efold)
        };
        let mut w_max = efold * (1.0 / spec.abs_tol).ln();
        for _ in 0..50 {
            if tail(w_max) <= spec.abs_tol {
                break;
            }
            w_max += efold;
        }
        w_max += spec.tail_safety;
        let mut pts = vec![0.0];
        let fine = efold.min(self.u0.max(1e-3));
        for f in [1.0 / 64.0, 1.0 / 16.0, 0.25] {
            pts.push(fine * f);
        }
        let mut w = fine;
        while w < w_max {
            pts.push(w);
            w += efold;
        }
        pts.push(w_max);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    fn integrate(&self, spec: &QuadratureSpec, f: impl Fn(f64) -> f64) -> Result<Estimate> {
        spec.integrator().integrate_with_breaks(f, &self.breakpoints(spec))
    }
}

/// `E_alpha[alpha_hat]` for a path observed on `[0, T]`.
pub fn expected_mle(alpha: f64, big_t: f64, spec: &QuadratureSpec) -> Result<f64> {
    let kern = Kernel::new(alpha, big_t, spec)?;
    let log_gap = kern.log_gap;
    let est = kern.integrate(spec, |w| {
        let p = kern.at(w);
        let sd = p.d.sqrt();
        p.scale * (-p.q / (p.d * sd) - log_gap * p.u / sd)
    })?;
    Ok(0.5 + est.value / SQRT_2)
}

/// The two integrals with `E_alpha[alpha_hat] = 1/2 + i1 - i2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProofIntegrals {
    pub i1: f64,
    pub i2: f64,
}

pub fn proof_integrals(alpha: f64, big_t: f64, spec: &QuadratureSpec) -> Result<ProofIntegrals> {
    let kern = Kernel::new(alpha, big_t, spec)?;
    let s = kern.integrate(spec, |w| kern.sinh_term(w))?;
    let l = kern.integrate(spec, |w| kern.linear_term(w))?;
    Ok(ProofIntegrals {
        i1: s.value / SQRT_2,
        i2: kern.log_gap * l.value / SQRT_2,
    })
}

/// `E_alpha[1 / I_T]`.
pub fn expected_inv_energy(alpha: f64, big_t: f64, spec: &QuadratureSpec) -> Result<f64> {
    let kern = Kernel::new(alpha, big_t, spec)?;
    let l = kern.integrate(spec, |w| kern.linear_term(w))?;
    Ok(SQRT_2 * l.value)
}

/// `E_alpha[X_T^2 / I_T]`.
pub fn expected_ratio_xt2(alpha: f64, big_t: f64, spec: &QuadratureSpec) -> Result<f64> {
    let kern = Kernel::new(alpha, big_t, spec)?;
    let s = kern.integrate(spec, |w| kern.sinh_term(w))?;
    Ok(-SQRT_2 * (1.0 - big_t) * s.value)
}

/// `A = int_0^inf v / sqrt(cosh v) dv`.
pub fn constant_a() -> f64 {
    static A: OnceLock<f64> = OnceLock::new();
    *A.get_or_init(|| {
        // 1/sqrt(cosh v) = sqrt(2) e^{-v/2} / sqrt(1 + e^{-2v}). Past v = 60 the
        // correction factor is 1 to machine precision and the tail,
        // int_60^inf sqrt(2) v e^{-v/2} dv = sqrt(2) e^{-30} 124 ~ 1.6e-11, is added exactly.
        let body = Integrator::new(1e-13, 1e-15)
            .integrate_with_breaks(
                |v: f64| SQRT_2 * v * (-0.5 * v).exp() / (1.0 + (-2.0 * v).exp()).sqrt(),
                &[0.0, 2.0, 5.0, 10.0, 20.0, 40.0, 60.0],
            )
            .expect("smooth integrand on a finite range")
            .value;
        body + SQRT_2 * (-30.0f64).exp() * 124.0
    })
}

/// `E_{1/2}[alpha_hat] = 1/2 + (1 - A/2) / ln(1-T)`.
pub fn expected_mle_half(big_t: f64) -> Result<f64> {
    check_horizon(big_t)?;
    Ok(0.5 + (1.0 - constant_a() / 2.0) / (-big_t).ln_1p())
}

/// Large-alpha limit of the bias, `-2 / ln(1-T)`.
pub fn asymptotic_bias(big_t: f64) -> Result<f64> {
    check_horizon(big_t)?;
    Ok(-2.0 / (-big_t).ln_1p())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasCurve {
    #[serde(rename = "T")]
    pub t: f64,
    pub alphas: Vec<f64>,
    pub expectations: Vec<f64>,
    pub biases: Vec<f64>,
}

pub fn bias_curve(big_t: f64, alphas: &[f64], spec: &QuadratureSpec) -> Result<BiasCurve> {
    let expectations = alphas
        .iter()
        .map(|&a| expected_mle(a, big_t, spec))
        .collect::<Result<Vec<_>>>()?;
    let biases = expectations.iter().zip(alphas).map(|(e, a)| e - a).collect();
    Ok(BiasCurve {
        t: big_t,
        alphas: alphas.to_vec(),
        expectations,
        biases,
    })
}
