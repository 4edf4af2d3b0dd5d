//! Bias correction by inverting `alpha -> E_alpha[alpha_hat]`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::brent;

use super::{asymptotic_bias, check_horizon, expected_mle, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionStatus {
    Interior,
    /// The observation is at or below `E_0[alpha_hat]`; the estimate is pinned to 0.
    ClampedAtZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectedEstimate {
    pub alpha_cmle: f64,
    pub status: CorrectionStatus,
}

const GRID_STEP: f64 = 0.25;
const GRID_MAX: f64 = 200.0;
const RESIDUAL_TOL: f64 = 1e-8;

/// Tabulated forward map on `[0, 200]` at spacing 0.25 for one `T`.
///
/// Construction checks strict monotonicity, which the inversion relies on.
#[derive(Debug, Clone)]
pub struct ForwardMap {
    big_t: f64,
    spec: QuadratureSpec,
    alphas: Vec<f64>,
    values: Vec<f64>,
}

impl ForwardMap {
    pub fn build(big_t: f64, spec: &QuadratureSpec) -> Result<Self> {
        check_horizon(big_t)?;
        spec.validate()?;
        let n = (GRID_MAX / GRID_STEP).round() as usize;
        let alphas: Vec<f64> = (0..=n).map(|i| i as f64 * GRID_STEP).collect();
        let values = alphas
            .iter()
            .map(|&a| expected_mle(a, big_t, spec))
            .collect::<Result<Vec<_>>>()?;
        if let Some(i) = (1..values.len()).find(|&i| !(values[i] > values[i - 1])) {
            return Err(Error::BracketFailure(format!(
                "E_alpha[alpha_hat] not increasing at T={big_t}: E({}) = {} >= E({}) = {}",
                alphas[i - 1],
                values[i - 1],
                alphas[i],
                values[i]
            )));
        }
        Ok(Self {
            big_t,
            spec: *spec,
            alphas,
            values,
        })
    }

    pub fn observation_end(&self) -> f64 {
        self.big_t
    }

    /// `E_0[alpha_hat]`, the smallest attainable expectation.
    pub fn floor(&self) -> f64 {
        self.values[0]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.alphas.iter().copied().zip(self.values.iter().copied())
    }

    pub fn invert(&self, observed: f64) -> Result<CorrectedEstimate> {
        if !observed.is_finite() {
            return Err(Error::domain(format!("observed estimate must be finite, got {observed}")));
        }
        if observed <= self.floor() {
            return Ok(CorrectedEstimate {
                alpha_cmle: 0.0,
                status: CorrectionStatus::ClampedAtZero,
            });
        }
        let g = |a: f64| expected_mle(a, self.big_t, &self.spec).map(|e| e - observed);
        let last = self.values.len() - 1;
        let (lo, hi, flo, fhi) = if observed <= self.values[last] {
            // first node with value >= observed; index >= 1 since observed > floor
            let i = self.values.partition_point(|&v| v < observed);
            (
                self.alphas[i - 1],
                self.alphas[i],
                self.values[i - 1] - observed,
                self.values[i] - observed,
            )
        } else {
            self.bracket_beyond_grid(observed, &g)?
        };
        let root = brent(g, lo, hi, flo, fhi, 1e-12, RESIDUAL_TOL)?;
        Ok(CorrectedEstimate {
            alpha_cmle: root.x,
            status: CorrectionStatus::Interior,
        })
    }

    fn bracket_beyond_grid(
        &self,
        observed: f64,
        g: &impl Fn(f64) -> Result<f64>,
    ) -> Result<(f64, f64, f64, f64)> {
        let last = self.values.len() - 1;
        let mut lo = self.alphas[last];
        let mut flo = self.values[last] - observed;
        let guess = (observed - asymptotic_bias(self.big_t)?).max(0.0);
        let mut step = (guess - lo).max(1.0);
        for _ in 0..60 {
            let hi = lo + step;
            let fhi = g(hi)?;
            if fhi >= 0.0 {
                return Ok((lo, hi, flo, fhi));
            }
            lo = hi;
            flo = fhi;
            step *= 2.0;
        }
        Err(Error::BracketFailure(format!(
            "could not bracket observed value {observed} at T={}",
            self.big_t
        )))
    }
}

fn cache_key(big_t: f64, spec: &QuadratureSpec) -> [u64; 5] {
    [
        big_t.to_bits(),
        spec.rel_tol.to_bits(),
        spec.abs_tol.to_bits(),
        spec.singularity_width.to_bits(),
        spec.tail_safety.to_bits() ^ (spec.max_intervals as u64).rotate_left(32),
    ]
}

/// Shared memo of forward maps keyed by `(T, spec)`.
///
/// Builds run outside the lock; concurrent builders of the same key produce
/// identical tables and the first insert wins.
#[derive(Debug, Default)]
pub struct ForwardMapCache {
    maps: RwLock<HashMap<[u64; 5], Arc<ForwardMap>>>,
}

impl ForwardMapCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn global() -> &'static ForwardMapCache {
        static CACHE: OnceLock<ForwardMapCache> = OnceLock::new();
        CACHE.get_or_init(ForwardMapCache::new)
    }

    pub fn get(&self, big_t: f64, spec: &QuadratureSpec) -> Result<Arc<ForwardMap>> {
        let key = cache_key(big_t, spec);
        if let Some(m) = self.maps.read().expect("cache lock poisoned").get(&key) {
            return Ok(Arc::clone(m));
        }
        let built = Arc::new(ForwardMap::build(big_t, spec)?);
        let mut maps = self.maps.write().expect("cache lock poisoned");
        Ok(Arc::clone(maps.entry(key).or_insert(built)))
    }

    pub fn len(&self) -> usize {
        self.maps.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The alpha whose expected MLE equals `observed`, clamped to 0 below `E_0`.
pub fn correct_mle(observed: f64, big_t: f64, spec: &QuadratureSpec) -> Result<CorrectedEstimate> {
    ForwardMapCache::global().get(big_t, spec)?.invert(observed)
}
