//! Sample paths of the alpha-Brownian bridge
//! `dX_t = dW_t - alpha X_t / (1 - t) dt`, `X_0 = 0`.
//!
//! The exact generator draws the Gaussian transitions of the explicit
//! solution `X_t = int_0^t ((1-t)/(1-s))^alpha dW_s`, so the law at the grid
//! points carries no discretization error. The Euler scheme is kept as an
//! independent check on the transition formulas.

use std::io::{Read, Write};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngSeed;
use crate::util::exprel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BridgeParams {
    pub alpha: f64,
    pub horizon: f64,
}

impl BridgeParams {
    pub fn new(alpha: f64) -> Result<Self> {
        Self::with_horizon(alpha, 1.0)
    }

    pub fn with_horizon(alpha: f64, horizon: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::domain(format!("alpha must be finite and >= 0, got {alpha}")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::domain(format!("horizon must be > 0, got {horizon}")));
        }
        Ok(Self { alpha, horizon })
    }
}

/// Observation times `0 = t_0 < t_1 < ... < t_n = T < horizon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
    horizon: f64,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>, horizon: f64) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::domain("time grid is empty"));
        }
        if times[0] != 0.0 {
            return Err(Error::domain(format!("time grid must start at 0, got {}", times[0])));
        }
        if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::domain(format!(
                "time grid must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
        let last = *times.last().unwrap();
        if !(last < horizon) {
            return Err(Error::domain(format!(
                "observation end {last} must lie before the horizon {horizon}"
            )));
        }
        Ok(Self { times, horizon })
    }

    /// `n_points` equally spaced times on `[0, T]`, both endpoints included.
    pub fn uniform(observation_end: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            if n_points == 1 {
                return Self::new(vec![0.0], 1.0);
            }
            return Err(Error::domain("time grid needs at least one point"));
        }
        if !(observation_end > 0.0 && observation_end < 1.0) {
            return Err(Error::domain(format!(
                "observation end must lie in (0, 1), got {observation_end}"
            )));
        }
        let steps = (n_points - 1) as f64;
        let mut times: Vec<f64> = (0..n_points)
            .map(|i| observation_end * i as f64 / steps)
            .collect();
        times[n_points - 1] = observation_end;
        Self::new(times, 1.0)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn observation_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    #[default]
    Exact,
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PathOrigin {
    pub generator: Option<Generator>,
    pub seed: Option<RngSeed>,
    pub true_alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    grid: TimeGrid,
    values: Vec<f64>,
    pub origin: PathOrigin,
}

impl SamplePath {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::domain(format!(
                "path has {} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        if values[0] != 0.0 {
            return Err(Error::domain(format!("path must start at 0, got {}", values[0])));
        }
        Ok(Self {
            grid,
            values,
            origin: PathOrigin::default(),
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        self.grid.times()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn observation_end(&self) -> f64 {
        self.grid.observation_end()
    }

    /// Terminal observation `X_T`.
    pub fn terminal(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Writes the path as CSV with header `t,x` and 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x"])?;
        for (t, x) in self.times().iter().zip(&self.values) {
            w.write_record([format!("{t:.16e}"), format!("{x:.16e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a `t,x` CSV. The path is taken to live on `[0, horizon)`.
    pub fn read_csv<R: Read>(input: R, horizon: f64) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "x" {
            return Err(Error::InvalidConfig(format!(
                "path CSV header must be `t,x`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidConfig(format!("bad number `{s}`: {e}")))
            };
            times.push(parse(&rec[0])?);
            values.push(parse(&rec[1])?);
        }
        Self::new(TimeGrid::new(times, horizon)?, values)
    }
}

fn check_unit_horizon(params: &BridgeParams, grid: &TimeGrid) -> Result<()> {
    if params.horizon != 1.0 || grid.horizon() != 1.0 {
        return Err(Error::domain(
            "simulation runs on the unit horizon; use rescale_to_horizon for [0, S]",
        ));
    }
    Ok(())
}

/// Coefficients of the exact transition `X_t = decay * X_s + N(0, variance)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub decay: f64,
    pub innovation_variance: f64,
}

pub fn transition_coeffs(alpha: f64, s: f64, t: f64) -> Result<Transition> {
    if !(0.0 <= s && s < t && t < 1.0) {
        return Err(Error::domain(format!("need 0 <= s < t < 1, got s={s}, t={t}")));
    }
    // log((1-t)/(1-s)) < 0
    let log_ratio = ((s - t) / (1.0 - s)).ln_1p();
    let decay = (alpha * log_ratio).exp();
    // (1-t)^{2a} int_s^t (1-u)^{-2a} du = (1-t)(1 - r^{2a-1})/(2a-1), r = (1-t)/(1-s)
    let innovation_variance = -(1.0 - t) * log_ratio * exprel((2.0 * alpha - 1.0) * log_ratio);
    Ok(Transition {
        decay,
        innovation_variance,
    })
}

/// `Var(X_t)` for the unit-horizon bridge.
pub fn marginal_variance(alpha: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(transition_coeffs(alpha, 0.0, t)?.innovation_variance)
}

/// `E[X_u | X_t = x] = x ((1-u)/(1-t))^alpha`.
pub fn conditional_expectation(path_value: f64, alpha: f64, t: f64, u: f64) -> Result<f64> {
    if !(0.0 <= t && t <= u && u < 1.0) {
        return Err(Error::domain(format!("need 0 <= t <= u < 1, got t={t}, u={u}")));
    }
    Ok(path_value * ((1.0 - u) / (1.0 - t)).powf(alpha))
}

pub fn simulate_exact(params: &BridgeParams, grid: &TimeGrid, seed: RngSeed) -> Result<SamplePath> {
    check_unit_horizon(params, grid)?;
    let mut rng = seed.rng();
    let times = grid.times();
    let mut values = Vec::with_capacity(times.len());
    values.push(0.0);
    let mut x = 0.0;
    for w in times.windows(2) {
        let tr = transition_coeffs(params.alpha, w[0], w[1])?;
        let z: f64 = rng.sample(StandardNormal);
        x = tr.decay * x + tr.innovation_variance.sqrt() * z;
        values.push(x);
    }
    let mut path = SamplePath::new(grid.clone(), values)?;
    path.origin = PathOrigin {
        generator: Some(Generator::Exact),
        seed: Some(seed),
        true_alpha: Some(params.alpha),
    };
    Ok(path)
}

pub fn simulate_euler(params: &BridgeParams, grid: &TimeGrid, seed: RngSeed) -> Result<SamplePath> {
    check_unit_horizon(params, grid)?;
    let mut rng = seed.rng();
    let times = grid.times();
    let mut values = Vec::with_capacity(times.len());
    values.push(0.0);
    let mut x = 0.0;
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        let z: f64 = rng.sample(StandardNormal);
        x += -params.alpha * x / (1.0 - w[0]) * dt + dt.sqrt() * z;
        values.push(x);
    }
    let mut path = SamplePath::new(grid.clone(), values)?;
    path.origin = PathOrigin {
        generator: Some(Generator::Euler),
        seed: Some(seed),
        true_alpha: Some(params.alpha),
    };
    Ok(path)
}

pub fn simulate(
    generator: Generator,
    params: &BridgeParams,
    grid: &TimeGrid,
    seed: RngSeed,
) -> Result<SamplePath> {
    match generator {
        Generator::Exact => simulate_exact(params, grid, seed),
        Generator::Euler => simulate_euler(params, grid, seed),
    }
}

/// Maps a unit-horizon path onto `[0, S]` via `X^{(S)}_t = sqrt(S) X_{t/S}`.
pub fn rescale_to_horizon(path: &SamplePath, horizon: f64) -> Result<SamplePath> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::domain(format!("horizon must be > 0, got {horizon}")));
    }
    if path.grid().horizon() != 1.0 {
        return Err(Error::domain("rescaling expects a unit-horizon path"));
    }
    let times = path.times().iter().map(|t| t * horizon).collect();
    let scale = horizon.sqrt();
    let values = path.values().iter().map(|x| x * scale).collect();
    let mut out = SamplePath::new(TimeGrid::new(times, horizon)?, values)?;
    out.origin = path.origin;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    use crate::quad::Integrator;

    #[test]
    fn transition_examples() {
        let tr = transition_coeffs(0.0, 0.0, 0.5).unwrap();
        assert_relative_eq!(tr.decay, 1.0);
        assert_relative_eq!(tr.innovation_variance, 0.5, max_relative = 1e-15);

        let tr = transition_coeffs(1.0, 0.0, 0.5).unwrap();
        assert_relative_eq!(tr.decay, 0.5, max_relative = 1e-15);
        assert_relative_eq!(tr.innovation_variance, 0.25, max_relative = 1e-15);

        let tr = transition_coeffs(0.5, 0.0, 0.8).unwrap();
        assert_relative_eq!(tr.decay, 0.2f64.sqrt(), max_relative = 1e-14);
        // quadrature of (1-t)^{2a} int_s^t (1-u)^{-2a} du with a = 1/2
        let q = Integrator::default()
            .integrate(|u: f64| 0.2 / (1.0 - u), 0.0, 0.8)
            .unwrap()
            .value;
        assert_relative_eq!(tr.innovation_variance, q, max_relative = 1e-12);
        assert_relative_eq!(tr.innovation_variance, 0.321_887_582_486_820, max_relative = 1e-12);
    }

    #[test]
    fn transition_domain_errors() {
        assert!(transition_coeffs(1.0, 0.5, 0.5).is_err());
        assert!(transition_coeffs(1.0, 0.6, 0.5).is_err());
        assert!(transition_coeffs(1.0, 0.0, 1.0).is_err());
        assert!(marginal_variance(1.0, 1.0).is_err());
        assert!(conditional_expectation(1.0, 1.0, 0.6, 0.5).is_err());
    }

    #[test]
    fn marginal_variance_examples() {
        assert_relative_eq!(marginal_variance(0.0, 0.3).unwrap(), 0.3, max_relative = 1e-15);
        assert_relative_eq!(marginal_variance(1.0, 0.3).unwrap(), 0.21, max_relative = 1e-14);
        assert_relative_eq!(
            marginal_variance(0.5, 0.8).unwrap(),
            -0.2 * 0.2f64.ln(),
            max_relative = 1e-14
        );
        assert_eq!(marginal_variance(3.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn marginal_variance_continuous_across_half() {
        for i in 1..=9 {
            let t = i as f64 / 10.0;
            let mid = marginal_variance(0.5, t).unwrap();
            for a in [0.5 - 1e-6, 0.5 + 1e-6, 0.5 - 1e-7, 0.5 + 1e-7] {
                assert!((marginal_variance(a, t).unwrap() - mid).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn innovation_variance_matches_quadrature() {
        let q = Integrator::new(1e-13, 1e-15);
        for &alpha in &[0.0, 0.25, 0.5, 0.5 + 1e-7, 0.75, 1.0, 2.0, 5.0, 10.0] {
            for &(s, t) in &[(0.0, 0.1), (0.1, 0.5), (0.3, 0.8), (0.7, 0.95), (0.0, 0.99)] {
                let tr = transition_coeffs(alpha, s, t).unwrap();
                let expected = q
                    .integrate(
                        |u: f64| ((1.0 - t) / (1.0 - u)).powf(2.0 * alpha),
                        s,
                        t,
                    )
                    .unwrap()
                    .value;
                assert_relative_eq!(tr.innovation_variance, expected, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn chapman_kolmogorov() {
        for &alpha in &[0.0, 0.3, 0.5, 1.0, 2.5, 7.0] {
            for &(s, u, t) in &[(0.0, 0.3, 0.6), (0.2, 0.5, 0.9), (0.5, 0.51, 0.99)] {
                let su = transition_coeffs(alpha, s, u).unwrap();
                let ut = transition_coeffs(alpha, u, t).unwrap();
                let st = transition_coeffs(alpha, s, t).unwrap();
                assert_relative_eq!(su.decay * ut.decay, st.decay, max_relative = 1e-14);
                let composed = ut.innovation_variance + ut.decay.powi(2) * su.innovation_variance;
                assert!((composed - st.innovation_variance).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn conditional_expectation_examples() {
        for &u in &[0.0, 0.4, 0.99] {
            assert_eq!(conditional_expectation(1.0, 0.0, 0.0, u).unwrap(), 1.0);
        }
        assert_relative_eq!(conditional_expectation(1.0, 1.0, 0.5, 0.75).unwrap(), 0.5);
        assert_relative_eq!(
            conditional_expectation(2.0, 3.0, 0.8, 0.9).unwrap(),
            0.25,
            max_relative = 1e-14
        );
    }

    #[test]
    fn single_point_grid_gives_origin() {
        let grid = TimeGrid::uniform(0.8, 1).unwrap();
        let params = BridgeParams::new(2.0).unwrap();
        for gen in [Generator::Exact, Generator::Euler] {
            let p = simulate(gen, &params, &grid, RngSeed::new(1, 0)).unwrap();
            assert_eq!(p.values(), &[0.0]);
        }
    }

    #[test]
    fn uniform_grid_includes_both_endpoints() {
        let g = TimeGrid::uniform(0.8, 300).unwrap();
        assert_eq!(g.len(), 300);
        assert_eq!(g.times()[0], 0.0);
        assert_eq!(g.observation_end(), 0.8);
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(TimeGrid::new(vec![], 1.0).is_err());
        assert!(TimeGrid::new(vec![0.1, 0.2], 1.0).is_err());
        assert!(TimeGrid::new(vec![0.0, 0.2, 0.2], 1.0).is_err());
        assert!(TimeGrid::new(vec![0.0, 1.0], 1.0).is_err());
        assert!(TimeGrid::uniform(1.0, 10).is_err());
        assert!(BridgeParams::new(-0.1).is_err());
        assert!(BridgeParams::with_horizon(1.0, 0.0).is_err());
    }

    #[test]
    fn simulation_requires_unit_horizon() {
        let grid = TimeGrid::new(vec![0.0, 1.0, 2.0], 4.0).unwrap();
        let params = BridgeParams::new(1.0).unwrap();
        assert!(simulate_exact(&params, &grid, RngSeed::default()).is_err());
    }

    #[test]
    fn rescale_examples() {
        let grid = TimeGrid::new(vec![0.0, 0.5], 1.0).unwrap();
        let path = SamplePath::new(grid, vec![0.0, 1.0]).unwrap();
        let same = rescale_to_horizon(&path, 1.0).unwrap();
        assert_eq!(same.times(), path.times());
        assert_eq!(same.values(), path.values());
        let big = rescale_to_horizon(&path, 4.0).unwrap();
        assert_eq!(big.times(), &[0.0, 2.0]);
        assert_eq!(big.values(), &[0.0, 2.0]);
        assert_eq!(big.grid().horizon(), 4.0);
        assert!(rescale_to_horizon(&path, 0.0).is_err());
        assert!(rescale_to_horizon(&big, 2.0).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let grid = TimeGrid::uniform(0.8, 50).unwrap();
        let params = BridgeParams::new(1.5).unwrap();
        let path = simulate_exact(&params, &grid, RngSeed::new(3, 9)).unwrap();
        let mut buf = Vec::new();
        path.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,x\n"));
        let back = SamplePath::read_csv(&buf[..], 1.0).unwrap();
        assert_eq!(back.times(), path.times());
        assert_eq!(back.values(), path.values());
    }

    #[test]
    fn csv_with_wrong_header_rejected() {
        let text = "time,value\n0,0\n";
        assert!(SamplePath::read_csv(text.as_bytes(), 1.0).is_err());
        let text = "t,x\n0,0.5\n";
        assert!(SamplePath::read_csv(text.as_bytes(), 1.0).is_err());
    }
}
