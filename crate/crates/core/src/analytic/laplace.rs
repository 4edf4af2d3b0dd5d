//! The joint Laplace transform `M(s, t) = E exp(s X_T^2 + t I_T)` and the
//! moment-ratio route `E[Y^j / Z] = int_0^inf d^j/ds^j M(s, -t)|_{s=0} dt`.
//!
//! The oracle integrates in the original `t` variable with plain
//! `cosh`/`sinh`, independently of the rescaled `u`-integrands used by
//! [`expected_inv_energy`](super::expected_inv_energy) and
//! [`expected_ratio_xt2`](super::expected_ratio_xt2).

use crate::error::{Error, Result};

use super::{check_horizon, QuadratureSpec};

/// `cosh(sqrt(z) L)` and `sinh(sqrt(z) L)/sqrt(z)`, both entire in `z`, so
/// `z < 0` (an imaginary `u`) is handled by the trigonometric branch.
fn cosh_sinhc(z: f64, log_gap: f64) -> (f64, f64) {
    let l2 = log_gap * log_gap;
    if (z * l2).abs() < 1e-10 {
        let x = z * l2;
        return (1.0 + x / 2.0 + x * x / 24.0, log_gap * (1.0 + x / 6.0 + x * x / 120.0));
    }
    if z > 0.0 {
        let r = z.sqrt();
        ((r * log_gap).cosh(), (r * log_gap).sinh() / r)
    } else {
        let r = (-z).sqrt();
        ((r * log_gap).cos(), (r * log_gap).sin() / r)
    }
}

/// `M(s, t) = (1-T)^{(1-2a)/4} / sqrt(cosh(u L) + (1 - 2a + 4s(1-T))/(2u) sinh(u L))`
/// with `u = u(-t) = sqrt(c^2 - 2t)`, `c = (1 - 2a)/2`.
pub fn joint_laplace(s: f64, t: f64, alpha: f64, big_t: f64) -> Result<f64> {
    check_horizon(big_t)?;
    if s == 0.0 && t == 0.0 {
        // E[1]; the general formula is off by an ulp here
        return Ok(1.0);
    }
    let log_gap = (-big_t).ln_1p();
    let c = 0.5 - alpha;
    let (ch, sc) = cosh_sinhc(c * c - 2.0 * t, log_gap);
    let bracket = ch + (c + 2.0 * s * (1.0 - big_t)) * sc;
    if !(bracket > 0.0) || !bracket.is_finite() {
        return Err(Error::domain(format!(
            "Laplace transform is infinite at (s, t) = ({s}, {t})"
        )));
    }
    Ok((0.5 * c * log_gap).exp() / bracket.sqrt())
}

/// `E[1/I_T]` (`j = 0`) or `E[X_T^2/I_T]` (`j = 1`) from the transform.
pub fn moment_ratio_oracle(j: u32, alpha: f64, big_t: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_horizon(big_t)?;
    if j > 1 {
        return Err(Error::domain(format!("moment order j must be 0 or 1, got {j}")));
    }
    let log_gap = (-big_t).ln_1p();
    let k = -log_gap;
    let c = 0.5 - alpha;
    let prefactor = (0.5 * c * log_gap).exp();
    let integrand = move |t: f64| {
        let (ch, sc) = cosh_sinhc(c * c + 2.0 * t, log_gap);
        let bracket = ch + c * sc;
        match j {
            0 => prefactor / bracket.sqrt(),
            _ => -prefactor * (1.0 - big_t) * sc / (bracket * bracket.sqrt()),
        }
    };

    // integrand ~ e^{-k(u - |c|)/2} * poly(u) with u = sqrt(c^2 + 2t)
    let u0 = c.abs();
    let efold = 2.0 / k;
    let mut u_max = u0 + efold * (1.0 / spec.abs_tol).ln();
    while (-(u_max - u0) / efold).exp() * 1e3 * (1.0 + u_max).powi(2) * efold > spec.abs_tol {
        u_max += efold;
    }
    u_max += spec.tail_safety;
    if k * u_max > 700.0 {
        return Err(Error::domain(
            "moment-ratio oracle is limited to moderate alpha * |ln(1-T)|",
        ));
    }
    let to_t = |u: f64| 0.5 * (u * u - c * c);
    let mut pts = vec![0.0];
    let mut u = u0 + efold / 16.0;
    pts.push(to_t(u0 + efold / 64.0));
    while u < u_max {
        pts.push(to_t(u));
        u += efold / 4.0;
    }
    pts.push(to_t(u_max));
    Ok(spec.integrator().integrate_with_breaks(integrand, &pts)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::marginal_variance;
    use crate::util::exprel;

    #[test]
    fn transform_is_one_at_origin() {
        for &alpha in &[0.0, 0.5, 1.0, 3.0] {
            for &t in &[0.3, 0.8, 0.95] {
                let m = joint_laplace(0.0, 0.0, alpha, t).unwrap();
                assert!((m - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn first_moments_by_finite_difference() {
        let h = 1e-5;
        for &alpha in &[0.0, 0.25, 0.5, 1.0, 2.0, 5.0] {
            for &big_t in &[0.5, 0.8, 0.9] {
                let dm_ds = (joint_laplace(h, 0.0, alpha, big_t).unwrap()
                    - joint_laplace(-h, 0.0, alpha, big_t).unwrap())
                    / (2.0 * h);
                let var = marginal_variance(alpha, big_t).unwrap();
                assert!((dm_ds - var).abs() < 1e-6, "alpha={alpha}: {dm_ds} vs {var}");

                let dm_dt = (joint_laplace(0.0, h, alpha, big_t).unwrap()
                    - joint_laplace(0.0, -h, alpha, big_t).unwrap())
                    / (2.0 * h);
                let l = (1.0f64 - big_t).ln();
                let x = (2.0 * alpha - 1.0) * l;
                // ((1-T)^{2a-1} - 1 - (2a-1)L)/(2a-1)^2 = L^2 (e^x - 1 - x)/x^2
                let e_it = l * l * (exprel(x) - 1.0) / x;
                let e_it = if x.abs() < 1e-8 { l * l / 2.0 } else { e_it };
                assert!((dm_dt - e_it).abs() < 1e-6, "alpha={alpha}: {dm_dt} vs {e_it}");
            }
        }
    }

    #[test]
    fn outside_finiteness_region_is_an_error() {
        assert!(joint_laplace(100.0, 0.0, 1.0, 0.8).is_err());
        assert!(joint_laplace(0.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn oracle_rejects_bad_order() {
        assert!(moment_ratio_oracle(2, 1.0, 0.8, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn oracle_half_identities() {
        let spec = QuadratureSpec::default();
        let l = (0.2f64).ln();
        let a = super::super::constant_a();
        let inv = moment_ratio_oracle(0, 0.5, 0.8, &spec).unwrap();
        assert!((inv - a / (l * l)).abs() < 1e-8);
        let ratio = moment_ratio_oracle(1, 0.5, 0.8, &spec).unwrap();
        assert!((ratio + 2.0 * 0.2 / l).abs() < 1e-8);
    }
}
