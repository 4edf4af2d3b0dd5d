//! Paths on [0, S] are unit-horizon paths scaled by sqrt(S) in space and S
//! in time. Checks the variance of the rescaled terminal value at a few S.

use alpha_bridge::bridge::{
    marginal_variance, rescale_to_horizon, simulate, BridgeParams, Generator, TimeGrid,
};
use alpha_bridge::rng::RngSeed;

fn main() -> alpha_bridge::Result<()> {
    let alpha = 1.5;
    let t = 0.6;
    let grid = TimeGrid::uniform(t, 61)?;
    let n = 20_000;
    for horizon in [0.5, 1.0, 4.0] {
        let mut sum_sq = 0.0;
        for i in 0..n {
            let path = simulate(Generator::Exact, &BridgeParams::new(alpha)?, &grid, RngSeed::new(3, i))?;
            let scaled = rescale_to_horizon(&path, horizon)?;
            sum_sq += scaled.terminal().powi(2);
        }
        // Var(X^{(S)}_{tS}) = S Var(X_t)
        let expected = horizon * marginal_variance(alpha, t)?;
        println!(
            "S = {horizon}: empirical Var at t = {:.2}: {:.4}, exact {:.4}",
            t * horizon,
            sum_sq / n as f64,
            expected
        );
    }
    Ok(())
}
