//! Bias correction by inverting the expectation map.

use alpha_bridge::analytic::{correct_mle, expected_mle, QuadratureSpec};
use alpha_bridge::bridge::{simulate, BridgeParams, Generator, TimeGrid};
use alpha_bridge::rng::RngSeed;
use alpha_bridge::stats::mle;

fn main() -> alpha_bridge::Result<()> {
    let spec = QuadratureSpec::default();
    let t = 0.8;

    for alpha in [0.5, 2.0, 10.0] {
        let e = expected_mle(alpha, t, &spec)?;
        let back = correct_mle(e, t, &spec)?;
        println!("alpha {alpha:>4}: E = {e:.6}  corrected back to {:.9}", back.alpha_cmle);
    }

    let floor = expected_mle(0.0, t, &spec)?;
    for observed in [0.0, floor, 1.5, 7.0] {
        let c = correct_mle(observed, t, &spec)?;
        println!("observed {observed:.4} -> {:.4} ({:?})", c.alpha_cmle, c.status);
    }

    let grid = TimeGrid::uniform(t, 300)?;
    let path = simulate(Generator::Exact, &BridgeParams::new(3.0)?, &grid, RngSeed::new(11, 0))?;
    let raw = mle(&path)?.alpha_hat;
    let c = correct_mle(raw, t, &spec)?;
    println!("path with alpha = 3: mle {raw:.4}, corrected {:.4}", c.alpha_cmle);
    Ok(())
}
