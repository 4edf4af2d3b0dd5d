//! MLE on simulated paths: the closed form, the log-likelihood it
//! maximizes, and the effect of the path-integral rule.

use alpha_bridge::bridge::{simulate, BridgeParams, Generator, TimeGrid};
use alpha_bridge::rng::RngSeed;
use alpha_bridge::stats::{mle, mle_with_rule, LogLikelihood, QuadratureRule};

fn main() -> alpha_bridge::Result<()> {
    let alpha = 1.0;
    let grid = TimeGrid::uniform(0.8, 300)?;
    let path = simulate(Generator::Exact, &BridgeParams::new(alpha)?, &grid, RngSeed::new(7, 0))?;

    let fit = mle(&path)?;
    println!("{}", serde_json::to_string(&fit.record())?);

    let ll = LogLikelihood::from_path(&path, QuadratureRule::Rectangle)?;
    for a in [fit.alpha_hat - 0.5, fit.alpha_hat, fit.alpha_hat + 0.5] {
        println!("  l({a:.3}) = {:.5}   score {:+.2e}", ll.eval(a), ll.score(a));
    }

    let trap = mle_with_rule(&path, QuadratureRule::Trapezoid)?;
    println!("trapezoid rule: alpha_hat = {:.5}", trap.alpha_hat);

    // the estimate for many paths scatters widely and sits well above alpha
    let n = 2000;
    let mean = (0..n)
        .map(|i| {
            let p = simulate(Generator::Exact, &BridgeParams::new(alpha)?, &grid, RngSeed::new(7, i))?;
            Ok(mle(&p)?.alpha_hat)
        })
        .sum::<alpha_bridge::Result<f64>>()?
        / n as f64;
    println!("mean over {n} paths: {mean:.3} (true alpha {alpha})");
    Ok(())
}
