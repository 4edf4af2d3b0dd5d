//! Posterior mean and median under the Jeffreys and U(0, 10) priors.

use alpha_bridge::bayes::{fisher_information, posterior_from_likelihood, PriorSpec};
use alpha_bridge::bridge::{simulate, BridgeParams, Generator, TimeGrid};
use alpha_bridge::rng::RngSeed;
use alpha_bridge::stats::{LogLikelihood, QuadratureRule};

fn main() -> alpha_bridge::Result<()> {
    let t = 0.8;
    let grid = TimeGrid::uniform(t, 300)?;

    println!("Fisher information at T = {t}:");
    for a in [0.0, 0.5, 1.0, 5.0] {
        println!("  alpha {a:>3}: {:.6}", fisher_information(a, t)?);
    }

    for alpha in [1.0, 5.0, 9.0] {
        let path = simulate(Generator::Exact, &BridgeParams::new(alpha)?, &grid, RngSeed::new(5, 0))?;
        let ll = LogLikelihood::from_path(&path, QuadratureRule::Rectangle)?;
        println!("\nalpha = {alpha}, mle = {:.4}", ll.stationary_point()?);
        for prior in [PriorSpec::jeffreys(t)?, PriorSpec::uniform(t)?] {
            let post = posterior_from_likelihood(&prior, &ll, 1e-6)?;
            println!(
                "  {:?} on [0, {}]: mean {:.4}, median {:.4}, mode {:.4}",
                prior.kind,
                prior.support_upper,
                post.summary.mean,
                post.summary.median,
                post.mode()
            );
        }
    }
    Ok(())
}
