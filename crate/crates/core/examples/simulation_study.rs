//! Desk-scale bias/MSE study of all six estimators.
//!
//!     cargo run --release --example simulation_study -- [n_paths] [workers]

use std::time::Instant;

use alpha_bridge::analytic::QuadratureSpec;
use alpha_bridge::study::{compare_to_analytic, run_experiment, ExperimentConfig};

fn main() -> alpha_bridge::Result<()> {
    let mut args = std::env::args().skip(1);
    let n_paths = args.next().and_then(|s| s.parse().ok()).unwrap_or(2_000);
    let workers = args.next().and_then(|s| s.parse().ok());
    let config = ExperimentConfig {
        n_paths,
        ..ExperimentConfig::default()
    };

    let start = Instant::now();
    let out = run_experiment(&config, workers)?;
    println!(
        "{} paths per alpha, {} degenerate, {:.1?}",
        n_paths,
        out.degenerate,
        start.elapsed()
    );
    println!("{:>5} {:>16} {:>9} {:>9} {:>9}", "alpha", "estimator", "bias", "mse", "se(bias)");
    for r in &out.rows {
        println!(
            "{:>5} {:>16} {:>9.4} {:>9.4} {:>9.4}",
            r.alpha_true, r.estimator, r.bias, r.mse, r.mc_se_bias
        );
    }

    println!("\nMLE mean against the exact expectation (allowance 0.08):");
    for c in compare_to_analytic(&out.rows, config.observation_end, &QuadratureSpec::default(), 0.08)? {
        println!(
            "  alpha {:>4}: empirical {:.4}, exact {:.4}, z {:+.2}",
            c.alpha, c.empirical_mean, c.analytic, c.z_score
        );
    }
    Ok(())
}
