//! Simulates bridges for several alphas from one seed and prints a few
//! points of each, plus the exact and Euler paths for the same stream.

use alpha_bridge::bridge::{marginal_variance, simulate, BridgeParams, Generator, TimeGrid};
use alpha_bridge::rng::RngSeed;

fn main() -> alpha_bridge::Result<()> {
    let grid = TimeGrid::uniform(0.8, 9)?;
    let seed = RngSeed::new(42, 0);

    println!("exact paths, seed 42 stream 0");
    for alpha in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let path = simulate(Generator::Exact, &BridgeParams::new(alpha)?, &grid, seed)?;
        let xs: Vec<String> = path.values().iter().map(|x| format!("{x:+.3}")).collect();
        println!("  alpha {alpha:>3}: {}", xs.join(" "));
    }

    println!("\nVar(X_t) for alpha = 2");
    for t in [0.25, 0.5, 0.75, 0.95] {
        println!("  t = {t:<4}  {:.5}", marginal_variance(2.0, t)?);
    }

    let params = BridgeParams::new(2.0)?;
    let fine = TimeGrid::uniform(0.8, 3001)?;
    let exact = simulate(Generator::Exact, &params, &fine, seed)?;
    let euler = simulate(Generator::Euler, &params, &fine, seed)?;
    println!(
        "\nX_T at alpha = 2 on 3001 points: exact {:+.4}, euler {:+.4}",
        exact.terminal(),
        euler.terminal()
    );

    let mut out = Vec::new();
    simulate(Generator::Exact, &params, &TimeGrid::uniform(0.8, 3)?, seed)?.write_csv(&mut out)?;
    print!("\nCSV form:\n{}", String::from_utf8_lossy(&out));
    Ok(())
}
