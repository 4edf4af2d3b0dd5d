//! Exact expectation of the MLE over alpha for three observation ends,
//! with the large-alpha limit of the bias and the alpha = 1/2 closed form.

use alpha_bridge::analytic::{
    asymptotic_bias, bias_curve, constant_a, expected_mle, expected_mle_half, QuadratureSpec,
};

fn main() -> alpha_bridge::Result<()> {
    let spec = QuadratureSpec::default();
    let alphas = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0];
    for t in [0.7, 0.8, 0.9] {
        let curve = bias_curve(t, &alphas, &spec)?;
        println!("T = {t}  (bias -> {:.5} as alpha grows)", asymptotic_bias(t)?);
        for ((a, e), b) in alphas.iter().zip(&curve.expectations).zip(&curve.biases) {
            println!("  alpha {a:>4}: E = {e:>9.5}  bias = {b:.5}");
        }
    }

    println!("\nA = {:.12}", constant_a());
    for t in [0.7, 0.8, 0.9, 0.95] {
        println!(
            "E_1/2 at T = {t}: closed form {:.10}, integral {:.10}",
            expected_mle_half(t)?,
            expected_mle(0.5, t, &spec)?
        );
    }
    Ok(())
}
