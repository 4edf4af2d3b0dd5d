/// `(e^x - 1) / x`, continuous through `x = 0`.
pub(crate) fn exprel(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 + x * (0.5 + x / 6.0)
    } else {
        x.exp_m1() / x
    }
}
