//! Beta function through log-gamma.

use statrs::function::gamma::ln_gamma;

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

pub fn beta(a: f64, b: f64) -> f64 {
    ln_beta(a, b).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn known_values() {
        assert_relative_eq!(beta(1.0, 1.0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(beta(2.0, 3.0), 1.0 / 12.0, max_relative = 1e-14);
        assert_relative_eq!(beta(1.5, 1.5), PI / 8.0, max_relative = 1e-14);
        assert_relative_eq!(beta(0.5, 0.5), PI, max_relative = 1e-14);
        // B(14, 13) = 13! 12! / 26!
        let exact = (1..=13).map(|k| k as f64).product::<f64>()
            * (1..=12).map(|k| k as f64).product::<f64>()
            / (1..=26).map(|k| k as f64).product::<f64>();
        assert_relative_eq!(beta(14.0, 13.0), exact, max_relative = 1e-12);
    }
}
