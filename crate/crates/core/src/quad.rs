//! Equal-weight quadrature on a uniform grid.
//!
//! With `offset = 0` on a full period this is the periodic trapezoid rule,
//! which is spectrally accurate for smooth periodic integrands and exact for
//! trigonometric polynomials of degree below `n`. With `offset = 0.5` it is
//! the composite midpoint rule, exact for piecewise-constant densities whose
//! jumps fall on cell boundaries.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformRule {
    start: f64,
    end: f64,
    n: usize,
    offset: f64,
}

impl UniformRule {
    pub fn new(start: f64, end: f64, n: usize, offset: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("quadrature needs at least one node"));
        }
        if !(start.is_finite() && end.is_finite() && end > start) {
            return Err(Error::domain(format!("invalid interval [{start}, {end}]")));
        }
        if !(0.0..1.0).contains(&offset) {
            return Err(Error::domain(format!("node offset {offset} outside [0, 1)")));
        }
        Ok(UniformRule { start, end, n, offset })
    }

    /// Trapezoid rule for a function periodic on `[start, end)`.
    pub fn periodic(start: f64, end: f64, n: usize) -> Result<Self> {
        Self::new(start, end, n, 0.0)
    }

    /// Cell-midpoint rule on `[start, end]`.
    pub fn midpoint(start: f64, end: f64, n: usize) -> Result<Self> {
        Self::new(start, end, n, 0.5)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn weight(&self) -> f64 {
        (self.end - self.start) / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.start + (i as f64 + self.offset) * self.weight()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.node(i))
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.weight() * self.nodes().map(f).sum::<f64>()
    }

    /// Integrates values already sampled at [`UniformRule::node`].
    pub fn integrate_samples(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.n {
            return Err(Error::domain(format!(
                "expected {} samples, got {}",
                self.n,
                values.len()
            )));
        }
        Ok(self.weight() * values.iter().sum::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::TAU;

    #[test]
    fn trapezoid_is_exact_for_trig_polynomials() {
        let rule = UniformRule::periodic(0.0, TAU, 16).unwrap();
        assert_abs_diff_eq!(rule.integrate(|x| 1.0 + (3.0 * x).cos()), TAU, epsilon = 1e-13);
        assert_abs_diff_eq!(rule.integrate(|x| (5.0 * x).sin().powi(2)), TAU / 2.0, epsilon = 1e-13);
    }

    #[test]
    fn midpoint_is_exact_for_aligned_steps() {
        let rule = UniformRule::midpoint(0.0, 1.0, 8).unwrap();
        let step = |x: f64| if x < 0.25 { 4.0 } else { 0.0 };
        assert_abs_diff_eq!(rule.integrate(step), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_rules() {
        assert!(UniformRule::periodic(0.0, 1.0, 0).is_err());
        assert!(UniformRule::periodic(1.0, 0.0, 4).is_err());
        assert!(UniformRule::new(0.0, 1.0, 4, 1.0).is_err());
        let rule = UniformRule::midpoint(0.0, 1.0, 4).unwrap();
        assert!(rule.integrate_samples(&[1.0; 3]).is_err());
    }
}
