//! Number and phase distributions of a spin-j state.
//!
//! The phase distribution integrates the Q-function over the polar angle.
//! Doing that integral analytically turns `P(phi)` into a trigonometric
//! polynomial of degree `2j`:
//!
//! ```text
//! P(phi) = sum_k c_k e^{i k phi},   c_k = sum_{n - m = k} K_nm rho_nm,
//! K_nm   = (2j+1)/(2 pi) sqrt(C_n C_m) B(j + (n+m)/2 + 1, j - (n+m)/2 + 1),
//! ```
//!
//! with `C_m = binom(2j, j+m)`. The diagonal of `K` is `1/(2 pi)`, which is
//! why every Wigner-Dicke state has a flat phase distribution.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::special::ln_beta;
use crate::spin::SpinSystem;
use crate::state::{coherent_amplitudes, DensityMatrix, C64};

/// Number of grid points used to certify `P(phi) >= 0`.
pub const POSITIVITY_GRID: usize = 4096;
/// Negative densities above this are Fourier round-off and clamp to zero.
pub const NEGATIVITY_SLACK: f64 = 1e-9;
const NORMALIZATION_TOL: f64 = 1e-10;
const PROBABILITY_SLACK: f64 = 1e-12;

/// Husimi Q-function `<theta, phi| rho |theta, phi>`.
pub fn q_function(rho: &DensityMatrix, theta: f64, phi: f64) -> f64 {
    let amps = coherent_amplitudes(rho.system(), theta, phi);
    let m = rho.matrix();
    let d = amps.len();
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..d {
        let mut row = C64::new(0.0, 0.0);
        for c in 0..d {
            row += m[(r, c)] * amps[c];
        }
        acc += amps[r].conj() * row;
    }
    acc.re.clamp(0.0, 1.0)
}

/// Polar-angle integral of `Q` expressed in the Wigner-Dicke basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaKernel {
    sys: SpinSystem,
    k: DMatrix<f64>,
}

impl BetaKernel {
    pub fn new(sys: SpinSystem) -> Self {
        let d = sys.dim();
        let j = sys.j();
        let prefactor = (2.0 * j + 1.0) / TAU;
        let k = DMatrix::from_fn(d, d, |r, c| {
            let (n, m) = (sys.m_at(r), sys.m_at(c));
            let s = 0.5 * (n + m);
            let ln_c = 0.5 * (sys.binomial_at(r).ln() + sys.binomial_at(c).ln());
            prefactor * (ln_c + ln_beta(j + s + 1.0, j - s + 1.0)).exp()
        });
        BetaKernel { sys, k }
    }

    pub fn system(&self) -> SpinSystem {
        self.sys
    }

    /// Entry for storage indices `(row, col)`.
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.k[(row, col)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.k
    }

    /// Fourier coefficients of `P(phi)` for `rho`, without the positivity
    /// certificate.
    pub(crate) fn coefficients(&self, rho: &DensityMatrix) -> Vec<C64> {
        let d = self.sys.dim();
        let m = rho.matrix();
        (0..d)
            .map(|k| {
                // n - m = k  <=>  row index = col index - k
                (k..d)
                    .map(|col| m[(col - k, col)] * self.k[(col - k, col)])
                    .sum()
            })
            .collect()
    }

    pub fn phase_distribution(&self, rho: &DensityMatrix) -> Result<PhaseDistribution> {
        if rho.system() != self.sys {
            return Err(Error::domain("kernel and state have different spin"));
        }
        PhaseDistribution::from_coefficients(self.sys, self.coefficients(rho))
    }
}

pub fn beta_kernel(sys: SpinSystem) -> BetaKernel {
    BetaKernel::new(sys)
}

/// `P(phi) = sum_{|k| <= 2j} c_k e^{i k phi}`, stored as `c_0 ..= c_{2j}`
/// with `c_{-k} = conj(c_k)` implied.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDistribution {
    sys: SpinSystem,
    coeffs: Vec<C64>,
}

impl PhaseDistribution {
    /// Validates reality of `c_0`, normalisation and non-negativity on a
    /// 4096-point grid.
    pub fn from_coefficients(sys: SpinSystem, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != sys.dim() {
            return Err(Error::domain(format!(
                "expected {} Fourier coefficients, got {}",
                sys.dim(),
                coeffs.len()
            )));
        }
        let pd = PhaseDistribution { sys, coeffs };
        let c0 = pd.coeffs[0];
        if (c0.re - 1.0 / TAU).abs() > NORMALIZATION_TOL || c0.im.abs() > NORMALIZATION_TOL {
            return Err(Error::state(format!(
                "phase distribution normalisation c_0 = {c0} differs from 1/(2 pi)"
            )));
        }
        let (phi, min) = pd.minimum_on_grid(POSITIVITY_GRID);
        if min < -NEGATIVITY_SLACK {
            return Err(Error::state(format!(
                "phase distribution is negative ({min:.3e}) at phi = {phi:.6}"
            )));
        }
        Ok(pd)
    }

    /// Unchecked, for reporting on coefficients that failed validation.
    pub(crate) fn from_raw_parts(sys: SpinSystem, coeffs: Vec<C64>) -> Self {
        PhaseDistribution { sys, coeffs }
    }

    /// Uniform density `1/(2 pi)`.
    pub fn uniform(sys: SpinSystem) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); sys.dim()];
        coeffs[0] = C64::new(1.0 / TAU, 0.0);
        PhaseDistribution { sys, coeffs }
    }

    pub fn system(&self) -> SpinSystem {
        self.sys
    }

    /// Coefficients `c_0 ..= c_{2j}`.
    pub fn harmonics(&self) -> &[C64] {
        &self.coeffs
    }

    /// `c_k` for any integer `k`; zero beyond the band limit.
    pub fn coeff(&self, k: i64) -> C64 {
        let idx = k.unsigned_abs() as usize;
        match self.coeffs.get(idx) {
            Some(c) if k >= 0 => *c,
            Some(c) => c.conj(),
            None => C64::new(0.0, 0.0),
        }
    }

    /// Highest harmonic with a coefficient above `tol`.
    pub fn bandwidth(&self, tol: f64) -> usize {
        (0..self.coeffs.len())
            .rev()
            .find(|&k| self.coeffs[k].norm() > tol)
            .unwrap_or(0)
    }

    /// Raw value of the trigonometric polynomial (no clamping).
    pub fn density(&self, phi: f64) -> f64 {
        let step = C64::from_polar(1.0, phi);
        let mut rot = step;
        let mut acc = self.coeffs[0].re;
        for c in &self.coeffs[1..] {
            acc += 2.0 * (c * rot).re;
            rot *= step;
        }
        acc
    }

    /// Raw values on `phi_i = start + i * 2 pi / n`.
    pub fn sample(&self, n: usize, start: f64) -> Vec<f64> {
        let h = TAU / n as f64;
        (0..n).map(|i| self.density(start + h * i as f64)).collect()
    }

    /// `(phi, P(phi))` at the smallest sample of an `n`-point grid.
    pub fn minimum_on_grid(&self, n: usize) -> (f64, f64) {
        let h = TAU / n as f64;
        self.sample(n, 0.0)
            .into_iter()
            .enumerate()
            .map(|(i, v)| (h * i as f64, v))
            .fold((0.0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
    }

    /// The distribution of `phi - delta`, i.e. `P` translated by `+delta`.
    pub fn translated(&self, delta: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * C64::from_polar(1.0, -(k as f64) * delta))
            .collect();
        PhaseDistribution { sys: self.sys, coeffs }
    }

    /// `max_{k != 0} |c_k|`.
    pub fn max_nonzero_harmonic(&self) -> f64 {
        self.coeffs[1..].iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Phase distribution of `rho` through the Beta kernel.
pub fn phase_distribution(rho: &DensityMatrix) -> Result<PhaseDistribution> {
    BetaKernel::new(rho.system()).phase_distribution(rho)
}

/// `P(phi)`, real and clamped at zero when it lies within `-1e-9`.
pub fn eval_phase(pd: &PhaseDistribution, phi: f64) -> Result<f64> {
    let v = pd.density(phi);
    if v < -NEGATIVITY_SLACK {
        return Err(Error::state(format!("phase density {v:.3e} at phi = {phi}")));
    }
    Ok(v.max(0.0))
}

/// `p(m)` in storage order (`m = +j` first).
#[derive(Debug, Clone, PartialEq)]
pub struct NumberDistribution {
    sys: SpinSystem,
    probs: Vec<f64>,
}

impl NumberDistribution {
    pub fn new(sys: SpinSystem, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != sys.dim() {
            return Err(Error::domain("probability vector has the wrong length"));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < -PROBABILITY_SLACK) {
            return Err(Error::domain(format!("invalid probability {p}")));
        }
        let probs: Vec<f64> = probs.into_iter().map(|p| p.max(0.0)).collect();
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::domain(format!("probabilities sum to {total}")));
        }
        Ok(NumberDistribution { sys, probs })
    }

    pub fn system(&self) -> SpinSystem {
        self.sys
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `(m, p(m))` pairs in storage order.
    pub fn entries(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.probs.iter().enumerate().map(|(i, &p)| (self.sys.m_at(i), p))
    }
}

/// `p(m) = <j, m| rho |j, m>`.
pub fn number_distribution(rho: &DensityMatrix) -> NumberDistribution {
    let sys = rho.system();
    let probs = (0..sys.dim()).map(|i| rho.get(i, i).re.max(0.0)).collect();
    NumberDistribution { sys, probs }
}

/// Closed form of `P(phi)` for the qubit coherent state `|alpha, beta>`.
pub fn coherent_qubit_phase(alpha: f64, beta: f64, phi: f64) -> f64 {
    (1.0 + 0.25 * PI * alpha.sin() * (beta - phi).cos()) / TAU
}
