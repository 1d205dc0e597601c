//! Qubit noise channels: phase damping from an Ohmic squeezed bath, and
//! squeezed generalized amplitude damping (SGAD), with a Lindblad integrator
//! for checking the SGAD closed forms.
//!
//! Units have `hbar = k_B = 1`. Storage order puts `m = +1/2` at index 0, so
//! the zero-temperature attractor `|1/2, -1/2>` is index 1.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::distributions::{PhaseDistribution, POSITIVITY_GRID};
use crate::error::{Error, Result};
use crate::spin::SpinSystem;
use crate::state::{make_coherent, CoherentParams, DensityMatrix, C64};

const TRACE_DRIFT_MAX: f64 = 1e-6;
const ODE_POSITIVITY_SLACK: f64 = 1e-8;
const RATE_IDENTITY_TOL: f64 = 1e-12;
/// Minimum integrator steps per unit of `gamma_beta * t`.
pub const MIN_STEPS_PER_DECAY: f64 = 100.0;
/// Default integrator steps per unit of `gamma_beta * t`.
pub const DEFAULT_STEPS_PER_DECAY: f64 = 1e4;

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::domain(format!("{name} = {v} must be finite and non-negative")));
    }
    Ok(())
}

fn check_pos(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::domain(format!("{name} = {v} must be finite and positive")));
    }
    Ok(())
}

fn check_angle(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::domain(format!("{name} = {v} must be finite")));
    }
    Ok(())
}

/// Ohmic bath `I(w) ~ w e^{-w / omega_c}` with squeezing `r` and squeezing
/// phase `Phi(w) = a w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OhmicBathParams {
    pub gamma0: f64,
    pub omega_c: f64,
    pub temperature: f64,
    pub r: f64,
    pub a: f64,
}

impl OhmicBathParams {
    pub fn new(gamma0: f64, omega_c: f64, temperature: f64, r: f64, a: f64) -> Result<Self> {
        let p = OhmicBathParams {
            gamma0,
            omega_c,
            temperature,
            r,
            a,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_pos("gamma0", self.gamma0)?;
        check_pos("omega_c", self.omega_c)?;
        check_nonneg("temperature", self.temperature)?;
        check_nonneg("r", self.r)?;
        check_nonneg("a", self.a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GammaRegime {
    ZeroT,
    HighT,
}

/// Decoherence function `gamma(t)` of the Ohmic squeezed bath.
///
/// The closed forms hold for `t > 2a`; with `a = 0` the point `t = 0` is
/// also accepted, where both give 0.
pub fn gamma_t(bath: &OhmicBathParams, t: f64, regime: GammaRegime) -> Result<f64> {
    bath.validate()?;
    let a = bath.a;
    if !t.is_finite() || !(t > 2.0 * a || (a == 0.0 && t == 0.0)) {
        return Err(Error::domain(format!(
            "gamma(t) is undefined at t = {t}; needs t > 2a = {}",
            2.0 * a
        )));
    }
    let g0 = bath.gamma0;
    let wc = bath.omega_c;
    let ch = (2.0 * bath.r).cosh();
    let sh = (2.0 * bath.r).sinh();
    let value = match regime {
        GammaRegime::ZeroT => {
            let first = g0 / TAU * ch * (wc * t).mul_add(wc * t, 1.0).ln();
            let num = 1.0 + 4.0 * wc * wc * (t - a).powi(2);
            let den = (1.0 + wc * wc * (t - 2.0 * a).powi(2)).powi(2);
            let second = g0 / (4.0 * PI) * sh * (num / den).ln();
            let third = g0 / (4.0 * PI) * sh * (1.0 + 4.0 * a * a * wc * wc).ln();
            first - second - third
        }
        GammaRegime::HighT => {
            let temp = bath.temperature;
            let first = g0 * temp / (PI * wc)
                * ch
                * (2.0 * wc * t * (wc * t).atan() - (1.0 + wc * wc * t * t).ln());
            let u = t - a;
            let v = t - 2.0 * a;
            let bracket = 4.0 * wc * u * (2.0 * wc * u).atan() - 4.0 * wc * v * (wc * v).atan()
                + 4.0 * a * wc * (2.0 * a * wc).atan()
                + ((1.0 + wc * wc * v * v).powi(2) / (1.0 + 4.0 * wc * wc * u * u)).ln()
                - (1.0 + 4.0 * a * a * wc * wc).ln();
            first - g0 * temp / (2.0 * PI * wc) * sh * bracket
        }
    };
    Ok(value)
}

/// Off-diagonal damping factor `exp(-omega^2 gamma(t))`.
pub fn decoherence_factor(bath: &OhmicBathParams, omega: f64, t: f64, regime: GammaRegime) -> Result<f64> {
    check_pos("omega", omega)?;
    Ok((-omega * omega * gamma_t(bath, t, regime)?).exp())
}

/// Qubit started in `|theta0, phi0>` after phase damping with a given
/// value of `gamma(t)`: populations fixed, coherence rotated by `omega t`
/// and damped by `exp(-omega^2 gamma)`.
pub fn phase_damping_state_with_gamma(
    theta0: f64,
    phi0: f64,
    omega: f64,
    t: f64,
    gamma: f64,
) -> Result<DensityMatrix> {
    check_angle("phi0", phi0)?;
    check_pos("omega", omega)?;
    check_nonneg("t", t)?;
    check_nonneg("gamma", gamma)?;
    let p = CoherentParams::new(theta0, phi0)?;
    let (s, c) = (p.theta() / 2.0).sin_cos();
    let coherence = C64::from_polar(
        0.5 * p.theta().sin() * (-omega * omega * gamma).exp(),
        -(omega * t + phi0),
    );
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[C64::new(s * s, 0.0), coherence, coherence.conj(), C64::new(c * c, 0.0)],
    );
    DensityMatrix::new(SpinSystem::QUBIT, m)
}

pub fn phase_damping_state(
    theta0: f64,
    phi0: f64,
    bath: &OhmicBathParams,
    omega: f64,
    t: f64,
    regime: GammaRegime,
) -> Result<DensityMatrix> {
    let gamma = gamma_t(bath, t, regime)?;
    phase_damping_state_with_gamma(theta0, phi0, omega, t, gamma)
}

/// `P(phi) = (1/2pi)[1 + (pi/4) sin a' cos(b' + omega t - phi) e^{-omega^2 gamma(t)}]`.
pub fn pd_phase_distribution(
    alpha_p: f64,
    beta_p: f64,
    bath: &OhmicBathParams,
    omega: f64,
    t: f64,
    regime: GammaRegime,
) -> Result<PhaseDistribution> {
    check_angle("alpha'", alpha_p)?;
    check_angle("beta'", beta_p)?;
    let damping = decoherence_factor(bath, omega, t, regime)?;
    let c1 = C64::from_polar(alpha_p.sin() * damping / 16.0, -(beta_p + omega * t));
    PhaseDistribution::from_coefficients(SpinSystem::QUBIT, vec![C64::new(1.0 / TAU, 0.0), c1])
}

/// Squeezed thermal bath driving a qubit of frequency `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SgadBathParams {
    pub gamma0: f64,
    pub omega: f64,
    pub temperature: f64,
    pub r: f64,
    pub phi: f64,
}

impl SgadBathParams {
    pub fn new(gamma0: f64, omega: f64, temperature: f64, r: f64, phi: f64) -> Result<Self> {
        let p = SgadBathParams {
            gamma0,
            omega,
            temperature,
            r,
            phi,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_pos("gamma0", self.gamma0)?;
        check_pos("omega", self.omega)?;
        check_nonneg("temperature", self.temperature)?;
        check_nonneg("r", self.r)?;
        check_angle("Phi", self.phi)
    }
}

/// `alpha = sqrt(gamma0^2 |M|^2 - omega^2)` with its branch made explicit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AlphaBranch {
    /// `alpha^2 > 0`: holds `alpha`.
    Real(f64),
    /// `alpha^2 < 0`: holds `|alpha|`.
    Imaginary(f64),
    Zero,
}

impl AlphaBranch {
    fn from_square(sq: f64) -> Self {
        if sq > 0.0 {
            AlphaBranch::Real(sq.sqrt())
        } else if sq < 0.0 {
            AlphaBranch::Imaginary((-sq).sqrt())
        } else {
            AlphaBranch::Zero
        }
    }

    /// `cosh(alpha t)`, real on every branch.
    pub fn cosh(&self, t: f64) -> f64 {
        match *self {
            AlphaBranch::Real(a) => (a * t).cosh(),
            AlphaBranch::Imaginary(b) => (b * t).cos(),
            AlphaBranch::Zero => 1.0,
        }
    }

    /// `sinh(alpha t) / alpha`, real on every branch.
    pub fn sinh_over(&self, t: f64) -> f64 {
        match *self {
            AlphaBranch::Real(a) => (a * t).sinh() / a,
            AlphaBranch::Imaginary(b) => (b * t).sin() / b,
            AlphaBranch::Zero => t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedSgadRates {
    pub n_th: f64,
    /// `N`.
    pub n_eff: f64,
    /// `|M|`.
    pub m_mag: f64,
    pub gamma_beta: f64,
    pub gamma_minus: f64,
    pub alpha_sq: f64,
    pub alpha: AlphaBranch,
    /// Signed real amplitude of `M = chi e^{i Phi}`, i.e. `-|M|`.
    pub chi: f64,
}

impl DerivedSgadRates {
    /// Excited population `N / (2N + 1)` of the stationary state.
    pub fn asymptotic_up(&self) -> f64 {
        self.n_eff / (2.0 * self.n_eff + 1.0)
    }
}

/// Planck occupation `1 / (e^{omega/T} - 1)`, zero at `T = 0`.
pub fn planck(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        0.0
    } else {
        1.0 / (omega / temperature).exp_m1()
    }
}

pub fn sgad_rates(bath: &SgadBathParams) -> Result<DerivedSgadRates> {
    bath.validate()?;
    let n_th = planck(bath.omega, bath.temperature);
    let (sr, cr) = (bath.r.sinh(), bath.r.cosh());
    let n_eff = n_th * (cr * cr + sr * sr) + sr * sr;
    let m_mag = 0.5 * (2.0 * bath.r).sinh() * (2.0 * n_th + 1.0);
    let gamma_beta = bath.gamma0 * (2.0 * n_eff + 1.0);
    let gamma_minus = bath.gamma0 * n_eff;
    let alpha_sq = (bath.gamma0 * m_mag).powi(2) - bath.omega * bath.omega;

    let lhs = (n_eff + 0.5).powi(2) - m_mag * m_mag;
    let rhs = (n_th + 0.5).powi(2);
    if (lhs - rhs).abs() > RATE_IDENTITY_TOL * rhs.max(lhs.abs()).max(1.0) || m_mag >= n_eff + 0.5 {
        return Err(Error::property(format!(
            "squeezed-thermal relation fails: (N+1/2)^2 - |M|^2 = {lhs}, (N_th+1/2)^2 = {rhs}"
        )));
    }
    Ok(DerivedSgadRates {
        n_th,
        n_eff,
        m_mag,
        gamma_beta,
        gamma_minus,
        alpha_sq,
        alpha: AlphaBranch::from_square(alpha_sq),
        chi: -m_mag,
    })
}

/// `p(m = +1/2, t)` for a qubit started in `|alpha', beta'>`.
pub fn sgad_number_prob(alpha_p: f64, bath: &SgadBathParams, t: f64) -> Result<f64> {
    check_angle("alpha'", alpha_p)?;
    check_nonneg("t", t)?;
    let rates = sgad_rates(bath)?;
    let ratio = bath.gamma0 / rates.gamma_beta;
    let decay = (-rates.gamma_beta * t).exp();
    let s2 = (alpha_p / 2.0).sin().powi(2);
    let c2 = (alpha_p / 2.0).cos().powi(2);
    let p = 0.5 * ((1.0 - ratio) + (1.0 + ratio) * decay) * s2
        + rates.gamma_minus / rates.gamma_beta * (1.0 - decay) * c2;
    Ok(p.clamp(0.0, 1.0))
}

/// Phase distribution after SGAD for a given `chi`. The physical value is
/// [`DerivedSgadRates::chi`]; other values exist to compare conventions.
pub fn sgad_phase_distribution_with_chi(
    alpha_p: f64,
    beta_p: f64,
    bath: &SgadBathParams,
    t: f64,
    chi: f64,
) -> Result<PhaseDistribution> {
    check_angle("alpha'", alpha_p)?;
    check_angle("beta'", beta_p)?;
    check_nonneg("t", t)?;
    let rates = sgad_rates(bath)?;
    let c = rates.alpha.cosh(t);
    let s = rates.alpha.sinh_over(t);
    let w = bath.omega;
    let g = bath.gamma0 * chi * s;
    // P - 1/2pi = A cos(phi) + B sin(phi)
    let pre = alpha_p.sin() * (-rates.gamma_beta * t / 2.0).exp() / 8.0;
    let big_a = pre * (c * beta_p.cos() - w * s * beta_p.sin() - g * (bath.phi + beta_p).cos());
    let big_b = pre * (c * beta_p.sin() + w * s * beta_p.cos() + g * (bath.phi + beta_p).sin());
    let coeffs = vec![C64::new(1.0 / TAU, 0.0), C64::new(big_a / 2.0, -big_b / 2.0)];
    match PhaseDistribution::from_coefficients(SpinSystem::QUBIT, coeffs.clone()) {
        Ok(pd) => Ok(pd),
        Err(_) => {
            let raw = PhaseDistribution::from_raw_parts(SpinSystem::QUBIT, coeffs);
            let (phi, min_density) = raw.minimum_on_grid(POSITIVITY_GRID);
            Err(Error::ClosedFormBreakdown { min_density, phi })
        }
    }
}

/// Phase distribution after SGAD for a qubit started in `|alpha', beta'>`.
///
/// `cosh(alpha t)` and `sinh(alpha t)/alpha` are continued to the imaginary
/// branch (`cos`, `sin`) and to `alpha = 0` (`1`, `t`). A negative density is
/// reported as [`Error::ClosedFormBreakdown`].
pub fn sgad_phase_distribution(alpha_p: f64, beta_p: f64, bath: &SgadBathParams, t: f64) -> Result<PhaseDistribution> {
    let chi = sgad_rates(bath)?.chi;
    sgad_phase_distribution_with_chi(alpha_p, beta_p, bath, t, chi)
}

/// Closed-form SGAD map applied to any qubit state.
pub fn sgad_evolve(rho0: &DensityMatrix, bath: &SgadBathParams, t: f64) -> Result<DensityMatrix> {
    check_qubit(rho0)?;
    check_nonneg("t", t)?;
    let rates = sgad_rates(bath)?;
    let up0 = rho0.get(0, 0).re;
    let z0 = rho0.get(0, 1);
    let eq = rates.asymptotic_up();
    let up = eq + (up0 - eq) * (-rates.gamma_beta * t).exp();
    let kappa = C64::from_polar(-bath.gamma0 * rates.chi, bath.phi);
    let drive = C64::new(0.0, -bath.omega) * z0 + kappa * z0.conj();
    let z = (z0 * rates.alpha.cosh(t) + drive * rates.alpha.sinh_over(t)) * (-rates.gamma_beta * t / 2.0).exp();
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[C64::new(up, 0.0), z, z.conj(), C64::new(1.0 - up, 0.0)],
    );
    DensityMatrix::new(SpinSystem::QUBIT, m)
}

/// Closed-form SGAD state for a qubit started in `|alpha', beta'>`.
pub fn sgad_state(alpha_p: f64, beta_p: f64, bath: &SgadBathParams, t: f64) -> Result<DensityMatrix> {
    let psi = make_coherent(SpinSystem::QUBIT, CoherentParams::new(alpha_p, beta_p)?);
    sgad_evolve(&crate::state::density_from_pure(&psi), bath, t)
}

fn check_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.system() != SpinSystem::QUBIT {
        return Err(Error::domain("channel acts on a qubit only"));
    }
    Ok(())
}

/// Frame of the master equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    /// Dissipator plus `-i[omega sigma_z / 2, rho]`; this is the frame of
    /// the closed forms.
    Lab,
    /// Dissipator only.
    Interaction,
}

fn sigma_plus() -> Matrix2<C64> {
    Matrix2::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0))
}

fn sigma_minus() -> Matrix2<C64> {
    sigma_plus().transpose()
}

/// Right-hand side of the SGAD master equation.
#[derive(Debug, Clone, Copy)]
pub struct SgadGenerator {
    hamiltonian: Matrix2<C64>,
    down: f64,
    up: f64,
    m: C64,
    gamma0: f64,
}

impl SgadGenerator {
    pub fn new(bath: &SgadBathParams, frame: Frame) -> Result<Self> {
        let rates = sgad_rates(bath)?;
        let half = match frame {
            Frame::Lab => bath.omega / 2.0,
            Frame::Interaction => 0.0,
        };
        Ok(SgadGenerator {
            hamiltonian: Matrix2::new(C64::new(half, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-half, 0.0)),
            down: bath.gamma0 * (rates.n_eff + 1.0),
            up: bath.gamma0 * rates.n_eff,
            m: C64::from_polar(rates.chi, bath.phi),
            gamma0: bath.gamma0,
        })
    }

    pub fn apply(&self, rho: &Matrix2<C64>) -> Matrix2<C64> {
        let sp = sigma_plus();
        let sm = sigma_minus();
        let i = C64::new(0.0, 1.0);
        let h = &self.hamiltonian;
        let pm = sp * sm;
        let mp = sm * sp;
        let mut out = -(h * rho - rho * h) * i;
        out += (sm * rho * sp - (pm * rho + rho * pm) * C64::new(0.5, 0.0)) * C64::new(self.down, 0.0);
        out += (sp * rho * sm - (mp * rho + rho * mp) * C64::new(0.5, 0.0)) * C64::new(self.up, 0.0);
        out -= sp * rho * sp * (self.m * self.gamma0);
        out -= sm * rho * sm * (self.m.conj() * self.gamma0);
        out
    }
}

fn to_fixed(rho: &DensityMatrix) -> Matrix2<C64> {
    Matrix2::new(rho.get(0, 0), rho.get(0, 1), rho.get(1, 0), rho.get(1, 1))
}

fn hermitize2(m: &Matrix2<C64>) -> Matrix2<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Steps needed for `t` at the default resolution, at least 100 and enough
/// to resolve the `omega` rotation.
pub fn default_steps(bath: &SgadBathParams, t: f64) -> Result<usize> {
    let rates = sgad_rates(bath)?;
    let by_decay = DEFAULT_STEPS_PER_DECAY * rates.gamma_beta * t;
    let by_rotation = 200.0 * bath.omega * t;
    Ok(by_decay.max(by_rotation).max(100.0).ceil() as usize)
}

/// Integrates the master equation over `[0, t]` with `steps` fixed
/// fourth-order Runge-Kutta steps, in the lab frame.
pub fn lindblad_evolve(rho0: &DensityMatrix, bath: &SgadBathParams, t: f64, steps: usize) -> Result<DensityMatrix> {
    lindblad_evolve_in(rho0, bath, t, steps, Frame::Lab)
}

pub fn lindblad_evolve_in(
    rho0: &DensityMatrix,
    bath: &SgadBathParams,
    t: f64,
    steps: usize,
    frame: Frame,
) -> Result<DensityMatrix> {
    let traj = lindblad_trajectory(rho0, bath, &[t], steps_per_time(bath, t, steps)?, frame)?;
    Ok(traj.into_iter().next().expect("one time requested"))
}

fn steps_per_time(bath: &SgadBathParams, t: f64, steps: usize) -> Result<f64> {
    check_nonneg("t", t)?;
    let rates = sgad_rates(bath)?;
    let needed = (MIN_STEPS_PER_DECAY * rates.gamma_beta * t).ceil();
    if (steps as f64) < needed || steps == 0 {
        return Err(Error::domain(format!(
            "steps = {steps} is too few; needs at least {} for gamma_beta t = {:.4}",
            needed.max(1.0),
            rates.gamma_beta * t
        )));
    }
    Ok(if t == 0.0 { 0.0 } else { steps as f64 / t })
}

/// States at each of the ascending `times`, integrating with step density
/// `steps_per_time` (steps per unit time).
pub fn lindblad_trajectory(
    rho0: &DensityMatrix,
    bath: &SgadBathParams,
    times: &[f64],
    steps_per_time: f64,
    frame: Frame,
) -> Result<Vec<DensityMatrix>> {
    check_qubit(rho0)?;
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::domain("times must be finite, non-negative and ascending"));
    }
    let gen = SgadGenerator::new(bath, frame)?;
    let mut rho = to_fixed(rho0);
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - now;
        let n = (span * steps_per_time).ceil() as usize;
        if n > 0 {
            let h = span / n as f64;
            for _ in 0..n {
                let k1 = gen.apply(&rho);
                let k2 = gen.apply(&(rho + k1 * C64::new(h / 2.0, 0.0)));
                let k3 = gen.apply(&(rho + k2 * C64::new(h / 2.0, 0.0)));
                let k4 = gen.apply(&(rho + k3 * C64::new(h, 0.0)));
                let two = C64::new(2.0, 0.0);
                rho += (k1 + k2 * two + k3 * two + k4) * C64::new(h / 6.0, 0.0);
                rho = hermitize2(&rho);
            }
        }
        now = target;
        let trace = rho.trace();
        let drift = (trace - C64::new(1.0, 0.0)).norm();
        if drift > TRACE_DRIFT_MAX {
            let suggested = 10.0 * steps_per_time.max(1.0) * target.max(1.0);
            return Err(Error::Numerical(format!(
                "trace drifted by {drift:.3e} at t = {target}; try at least {} steps",
                suggested.ceil()
            )));
        }
        let normalised = rho / trace;
        let m = DMatrix::from_row_slice(2, 2, &[normalised[(0, 0)], normalised[(0, 1)], normalised[(1, 0)], normalised[(1, 1)]]);
        out.push(DensityMatrix::with_positivity_slack(SpinSystem::QUBIT, m, ODE_POSITIVITY_SLACK)?);
    }
    Ok(out)
}

/// `diag(1 - p, p)` with `p = (1/2)(1 + 1/(2N + 1))`.
pub fn asymptotic_state(bath: &SgadBathParams) -> Result<DensityMatrix> {
    let rates = sgad_rates(bath)?;
    let p = 0.5 * (1.0 + 1.0 / (2.0 * rates.n_eff + 1.0));
    DensityMatrix::diagonal(SpinSystem::QUBIT, &[1.0 - p, p])
}
