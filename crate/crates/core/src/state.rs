//! Spin-j states: Wigner-Dicke basis states, atomic coherent states, the
//! four-level ansatz and validated density matrices.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::SpinSystem;

pub type C64 = Complex64;

/// Slack for algebraic identities (norm, trace, Hermiticity).
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Eigenvalues in `[-POSITIVITY_SLACK, 0)` are clamped to zero.
pub const POSITIVITY_SLACK: f64 = 1e-10;
/// Norm slack accepted by [`make_four_level`] without auto-normalisation.
pub const FOUR_LEVEL_NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    sys: SpinSystem,
    amplitudes: DVector<C64>,
}

impl PureState {
    /// Wraps amplitudes that are already unit norm.
    pub fn new(sys: SpinSystem, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != sys.dim() {
            return Err(Error::state(format!(
                "expected {} amplitudes, got {}",
                sys.dim(),
                amplitudes.len()
            )));
        }
        let amplitudes = DVector::from_vec(amplitudes);
        let norm_sq = amplitudes.norm_squared();
        if (norm_sq - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::state(format!("squared norm {norm_sq} differs from 1")));
        }
        Ok(PureState { sys, amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(sys: SpinSystem, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != sys.dim() {
            return Err(Error::state(format!(
                "expected {} amplitudes, got {}",
                sys.dim(),
                amplitudes.len()
            )));
        }
        let mut amplitudes = DVector::from_vec(amplitudes);
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::state("cannot normalise a zero or non-finite vector"));
        }
        amplitudes.unscale_mut(norm);
        Ok(PureState { sys, amplitudes })
    }

    pub fn system(&self) -> SpinSystem {
        self.sys
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// `|<self|other>|^2`; the comparison to use under global-phase freedom.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }
}

/// Density matrix of a spin-j system in the storage order of [`SpinSystem`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    sys: SpinSystem,
    entries: DMatrix<C64>,
    clamped: bool,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    ///
    /// Eigenvalues slightly below zero (down to `-1e-10`) are clamped and the
    /// matrix is rebuilt; [`DensityMatrix::was_clamped`] then reports `true`.
    pub fn new(sys: SpinSystem, entries: DMatrix<C64>) -> Result<Self> {
        Self::with_positivity_slack(sys, entries, POSITIVITY_SLACK)
    }

    /// Same as [`DensityMatrix::new`] with a caller-chosen positivity slack.
    pub fn with_positivity_slack(
        sys: SpinSystem,
        entries: DMatrix<C64>,
        slack: f64,
    ) -> Result<Self> {
        let d = sys.dim();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::state(format!(
                "expected a {d}x{d} matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::state("matrix has non-finite entries"));
        }
        let herm_err = (&entries - entries.adjoint()).camax();
        if herm_err > ALGEBRAIC_TOL {
            return Err(Error::state(format!("not Hermitian (deviation {herm_err:.3e})")));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > ALGEBRAIC_TOL || trace.im.abs() > ALGEBRAIC_TOL {
            return Err(Error::state(format!("trace {trace} differs from 1")));
        }
        let hermitized = hermitize(&entries);
        let eigen = hermitized.clone().symmetric_eigen();
        let min_eig = eigen.eigenvalues.min();
        if min_eig < -slack {
            return Err(Error::state(format!("negative eigenvalue {min_eig:.3e}")));
        }
        if min_eig < 0.0 {
            let clipped = eigen.eigenvalues.map(|l| l.max(0.0));
            let total: f64 = clipped.sum();
            let diag = DMatrix::from_diagonal(&clipped.map(|l| C64::new(l / total, 0.0)));
            let rebuilt = &eigen.eigenvectors * diag * eigen.eigenvectors.adjoint();
            return Ok(DensityMatrix {
                sys,
                entries: hermitize(&rebuilt),
                clamped: true,
            });
        }
        Ok(DensityMatrix {
            sys,
            entries: hermitized,
            clamped: false,
        })
    }

    /// For matrices that are valid by construction (pure projectors, convex
    /// mixtures of valid states).
    pub(crate) fn from_trusted(sys: SpinSystem, entries: DMatrix<C64>) -> Self {
        DensityMatrix {
            sys,
            entries,
            clamped: false,
        }
    }

    pub fn maximally_mixed(sys: SpinSystem) -> Self {
        let d = sys.dim();
        let entries = DMatrix::from_diagonal_element(d, d, C64::new(1.0 / d as f64, 0.0));
        Self::from_trusted(sys, entries)
    }

    /// Diagonal state with the given populations (storage order).
    pub fn diagonal(sys: SpinSystem, populations: &[f64]) -> Result<Self> {
        if populations.len() != sys.dim() {
            return Err(Error::state("population vector has the wrong length"));
        }
        let diag = DVector::from_iterator(
            populations.len(),
            populations.iter().map(|&p| C64::new(p, 0.0)),
        );
        Self::new(sys, DMatrix::from_diagonal(&diag))
    }

    pub fn system(&self) -> SpinSystem {
        self.sys
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    pub fn was_clamped(&self) -> bool {
        self.clamped
    }

    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.entries.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// `tr(rho A)`.
    pub fn expectation(&self, op: &DMatrix<C64>) -> C64 {
        (&self.entries * op).trace()
    }

    /// Convex combination `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<DensityMatrix> {
        if self.sys != other.sys {
            return Err(Error::domain("cannot mix states of different spin"));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::domain(format!("mixing weight {w} outside [0, 1]")));
        }
        let entries = self.entries.scale(w) + other.entries.scale(1.0 - w);
        Ok(Self::from_trusted(self.sys, entries))
    }
}

fn hermitize(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()).scale(0.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentParams {
    theta: f64,
    phi: f64,
}

impl CoherentParams {
    /// `theta` in `[0, pi]`; `phi` is reduced mod `2 pi`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite()) {
            return Err(Error::domain("coherent-state angles must be finite"));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::domain(format!("theta = {theta} outside [0, pi]")));
        }
        Ok(CoherentParams {
            theta,
            phi: phi.rem_euclid(TAU),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// `|j, m>`.
pub fn make_wigner_dicke(sys: SpinSystem, m: f64) -> Result<PureState> {
    let idx = sys.index_of(m)?;
    let mut amps = vec![C64::new(0.0, 0.0); sys.dim()];
    amps[idx] = C64::new(1.0, 0.0);
    PureState::new(sys, amps)
}

/// Amplitudes of the atomic coherent state `|theta, phi>` in storage order.
pub(crate) fn coherent_amplitudes(sys: SpinSystem, theta: f64, phi: f64) -> Vec<C64> {
    let (s, c) = (0.5 * theta).sin_cos();
    let two_j = sys.two_j() as i32;
    (0..sys.dim())
        .map(|i| {
            // j + m and j - m for the label at index i
            let up = two_j - i as i32;
            let down = i as i32;
            let mag = sys.binomial_at(i).sqrt() * s.powi(up) * c.powi(down);
            C64::from_polar(mag, -(up as f64) * phi)
        })
        .collect()
}

/// Atomic coherent state: the amplitude at `m` is
/// `binom(2j, j+m)^(1/2) sin^(j+m)(theta/2) cos^(j-m)(theta/2) e^(-i(j+m)phi)`.
pub fn make_coherent(sys: SpinSystem, p: CoherentParams) -> PureState {
    PureState {
        sys,
        amplitudes: DVector::from_vec(coherent_amplitudes(sys, p.theta, p.phi)),
    }
}

/// Parameters of the general spin-3/2 pure state
/// `r_a e^{i t_a}|-3/2> + r_b e^{i t_b}|-1/2> + r_g e^{i t_g}|+1/2> + r_d|+3/2>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourLevelParams {
    pub r_alpha: f64,
    pub r_beta: f64,
    pub r_gamma: f64,
    pub r_delta: f64,
    pub theta_alpha: f64,
    pub theta_beta: f64,
    pub theta_gamma: f64,
}

impl FourLevelParams {
    /// Fills in `r_delta = sqrt(1 - r_a^2 - r_b^2 - r_g^2)`.
    pub fn with_implied_delta(
        r_alpha: f64,
        r_beta: f64,
        r_gamma: f64,
        theta_alpha: f64,
        theta_beta: f64,
        theta_gamma: f64,
    ) -> Result<Self> {
        let rest = 1.0 - r_alpha * r_alpha - r_beta * r_beta - r_gamma * r_gamma;
        if rest < -FOUR_LEVEL_NORM_TOL {
            return Err(Error::domain(format!(
                "r_alpha^2 + r_beta^2 + r_gamma^2 exceeds 1 by {:.3e}",
                -rest
            )));
        }
        Ok(FourLevelParams {
            r_alpha,
            r_beta,
            r_gamma,
            r_delta: rest.max(0.0).sqrt(),
            theta_alpha,
            theta_beta,
            theta_gamma,
        })
    }

    pub fn radii(&self) -> [f64; 4] {
        [self.r_alpha, self.r_beta, self.r_gamma, self.r_delta]
    }

    pub fn phases(&self) -> [f64; 3] {
        [self.theta_alpha, self.theta_beta, self.theta_gamma]
    }

    /// Reads a unit spin-3/2 vector back into ansatz form (global phase
    /// removed against the `m = +3/2` amplitude, or the first nonzero one).
    pub fn from_state(psi: &PureState) -> Result<Self> {
        if psi.system() != SpinSystem::SPIN_3_2 {
            return Err(Error::domain("four-level parameters need a spin-3/2 state"));
        }
        let a = psi.amplitudes();
        let reference = (0..4)
            .find(|&i| a[i].norm() > 1e-12)
            .map(|i| a[i].arg())
            .unwrap_or(0.0);
        let rel = |i: usize| (a[i].arg() - reference).rem_euclid(TAU);
        let phase = |i: usize| if a[i].norm() > 1e-12 { rel(i) } else { 0.0 };
        Ok(FourLevelParams {
            r_alpha: a[3].norm(),
            r_beta: a[2].norm(),
            r_gamma: a[1].norm(),
            r_delta: a[0].norm(),
            theta_alpha: phase(3),
            theta_beta: phase(2),
            theta_gamma: phase(1),
        })
    }

    /// Distance in `(r_a, r_b, r_g, t_a/pi, t_b/pi, t_g/pi)` coordinates,
    /// minimised over the phase symmetries that leave both the number and
    /// phase distributions' knowledge unchanged: global phase, translation
    /// `phi -> phi + delta` (which shifts `(t_a, t_b, t_g)` by
    /// `(-3, -2, -1) delta`) and complex conjugation.
    pub fn symmetric_distance(&self, other: &FourLevelParams) -> f64 {
        let dr = (self.r_alpha - other.r_alpha).powi(2)
            + (self.r_beta - other.r_beta).powi(2)
            + (self.r_gamma - other.r_gamma).powi(2);
        let wrap = |x: f64| {
            let y = (x + PI).rem_euclid(TAU) - PI;
            y / PI
        };
        let steps = 36_000;
        let mut best = f64::INFINITY;
        for sign in [1.0, -1.0] {
            let mine = self.phases().map(|t| sign * t);
            let theirs = other.phases();
            for k in 0..steps {
                let delta = TAU * k as f64 / steps as f64;
                let shift = [-3.0 * delta, -2.0 * delta, -delta];
                let dp: f64 = (0..3)
                    .map(|i| wrap(mine[i] + shift[i] - theirs[i]).powi(2))
                    .sum();
                best = best.min(dp);
            }
        }
        (dr + best).sqrt()
    }
}

/// Builds the spin-3/2 ansatz state.
///
/// With `auto_normalize` the radii are rescaled; otherwise their squares
/// must sum to one within `1e-9`.
pub fn make_four_level(p: &FourLevelParams, auto_normalize: bool) -> Result<PureState> {
    let radii = p.radii();
    if radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::domain("four-level radii must be finite and non-negative"));
    }
    if p.phases().iter().any(|t| !t.is_finite()) {
        return Err(Error::domain("four-level phases must be finite"));
    }
    let norm_sq: f64 = radii.iter().map(|r| r * r).sum();
    if !auto_normalize && (norm_sq - 1.0).abs() > FOUR_LEVEL_NORM_TOL {
        return Err(Error::domain(format!(
            "radii squared sum to {norm_sq}, not 1 (set auto-normalisation to rescale)"
        )));
    }
    let amps = vec![
        C64::new(p.r_delta, 0.0),
        C64::from_polar(p.r_gamma, p.theta_gamma),
        C64::from_polar(p.r_beta, p.theta_beta),
        C64::from_polar(p.r_alpha, p.theta_alpha),
    ];
    PureState::normalized(SpinSystem::SPIN_3_2, amps)
}

/// `|psi><psi|`.
pub fn density_from_pure(psi: &PureState) -> DensityMatrix {
    let a = &psi.amplitudes;
    DensityMatrix::from_trusted(psi.sys, a * a.adjoint())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateKind {
    Pure,
    Mixed,
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Seeded random state: a normalised complex Gaussian vector for `Pure`,
/// `G G^dagger / tr(G G^dagger)` with complex Gaussian `G` for `Mixed`.
pub fn random_state(sys: SpinSystem, kind: StateKind, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_state_with(sys, kind, &mut rng)
}

pub(crate) fn random_state_with(
    sys: SpinSystem,
    kind: StateKind,
    rng: &mut ChaCha8Rng,
) -> DensityMatrix {
    let d = sys.dim();
    match kind {
        StateKind::Pure => {
            let amps: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
            let psi = PureState::normalized(sys, amps).expect("Gaussian vector is nonzero");
            density_from_pure(&psi)
        }
        StateKind::Mixed => {
            let g = DMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
            let gg = &g * g.adjoint();
            let tr = gg.trace().re;
            let rho = hermitize(&gg.unscale(tr));
            DensityMatrix::from_trusted(sys, rho)
        }
    }
}

/// Seeded random pure state vector.
pub fn random_pure(sys: SpinSystem, seed: u64) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<C64> = (0..sys.dim()).map(|_| complex_gaussian(&mut rng)).collect();
    PureState::normalized(sys, amps).expect("Gaussian vector is nonzero")
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngularMomentum {
    pub jx: DMatrix<C64>,
    pub jy: DMatrix<C64>,
    pub jz: DMatrix<C64>,
}

/// Spin-j angular momentum matrices in storage order.
pub fn angular_momentum_matrices(sys: SpinSystem) -> AngularMomentum {
    let d = sys.dim();
    let j = sys.j();
    let jz = DMatrix::from_fn(d, d, |r, c| {
        if r == c {
            C64::new(sys.m_at(r), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, and |m+1> sits one index up.
    let raise = DMatrix::from_fn(d, d, |r, c| {
        if c >= 1 && r == c - 1 {
            let m = sys.m_at(c);
            C64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let lower = raise.adjoint();
    let jx = (&raise + &lower).scale(0.5);
    let jy = (&raise - &lower) * C64::new(0.0, -0.5);
    AngularMomentum { jx, jy, jz }
}
