//! Searches for maximum phase knowledge and for the largest weights `mu`
//! that keep `mu R_phi + R_m <= log2 d`.
//!
//! Every search is a coarse scan followed by Nelder-Mead refinement from the
//! best coarse points. Scans and restarts run in parallel, and results are
//! reduced in candidate order, so a given config always gives the same result.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::BetaKernel;
use crate::error::{Error, Result};
use crate::knowledge::{knowledge_discrete, PhaseQuadrature, DEFAULT_N_QUAD};
use crate::optimize::NelderMead;
use crate::spin::SpinSystem;
use crate::state::{
    density_from_pure, make_coherent, make_four_level, make_wigner_dicke, random_state_with,
    CoherentParams, DensityMatrix, FourLevelParams, PureState, StateKind,
};

/// Mixed states drawn to verify a weight.
pub const MIXED_VERIFICATION_SAMPLES: usize = 10_000;
const QUBIT_MU_SLACK: f64 = 1e-6;
const SPIN32_MU_SLACK: f64 = 1e-5;
const QUBIT_MU_CONSISTENCY: f64 = 0.05;
const QUBIT_MUTUAL_TOL: f64 = 1e-6;
const SPIN32_BIAS_MIN: f64 = 0.01;
const WIGNER_DICKE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub grid_density: usize,
    pub multistarts: usize,
    pub local_tol: f64,
    pub exclusion_eps: f64,
    pub seed: u64,
    pub n_quad: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid_density: 64,
            multistarts: 32,
            local_tol: 1e-6,
            exclusion_eps: 1e-4,
            seed: 0,
            n_quad: DEFAULT_N_QUAD,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_density < 16 {
            return Err(Error::domain(format!(
                "grid_density = {} must be at least 16",
                self.grid_density
            )));
        }
        if self.multistarts == 0 {
            return Err(Error::domain("multistarts must be positive"));
        }
        if !(self.local_tol.is_finite() && self.local_tol > 0.0) {
            return Err(Error::domain("local_tol must be positive"));
        }
        if !(self.exclusion_eps.is_finite() && self.exclusion_eps > 0.0) {
            return Err(Error::domain("exclusion_eps must be positive"));
        }
        Ok(())
    }

    fn optimizer(&self) -> NelderMead {
        NelderMead {
            initial_step: 0.05,
            tol: self.local_tol * 1e-3,
            max_evals: 5000,
        }
    }
}

/// Where an extremum was found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Argmax {
    /// Qubit coherent state `|alpha', beta'>`.
    Coherent { alpha: f64, beta: f64 },
    /// Spin-3/2 state in four-level form.
    FourLevel(FourLevelParams),
}

/// Largest weighted sum seen while checking a weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleCheck {
    pub samples: usize,
    pub worst_sum: f64,
    /// Smallest `(log2 d - R_m) / R_phi` among samples with `R_phi` above
    /// the exclusion threshold.
    pub min_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub pure: SampleCheck,
    pub mixed: SampleCheck,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub value: f64,
    pub argmax: Argmax,
    /// Final objective of each local restart, in candidate order.
    pub trace: Vec<f64>,
    pub state: PureState,
    pub verification: Option<Verification>,
}

/// Knowledge of number and phase for states of one spin, with the kernel
/// and quadrature tables built once.
#[derive(Debug, Clone)]
pub struct KnowledgeEvaluator {
    kernel: BetaKernel,
    quad: PhaseQuadrature,
}

impl KnowledgeEvaluator {
    pub fn new(sys: SpinSystem, n_quad: usize) -> Result<Self> {
        Ok(KnowledgeEvaluator {
            kernel: BetaKernel::new(sys),
            quad: PhaseQuadrature::new(sys, n_quad)?,
        })
    }

    pub fn system(&self) -> SpinSystem {
        self.quad.system()
    }

    /// `(R_m, R_phi)`.
    pub fn evaluate(&self, rho: &DensityMatrix) -> (f64, f64) {
        let probs: Vec<f64> = (0..rho.system().dim()).map(|i| rho.get(i, i).re.max(0.0)).collect();
        let r_m = knowledge_discrete(&probs).unwrap_or(f64::NAN);
        let r_phi = self.quad.knowledge_of_coefficients(&self.kernel.coefficients(rho));
        (r_m, r_phi)
    }

    pub fn evaluate_pure(&self, psi: &PureState) -> (f64, f64) {
        self.evaluate(&density_from_pure(psi))
    }
}

fn log2_dim(sys: SpinSystem) -> f64 {
    (sys.dim() as f64).log2()
}

fn ratio(sys: SpinSystem, (r_m, r_phi): (f64, f64), eps: f64) -> Option<f64> {
    (r_phi > eps).then(|| (log2_dim(sys) - r_m) / r_phi)
}

fn qubit_state(alpha: f64) -> PureState {
    let alpha = alpha.clamp(0.0, PI);
    make_coherent(
        SpinSystem::QUBIT,
        CoherentParams::new(alpha, 0.0).expect("polar angle in range"),
    )
}

/// Best `k` candidates by `key` (larger is better), ties broken by index.
fn top_k(values: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_finite()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

/// First maximum in order.
fn best_of(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] || !values[best].is_finite() {
            best = i;
        }
    }
    best
}

/// Maximizes `f` over `alpha' in [0, pi]` with `grid_density` grid points and
/// refinement from the best of them.
fn qubit_search(cfg: &SearchConfig, f: &(dyn Fn(f64) -> f64 + Sync)) -> (f64, f64, Vec<f64>) {
    let g = cfg.grid_density;
    let grid: Vec<f64> = (0..g).map(|i| PI * i as f64 / (g - 1) as f64).collect();
    let coarse: Vec<f64> = grid.par_iter().map(|&a| f(a)).collect();
    let starts = top_k(&coarse, cfg.multistarts);
    let nm = cfg.optimizer();
    let refined: Vec<(f64, f64)> = starts
        .par_iter()
        .map(|&i| {
            let opt = nm.maximize(|x| f(x[0]), &[grid[i]], &[0.0], &[PI]);
            (opt.x[0], opt.value)
        })
        .collect();
    let trace: Vec<f64> = refined.iter().map(|r| r.1).collect();
    let mut best = (grid[best_of(&coarse)], coarse[best_of(&coarse)]);
    for r in refined {
        if r.1 > best.1 {
            best = r;
        }
    }
    (best.0, best.1, trace)
}

/// Maximum of `R_phi` over qubit pure states. Every qubit pure state is a
/// coherent state, and translation makes `beta'` irrelevant, so the search
/// runs over `alpha'` with `beta' = 0`.
pub fn max_phase_knowledge_qubit(cfg: &SearchConfig) -> Result<BoundResult> {
    cfg.validate()?;
    let eval = KnowledgeEvaluator::new(SpinSystem::QUBIT, cfg.n_quad)?;
    let f = |a: f64| eval.evaluate_pure(&qubit_state(a)).1;
    let (alpha, value, trace) = qubit_search(cfg, &f);
    Ok(BoundResult {
        value,
        argmax: Argmax::Coherent { alpha, beta: 0.0 },
        trace,
        state: qubit_state(alpha),
        verification: None,
    })
}

/// Maximum of `R_phi` over coherent states with `alpha'` restricted to the
/// given values.
pub fn max_phase_knowledge_qubit_on(alphas: &[f64], n_quad: usize) -> Result<f64> {
    let eval = KnowledgeEvaluator::new(SpinSystem::QUBIT, n_quad)?;
    let mut best = f64::NEG_INFINITY;
    for &a in alphas {
        if !(0.0..=PI).contains(&a) {
            return Err(Error::domain(format!("alpha' = {a} outside [0, pi]")));
        }
        best = best.max(eval.evaluate_pure(&qubit_state(a)).1);
    }
    Ok(best)
}

fn witness_text(rho: &DensityMatrix) -> String {
    let m = rho.matrix();
    let entries: Vec<String> = m.iter().map(|z| format!("{:.9}{:+.9}i", z.re, z.im)).collect();
    format!("rho (column-major) = [{}]", entries.join(", "))
}

/// Weighted sums `mu R_phi + R_m` of a set of states, failing on the first
/// one above `log2 d + slack`.
fn check_samples<'a>(
    eval: &KnowledgeEvaluator,
    states: impl IntoParallelIterator<Item = &'a DensityMatrix>,
    mu: f64,
    slack: f64,
    eps: f64,
) -> Result<SampleCheck> {
    let sys = eval.system();
    let bound = log2_dim(sys);
    let sums: Vec<(f64, f64, &DensityMatrix)> = states
        .into_par_iter()
        .map(|rho| {
            let k = eval.evaluate(rho);
            (mu * k.1 + k.0, ratio(sys, k, eps).unwrap_or(f64::INFINITY), rho)
        })
        .collect();
    let mut worst = f64::NEG_INFINITY;
    let mut min_ratio = f64::INFINITY;
    for (sum, r, rho) in &sums {
        if !sum.is_finite() || *sum > bound + slack {
            return Err(Error::BoundFalsified {
                message: format!("weighted sum {sum} exceeds {bound} with mu = {mu}"),
                witness: witness_text(rho),
            });
        }
        worst = worst.max(*sum);
        min_ratio = min_ratio.min(*r);
    }
    Ok(SampleCheck {
        samples: sums.len(),
        worst_sum: worst,
        min_ratio,
    })
}

fn random_mixed(sys: SpinSystem, seed: u64, n: usize) -> Vec<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_state_with(sys, StateKind::Mixed, &mut rng)).collect()
}

/// Largest `mu` with `mu R_phi + R_m <= 1` for the qubit, i.e. the infimum
/// of `(1 - R_m) / R_phi` over states with `R_phi > exclusion_eps`.
///
/// The weight is then checked on a dense grid of pure states and on
/// `10^4` random mixed states, and compared with `1 / r_phi`.
pub fn find_mu_qubit(cfg: &SearchConfig) -> Result<BoundResult> {
    cfg.validate()?;
    let sys = SpinSystem::QUBIT;
    let eval = KnowledgeEvaluator::new(sys, cfg.n_quad)?;
    let neg_ratio = |a: f64| {
        ratio(sys, eval.evaluate_pure(&qubit_state(a)), cfg.exclusion_eps)
            .map(|r| -r)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let (alpha, neg_mu, trace) = qubit_search(cfg, &neg_ratio);
    let mu = -neg_mu;

    let n_theta = 16 * cfg.grid_density;
    let n_phi = 16;
    let pure: Vec<DensityMatrix> = (0..=n_theta)
        .flat_map(|i| {
            (0..n_phi).map(move |k| {
                let p = CoherentParams::new(PI * i as f64 / n_theta as f64, TAU * k as f64 / n_phi as f64)
                    .expect("grid angles in range");
                density_from_pure(&make_coherent(sys, p))
            })
        })
        .collect();
    let pure = check_samples(&eval, &pure, mu, QUBIT_MU_SLACK, cfg.exclusion_eps)?;
    let mixed = random_mixed(sys, cfg.seed, MIXED_VERIFICATION_SAMPLES);
    let mixed = check_samples(&eval, &mixed, mu, QUBIT_MU_SLACK, cfg.exclusion_eps)?;

    let r_phi = max_phase_knowledge_qubit(cfg)?.value;
    if (mu - 1.0 / r_phi).abs() >= QUBIT_MU_CONSISTENCY {
        return Err(Error::property(format!(
            "mu = {mu} is not within {QUBIT_MU_CONSISTENCY} of 1/r_phi = {}",
            1.0 / r_phi
        )));
    }
    Ok(BoundResult {
        value: mu,
        argmax: Argmax::Coherent { alpha, beta: 0.0 },
        trace,
        state: qubit_state(alpha),
        verification: Some(Verification { pure, mixed }),
    })
}

/// Reduced spin-3/2 coordinates: three hyperspherical angles for the radii
/// and the phases `t_a`, `t_b` with `t_g = 0` (translation removes one phase).
fn reduced_to_params(x: &[f64]) -> FourLevelParams {
    let (s1, c1) = x[0].sin_cos();
    let (s2, c2) = x[1].sin_cos();
    let (s3, c3) = x[2].sin_cos();
    FourLevelParams {
        r_alpha: c1.abs(),
        r_beta: (s1 * c2).abs(),
        r_gamma: (s1 * s2 * c3).abs(),
        r_delta: (s1 * s2 * s3).abs(),
        theta_alpha: x[3],
        theta_beta: x[4],
        theta_gamma: 0.0,
    }
}

const REDUCED_LOWER: [f64; 5] = [0.0, 0.0, 0.0, -TAU, -TAU];
const REDUCED_UPPER: [f64; 5] = [FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, 2.0 * TAU, 2.0 * TAU];

fn wrap_pi(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(TAU) - PI;
    if y <= -PI {
        y + TAU
    } else {
        y
    }
}

/// Representative of the translation class with `t_b = 0` and
/// `t_g in [-pi/2, pi/2)`, phases wrapped into `(-pi, pi]`.
pub fn canonical_four_level(p: &FourLevelParams) -> FourLevelParams {
    // translation by delta shifts (t_a, t_b, t_g) by (-3, -2, -1) delta
    let base = p.theta_beta / 2.0;
    let pick = [base, base + PI]
        .into_iter()
        .map(|delta| {
            (
                wrap_pi(p.theta_alpha - 3.0 * delta),
                wrap_pi(p.theta_gamma - delta),
            )
        })
        .find(|&(_, tg)| (-FRAC_PI_2..FRAC_PI_2).contains(&tg))
        .unwrap_or((wrap_pi(p.theta_alpha - 3.0 * base), wrap_pi(p.theta_gamma - base)));
    FourLevelParams {
        theta_alpha: pick.0,
        theta_beta: 0.0,
        theta_gamma: pick.1,
        ..*p
    }
}

fn four_level_state(p: &FourLevelParams) -> PureState {
    make_four_level(p, true).expect("hyperspherical radii are normalised")
}

/// Seeded coarse sample of `grid_density^3` reduced points. Larger densities
/// extend the same sequence.
fn spin32_coarse_points(cfg: &SearchConfig) -> Vec<[f64; 5]> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.grid_density.pow(3);
    (0..n)
        .map(|_| {
            [
                rng.random_range(0.0..FRAC_PI_2),
                rng.random_range(0.0..FRAC_PI_2),
                rng.random_range(0.0..FRAC_PI_2),
                rng.random_range(0.0..TAU),
                rng.random_range(0.0..TAU),
            ]
        })
        .collect()
}

struct Spin32Search {
    params: FourLevelParams,
    value: f64,
    trace: Vec<f64>,
    coarse: Vec<[f64; 5]>,
}

fn spin32_search(cfg: &SearchConfig, f: &(dyn Fn(&FourLevelParams) -> f64 + Sync)) -> Spin32Search {
    let coarse = spin32_coarse_points(cfg);
    let values: Vec<f64> = coarse.par_iter().map(|x| f(&reduced_to_params(x))).collect();
    let starts = top_k(&values, cfg.multistarts);
    let nm = cfg.optimizer();
    let refined: Vec<(Vec<f64>, f64)> = starts
        .par_iter()
        .map(|&i| {
            let opt = nm.maximize(
                |x| f(&reduced_to_params(x)),
                &coarse[i],
                &REDUCED_LOWER,
                &REDUCED_UPPER,
            );
            (opt.x, opt.value)
        })
        .collect();
    let trace: Vec<f64> = refined.iter().map(|r| r.1).collect();
    let b = best_of(&values);
    let mut best = (coarse[b].to_vec(), values[b]);
    for r in refined {
        if r.1 > best.1 {
            best = r;
        }
    }
    Spin32Search {
        params: canonical_four_level(&reduced_to_params(&best.0)),
        value: best.1,
        trace,
        coarse,
    }
}

/// Maximum of `R_phi` over spin-3/2 pure states.
pub fn max_phase_knowledge_spin32(cfg: &SearchConfig) -> Result<BoundResult> {
    cfg.validate()?;
    let eval = KnowledgeEvaluator::new(SpinSystem::SPIN_3_2, cfg.n_quad)?;
    let f = |p: &FourLevelParams| eval.evaluate_pure(&four_level_state(p)).1;
    let found = spin32_search(cfg, &f);
    Ok(BoundResult {
        value: found.value,
        argmax: Argmax::FourLevel(found.params),
        trace: found.trace,
        state: four_level_state(&found.params),
        verification: None,
    })
}

/// Largest `mu_2` with `mu_2 R_phi + R_m <= 2` for spin 3/2: the infimum of
/// `(2 - R_m) / R_phi` over pure states with `R_phi > exclusion_eps`. The
/// argmax is the state where `R_S(mu_2)` reaches 2.
///
/// The weight is checked on the coarse pure sample and, separately, on
/// `10^4` random mixed states.
pub fn find_mu2_spin32(cfg: &SearchConfig) -> Result<BoundResult> {
    cfg.validate()?;
    let sys = SpinSystem::SPIN_3_2;
    let eval = KnowledgeEvaluator::new(sys, cfg.n_quad)?;
    let f = |p: &FourLevelParams| {
        ratio(sys, eval.evaluate_pure(&four_level_state(p)), cfg.exclusion_eps)
            .map(|r| -r)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let found = spin32_search(cfg, &f);
    let mu = -found.value;

    let mut pure: Vec<DensityMatrix> = found
        .coarse
        .iter()
        .map(|x| density_from_pure(&four_level_state(&reduced_to_params(x))))
        .collect();
    for m in sys.m_values() {
        pure.push(density_from_pure(&make_wigner_dicke(sys, m)?));
    }
    let pure = check_samples(&eval, &pure, mu, SPIN32_MU_SLACK, cfg.exclusion_eps)?;
    let mixed = random_mixed(sys, cfg.seed, MIXED_VERIFICATION_SAMPLES);
    let mixed = check_samples(&eval, &mixed, mu, SPIN32_MU_SLACK, cfg.exclusion_eps)?;

    Ok(BoundResult {
        value: mu,
        argmax: Argmax::FourLevel(found.params),
        trace: found.trace,
        state: four_level_state(&found.params),
        verification: Some(Verification { pure, mixed }),
    })
}

/// Extremes over random spin-3/2 pure states drawn from the whole Hilbert
/// space, kept apart from the four-level search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HilbertProbe {
    pub samples: usize,
    pub max_r_phi: f64,
    pub min_ratio: f64,
}

pub fn probe_full_hilbert_spin32(samples: usize, seed: u64, n_quad: usize) -> Result<HilbertProbe> {
    let sys = SpinSystem::SPIN_3_2;
    let eval = KnowledgeEvaluator::new(sys, n_quad)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<DensityMatrix> = (0..samples)
        .map(|_| random_state_with(sys, StateKind::Pure, &mut rng))
        .collect();
    let ks: Vec<(f64, f64)> = states.par_iter().map(|rho| eval.evaluate(rho)).collect();
    Ok(HilbertProbe {
        samples,
        max_r_phi: ks.iter().map(|k| k.1).fold(f64::NEG_INFINITY, f64::max),
        min_ratio: ks
            .iter()
            .filter_map(|&k| ratio(sys, k, SearchConfig::default().exclusion_eps))
            .fold(f64::INFINITY, f64::min),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnbiasednessReport {
    pub two_j: u32,
    /// Largest `R_phi` over the Wigner-Dicke states.
    pub wigner_dicke_max_r_phi: f64,
    /// `R_phi` and `R_m` at the maximum-phase-knowledge state.
    pub mxk_r_phi: f64,
    pub mxk_r_m: f64,
    /// Whether maximal phase knowledge also forces zero number knowledge.
    pub mutual: bool,
}

/// Number states carry no phase knowledge for every `j`; for the qubit the
/// converse holds as well, for spin 3/2 it does not.
pub fn check_unbiasedness_direction(sys: SpinSystem, cfg: &SearchConfig) -> Result<UnbiasednessReport> {
    let mxk = match sys.two_j() {
        1 => max_phase_knowledge_qubit(cfg)?,
        3 => max_phase_knowledge_spin32(cfg)?,
        _ => return Err(Error::domain("unbiasedness check supports j = 1/2 and j = 3/2 only")),
    };
    let eval = KnowledgeEvaluator::new(sys, cfg.n_quad)?;
    let mut wd_max = 0.0f64;
    for m in sys.m_values() {
        let r_phi = eval.evaluate_pure(&make_wigner_dicke(sys, m)?).1;
        if r_phi.abs() >= WIGNER_DICKE_TOL {
            return Err(Error::property(format!(
                "Wigner-Dicke state m = {m} has R_phi = {r_phi:.3e}"
            )));
        }
        wd_max = wd_max.max(r_phi.abs());
    }
    let (r_m, r_phi) = eval.evaluate_pure(&mxk.state);
    let mutual = r_m < QUBIT_MUTUAL_TOL;
    match sys.two_j() {
        1 if !mutual => {
            return Err(Error::property(format!(
                "qubit phase-optimal state has R_m = {r_m:.3e}"
            )))
        }
        3 if r_m <= SPIN32_BIAS_MIN => {
            return Err(Error::property(format!(
                "spin-3/2 phase-optimal state has R_m = {r_m:.3e}, not above {SPIN32_BIAS_MIN}"
            )))
        }
        _ => {}
    }
    Ok(UnbiasednessReport {
        two_j: sys.two_j(),
        wigner_dicke_max_r_phi: wd_max,
        mxk_r_phi: r_phi,
        mxk_r_m: r_m,
        mutual,
    })
}
