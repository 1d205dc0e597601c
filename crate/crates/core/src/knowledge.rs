//! Entropies and knowledge measures, in bits.
//!
//! Knowledge `R` of a distribution is its relative entropy with respect to
//! the uniform distribution over the same outcomes: `log2 d - H(p)` for `d`
//! discrete outcomes, and `int P log2(2 pi P) dphi` for the phase.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::distributions::{number_distribution, BetaKernel, NumberDistribution, PhaseDistribution, NEGATIVITY_SLACK};
use crate::error::{Error, Result};
use crate::quad::UniformRule;
use crate::spin::SpinSystem;
use crate::state::{DensityMatrix, C64};

pub const DEFAULT_N_QUAD: usize = 1024;

const SUM_TOL: f64 = 1e-9;
const CONTINUOUS_NORM_TOL: f64 = 1e-6;
/// Densities below this contribute nothing to `P log P`.
const DENSITY_FLOOR: f64 = 1e-15;
const UNITARY_TOL: f64 = 1e-10;
const BOUND_SLACK: f64 = 1e-9;
const IDENTITY_TOL: f64 = 1e-12;

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::domain("empty distribution"));
    }
    if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::domain(format!("invalid probability {x}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > SUM_TOL {
        return Err(Error::domain(format!("probabilities sum to {total}")));
    }
    Ok(())
}

/// Shannon entropy `-sum p log2 p`.
pub fn shannon(p: &[f64]) -> Result<f64> {
    check_distribution(p)?;
    Ok(-p.iter().map(|&x| plogp(x)).sum::<f64>())
}

/// `sum f log2(f / g)`.
pub fn rel_entropy_discrete(f: &[f64], g: &[f64]) -> Result<f64> {
    if f.len() != g.len() {
        return Err(Error::domain("distributions have different supports"));
    }
    check_distribution(f)?;
    check_distribution(g)?;
    let mut acc = 0.0;
    for (&fi, &gi) in f.iter().zip(g) {
        if fi > 0.0 {
            if gi <= 0.0 {
                return Err(Error::domain(
                    "f is not absolutely continuous with respect to g",
                ));
            }
            acc += fi * (fi / gi).log2();
        }
    }
    Ok(acc)
}

/// `sum p log2(d p)`: relative entropy against the uniform distribution.
pub fn knowledge_discrete(p: &[f64]) -> Result<f64> {
    check_distribution(p)?;
    let d = p.len() as f64;
    Ok(p.iter().map(|&x| if x > 0.0 { x * (d * x).log2() } else { 0.0 }).sum())
}

/// Number knowledge `R_m`.
pub fn knowledge_number(nd: &NumberDistribution) -> Result<f64> {
    knowledge_discrete(nd.probs())
}

/// Trapezoid nodes and harmonic tables for evaluating `R_phi` of one spin
/// repeatedly.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseQuadrature {
    sys: SpinSystem,
    rule: UniformRule,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl PhaseQuadrature {
    /// Needs at least `8 (2j + 1)` nodes.
    pub fn new(sys: SpinSystem, n_quad: usize) -> Result<Self> {
        let min_nodes = 8 * sys.dim();
        if n_quad < min_nodes {
            return Err(Error::domain(format!(
                "n_quad = {n_quad} is below the minimum {min_nodes} for this spin"
            )));
        }
        let rule = UniformRule::periodic(0.0, TAU, n_quad)?;
        let harmonics = sys.dim() - 1;
        let mut cos = Vec::with_capacity(harmonics * n_quad);
        let mut sin = Vec::with_capacity(harmonics * n_quad);
        for k in 1..=harmonics {
            for phi in rule.nodes() {
                let (s, c) = (k as f64 * phi).sin_cos();
                cos.push(c);
                sin.push(s);
            }
        }
        Ok(PhaseQuadrature { sys, rule, cos, sin })
    }

    pub fn system(&self) -> SpinSystem {
        self.sys
    }

    pub fn nodes(&self) -> usize {
        self.rule.len()
    }

    fn density_at(&self, coeffs: &[C64], i: usize) -> f64 {
        let n = self.rule.len();
        let mut p = coeffs[0].re;
        for (k, c) in coeffs.iter().enumerate().skip(1) {
            let idx = (k - 1) * n + i;
            p += 2.0 * (c.re * self.cos[idx] - c.im * self.sin[idx]);
        }
        p
    }

    fn integrate(&self, coeffs: &[C64], strict: bool) -> Result<f64> {
        let mut acc = 0.0;
        for i in 0..self.rule.len() {
            let p = self.density_at(coeffs, i);
            if strict && p < -NEGATIVITY_SLACK {
                return Err(Error::state(format!(
                    "phase density {p:.3e} at phi = {:.6}",
                    self.rule.node(i)
                )));
            }
            if p >= DENSITY_FLOOR {
                acc += p * (TAU * p).log2();
            }
        }
        Ok(acc * self.rule.weight())
    }

    /// `R_phi` of a validated distribution; fails on densities below `-1e-9`.
    pub fn knowledge(&self, pd: &PhaseDistribution) -> Result<f64> {
        if pd.system() != self.sys {
            return Err(Error::domain("quadrature and distribution have different spin"));
        }
        self.integrate(pd.harmonics(), true)
    }

    /// `R_phi` from raw coefficients of a state known to be physical.
    pub(crate) fn knowledge_of_coefficients(&self, coeffs: &[C64]) -> f64 {
        self.integrate(coeffs, false).unwrap_or(f64::NAN)
    }
}

/// Phase knowledge `R_phi = int_0^{2pi} P log2(2 pi P) dphi` by the periodic
/// trapezoid rule with `n_quad` nodes.
pub fn knowledge_phase(pd: &PhaseDistribution, n_quad: usize) -> Result<f64> {
    PhaseQuadrature::new(pd.system(), n_quad)?.knowledge(pd)
}

/// Continuous Shannon entropy `-int P log2 P`, equal to `log2(2 pi) - R_phi`.
/// It can be negative in principle.
pub fn continuous_entropy_phase(pd: &PhaseDistribution, n_quad: usize) -> Result<f64> {
    Ok(TAU.log2() - knowledge_phase(pd, n_quad)?)
}

/// A density sampled at the nodes of a [`UniformRule`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledDensity {
    rule: UniformRule,
    values: Vec<f64>,
}

impl SampledDensity {
    pub fn new(rule: UniformRule, values: Vec<f64>) -> Result<Self> {
        if values.len() != rule.len() {
            return Err(Error::domain("sample count does not match the rule"));
        }
        Ok(SampledDensity { rule, values })
    }

    pub fn from_fn(rule: UniformRule, f: impl Fn(f64) -> f64) -> Self {
        let values = rule.nodes().map(f).collect();
        SampledDensity { rule, values }
    }

    pub fn rule(&self) -> &UniformRule {
        &self.rule
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `int f log2(f / g)` for a sampled density `f` and a constant density `g`.
pub fn rel_entropy_continuous(f: &SampledDensity, g: f64) -> Result<f64> {
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::domain(format!("reference density {g} must be positive")));
    }
    if let Some(x) = f.values.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::domain(format!("invalid density sample {x}")));
    }
    let norm = f.rule.integrate_samples(&f.values)?;
    if (norm - 1.0).abs() > CONTINUOUS_NORM_TOL {
        return Err(Error::domain(format!("density integrates to {norm}, not 1")));
    }
    let integrand: Vec<f64> = f
        .values
        .iter()
        .map(|&x| if x > 0.0 { x * (x / g).log2() } else { 0.0 })
        .collect();
    f.rule.integrate_samples(&integrand)
}

/// Two orthonormal eigenbases, stored as the columns of unitary matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianPair {
    basis_a: DMatrix<C64>,
    basis_b: DMatrix<C64>,
}

impl HermitianPair {
    pub fn new(basis_a: DMatrix<C64>, basis_b: DMatrix<C64>) -> Result<Self> {
        for (name, u) in [("A", &basis_a), ("B", &basis_b)] {
            if !u.is_square() {
                return Err(Error::domain(format!("basis {name} is not square")));
            }
            let dev = (u.adjoint() * u - DMatrix::identity(u.nrows(), u.ncols())).camax();
            if dev > UNITARY_TOL {
                return Err(Error::domain(format!(
                    "basis {name} is not unitary (deviation {dev:.3e})"
                )));
            }
        }
        if basis_a.nrows() != basis_b.nrows() {
            return Err(Error::domain("bases have different dimensions"));
        }
        Ok(HermitianPair { basis_a, basis_b })
    }

    /// Eigenbases of two Hermitian observables. Degenerate eigenvalues still
    /// give one outcome per eigenvector.
    pub fn from_observables(a: &DMatrix<C64>, b: &DMatrix<C64>) -> Result<Self> {
        let eig = |m: &DMatrix<C64>, name: &str| -> Result<DMatrix<C64>> {
            if !m.is_square() || (m - m.adjoint()).camax() > IDENTITY_TOL {
                return Err(Error::domain(format!("observable {name} is not Hermitian")));
            }
            Ok(m.clone().symmetric_eigen().eigenvectors)
        };
        Self::new(eig(a, "A")?, eig(b, "B")?)
    }

    pub fn dim(&self) -> usize {
        self.basis_a.nrows()
    }

    pub fn basis_a(&self) -> &DMatrix<C64> {
        &self.basis_a
    }

    pub fn basis_b(&self) -> &DMatrix<C64> {
        &self.basis_b
    }

    /// Born probabilities of the A and B measurements on `rho`.
    pub fn outcome_probabilities(&self, rho: &DensityMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
        if rho.matrix().nrows() != self.dim() {
            return Err(Error::domain("state and observables have different dimensions"));
        }
        let probs = |u: &DMatrix<C64>| -> Vec<f64> {
            let rotated = u.adjoint() * rho.matrix() * u;
            let raw: Vec<f64> = (0..self.dim()).map(|i| rotated[(i, i)].re.max(0.0)).collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|p| p / total).collect()
        };
        Ok((probs(&self.basis_a), probs(&self.basis_b)))
    }
}

/// `f(A, B) = max_{a,b} |<a|b>|`.
pub fn mub_overlap(pair: &HermitianPair) -> f64 {
    (pair.basis_a.adjoint() * &pair.basis_b)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropicReport {
    pub h_a: f64,
    pub h_b: f64,
    pub r_a: f64,
    pub r_b: f64,
    pub overlap: f64,
    pub is_mub: bool,
}

impl EntropicReport {
    pub fn knowledge_sum(&self) -> f64 {
        self.r_a + self.r_b
    }
}

/// Entropies and knowledges of the two measurements, checked against
/// `R(A) + R(B) = 2 log2 d - H(A) - H(B)`, the overlap bound
/// `H(A) + H(B) >= 2 log2(1/f)` and, for unbiased pairs,
/// `R(A) + R(B) <= log2 d`.
pub fn check_entropic_bounds(pair: &HermitianPair, rho: &DensityMatrix) -> Result<EntropicReport> {
    let (pa, pb) = pair.outcome_probabilities(rho)?;
    let d = pair.dim() as f64;
    let h_a = shannon(&pa)?;
    let h_b = shannon(&pb)?;
    let r_a = knowledge_discrete(&pa)?;
    let r_b = knowledge_discrete(&pb)?;
    let overlap = mub_overlap(pair);
    let is_mub = (overlap - d.sqrt().recip()).abs() < UNITARY_TOL;

    let identity_gap = (r_a + r_b) - (2.0 * d.log2() - h_a - h_b);
    if identity_gap.abs() > IDENTITY_TOL {
        return Err(Error::property(format!(
            "R(A)+R(B) differs from 2 log d - H(A) - H(B) by {identity_gap:.3e}"
        )));
    }
    let lower = 2.0 * overlap.recip().log2();
    if h_a + h_b < lower - BOUND_SLACK {
        return Err(Error::property(format!(
            "H(A)+H(B) = {} below the overlap bound {lower}",
            h_a + h_b
        )));
    }
    if is_mub && r_a + r_b > d.log2() + BOUND_SLACK {
        return Err(Error::property(format!(
            "knowledge sum {} exceeds log2 d for an unbiased pair",
            r_a + r_b
        )));
    }
    Ok(EntropicReport {
        h_a,
        h_b,
        r_a,
        r_b,
        overlap,
        is_mub,
    })
}

/// Number and phase knowledge of one state, with the plain and weighted sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeReport {
    pub r_m: f64,
    pub r_phi: f64,
    pub r_t: f64,
    pub r_s: f64,
    pub mu: f64,
}

impl KnowledgeReport {
    pub fn from_parts(r_m: f64, r_phi: f64, mu: f64) -> Self {
        KnowledgeReport {
            r_m,
            r_phi,
            r_t: r_m + r_phi,
            r_s: mu * r_phi + r_m,
            mu,
        }
    }
}

pub fn knowledge_report(rho: &DensityMatrix, mu: f64) -> Result<KnowledgeReport> {
    knowledge_report_with(rho, mu, DEFAULT_N_QUAD)
}

pub fn knowledge_report_with(rho: &DensityMatrix, mu: f64, n_quad: usize) -> Result<KnowledgeReport> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::domain(format!("weight mu = {mu} must be positive")));
    }
    let r_m = knowledge_number(&number_distribution(rho))?;
    let pd = BetaKernel::new(rho.system()).phase_distribution(rho)?;
    let r_phi = knowledge_phase(&pd, n_quad)?;
    Ok(KnowledgeReport::from_parts(r_m, r_phi, mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::phase_distribution;
    use crate::spin::SpinSystem;
    use crate::state::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn z_basis() -> DMatrix<C64> {
        DMatrix::identity(2, 2)
    }

    fn n_basis(theta: f64) -> DMatrix<C64> {
        // eigenvectors of n.sigma, n = (sin t, 0, cos t), in (up, down) order
        let (s, co) = (theta / 2.0).sin_cos();
        DMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
    }

    #[test]
    fn shannon_examples() {
        assert_abs_diff_eq!(shannon(&[1.0, 0.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(shannon(&[0.5, 0.5]).unwrap(), 1.0, epsilon = 1e-15);
        // -(3/4)log2(3/4) - (1/4)log2(1/4) = 2 - (3/4)log2 3
        let h = 2.0 - 0.75 * 3f64.log2();
        assert_abs_diff_eq!(shannon(&[0.75, 0.25]).unwrap(), h, epsilon = 1e-15);
        assert_abs_diff_eq!(h, 0.8113, epsilon = 5e-5);
        assert!(shannon(&[0.7, 0.2]).is_err());
        assert!(shannon(&[1.2, -0.2]).is_err());
    }

    #[test]
    fn relative_entropy_examples() {
        assert_abs_diff_eq!(rel_entropy_discrete(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert_abs_diff_eq!(rel_entropy_discrete(&[1.0, 0.0], &[0.5, 0.5]).unwrap(), 1.0);
        let h = shannon(&[0.75, 0.25]).unwrap();
        assert_abs_diff_eq!(
            rel_entropy_discrete(&[0.75, 0.25], &[0.5, 0.5]).unwrap(),
            1.0 - h,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(1.0 - h, 0.1887, epsilon = 5e-5);
        assert!(matches!(
            rel_entropy_discrete(&[0.5, 0.5], &[1.0, 0.0]),
            Err(Error::Domain(_))
        ));
        assert!(rel_entropy_discrete(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn discrete_knowledge_examples() {
        assert_abs_diff_eq!(knowledge_discrete(&[0.25; 4]).unwrap(), 0.0);
        assert_abs_diff_eq!(knowledge_discrete(&[0.0, 1.0]).unwrap(), 1.0);
        assert_abs_diff_eq!(knowledge_discrete(&[0.5, 0.5]).unwrap(), 0.0);
    }

    #[test]
    fn box_density_knowledge() {
        for x0 in [2.0f64, 4.0, 8.0] {
            let rule = UniformRule::midpoint(0.0, 1.0, 1024).unwrap();
            let f = SampledDensity::from_fn(rule, |x| if x < 1.0 / x0 { x0 } else { 0.0 });
            assert_abs_diff_eq!(rel_entropy_continuous(&f, 1.0).unwrap(), x0.log2(), epsilon = 1e-12);
        }
        let rule = UniformRule::midpoint(0.0, 1.0, 64).unwrap();
        let flat = SampledDensity::from_fn(rule, |_| 1.0);
        assert_abs_diff_eq!(rel_entropy_continuous(&flat, 1.0).unwrap(), 0.0);
        let unnormalised = SampledDensity::from_fn(rule, |_| 1.5);
        assert!(matches!(rel_entropy_continuous(&unnormalised, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn phase_knowledge_needs_enough_nodes() {
        let pd = PhaseDistribution::uniform(SpinSystem::SPIN_3_2);
        assert!(knowledge_phase(&pd, 31).is_err());
        assert_abs_diff_eq!(knowledge_phase(&pd, 32).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn mub_overlap_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let x = DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]);
        let pair = HermitianPair::new(z_basis(), x).unwrap();
        assert_abs_diff_eq!(mub_overlap(&pair), h, epsilon = 1e-15);
        let same = HermitianPair::new(z_basis(), z_basis()).unwrap();
        assert_abs_diff_eq!(mub_overlap(&same), 1.0);
        let tilted = HermitianPair::new(z_basis(), n_basis(PI / 3.0)).unwrap();
        assert_abs_diff_eq!(mub_overlap(&tilted), 3f64.sqrt() / 2.0, epsilon = 1e-15);
        let not_unitary = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(HermitianPair::new(z_basis(), not_unitary).is_err());
    }

    #[test]
    fn entropic_bounds_for_eigenstates() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let x = DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]);
        let pair = HermitianPair::new(z_basis(), x).unwrap();
        let up = density_from_pure(&make_wigner_dicke(SpinSystem::QUBIT, 0.5).unwrap());
        let rep = check_entropic_bounds(&pair, &up).unwrap();
        assert!(rep.is_mub);
        assert_abs_diff_eq!(rep.knowledge_sum(), 1.0, epsilon = 1e-15);

        for theta in [0.3, 1.0, PI / 2.0, 2.2] {
            let basis = n_basis(theta);
            let pair = HermitianPair::new(z_basis(), basis.clone()).unwrap();
            let col: Vec<C64> = basis.column(0).iter().copied().collect();
            let rho = density_from_pure(&PureState::new(SpinSystem::QUBIT, col).unwrap());
            let rep = check_entropic_bounds(&pair, &rho).unwrap();
            let c2 = (theta / 2.0).cos().powi(2);
            let expected = 2.0 - shannon(&[c2, 1.0 - c2]).unwrap();
            assert_abs_diff_eq!(rep.knowledge_sum(), expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn observables_give_the_same_pair() {
        let am = angular_momentum_matrices(SpinSystem::QUBIT);
        let pair = HermitianPair::from_observables(&am.jz, &am.jx).unwrap();
        assert_abs_diff_eq!(mub_overlap(&pair), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        assert!(HermitianPair::from_observables(&am.jz, &(&am.jx * C64::new(0.0, 1.0))).is_err());
    }

    #[test]
    fn report_examples() {
        let wd = density_from_pure(&make_wigner_dicke(SpinSystem::QUBIT, 0.5).unwrap());
        let rep = knowledge_report(&wd, 4.085).unwrap();
        assert_abs_diff_eq!(rep.r_m, 1.0);
        assert_abs_diff_eq!(rep.r_phi, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.r_t, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.r_s, 1.0, epsilon = 1e-12);

        let mixed = DensityMatrix::maximally_mixed(SpinSystem::QUBIT);
        let rep = knowledge_report(&mixed, 2.0).unwrap();
        for v in [rep.r_m, rep.r_phi, rep.r_t, rep.r_s] {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        }

        assert!(knowledge_report(&mixed, 0.0).is_err());
    }

    #[test]
    fn equatorial_weighted_sum_is_near_one() {
        let eq = density_from_pure(&make_coherent(SpinSystem::QUBIT, CoherentParams::new(PI / 2.0, 0.0).unwrap()));
        let r_phi = knowledge_phase(&phase_distribution(&eq).unwrap(), DEFAULT_N_QUAD).unwrap();
        let rep = knowledge_report(&eq, 1.0 / 0.245).unwrap();
        assert_abs_diff_eq!(rep.r_m, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rep.r_s, 1.0, epsilon = 0.005);
        assert_abs_diff_eq!(rep.r_phi, r_phi);
    }
}
