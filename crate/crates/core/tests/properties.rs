use std::f64::consts::{PI, TAU};

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use proptest::prelude::*;

use spinphase::distributions::{number_distribution, phase_distribution, q_function};
use spinphase::knowledge::*;
use spinphase::quad::UniformRule;
use spinphase::state::*;
use spinphase::{DensityMatrix, SpinSystem, C64};

fn spin() -> impl Strategy<Value = SpinSystem> {
    (1u32..=7).prop_map(|t| SpinSystem::from_two_j(t).unwrap())
}

fn kind() -> impl Strategy<Value = StateKind> {
    prop_oneof![Just(StateKind::Pure), Just(StateKind::Mixed)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distributions_are_normalised(sys in spin(), kind in kind(), seed in any::<u64>()) {
        let rho = random_state(sys, kind, seed);
        let nd = number_distribution(&rho);
        prop_assert!((nd.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let pd = phase_distribution(&rho).unwrap();
        let rule = UniformRule::periodic(0.0, TAU, 256).unwrap();
        prop_assert!((rule.integrate(|phi| pd.density(phi)) - 1.0).abs() < 1e-12);
        prop_assert!(pd.minimum_on_grid(1024).1 > -1e-12);
        prop_assert!(pd.bandwidth(0.0) <= sys.two_j() as usize);
    }

    #[test]
    fn knowledge_is_bounded(sys in spin(), kind in kind(), seed in any::<u64>()) {
        let rho = random_state(sys, kind, seed);
        let rep = knowledge_report(&rho, 1.0).unwrap();
        let log_d = (sys.dim() as f64).log2();
        prop_assert!(rep.r_m >= -1e-12 && rep.r_m <= log_d + 1e-12);
        prop_assert!(rep.r_phi >= -1e-12);
        prop_assert!((rep.r_t - rep.r_m - rep.r_phi).abs() < 1e-15);
    }

    #[test]
    fn translation_shifts_the_phase_density(sys in spin(), seed in any::<u64>(), delta in 0.0..TAU) {
        let rho = random_state(sys, StateKind::Mixed, seed);
        let d = sys.dim();
        // rho_{nm} e^{i (n - m) delta}, with n - m = column - row in storage order
        let shifted = DMatrix::from_fn(d, d, |r, c| rho.get(r, c) * C64::from_polar(1.0, (c as f64 - r as f64) * delta));
        let moved = DensityMatrix::new(sys, shifted).unwrap();
        let p0 = phase_distribution(&rho).unwrap();
        let p1 = phase_distribution(&moved).unwrap();
        for k in 0..16 {
            let phi = TAU * k as f64 / 16.0;
            prop_assert!((p1.density(phi) - p0.density(phi + delta)).abs() < 1e-12);
        }
        let r0 = knowledge_phase(&p0, 1024).unwrap();
        let r1 = knowledge_phase(&p1, 1024).unwrap();
        prop_assert!((r0 - r1).abs() < 1e-10);
    }

    #[test]
    fn phase_knowledge_is_convex(sys in spin(), a in any::<u64>(), b in any::<u64>(), w in 0.0..1.0f64) {
        let ra = random_state(sys, StateKind::Pure, a);
        let rb = random_state(sys, StateKind::Pure, b);
        let mixed = ra.mix(&rb, w).unwrap();
        let k = |rho: &DensityMatrix| knowledge_report(rho, 1.0).unwrap();
        let (ka, kb, km) = (k(&ra), k(&rb), k(&mixed));
        prop_assert!(km.r_phi <= w * ka.r_phi + (1.0 - w) * kb.r_phi + 1e-10);
        prop_assert!(km.r_m <= w * ka.r_m + (1.0 - w) * kb.r_m + 1e-10);
    }

    #[test]
    fn q_function_is_a_probability(sys in spin(), seed in any::<u64>(), theta in 0.0..PI, phi in 0.0..TAU) {
        let rho = random_state(sys, StateKind::Mixed, seed);
        let q = q_function(&rho, theta, phi);
        prop_assert!((0.0..=1.0).contains(&q));
    }

    #[test]
    fn coherent_states_are_unit_vectors(sys in spin(), theta in 0.0..PI, phi in 0.0..TAU) {
        let psi = make_coherent(sys, CoherentParams::new(theta, phi).unwrap());
        prop_assert!((psi.amplitudes().norm() - 1.0).abs() < 1e-12);
        // the Q function peaks at the state's own direction
        let rho = density_from_pure(&psi);
        prop_assert!((q_function(&rho, theta, phi) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn discrete_knowledge_is_log_d_minus_entropy(weights in prop::collection::vec(0.0..1.0f64, 2..9)) {
        let total: f64 = weights.iter().sum();
        prop_assume!(total > 1e-6);
        let p: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let d = p.len() as f64;
        let h = shannon(&p).unwrap();
        let r = knowledge_discrete(&p).unwrap();
        prop_assert!((r - (d.log2() - h)).abs() < 1e-12);
        let uniform = vec![1.0 / d; p.len()];
        prop_assert!((rel_entropy_discrete(&p, &uniform).unwrap() - r).abs() < 1e-12);
    }
}

#[test]
fn wigner_dicke_states_have_flat_phase_for_every_spin() {
    for two_j in 1..=25 {
        let sys = SpinSystem::from_two_j(two_j).unwrap();
        for m in sys.m_values() {
            let rho = density_from_pure(&make_wigner_dicke(sys, m).unwrap());
            let pd = phase_distribution(&rho).unwrap();
            assert!(pd.max_nonzero_harmonic() < 1e-15);
            let rep = knowledge_report(&rho, 1.0).unwrap();
            assert_abs_diff_eq!(rep.r_m, (sys.dim() as f64).log2(), epsilon = 1e-12);
        }
    }
}

#[test]
fn equal_amplitude_superposition_is_below_the_optimum() {
    let equal = FourLevelParams::with_implied_delta(0.5, 0.5, 0.5, 0.0, 0.0, 0.0).unwrap();
    let rho = density_from_pure(&make_four_level(&equal, false).unwrap());
    let rep = knowledge_report(&rho, 1.0).unwrap();
    let best = FourLevelParams::with_implied_delta(0.356, 0.611, 0.611, 0.0, 0.0, 0.0).unwrap();
    let rho_best = density_from_pure(&make_four_level(&best, true).unwrap());
    assert!(rep.r_phi < knowledge_report(&rho_best, 1.0).unwrap().r_phi - 0.01);
}
