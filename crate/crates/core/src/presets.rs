//! Parameter sets of the published figures.
//!
//! Time windows are not given with the figures; the ones here cover the
//! range over which each curve settles.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::Serialize;

use crate::channels::{GammaRegime, OhmicBathParams, SgadBathParams};

/// Qubit weight used for the weighted knowledge sum in the figures.
pub const QUBIT_MU: f64 = 4.085;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseDampingPreset {
    pub name: &'static str,
    pub bath: OhmicBathParams,
    pub omega: f64,
    pub beta_p: f64,
    pub regime: GammaRegime,
    pub t_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SgadPreset {
    pub name: &'static str,
    pub bath: SgadBathParams,
    /// Fixed initial polar angle, when the figure has one.
    pub alpha_p: Option<f64>,
    /// Fixed initial azimuth, when the figure has one.
    pub beta_p: Option<f64>,
    /// Fixed exposure time, when the figure has one.
    pub t: Option<f64>,
    pub t_max: f64,
}

/// Phase damping, `T = 2`, `gamma0 = 0.025`, `omega_c = 100`, `omega = 1`,
/// `r = 1`, `a = 0`, `beta' = pi/4`; high-temperature `gamma(t)`.
pub fn fig2() -> PhaseDampingPreset {
    PhaseDampingPreset {
        name: "fig2",
        bath: OhmicBathParams {
            gamma0: 0.025,
            omega_c: 100.0,
            temperature: 2.0,
            r: 1.0,
            a: 0.0,
        },
        omega: 1.0,
        beta_p: FRAC_PI_4,
        regime: GammaRegime::HighT,
        t_max: 10.0,
    }
}

fn fig3(name: &'static str, r: f64, phi: f64) -> SgadPreset {
    SgadPreset {
        name,
        bath: SgadBathParams {
            gamma0: 0.01,
            omega: 1.0,
            temperature: 300.0,
            r,
            phi,
        },
        alpha_p: None,
        beta_p: None,
        t: Some(0.1),
        t_max: 0.1,
    }
}

/// SGAD, `T = 300`, `gamma0 = 0.01`, `t = 0.1`, `omega = 1`, no squeezing.
pub fn fig3a() -> SgadPreset {
    fig3("fig3a", 0.0, 0.0)
}

/// As [`fig3a`] with `r = 1`, `Phi = pi/8`.
pub fn fig3b() -> SgadPreset {
    fig3("fig3b", 1.0, PI / 8.0)
}

fn fig4a(name: &'static str, r: f64) -> SgadPreset {
    SgadPreset {
        name,
        bath: SgadBathParams {
            gamma0: 0.025,
            omega: 1.0,
            temperature: 0.0,
            r,
            phi: 0.0,
        },
        alpha_p: Some(FRAC_PI_4),
        beta_p: Some(FRAC_PI_4),
        t: None,
        t_max: 200.0,
    }
}

/// SGAD, `T = 0`, `gamma0 = 0.025`, `omega = 1`, `Phi = 0`, `r = 0`,
/// from `|pi/4, pi/4>` (bold curve).
pub fn fig4a_bold() -> SgadPreset {
    fig4a("fig4a-bold", 0.0)
}

/// As [`fig4a_bold`] with `r = 0.5` (dashed curve).
pub fn fig4a_dashed() -> SgadPreset {
    fig4a("fig4a-dashed", 0.5)
}

/// SGAD, `T = 0`, `Phi = 0`, `r = 0.5`, `gamma0 = 0.05`, `omega = 1`, from
/// `|alpha', pi/2>` for all `alpha'`.
pub fn fig4b() -> SgadPreset {
    SgadPreset {
        name: "fig4b",
        bath: SgadBathParams {
            gamma0: 0.05,
            omega: 1.0,
            temperature: 0.0,
            r: 0.5,
            phi: 0.0,
        },
        alpha_p: None,
        beta_p: Some(FRAC_PI_2),
        t: None,
        t_max: 100.0,
    }
}

pub fn sgad_preset(name: &str) -> Option<SgadPreset> {
    [fig3a(), fig3b(), fig4a_bold(), fig4a_dashed(), fig4b()]
        .into_iter()
        .find(|p| p.name == name)
}

pub fn phase_damping_preset(name: &str) -> Option<PhaseDampingPreset> {
    (name == "fig2").then(fig2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        fig2().bath.validate().unwrap();
        for name in ["fig3a", "fig3b", "fig4a-bold", "fig4a-dashed", "fig4b"] {
            let p = sgad_preset(name).unwrap();
            p.bath.validate().unwrap();
            assert_eq!(p.name, name);
        }
        assert!(sgad_preset("fig9").is_none());
        assert!(phase_damping_preset("fig2").is_some());
    }

    #[test]
    fn fig3_panels_differ_only_in_squeezing() {
        let (a, b) = (fig3a(), fig3b());
        assert_eq!(a.bath.gamma0, b.bath.gamma0);
        assert_eq!(a.bath.temperature, b.bath.temperature);
        assert_eq!(a.t, b.t);
        assert_ne!((a.bath.r, a.bath.phi), (b.bath.r, b.bath.phi));
    }
}
