//! Noise channels assembled from presets and `[bath]` settings.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use spinphase::channels::{
    default_steps, lindblad_trajectory, phase_damping_state, sgad_evolve, sgad_state, Frame, GammaRegime,
    OhmicBathParams, SgadBathParams,
};
use spinphase::distributions::phase_distribution;
use spinphase::knowledge::{knowledge_report_with, KnowledgeReport};
use spinphase::presets::{phase_damping_preset, sgad_preset};
use spinphase::{DensityMatrix, SpinSystem};

use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::output::{linspace, Manifest, Table};
use crate::parse::StateSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ChannelKind {
    /// Phase damping by an ohmic bath.
    Pd,
    /// Squeezed generalized amplitude damping.
    Sgad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Method {
    /// Closed-form solution.
    #[default]
    Closed,
    /// Direct integration of the master equation (sgad only).
    Ode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    Pd {
        bath: OhmicBathParams,
        omega: f64,
        regime: GammaRegime,
    },
    Sgad(SgadBathParams),
}

/// Values a preset fixes besides the bath.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PresetDefaults {
    pub alpha_p: Option<f64>,
    pub beta_p: Option<f64>,
    pub t: Option<f64>,
    pub t_max: Option<f64>,
}

const PD_ONLY: &[&str] = &["omega_c", "a", "regime"];
const SGAD_ONLY: &[&str] = &["phi"];

fn parse_regime(s: &str) -> CliResult<GammaRegime> {
    match s {
        "zero" => Ok(GammaRegime::ZeroT),
        "high" => Ok(GammaRegime::HighT),
        _ => Err(CliError::usage(format!("[bath] regime: '{s}' is not zero or high"))),
    }
}

fn regime_name(r: GammaRegime) -> &'static str {
    match r {
        GammaRegime::ZeroT => "zero",
        GammaRegime::HighT => "high",
    }
}

impl Channel {
    pub fn from_settings(kind: ChannelKind, s: &Settings) -> CliResult<(Channel, PresetDefaults)> {
        let foreign = match kind {
            ChannelKind::Pd => SGAD_ONLY,
            ChannelKind::Sgad => PD_ONLY,
        };
        if let Some(k) = foreign.iter().find(|k| s.has("bath", k)) {
            return Err(CliError::usage(format!("[bath] {k} does not apply to {kind:?}").to_lowercase()));
        }
        let preset = s.get("bath", "preset");
        let need = |key: &str, v: Option<f64>| {
            v.ok_or_else(|| CliError::usage(format!("missing [bath] {key}: give --{key} or a preset")))
        };
        match kind {
            ChannelKind::Pd => {
                let p = preset
                    .map(|name| {
                        phase_damping_preset(name)
                            .ok_or_else(|| CliError::usage(format!("no phase damping preset '{name}'")))
                    })
                    .transpose()?;
                let pick = |key: &str, from: Option<f64>| -> CliResult<f64> {
                    Ok(s.number("bath", key)?.or(from)).and_then(|v| need(key, v))
                };
                let bath = OhmicBathParams::new(
                    pick("gamma0", p.map(|p| p.bath.gamma0))?,
                    pick("omega_c", p.map(|p| p.bath.omega_c))?,
                    pick("temperature", p.map(|p| p.bath.temperature))?,
                    pick("r", p.map(|p| p.bath.r))?,
                    pick("a", p.map(|p| p.bath.a))?,
                )?;
                let omega = pick("omega", p.map(|p| p.omega))?;
                if !(omega.is_finite() && omega > 0.0) {
                    return Err(CliError::usage(format!("[bath] omega = {omega} must be positive")));
                }
                let regime = match s.get("bath", "regime") {
                    Some(r) => parse_regime(r)?,
                    None => p.map(|p| p.regime).unwrap_or(GammaRegime::HighT),
                };
                let defaults = PresetDefaults {
                    alpha_p: None,
                    beta_p: p.map(|p| p.beta_p),
                    t: None,
                    t_max: p.map(|p| p.t_max),
                };
                Ok((Channel::Pd { bath, omega, regime }, defaults))
            }
            ChannelKind::Sgad => {
                let p = preset
                    .map(|name| sgad_preset(name).ok_or_else(|| CliError::usage(format!("no sgad preset '{name}'"))))
                    .transpose()?;
                let pick = |key: &str, from: Option<f64>, angle: bool| -> CliResult<f64> {
                    let v = if angle { s.angle("bath", key)? } else { s.number("bath", key)? };
                    need(key, v.or(from))
                };
                let bath = SgadBathParams::new(
                    pick("gamma0", p.map(|p| p.bath.gamma0), false)?,
                    pick("omega", p.map(|p| p.bath.omega), false)?,
                    pick("temperature", p.map(|p| p.bath.temperature), false)?,
                    pick("r", p.map(|p| p.bath.r), false)?,
                    pick("phi", p.map(|p| p.bath.phi), true)?,
                )?;
                let defaults = PresetDefaults {
                    alpha_p: p.and_then(|p| p.alpha_p),
                    beta_p: p.and_then(|p| p.beta_p),
                    t: p.and_then(|p| p.t),
                    t_max: p.map(|p| p.t_max),
                };
                Ok((Channel::Sgad(bath), defaults))
            }
        }
    }

    /// State at time `t` from the coherent state `|alpha', beta'>`.
    pub fn coherent_at(&self, alpha_p: f64, beta_p: f64, t: f64) -> CliResult<DensityMatrix> {
        Ok(match self {
            Channel::Pd { bath, omega, regime } => phase_damping_state(alpha_p, beta_p, bath, *omega, t, *regime)?,
            Channel::Sgad(bath) => sgad_state(alpha_p, beta_p, bath, t)?,
        })
    }

    pub fn state_at(&self, start: &StateSpec, t: f64) -> CliResult<DensityMatrix> {
        if start.system() != SpinSystem::QUBIT {
            return Err(CliError::usage("channels act on a qubit: the start state needs j = 1/2"));
        }
        match (self, start) {
            (_, StateSpec::Coherent { theta, phi, .. }) => self.coherent_at(*theta, *phi, t),
            (Channel::Sgad(bath), _) => Ok(sgad_evolve(&start.density()?, bath, t)?),
            (Channel::Pd { .. }, _) => Err(CliError::usage("pd needs a coherent start state")),
        }
    }

    pub fn describe(&self, m: &mut Manifest, prefix: &str) {
        let key = |k: &str| format!("{prefix}{k}");
        match self {
            Channel::Pd { bath, omega, regime } => {
                m.add(&key("channel"), "pd")
                    .add(&key("gamma0"), bath.gamma0)
                    .add(&key("omega_c"), bath.omega_c)
                    .add(&key("temperature"), bath.temperature)
                    .add(&key("r"), bath.r)
                    .add(&key("a"), bath.a)
                    .add(&key("omega"), omega)
                    .add(&key("regime"), regime_name(*regime));
            }
            Channel::Sgad(b) => {
                m.add(&key("channel"), "sgad")
                    .add(&key("gamma0"), b.gamma0)
                    .add(&key("omega"), b.omega)
                    .add(&key("temperature"), b.temperature)
                    .add(&key("r"), b.r)
                    .add(&key("phi"), b.phi);
            }
        }
    }
}

/// Default start for a channel run: `|alpha', beta'>` from the preset, or
/// the equatorial state `|pi/2, 0>`.
pub fn default_start(d: &PresetDefaults) -> StateSpec {
    StateSpec::Coherent {
        sys: SpinSystem::QUBIT,
        theta: d.alpha_p.unwrap_or(FRAC_PI_2),
        phi: d.beta_p.unwrap_or(0.0),
    }
}

pub fn report(rho: &DensityMatrix, mu: f64, n_quad: usize) -> CliResult<KnowledgeReport> {
    Ok(knowledge_report_with(rho, mu, n_quad)?)
}

pub struct Trajectory<'a> {
    pub channel: &'a Channel,
    pub start: &'a StateSpec,
    pub times: &'a [f64],
    pub mu: f64,
    pub n_quad: usize,
    pub snapshots: usize,
    pub method: Method,
}

impl Trajectory<'_> {
    pub fn states(&self) -> CliResult<Vec<DensityMatrix>> {
        match (self.method, self.channel) {
            (Method::Closed, ch) => self.times.par_iter().map(|&t| ch.state_at(self.start, t)).collect(),
            (Method::Ode, Channel::Sgad(bath)) => {
                let t_end = self.times.last().copied().unwrap_or(0.0);
                let rate = if t_end > 0.0 {
                    default_steps(bath, t_end)? as f64 / t_end
                } else {
                    1.0
                };
                Ok(lindblad_trajectory(&self.start.density()?, bath, self.times, rate, Frame::Lab)?)
            }
            (Method::Ode, Channel::Pd { .. }) => Err(CliError::usage("--method ode applies to sgad only")),
        }
    }

    /// Columns `t, r_m, r_phi, r_s, p_up`, then `P(phi)` at `snapshots`
    /// evenly spaced angles when asked.
    pub fn table(&self) -> CliResult<Table> {
        let mut header: Vec<String> = ["t", "r_m", "r_phi", "r_s", "p_up"].map(String::from).to_vec();
        let phis: Vec<f64> = (0..self.snapshots)
            .map(|k| std::f64::consts::TAU * k as f64 / self.snapshots as f64)
            .collect();
        header.extend((0..self.snapshots).map(|k| format!("p_phi_{k}")));
        let states = self.states()?;
        let rows: Vec<Vec<f64>> = states
            .par_iter()
            .zip(self.times)
            .map(|(rho, &t)| {
                let k = report(rho, self.mu, self.n_quad)?;
                let mut row = vec![t, k.r_m, k.r_phi, k.r_s, rho.get(0, 0).re];
                if !phis.is_empty() {
                    let pd = phase_distribution(rho)?;
                    row.extend(phis.iter().map(|&phi| pd.density(phi)));
                }
                Ok(row)
            })
            .collect::<CliResult<_>>()?;
        let mut table = Table::new(&header);
        rows.iter().for_each(|r| table.push(r));
        Ok(table)
    }
}

/// Knowledge over the `(alpha', beta')` sphere at time `t`, `alpha'`-major.
pub fn surface(channel: &Channel, t: f64, n: usize, mu: f64, n_quad: usize) -> CliResult<Table> {
    let alphas = linspace(0.0, std::f64::consts::PI, n);
    let betas = linspace(0.0, std::f64::consts::TAU, n);
    let grid: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| betas.iter().map(move |&b| (a, b)))
        .collect();
    let rows: Vec<[f64; 6]> = grid
        .par_iter()
        .map(|&(a, b)| {
            let k = report(&channel.coherent_at(a, b, t)?, mu, n_quad)?;
            Ok([a, b, k.r_m, k.r_phi, mu * k.r_phi, k.r_s])
        })
        .collect::<CliResult<_>>()?;
    let mut table = Table::new(&["alpha", "beta", "r_m", "r_phi", "mu_r_phi", "r_s"]);
    rows.iter().for_each(|r| table.push(r));
    Ok(table)
}

/// Knowledge over `alpha'` and time from `|alpha', beta'>`, `alpha'`-major.
pub fn alpha_time(channel: &Channel, beta_p: f64, n: usize, times: &[f64], mu: f64, n_quad: usize) -> CliResult<Table> {
    let alphas = linspace(0.0, std::f64::consts::PI, n);
    let grid: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| times.iter().map(move |&t| (a, t)))
        .collect();
    let rows: Vec<[f64; 6]> = grid
        .par_iter()
        .map(|&(a, t)| {
            let k = report(&channel.coherent_at(a, beta_p, t)?, mu, n_quad)?;
            Ok([a, t, k.r_m, k.r_phi, mu * k.r_phi, k.r_s])
        })
        .collect::<CliResult<_>>()?;
    let mut table = Table::new(&["alpha", "t", "r_m", "r_phi", "mu_r_phi", "r_s"]);
    rows.iter().for_each(|r| table.push(r));
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_fill_the_bath() {
        let mut s = Settings::default();
        s.set("bath", "preset", Some("fig4a-dashed"));
        let (ch, d) = Channel::from_settings(ChannelKind::Sgad, &s).unwrap();
        assert!(matches!(ch, Channel::Sgad(b) if b.r == 0.5 && b.gamma0 == 0.025));
        assert_eq!(d.t_max, Some(200.0));
        s.set("bath", "r", Some(0.0));
        let (ch, _) = Channel::from_settings(ChannelKind::Sgad, &s).unwrap();
        assert!(matches!(ch, Channel::Sgad(b) if b.r == 0.0));
    }

    #[test]
    fn missing_and_foreign_keys_are_reported() {
        let mut s = Settings::default();
        s.set("bath", "gamma0", Some(0.1));
        let err = Channel::from_settings(ChannelKind::Sgad, &s).unwrap_err().to_string();
        assert!(err.contains("[bath] omega"), "{err}");
        s.set("bath", "omega_c", Some(10.0));
        let err = Channel::from_settings(ChannelKind::Sgad, &s).unwrap_err().to_string();
        assert!(err.contains("omega_c"), "{err}");
        let mut s = Settings::default();
        s.set("bath", "preset", Some("fig2"));
        assert!(Channel::from_settings(ChannelKind::Sgad, &s).is_err());
        assert!(Channel::from_settings(ChannelKind::Pd, &s).is_ok());
    }

    #[test]
    fn phase_damping_needs_a_coherent_start() {
        let mut s = Settings::default();
        s.set("bath", "preset", Some("fig2"));
        let (ch, _) = Channel::from_settings(ChannelKind::Pd, &s).unwrap();
        let mixed = StateSpec::Mixed { sys: SpinSystem::QUBIT };
        assert!(ch.state_at(&mixed, 1.0).is_err());
        let big = StateSpec::Mixed { sys: SpinSystem::SPIN_3_2 };
        assert!(ch.state_at(&big, 1.0).is_err());
    }
}
