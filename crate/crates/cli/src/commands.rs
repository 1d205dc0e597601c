use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::path::Path;

use rayon::prelude::*;
use serde_json::json;

use spinphase::distributions::{number_distribution, phase_distribution};
use spinphase::knowledge::{knowledge_report_with, DEFAULT_N_QUAD};
use spinphase::presets::{self, QUBIT_MU};
use spinphase::search::{
    find_mu2_spin32, find_mu_qubit, max_phase_knowledge_qubit, max_phase_knowledge_spin32, Argmax, BoundResult,
    SearchConfig,
};
use spinphase::state::{density_from_pure, make_coherent, CoherentParams};
use spinphase::SpinSystem;

use crate::channel::{alpha_time, default_start, report, surface, Channel, ChannelKind, Method, Trajectory};
use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, fmt_bits, linspace, Manifest, Table};
use crate::parse::StateSpec;

pub const DEFAULT_DIST_GRID: usize = 256;
pub const DEFAULT_TIMES: usize = 101;
pub const DEFAULT_SURFACE_GRID: usize = 61;
pub const DEFAULT_FIG1_GRID: usize = 181;

fn positive(v: Option<f64>, name: &str, default: f64) -> CliResult<f64> {
    let x = v.unwrap_or(default);
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::usage(format!("{name} = {x} must be positive")))
    }
}

fn at_least(v: Option<usize>, name: &str, default: usize, min: usize) -> CliResult<usize> {
    let n = v.unwrap_or(default);
    if n >= min {
        Ok(n)
    } else {
        Err(CliError::usage(format!("{name} = {n} must be at least {min}")))
    }
}

/// State from positional tokens, else from `[state] spec`.
pub fn state_from(tokens: &[String], s: &Settings) -> CliResult<StateSpec> {
    if !tokens.is_empty() {
        return StateSpec::parse(tokens);
    }
    match s.get("state", "spec") {
        Some(spec) => StateSpec::parse_str(spec),
        None => Err(CliError::usage("no state given: pass a state spec or set [state] spec")),
    }
}

fn n_quad(s: &Settings) -> CliResult<usize> {
    at_least(s.count("search", "n_quad")?, "[search] n_quad", DEFAULT_N_QUAD, 8)
}

pub fn dist(spec: &StateSpec, s: &Settings, out: &Path) -> CliResult<()> {
    let n = at_least(s.count("output", "n_grid")?, "[output] n_grid", DEFAULT_DIST_GRID, 1)?;
    let rho = spec.density()?;
    let pd = phase_distribution(&rho)?;
    let mut phase = Table::new(&["phi", "density"]);
    for k in 0..n {
        let phi = TAU * k as f64 / n as f64;
        phase.push(&[phi, pd.density(phi)]);
    }
    let mut number = Table::new(&["m", "prob"]);
    for (m, p) in number_distribution(&rho).entries() {
        number.push(&[m, p]);
    }
    ensure_dir(out)?;
    phase.write(&out.join("phase.csv"))?;
    number.write(&out.join("number.csv"))
}

pub fn knowledge(spec: &StateSpec, s: &Settings) -> CliResult<()> {
    let mu = positive(s.number("state", "mu")?, "mu", 1.0)?;
    let k = knowledge_report_with(&spec.density()?, mu, n_quad(s)?)?;
    println!("state={spec}");
    println!("mu={mu}");
    println!("r_m={}", fmt_bits(k.r_m));
    println!("r_phi={}", fmt_bits(k.r_phi));
    println!("r_t={}", fmt_bits(k.r_t));
    println!("r_s={}", fmt_bits(k.r_s));
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum System {
    Qubit,
    Spin32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Target {
    /// Largest phase knowledge.
    RphiMax,
    /// Smallest weight for which `mu R_phi + R_m <= log2 d` holds.
    Mu,
}

pub fn search_config(s: &Settings) -> CliResult<SearchConfig> {
    let d = SearchConfig::default();
    let cfg = SearchConfig {
        grid_density: s.count("search", "grid_density")?.unwrap_or(d.grid_density),
        multistarts: s.count("search", "multistarts")?.unwrap_or(d.multistarts),
        local_tol: s.number("search", "local_tol")?.unwrap_or(d.local_tol),
        exclusion_eps: s.number("search", "exclusion_eps")?.unwrap_or(d.exclusion_eps),
        seed: s.seed("search", "seed")?.unwrap_or(d.seed),
        n_quad: s.count("search", "n_quad")?.unwrap_or(d.n_quad),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn record(system: System, target: Target, cfg: &SearchConfig, res: &BoundResult) -> Vec<(String, serde_json::Value)> {
    let mut r: Vec<(String, serde_json::Value)> = vec![
        ("system".into(), json!(format!("{system:?}").to_lowercase())),
        ("target".into(), json!(if target == Target::Mu { "mu" } else { "rphi-max" })),
        ("value".into(), json!(res.value)),
    ];
    match res.argmax {
        Argmax::Coherent { alpha, beta } => {
            r.push(("argmax.alpha".into(), json!(alpha)));
            r.push(("argmax.beta".into(), json!(beta)));
        }
        Argmax::FourLevel(p) => {
            for (k, v) in [
                ("r_alpha", p.r_alpha),
                ("r_beta", p.r_beta),
                ("r_gamma", p.r_gamma),
                ("r_delta", p.r_delta),
                ("theta_alpha", p.theta_alpha),
                ("theta_beta", p.theta_beta),
                ("theta_gamma", p.theta_gamma),
            ] {
                r.push((format!("argmax.{k}"), json!(v)));
            }
        }
    }
    for (k, v) in [
        ("grid_density", json!(cfg.grid_density)),
        ("multistarts", json!(cfg.multistarts)),
        ("local_tol", json!(cfg.local_tol)),
        ("exclusion_eps", json!(cfg.exclusion_eps)),
        ("seed", json!(cfg.seed)),
        ("n_quad", json!(cfg.n_quad)),
    ] {
        r.push((format!("config.{k}"), v));
    }
    if let Some(v) = &res.verification {
        for (name, c) in [("pure", &v.pure), ("mixed", &v.mixed)] {
            r.push((format!("verification.{name}.samples"), json!(c.samples)));
            r.push((format!("verification.{name}.worst_sum"), json!(c.worst_sum)));
            r.push((format!("verification.{name}.min_ratio"), json!(c.min_ratio)));
        }
    }
    r
}

pub fn search(system: System, target: Target, s: &Settings, trace: bool, as_json: bool, out: &Path) -> CliResult<()> {
    let cfg = search_config(s)?;
    let res = match (system, target) {
        (System::Qubit, Target::RphiMax) => max_phase_knowledge_qubit(&cfg)?,
        (System::Qubit, Target::Mu) => find_mu_qubit(&cfg)?,
        (System::Spin32, Target::RphiMax) => max_phase_knowledge_spin32(&cfg)?,
        (System::Spin32, Target::Mu) => find_mu2_spin32(&cfg)?,
    };
    let fields = record(system, target, &cfg, &res);
    if as_json {
        let obj: serde_json::Map<String, serde_json::Value> = fields.into_iter().collect();
        println!("{}", serde_json::Value::Object(obj));
    } else {
        for (k, v) in fields {
            match v {
                serde_json::Value::String(s) => println!("{k}={s}"),
                v => println!("{k}={v}"),
            }
        }
    }
    if trace {
        let mut t = Table::new(&["restart", "value"]);
        for (i, v) in res.trace.iter().enumerate() {
            t.push(&[i as f64, *v]);
        }
        ensure_dir(out)?;
        t.write(&out.join("trace.csv"))?;
    }
    Ok(())
}

pub struct EvolveOptions {
    pub channel: ChannelKind,
    pub method: Method,
}

pub fn evolve(opts: &EvolveOptions, s: &Settings, out: &Path) -> CliResult<()> {
    let (channel, defaults) = Channel::from_settings(opts.channel, s)?;
    let mu = positive(s.number("state", "mu")?, "mu", QUBIT_MU)?;
    let n_quad = n_quad(s)?;
    let mut m = Manifest::new("evolve");
    channel.describe(&mut m, "bath.");
    m.add("mu", mu).add("n_quad", n_quad);
    ensure_dir(out)?;

    if let Some(n) = s.count("output", "sweep")? {
        let n = at_least(Some(n), "[output] sweep", 0, 2)?;
        let t = s
            .number("output", "t")?
            .or(defaults.t)
            .or(s.number("output", "t_max")?)
            .or(defaults.t_max)
            .ok_or_else(|| CliError::usage("sweep needs a time: give --t"))?;
        m.add("sweep", n).add("t", t);
        surface(&channel, t, n, mu, n_quad)?.write(&out.join("sweep.csv"))?;
        return m.write(&out.join("sweep.manifest.txt"));
    }

    let start = match s.get("state", "spec") {
        Some(spec) => StateSpec::parse_str(spec)?,
        None => default_start(&defaults),
    };
    let t_max = s
        .number("output", "t_max")?
        .or(defaults.t_max)
        .ok_or_else(|| CliError::usage("missing [output] t_max: give --t-max or a preset"))?;
    if !(t_max.is_finite() && t_max >= 0.0) {
        return Err(CliError::usage(format!("t_max = {t_max} must be non-negative")));
    }
    let n_times = at_least(s.count("output", "n_times")?, "[output] n_times", DEFAULT_TIMES, 1)?;
    let snapshots = s.count("output", "snapshots")?.unwrap_or(0);
    let times = linspace(0.0, t_max, n_times);
    let table = Trajectory {
        channel: &channel,
        start: &start,
        times: &times,
        mu,
        n_quad,
        snapshots,
        method: opts.method,
    }
    .table()?;
    m.add("state", &start)
        .add("method", format!("{:?}", opts.method).to_lowercase())
        .add("t_max", t_max)
        .add("n_times", n_times)
        .add("snapshots", snapshots);
    table.write(&out.join("evolve.csv"))?;
    m.write(&out.join("evolve.manifest.txt"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    All,
}

impl Figure {
    const EACH: [Figure; 6] = [
        Figure::Fig1,
        Figure::Fig2,
        Figure::Fig3a,
        Figure::Fig3b,
        Figure::Fig4a,
        Figure::Fig4b,
    ];

    fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
            Figure::Fig4a => "fig4a",
            Figure::Fig4b => "fig4b",
            Figure::All => "all",
        }
    }
}

pub fn reproduce(figure: Figure, s: &Settings, out: &Path) -> CliResult<()> {
    if figure == Figure::All {
        return Figure::EACH.iter().try_for_each(|&f| reproduce(f, s, out));
    }
    let mu = positive(s.number("state", "mu")?, "mu", QUBIT_MU)?;
    let n_quad = n_quad(s)?;
    let n_times = at_least(s.count("output", "n_times")?, "[output] n_times", DEFAULT_TIMES, 1)?;
    let t_max_flag = s.number("output", "t_max")?;
    let dir = out.join(figure.name());
    ensure_dir(&dir)?;
    let mut m = Manifest::new("reproduce");
    m.add("figure", figure.name()).add("mu", mu).add("n_quad", n_quad);

    match figure {
        Figure::Fig1 => {
            let n = at_least(s.count("output", "n_grid")?, "[output] n_grid", DEFAULT_FIG1_GRID, 2)?;
            let alphas = linspace(0.0, PI, n);
            let rows: Vec<[f64; 5]> = alphas
                .par_iter()
                .map(|&a| {
                    let rho = density_from_pure(&make_coherent(SpinSystem::QUBIT, CoherentParams::new(a, 0.0)?));
                    let k = report(&rho, mu, n_quad)?;
                    Ok([a, k.r_phi, k.r_m, k.r_t, k.r_s])
                })
                .collect::<CliResult<_>>()?;
            let mut t = Table::new(&["alpha", "r_phi", "r_m", "r_t", "r_s"]);
            rows.iter().for_each(|r| t.push(r));
            m.add("beta", 0.0).add("n_grid", n);
            t.write(&dir.join("fig1.csv"))?;
        }
        Figure::Fig2 => {
            let p = presets::fig2();
            let n = at_least(s.count("output", "n_grid")?, "[output] n_grid", DEFAULT_SURFACE_GRID, 2)?;
            let t_max = t_max_flag.unwrap_or(p.t_max);
            let channel = Channel::Pd {
                bath: p.bath,
                omega: p.omega,
                regime: p.regime,
            };
            channel.describe(&mut m, "bath.");
            m.add("beta", p.beta_p)
                .add("n_grid", n)
                .add("t_max", t_max)
                .add("n_times", n_times);
            alpha_time(&channel, p.beta_p, n, &linspace(0.0, t_max, n_times), mu, n_quad)?
                .write(&dir.join("fig2.csv"))?;
        }
        Figure::Fig3a | Figure::Fig3b => {
            let p = if figure == Figure::Fig3a { presets::fig3a() } else { presets::fig3b() };
            let n = at_least(s.count("output", "n_grid")?, "[output] n_grid", DEFAULT_SURFACE_GRID, 2)?;
            let t = s.number("output", "t")?.or(p.t).unwrap_or(p.t_max);
            let channel = Channel::Sgad(p.bath);
            channel.describe(&mut m, "bath.");
            m.add("t", t).add("n_grid", n);
            surface(&channel, t, n, mu, n_quad)?.write(&dir.join(format!("{}.csv", figure.name())))?;
        }
        Figure::Fig4a => {
            for p in [presets::fig4a_bold(), presets::fig4a_dashed()] {
                let channel = Channel::Sgad(p.bath);
                let start = StateSpec::Coherent {
                    sys: SpinSystem::QUBIT,
                    theta: p.alpha_p.unwrap_or(FRAC_PI_2),
                    phi: p.beta_p.unwrap_or(0.0),
                };
                let t_max = t_max_flag.unwrap_or(p.t_max);
                let times = linspace(0.0, t_max, n_times);
                channel.describe(&mut m, &format!("{}.", p.name));
                m.add(&format!("{}.state", p.name), &start)
                    .add(&format!("{}.t_max", p.name), t_max);
                Trajectory {
                    channel: &channel,
                    start: &start,
                    times: &times,
                    mu,
                    n_quad,
                    snapshots: 0,
                    method: Method::Closed,
                }
                .table()?
                .write(&dir.join(format!("{}.csv", p.name)))?;
            }
            m.add("n_times", n_times);
        }
        Figure::Fig4b => {
            let p = presets::fig4b();
            let n = at_least(s.count("output", "n_grid")?, "[output] n_grid", DEFAULT_SURFACE_GRID, 2)?;
            let t_max = t_max_flag.unwrap_or(p.t_max);
            let beta = p.beta_p.unwrap_or(FRAC_PI_2);
            let channel = Channel::Sgad(p.bath);
            channel.describe(&mut m, "bath.");
            m.add("beta", beta)
                .add("n_grid", n)
                .add("t_max", t_max)
                .add("n_times", n_times);
            alpha_time(&channel, beta, n, &linspace(0.0, t_max, n_times), mu, n_quad)?
                .write(&dir.join("fig4b.csv"))?;
        }
        Figure::All => unreachable!(),
    }
    m.write(&dir.join("manifest.txt"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn search_config_reads_overrides() {
        let mut s = Settings::default();
        s.set("search", "grid_density", Some(16));
        s.set("search", "seed", Some(9));
        let cfg = search_config(&s).unwrap();
        assert_eq!((cfg.grid_density, cfg.seed), (16, 9));
        assert_eq!(cfg.multistarts, SearchConfig::default().multistarts);
        s.set("search", "local_tol", Some(-1.0));
        assert!(search_config(&s).is_err());
    }

    #[test]
    fn state_comes_from_tokens_before_config() {
        let mut s = Settings::default();
        s.set("state", "spec", Some("mixed 1"));
        let from_file = state_from(&[], &s).unwrap();
        assert_eq!(from_file.system(), SpinSystem::new(1.0).unwrap());
        let tokens: Vec<String> = ["wigner-dicke", "0.5", "0.5"].map(String::from).to_vec();
        assert_eq!(state_from(&tokens, &s).unwrap().system(), SpinSystem::QUBIT);
        assert!(state_from(&[], &Settings::default()).is_err());
    }
}
