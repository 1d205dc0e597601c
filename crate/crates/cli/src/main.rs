//! Command-line front end: distributions, knowledge, bound searches,
//! channel evolution and figure sweeps.

mod channel;
mod commands;
mod config;
mod error;
mod output;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use channel::{ChannelKind, Method};
use commands::{EvolveOptions, Figure, System, Target};
use config::Settings;
use error::CliResult;
use output::resolve_out_dir;

#[derive(Debug, Parser)]
#[command(name = "spinphase", version, about = "Number and phase knowledge of spin-j states")]
struct Cli {
    /// Settings file with [state], [bath], [search] and [output] sections.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory; overrides $SPINPHASE_OUT and [output] dir.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

/// State given as trailing words; negative values need `--` first.
#[derive(Debug, Args)]
struct StateArgs {
    /// wigner-dicke J M | coherent J THETA PHI | four-level RA RB RG RD TA TB TG | mixed J
    #[arg(value_name = "STATE", num_args = 0.., allow_negative_numbers = true)]
    spec: Vec<String>,
}

#[derive(Debug, Args)]
struct SearchFlags {
    #[arg(long)]
    grid_density: Option<usize>,
    #[arg(long)]
    multistarts: Option<usize>,
    #[arg(long)]
    local_tol: Option<f64>,
    #[arg(long)]
    exclusion_eps: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Quadrature nodes for the phase integral.
    #[arg(long)]
    n_quad: Option<usize>,
}

impl SearchFlags {
    fn apply(&self, s: &mut Settings) {
        s.set("search", "grid_density", self.grid_density);
        s.set("search", "multistarts", self.multistarts);
        s.set("search", "local_tol", self.local_tol);
        s.set("search", "exclusion_eps", self.exclusion_eps);
        s.set("search", "seed", self.seed);
        s.set("search", "n_quad", self.n_quad);
    }
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Write P(phi) to phase.csv and p(m) to number.csv.
    Dist {
        #[command(flatten)]
        state: StateArgs,
        /// Points of the phase grid.
        #[arg(long)]
        n_grid: Option<usize>,
    },
    /// Print R_m, R_phi, R_T and R_S(mu) in bits.
    Knowledge {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        n_quad: Option<usize>,
    },
    /// Search for the largest phase knowledge or the bound weight.
    Search {
        system: System,
        target: Target,
        #[command(flatten)]
        flags: SearchFlags,
        /// Also write the per-restart values to trace.csv.
        #[arg(long)]
        trace: bool,
        /// Print the record as one JSON object.
        #[arg(long)]
        json: bool,
    },
    /// Knowledge along a channel trajectory, or over the (alpha', beta') sphere.
    Evolve {
        channel: ChannelKind,
        /// Named parameter set; single flags override its values.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        gamma0: Option<f64>,
        /// Qubit frequency.
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        temperature: Option<f64>,
        /// Bath squeezing amplitude.
        #[arg(long)]
        r: Option<f64>,
        /// Bath squeezing phase (sgad).
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<String>,
        /// Cutoff frequency (pd).
        #[arg(long)]
        omega_c: Option<f64>,
        /// Squeezing time offset (pd).
        #[arg(long)]
        a: Option<f64>,
        /// zero or high temperature form of the decoherence rate (pd).
        #[arg(long)]
        regime: Option<String>,
        /// Start state, quoted as one argument.
        #[arg(long, allow_hyphen_values = true)]
        state: Option<String>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        n_times: Option<usize>,
        /// Add P(phi) at this many angles to each row.
        #[arg(long)]
        snapshots: Option<usize>,
        /// Write an N x N (alpha', beta') grid at time --t instead.
        #[arg(long, value_name = "N")]
        sweep: Option<usize>,
        /// Time of the sweep.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, value_enum, default_value_t)]
        method: Method,
        #[arg(long)]
        n_quad: Option<usize>,
    },
    /// Write the data behind a figure, with a manifest of its parameters.
    Reproduce {
        figure: Figure,
        #[arg(long)]
        n_grid: Option<usize>,
        #[arg(long)]
        n_times: Option<usize>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        n_quad: Option<usize>,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    let mut s = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let out = |s: &Settings| resolve_out_dir(cli.out.as_deref(), s.get("output", "dir"));
    match cli.command {
        Command::Dist { state, n_grid } => {
            s.set("output", "n_grid", n_grid);
            let spec = commands::state_from(&state.spec, &s)?;
            commands::dist(&spec, &s, &out(&s))
        }
        Command::Knowledge { state, mu, n_quad } => {
            s.set("state", "mu", mu);
            s.set("search", "n_quad", n_quad);
            let spec = commands::state_from(&state.spec, &s)?;
            commands::knowledge(&spec, &s)
        }
        Command::Search {
            system,
            target,
            flags,
            trace,
            json,
        } => {
            flags.apply(&mut s);
            commands::search(system, target, &s, trace, json, &out(&s))
        }
        Command::Evolve {
            channel,
            preset,
            gamma0,
            omega,
            temperature,
            r,
            phi,
            omega_c,
            a,
            regime,
            state,
            mu,
            t_max,
            n_times,
            snapshots,
            sweep,
            t,
            method,
            n_quad,
        } => {
            s.set("bath", "preset", preset);
            s.set("bath", "gamma0", gamma0);
            s.set("bath", "omega", omega);
            s.set("bath", "temperature", temperature);
            s.set("bath", "r", r);
            s.set("bath", "phi", phi);
            s.set("bath", "omega_c", omega_c);
            s.set("bath", "a", a);
            s.set("bath", "regime", regime);
            s.set("state", "spec", state);
            s.set("state", "mu", mu);
            s.set("output", "t_max", t_max);
            s.set("output", "n_times", n_times);
            s.set("output", "snapshots", snapshots);
            s.set("output", "sweep", sweep);
            s.set("output", "t", t);
            s.set("search", "n_quad", n_quad);
            commands::evolve(&EvolveOptions { channel, method }, &s, &out(&s))
        }
        Command::Reproduce {
            figure,
            n_grid,
            n_times,
            t_max,
            mu,
            n_quad,
        } => {
            s.set("output", "n_grid", n_grid);
            s.set("output", "n_times", n_times);
            s.set("output", "t_max", t_max);
            s.set("state", "mu", mu);
            s.set("search", "n_quad", n_quad);
            commands::reproduce(figure, &s, &out(&s))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
