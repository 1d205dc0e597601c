//! Numbers, angles and state specs as typed on the command line.

use std::f64::consts::PI;

use spinphase::state::{
    density_from_pure, make_coherent, make_four_level, make_wigner_dicke, CoherentParams, FourLevelParams,
};
use spinphase::{DensityMatrix, SpinSystem};

use crate::error::{CliError, CliResult};

pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("'{s}' is not a finite number")),
    }
}

/// Radians, or a multiple of pi: `pi`, `-pi/2`, `3pi/4`, `3*pi/4`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let Some(at) = t.find("pi") else {
        return parse_number(t);
    };
    let bad = || format!("'{t}' is not an angle");
    let (head, tail) = (&t[..at], &t[at + 2..]);
    let coeff = match head.trim_end_matches('*') {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => parse_number(c).map_err(|_| bad())?,
    };
    let div = match tail {
        "" => 1.0,
        d => match d.strip_prefix('/').map(parse_number) {
            Some(Ok(v)) if v != 0.0 => v,
            _ => return Err(bad()),
        },
    };
    Ok(coeff * PI / div)
}

/// Spin quantum number as `1.5` or `3/2`.
pub fn parse_spin(s: &str) -> Result<SpinSystem, String> {
    let j = parse_fraction(s)?;
    SpinSystem::new(j).map_err(|e| format!("j = {s}: {e}"))
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    WignerDicke { sys: SpinSystem, m: f64 },
    Coherent { sys: SpinSystem, theta: f64, phi: f64 },
    FourLevel(FourLevelParams),
    /// The maximally mixed state `I/d`.
    Mixed { sys: SpinSystem },
}

pub const SPEC_FORMS: &str =
    "wigner-dicke J M | coherent J THETA PHI | four-level RA RB RG RD TA TB TG | mixed J";

impl StateSpec {
    pub fn parse(tokens: &[String]) -> CliResult<Self> {
        let fail = |msg: String| CliError::usage(format!("state spec: {msg} (forms: {SPEC_FORMS})"));
        let (kind, args) = tokens
            .split_first()
            .ok_or_else(|| fail("missing".into()))?;
        let want = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(fail(format!("{kind} takes {n} values, got {}", args.len())))
            }
        };
        let num = |s: &String| parse_number(s).map_err(&fail);
        let ang = |s: &String| parse_angle(s).map_err(&fail);
        let spin = |s: &String| parse_spin(s).map_err(&fail);
        let spec = match kind.as_str() {
            "wigner-dicke" => {
                want(2)?;
                StateSpec::WignerDicke {
                    sys: spin(&args[0])?,
                    m: parse_fraction(&args[1]).map_err(&fail)?,
                }
            }
            "coherent" => {
                want(3)?;
                StateSpec::Coherent {
                    sys: spin(&args[0])?,
                    theta: ang(&args[1])?,
                    phi: ang(&args[2])?,
                }
            }
            "four-level" => {
                want(7)?;
                StateSpec::FourLevel(FourLevelParams {
                    r_alpha: num(&args[0])?,
                    r_beta: num(&args[1])?,
                    r_gamma: num(&args[2])?,
                    r_delta: num(&args[3])?,
                    theta_alpha: ang(&args[4])?,
                    theta_beta: ang(&args[5])?,
                    theta_gamma: ang(&args[6])?,
                })
            }
            "mixed" => {
                want(1)?;
                StateSpec::Mixed { sys: spin(&args[0])? }
            }
            other => return Err(fail(format!("unknown form '{other}'"))),
        };
        spec.density()?;
        Ok(spec)
    }

    /// Parses a spec held as one whitespace-separated string.
    pub fn parse_str(s: &str) -> CliResult<Self> {
        let tokens: Vec<String> = s.split_whitespace().map(String::from).collect();
        Self::parse(&tokens)
    }

    pub fn system(&self) -> SpinSystem {
        match self {
            StateSpec::WignerDicke { sys, .. } | StateSpec::Coherent { sys, .. } | StateSpec::Mixed { sys } => *sys,
            StateSpec::FourLevel(_) => SpinSystem::SPIN_3_2,
        }
    }

    pub fn density(&self) -> CliResult<DensityMatrix> {
        Ok(match self {
            StateSpec::WignerDicke { sys, m } => density_from_pure(&make_wigner_dicke(*sys, *m)?),
            StateSpec::Coherent { sys, theta, phi } => {
                density_from_pure(&make_coherent(*sys, CoherentParams::new(*theta, *phi)?))
            }
            StateSpec::FourLevel(p) => density_from_pure(&make_four_level(p, false)?),
            StateSpec::Mixed { sys } => DensityMatrix::maximally_mixed(*sys),
        })
    }
}

impl std::fmt::Display for StateSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StateSpec::WignerDicke { sys, m } => write!(f, "wigner-dicke {} {m}", sys.j()),
            StateSpec::Coherent { sys, theta, phi } => write!(f, "coherent {} {theta} {phi}", sys.j()),
            StateSpec::FourLevel(p) => write!(
                f,
                "four-level {} {} {} {} {} {} {}",
                p.r_alpha, p.r_beta, p.r_gamma, p.r_delta, p.theta_alpha, p.theta_beta, p.theta_gamma
            ),
            StateSpec::Mixed { sys } => write!(f, "mixed {}", sys.j()),
        }
    }
}

/// `1.5` or `3/2`.
fn parse_fraction(s: &str) -> Result<f64, String> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_number(d)?;
            if d == 0.0 {
                return Err(format!("'{s}' is not a number"));
            }
            Ok(parse_number(n)? / d)
        }
        None => parse_number(s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn angles_accept_pi_forms() {
        assert_abs_diff_eq!(parse_angle("pi").unwrap(), PI);
        assert_abs_diff_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_abs_diff_eq!(parse_angle("pi/8").unwrap(), PI / 8.0);
        assert_abs_diff_eq!(parse_angle("-pi/4").unwrap(), -PI / 4.0);
        assert_abs_diff_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_abs_diff_eq!(parse_angle("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_abs_diff_eq!(parse_angle("0.25").unwrap(), 0.25);
        for bad in ["pie", "pi/0", "pi/x", "xpi", "nan", ""] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn spins_accept_fractions() {
        assert_eq!(parse_spin("3/2").unwrap(), SpinSystem::SPIN_3_2);
        assert_eq!(parse_spin("0.5").unwrap(), SpinSystem::QUBIT);
        assert!(parse_spin("0.7").is_err());
        assert!(parse_spin("half").is_err());
        assert!(parse_spin("1/0").is_err());
    }

    #[test]
    fn specs_build_valid_states() {
        let s = StateSpec::parse(&toks("coherent 1/2 pi/2 0")).unwrap();
        assert_eq!(s.system(), SpinSystem::QUBIT);
        let s = StateSpec::parse(&toks("wigner-dicke 3/2 -1/2")).unwrap();
        assert_eq!(s.density().unwrap().get(2, 2).re, 1.0);
        let s = StateSpec::parse(&toks("four-level 0.5 0.5 0.5 0.5 pi 0 pi")).unwrap();
        assert_eq!(s.system(), SpinSystem::SPIN_3_2);
        assert!(StateSpec::parse(&toks("mixed 2")).is_ok());
    }

    #[test]
    fn specs_reject_bad_input() {
        for bad in [
            "",
            "coherent 0.7 0 0",
            "coherent 0.5 0",
            "wigner-dicke 0.5 1",
            "four-level 0.9 0.9 0.1 0.1 0 0 0",
            "squeezed 0.5",
        ] {
            assert!(StateSpec::parse(&toks(bad)).is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for s in ["coherent 0.5 1.2 0.3", "wigner-dicke 1.5 0.5", "mixed 1"] {
            let spec = StateSpec::parse(&toks(s)).unwrap();
            assert_eq!(StateSpec::parse_str(&spec.to_string()).unwrap(), spec);
        }
    }
}
