//! Flat `key = value` settings with `[section]` headers.
//!
//! Values from a config file are loaded first; command-line flags are then
//! written over them.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{CliError, CliResult};
use crate::parse::{parse_angle, parse_number};

pub const SECTIONS: &[(&str, &[&str])] = &[
    ("state", &["spec", "mu"]),
    (
        "bath",
        &["preset", "gamma0", "omega", "temperature", "r", "phi", "omega_c", "a", "regime"],
    ),
    (
        "search",
        &["grid_density", "multistarts", "local_tol", "exclusion_eps", "seed", "n_quad"],
    ),
    ("output", &["dir", "n_grid", "n_times", "t_max", "t", "snapshots", "sweep"]),
];

fn known(section: &str, key: &str) -> bool {
    SECTIONS
        .iter()
        .any(|(s, keys)| *s == section && keys.contains(&key))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<(String, String), String>,
}

impl Settings {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut out = Settings::default();
        let mut section: Option<String> = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| CliError::usage(format!("config line {}: {msg}", n + 1));
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                if !SECTIONS.iter().any(|(s, _)| *s == name) {
                    return Err(at(format!("unknown section [{name}]")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected key = value, got '{line}'")))?;
            let sec = section
                .as_deref()
                .ok_or_else(|| at("key outside any [section]".into()))?;
            let key = key.trim();
            if !known(sec, key) {
                return Err(at(format!("unknown key '{key}' in [{sec}]")));
            }
            out.values
                .insert((sec.to_string(), key.to_string()), value.trim().to_string());
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    /// Sets a value, as a flag does; `None` leaves the file value alone.
    pub fn set(&mut self, section: &str, key: &str, value: Option<impl ToString>) {
        debug_assert!(known(section, key), "[{section}] {key}");
        if let Some(v) = value {
            self.values
                .insert((section.to_string(), key.to_string()), v.to_string());
        }
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.values
            .get(&(section.to_string(), key.to_string()))
            .map(String::as_str)
    }

    pub fn has(&self, section: &str, key: &str) -> bool {
        self.get(section, key).is_some()
    }

    pub fn number(&self, section: &str, key: &str) -> CliResult<Option<f64>> {
        self.get(section, key)
            .map(|v| parse_number(v).map_err(|e| CliError::usage(format!("[{section}] {key}: {e}"))))
            .transpose()
    }

    pub fn angle(&self, section: &str, key: &str) -> CliResult<Option<f64>> {
        self.get(section, key)
            .map(|v| parse_angle(v).map_err(|e| CliError::usage(format!("[{section}] {key}: {e}"))))
            .transpose()
    }

    pub fn count(&self, section: &str, key: &str) -> CliResult<Option<usize>> {
        self.get(section, key)
            .map(|v| {
                v.parse::<usize>().map_err(|_| {
                    CliError::usage(format!("[{section}] {key}: '{v}' is not a non-negative integer"))
                })
            })
            .transpose()
    }

    pub fn seed(&self, section: &str, key: &str) -> CliResult<Option<u64>> {
        self.get(section, key)
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| CliError::usage(format!("[{section}] {key}: '{v}' is not a seed")))
            })
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let s = Settings::parse(
            "# run\n[state]\nspec = coherent 0.5 pi/2 0\nmu=4.085 # weight\n\n[search]\nseed = 7\n",
        )
        .unwrap();
        assert_eq!(s.get("state", "spec"), Some("coherent 0.5 pi/2 0"));
        assert_eq!(s.number("state", "mu").unwrap(), Some(4.085));
        assert_eq!(s.seed("search", "seed").unwrap(), Some(7));
        assert_eq!(s.get("bath", "r"), None);
    }

    #[test]
    fn rejects_unknown_keys_and_sections() {
        assert!(Settings::parse("[state]\nspin = 1\n").is_err());
        assert!(Settings::parse("[plot]\n").is_err());
        assert!(Settings::parse("mu = 1\n").is_err());
        assert!(Settings::parse("[state]\nmu 1\n").is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let mut s = Settings::parse("[output]\nn_grid = 10\n").unwrap();
        s.set("output", "n_grid", Some(20));
        s.set("output", "n_times", None::<usize>);
        assert_eq!(s.count("output", "n_grid").unwrap(), Some(20));
        assert_eq!(s.count("output", "n_times").unwrap(), None);
    }

    #[test]
    fn bad_values_name_their_key() {
        let s = Settings::parse("[bath]\ngamma0 = fast\n").unwrap();
        let err = s.number("bath", "gamma0").unwrap_err().to_string();
        assert!(err.contains("[bath] gamma0"), "{err}");
    }
}
