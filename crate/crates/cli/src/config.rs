//! Run configuration: defaults, then a flat `key = value` file, then flags.

// `!(x > 0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    TwoBody,
    ThreeBody,
}

impl Problem {
    pub fn as_str(self) -> &'static str {
        match self {
            Problem::TwoBody => "two_body",
            Problem::ThreeBody => "three_body",
        }
    }
}

/// Everything a run needs. Field names double as config-file keys.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub problem: Problem,
    /// Kepler coupling.
    pub a: f64,
    /// Kepler energy.
    pub h: f64,
    pub masses: [f64; 3],
    /// Three-body energy.
    #[serde(rename = "E")]
    pub energy3: f64,
    pub modes: usize,
    pub grid: usize,
    pub seeds: Vec<u64>,
    pub winding: i64,
    /// Amplitude of the random start perturbation.
    pub noise: f64,
    /// Eccentricity of oracle orbits.
    pub ecc: f64,
    pub max_iters: usize,
    pub tol: f64,
    /// Energies swept by `sweep` (h or E depending on the problem).
    pub sweep: Vec<f64>,
    pub out: PathBuf,
    pub plots: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: Problem::TwoBody,
            a: 1.0,
            h: -0.5,
            masses: [1.0; 3],
            energy3: -0.5,
            modes: 16,
            grid: 512,
            seeds: vec![1],
            winding: 1,
            noise: 0.3,
            ecc: 0.0,
            max_iters: 20_000,
            tol: 1e-8,
            sweep: vec![],
            out: PathBuf::from("out"),
            plots: false,
        }
    }
}

/// Ordered `key → raw value` overrides, from a file or from flags.
pub type Overrides = BTreeMap<String, String>;

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config_text(text: &str) -> Result<Overrides, CliError> {
    let mut out = Overrides::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!("line {}: expected key = value", n + 1)));
        };
        out.insert(normalize_key(k.trim()), v.trim().to_string());
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<Overrides, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn normalize_key(k: &str) -> String {
    if k == "E" {
        return k.to_string();
    }
    k.to_ascii_lowercase().replace('-', "_")
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Config(format!("{key}: cannot parse {v:?}")))
}

fn list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, CliError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| num(key, s))
        .collect()
}

fn boolean(key: &str, v: &str) -> Result<bool, CliError> {
    match v.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(CliError::Config(format!("{key}: expected true or false, got {v:?}"))),
    }
}

impl RunConfig {
    /// Applies overrides in key order; unknown keys are rejected.
    pub fn apply(&mut self, overrides: &Overrides) -> Result<(), CliError> {
        for (key, v) in overrides {
            match key.as_str() {
                "problem" => {
                    self.problem = match v.as_str() {
                        "two_body" | "two" | "2" => Problem::TwoBody,
                        "three_body" | "three" | "3" => Problem::ThreeBody,
                        _ => return Err(CliError::Config(format!("problem: expected two_body or three_body, got {v:?}"))),
                    }
                }
                "a" => self.a = num(key, v)?,
                "h" => self.h = num(key, v)?,
                "m1" => self.masses[0] = num(key, v)?,
                "m2" => self.masses[1] = num(key, v)?,
                "m3" => self.masses[2] = num(key, v)?,
                "E" | "e" => self.energy3 = num(key, v)?,
                "modes" => self.modes = num(key, v)?,
                "grid" => self.grid = num(key, v)?,
                "seeds" => self.seeds = list(key, v)?,
                "winding" => self.winding = num(key, v)?,
                "noise" => self.noise = num(key, v)?,
                "ecc" => self.ecc = num(key, v)?,
                "max_iters" => self.max_iters = num(key, v)?,
                "tol" => self.tol = num(key, v)?,
                "sweep" => self.sweep = list(key, v)?,
                "out" => self.out = PathBuf::from(v),
                "plots" => self.plots = boolean(key, v)?,
                _ => return Err(CliError::Config(format!("unknown key {key:?}"))),
            }
        }
        Ok(())
    }

    /// Checks every field a run depends on; messages name the field.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        let finite = [self.a, self.h, self.energy3, self.noise, self.ecc, self.tol]
            .iter()
            .chain(&self.masses)
            .chain(&self.sweep)
            .all(|v| v.is_finite());
        if !finite {
            return bad("numeric parameters must be finite");
        }
        match self.problem {
            Problem::TwoBody => {
                if !(self.h < 0.0) {
                    return bad("h must be negative");
                }
                if !(self.a > 0.0) {
                    return bad("a must be positive");
                }
            }
            Problem::ThreeBody => {
                if !(self.energy3 < 0.0) {
                    return bad("E must be negative");
                }
                if self.masses.iter().any(|&m| !(m > 0.0)) {
                    return bad("m1, m2, m3 must be positive");
                }
            }
        }
        if self.modes == 0 {
            return bad("modes must be positive");
        }
        if self.grid == 0 {
            return bad("grid must be positive");
        }
        if self.grid < 4 * self.modes + 1 {
            return Err(CliError::Config(format!(
                "grid must be at least 4·modes + 1 = {}",
                4 * self.modes + 1
            )));
        }
        if self.seeds.is_empty() {
            return bad("seeds must list at least one seed");
        }
        if self.winding == 0 {
            return bad("winding must be nonzero");
        }
        if self.winding.unsigned_abs() as usize > self.modes {
            return bad("winding must not exceed modes");
        }
        if self.noise < 0.0 {
            return bad("noise must be non-negative");
        }
        if !(0.0..1.0).contains(&self.ecc) {
            return bad("ecc must lie in [0, 1)");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        if !(self.tol > 0.0) {
            return bad("tol must be positive");
        }
        if self.sweep.iter().any(|&v| !(v < 0.0)) {
            return bad("sweep energies must be negative");
        }
        Ok(())
    }

    /// The energy of the selected problem.
    pub fn energy(&self) -> f64 {
        match self.problem {
            Problem::TwoBody => self.h,
            Problem::ThreeBody => self.energy3,
        }
    }

    pub fn with_energy(&self, e: f64) -> Self {
        let mut c = self.clone();
        match c.problem {
            Problem::TwoBody => c.h = e,
            Problem::ThreeBody => c.energy3 = e,
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_override() {
        let file = parse_config_text("# comment\nproblem = three_body\nE = -1.5 # trailing\nseeds=1, 2,3\n\nmax-iters = 10\n").unwrap();
        let mut c = RunConfig::default();
        c.apply(&file).unwrap();
        assert_eq!(c.problem, Problem::ThreeBody);
        assert_eq!(c.energy3, -1.5);
        assert_eq!(c.seeds, vec![1, 2, 3]);
        assert_eq!(c.max_iters, 10);
        let mut flags = Overrides::new();
        flags.insert("E".into(), "-0.25".into());
        c.apply(&flags).unwrap();
        assert_eq!(c.energy3, -0.25);
        c.validate().unwrap();
    }

    #[test]
    fn validation_names_the_field() {
        let c = RunConfig { h: 0.5, ..Default::default() };
        let err = c.validate().unwrap_err().to_string();
        assert!(err.contains("h must be negative"), "{err}");
        let c = RunConfig { grid: 20, ..Default::default() };
        assert!(c.validate().unwrap_err().to_string().contains("grid"));
    }

    #[test]
    fn malformed_input_rejected() {
        assert!(parse_config_text("modes 16").is_err());
        let mut c = RunConfig::default();
        let mut o = Overrides::new();
        o.insert("colour".into(), "blue".into());
        assert!(c.apply(&o).is_err());
        let mut o = Overrides::new();
        o.insert("modes".into(), "many".into());
        assert!(c.apply(&o).is_err());
    }
}
