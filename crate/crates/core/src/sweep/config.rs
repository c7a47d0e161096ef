//! Run configuration: flat `key = value` text (TOML syntax).
//!
//! ```text
//! # model, in units of `unit_scale`
//! omega_ph = 2.0
//! delta    = 0.0        # base value; replaced by the sweep when sweep_axis = "delta"
//! rabi     = 1.0
//! g        = 0.3
//! gamma    = 0.05
//! gamma_c  = 0.01
//! kappa    = 0.5
//! nbar     = 1.0
//! unit_scale = "rabi"   # label only: what 1.0 stands for
//!
//! sweep_axis   = "delta"  # delta | g | nbar
//! sweep_lo     = -3.0
//! sweep_hi     = 3.0
//! sweep_points = 121
//! modes = ["secular", "beyond_secular"]  # + oracle_dressed, oracle_labframe
//!
//! tail_tol     = 1e-10
//! n_start      = 8
//! n_cap        = 4096
//! oracle_n_max = 20      # oracle modes use oracle_n_max + 5 Fock levels
//!
//! output  = "sweep.csv"
//! format  = "csv"        # csv | json
//! seed    = 1
//! threads = 0            # 0 = all cores, 1 = serial
//! closure_samples = 0    # random closure checks per point (0 = off)
//! ```
//!
//! Every key except the eight model parameters has the default shown.
//! Unknown keys are rejected. Nothing is read from the environment.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::reduced::{DEFAULT_N_CAP, MIN_N_MAX};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Secular,
    BeyondSecular,
    OracleDressed,
    OracleLabframe,
}

impl Mode {
    pub const ALL: [Mode; 4] = [
        Mode::Secular,
        Mode::BeyondSecular,
        Mode::OracleDressed,
        Mode::OracleLabframe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Secular => "secular",
            Mode::BeyondSecular => "beyond_secular",
            Mode::OracleDressed => "oracle_dressed",
            Mode::OracleLabframe => "oracle_labframe",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown mode `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Delta,
    G,
    Nbar,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Delta => "delta",
            SweepAxis::G => "g",
            SweepAxis::Nbar => "nbar",
        }
    }

    pub fn apply(self, params: ModelParams, value: f64) -> ModelParams {
        match self {
            SweepAxis::Delta => params.with_delta(value),
            SweepAxis::G => params.with_g(value),
            SweepAxis::Nbar => params.with_nbar(value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Sweep {
    /// `points` evenly spaced values from `lo` to `hi` inclusive.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.lo];
        }
        let span = self.hi - self.lo;
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.lo + span * (i as f64 / last))
            .collect()
    }

    pub fn spacing(&self) -> f64 {
        if self.points > 1 {
            (self.hi - self.lo) / (self.points - 1) as f64
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub unit_scale: String,
    pub sweep: Sweep,
    /// Sorted and deduplicated.
    pub modes: Vec<Mode>,
    pub tail_tol: f64,
    pub n_start: usize,
    pub n_cap: usize,
    pub oracle_n_max: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub threads: usize,
    pub closure_samples: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    omega_ph: f64,
    delta: f64,
    rabi: f64,
    g: f64,
    gamma: f64,
    gamma_c: f64,
    kappa: f64,
    nbar: f64,
    #[serde(default = "default_unit_scale")]
    unit_scale: String,
    #[serde(default = "default_axis")]
    sweep_axis: SweepAxis,
    #[serde(default)]
    sweep_lo: Option<f64>,
    #[serde(default)]
    sweep_hi: Option<f64>,
    #[serde(default = "default_points")]
    sweep_points: usize,
    #[serde(default = "default_modes")]
    modes: Vec<Mode>,
    #[serde(default = "default_tail_tol")]
    tail_tol: f64,
    #[serde(default = "default_n_start")]
    n_start: usize,
    #[serde(default = "default_n_cap")]
    n_cap: usize,
    #[serde(default = "default_oracle_n_max")]
    oracle_n_max: usize,
    #[serde(default)]
    output: Option<PathBuf>,
    #[serde(default = "default_format")]
    format: Format,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default)]
    threads: usize,
    #[serde(default)]
    closure_samples: usize,
}

fn default_unit_scale() -> String {
    "rabi".into()
}
fn default_axis() -> SweepAxis {
    SweepAxis::Delta
}
fn default_points() -> usize {
    121
}
fn default_modes() -> Vec<Mode> {
    vec![Mode::Secular, Mode::BeyondSecular]
}
fn default_tail_tol() -> f64 {
    1e-10
}
fn default_n_start() -> usize {
    8
}
fn default_n_cap() -> usize {
    DEFAULT_N_CAP
}
fn default_oracle_n_max() -> usize {
    20
}
fn default_format() -> Format {
    Format::Csv
}
fn default_seed() -> u64 {
    1
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let params = ModelParams {
            omega_ph: raw.omega_ph,
            delta: raw.delta,
            rabi: raw.rabi,
            g: raw.g,
            gamma: raw.gamma,
            gamma_c: raw.gamma_c,
            kappa: raw.kappa,
            nbar: raw.nbar,
        };
        let (lo, hi) = match (raw.sweep_lo, raw.sweep_hi) {
            (Some(lo), Some(hi)) => (lo, hi),
            (None, None) => {
                let v = match raw.sweep_axis {
                    SweepAxis::Delta => params.delta,
                    SweepAxis::G => params.g,
                    SweepAxis::Nbar => params.nbar,
                };
                (v, v)
            }
            _ => {
                return Err(Error::Config(
                    "set both sweep_lo and sweep_hi, or neither".into(),
                ))
            }
        };
        let mut modes = raw.modes;
        modes.sort();
        modes.dedup();
        let config = RunConfig {
            params,
            unit_scale: raw.unit_scale,
            sweep: Sweep {
                axis: raw.sweep_axis,
                lo,
                hi,
                points: raw.sweep_points,
            },
            modes,
            tail_tol: raw.tail_tol,
            n_start: raw.n_start,
            n_cap: raw.n_cap,
            oracle_n_max: raw.oracle_n_max,
            output: raw.output,
            format: raw.format,
            seed: raw.seed,
            threads: raw.threads,
            closure_samples: raw.closure_samples,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let s = &self.sweep;
        if s.points < 1 {
            return Err(Error::Config("sweep_points must be >= 1".into()));
        }
        if s.lo.is_nan() || s.hi.is_nan() || s.lo > s.hi {
            return Err(Error::Config(format!(
                "sweep_lo {} > sweep_hi {}",
                s.lo, s.hi
            )));
        }
        if self.modes.is_empty() {
            return Err(Error::Config("select at least one mode".into()));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(Error::Config("tail_tol must lie in (0, 1)".into()));
        }
        if self.n_start < MIN_N_MAX || self.n_cap < self.n_start {
            return Err(Error::Config(format!(
                "need {MIN_N_MAX} <= n_start <= n_cap (got {} and {})",
                self.n_start, self.n_cap
            )));
        }
        if self.oracle_n_max < MIN_N_MAX {
            return Err(Error::Config("oracle_n_max must be >= 2".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        omega_ph = 2.0
        delta = 0.0
        rabi = 1.0
        g = 0.3
        gamma = 0.05
        gamma_c = 0.01
        kappa = 0.5
        nbar = 1.0
    "#;

    #[test]
    fn defaults_fill_in() {
        let c = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.modes, vec![Mode::Secular, Mode::BeyondSecular]);
        assert_eq!(c.sweep.points, 121);
        assert_eq!((c.sweep.lo, c.sweep.hi), (0.0, 0.0));
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.n_cap, DEFAULT_N_CAP);
    }

    #[test]
    fn modes_sorted_and_deduplicated() {
        let text = format!(
            "{MINIMAL}\nmodes = [\"oracle_labframe\", \"secular\", \"secular\"]\nsweep_lo = -1.0\nsweep_hi = 1.0\n"
        );
        let c = RunConfig::parse(&text).unwrap();
        assert_eq!(c.modes, vec![Mode::Secular, Mode::OracleLabframe]);
    }

    #[test]
    fn rejects_bad_configs() {
        for extra in [
            "modes = []",
            "sweep_lo = 1.0\nsweep_hi = 0.0",
            "sweep_lo = 1.0",
            "sweep_points = 0",
            "tail_tol = 2.0",
            "n_start = 1",
            "colour = \"red\"",
            "modes = [\"fancy\"]",
        ] {
            let text = format!("{MINIMAL}\n{extra}\n");
            assert!(RunConfig::parse(&text).is_err(), "accepted: {extra}");
        }
        assert!(RunConfig::parse("omega_ph = 2.0").is_err());
    }

    #[test]
    fn sweep_grid() {
        let s = Sweep {
            axis: SweepAxis::Delta,
            lo: -3.0,
            hi: 3.0,
            points: 121,
        };
        let v = s.values();
        assert_eq!(v.len(), 121);
        assert_eq!(v[0], -3.0);
        assert_eq!(v[120], 3.0);
        assert_eq!(v[60], 0.0);
        assert!((s.spacing() - 0.05).abs() < 1e-15);
        let one = Sweep { points: 1, ..s };
        assert_eq!(one.values(), vec![-3.0]);
    }
}
