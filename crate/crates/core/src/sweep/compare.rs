use serde::Serialize;
use std::fmt;

use super::config::Mode;
use super::output::SweepRow;
use crate::error::{Error, Result};

/// A point counts as cooled when `<n> < n̄ (1 - COOLING_REL_TOL)`.
pub const COOLING_REL_TOL: f64 = 1e-6;

/// Thermal occupation that defines "cooling" at each point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ThermalReference {
    Constant(f64),
    /// The sweep axis is `n̄` itself.
    SweepValue,
}

impl ThermalReference {
    fn at(self, sweep_value: f64) -> f64 {
        match self {
            ThermalReference::Constant(n) => n,
            ThermalReference::SweepValue => sweep_value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointDiff {
    pub sweep_value: f64,
    pub secular: f64,
    pub beyond_secular: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSummary {
    pub mode: Mode,
    /// Sweep value of the smallest `<n>` and that value.
    pub argmin: f64,
    pub min_mean_n: f64,
    /// Total length of the sweep range where the mode cools, with linearly
    /// interpolated crossings.
    pub cooling_bandwidth: f64,
    /// Largest g² over cooled points; `None` if nothing cools.
    pub max_g2_cooling: Option<f64>,
    pub failed_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub secular: ModeSummary,
    pub beyond_secular: ModeSummary,
    /// `argmin(beyond_secular) - argmin(secular)`.
    pub argmin_shift: f64,
    pub max_abs_diff: f64,
    pub points: Vec<PointDiff>,
}

fn ok_points(rows: &[SweepRow], mode: Mode) -> (Vec<(f64, f64, Option<f64>)>, usize) {
    let mut ok = Vec::new();
    let mut failed = 0;
    for r in rows.iter().filter(|r| r.mode == mode) {
        match (r.is_ok(), r.mean_n) {
            (true, Some(n)) => ok.push((r.sweep_value, n, r.g2)),
            _ => failed += 1,
        }
    }
    ok.sort_by(|a, b| a.0.total_cmp(&b.0));
    (ok, failed)
}

/// Length of `{x : f(x) > 0}` for the piecewise-linear interpolant.
fn positive_length(xs: &[f64], f: &[f64]) -> f64 {
    xs.windows(2)
        .zip(f.windows(2))
        .map(|(x, y)| {
            let h = x[1] - x[0];
            match (y[0] > 0.0, y[1] > 0.0) {
                (true, true) => h,
                (false, false) => 0.0,
                (true, false) => h * y[0] / (y[0] - y[1]),
                (false, true) => h * y[1] / (y[1] - y[0]),
            }
        })
        .sum()
}

fn summarize(rows: &[SweepRow], mode: Mode, reference: ThermalReference) -> Result<ModeSummary> {
    let (pts, failed_points) = ok_points(rows, mode);
    let (argmin, min_mean_n) = pts
        .iter()
        .map(|&(x, n, _)| (x, n))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::MissingMode(mode.as_str()))?;
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let margin: Vec<f64> = pts
        .iter()
        .map(|&(x, n, _)| reference.at(x) * (1.0 - COOLING_REL_TOL) - n)
        .collect();
    let max_g2_cooling = pts
        .iter()
        .zip(&margin)
        .filter(|(_, &m)| m > 0.0)
        .filter_map(|(p, _)| p.2)
        .reduce(f64::max);
    Ok(ModeSummary {
        mode,
        argmin,
        min_mean_n,
        cooling_bandwidth: positive_length(&xs, &margin),
        max_g2_cooling,
        failed_points,
    })
}

/// Compares the secular and beyond-secular rows of a sweep.
pub fn compare_modes(rows: &[SweepRow], reference: ThermalReference) -> Result<ComparisonReport> {
    let secular = summarize(rows, Mode::Secular, reference)?;
    let beyond_secular = summarize(rows, Mode::BeyondSecular, reference)?;
    let (sec, _) = ok_points(rows, Mode::Secular);
    let (bey, _) = ok_points(rows, Mode::BeyondSecular);
    let points: Vec<PointDiff> = sec
        .iter()
        .filter_map(|&(x, a, _)| {
            bey.iter().find(|p| p.0 == x).map(|&(_, b, _)| PointDiff {
                sweep_value: x,
                secular: a,
                beyond_secular: b,
                abs_diff: (a - b).abs(),
            })
        })
        .collect();
    let max_abs_diff = points.iter().map(|p| p.abs_diff).fold(0.0, f64::max);
    Ok(ComparisonReport {
        argmin_shift: beyond_secular.argmin - secular.argmin,
        secular,
        beyond_secular,
        max_abs_diff,
        points,
    })
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into())
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<16} {:>12} {:>14} {:>12} {:>14} {:>7}",
            "mode", "argmin", "min <n>", "bandwidth", "max g2 (cool)", "failed"
        )?;
        for s in [&self.secular, &self.beyond_secular] {
            writeln!(
                f,
                "{:<16} {:>12.6} {:>14.8} {:>12.6} {:>14} {:>7}",
                s.mode.as_str(),
                s.argmin,
                s.min_mean_n,
                s.cooling_bandwidth,
                opt(s.max_g2_cooling),
                s.failed_points
            )?;
        }
        writeln!(f, "argmin shift      {:.6}", self.argmin_shift)?;
        writeln!(f, "max |d<n>|        {:.6e}", self.max_abs_diff)?;
        writeln!(f)?;
        writeln!(
            f,
            "{:>14} {:>16} {:>16} {:>12}",
            "sweep_value", "secular", "beyond_secular", "|diff|"
        )?;
        for p in &self.points {
            writeln!(
                f,
                "{:>14.6} {:>16.10} {:>16.10} {:>12.3e}",
                p.sweep_value, p.secular, p.beyond_secular, p.abs_diff
            )?;
        }
        Ok(())
    }
}
