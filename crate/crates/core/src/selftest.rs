//! Built-in consistency checks, also exposed as `qdphonon selftest`.

use serde::Serialize;
use std::fmt;

use crate::error::Result;
use crate::model::{dress, DressedParams, ModelParams};
use crate::oracle::{
    build_dressed_liouvillian, projection_mismatch, steady_state_null, SampleKind,
};
use crate::reduced::{assemble, solve_adaptive, solve_steady};
use crate::statistics::observables;

/// Parameters used by the built-in checks and examples.
pub fn reference_params() -> ModelParams {
    ModelParams {
        omega_ph: 2.0,
        delta: 0.0,
        rabi: 1.0,
        g: 0.3,
        gamma: 0.05,
        gamma_c: 0.01,
        kappa: 0.5,
        nbar: 1.0,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleAgreement {
    /// `max_n |P_n(reduced) - P_n(oracle)|` over the reduced range.
    pub max_distribution_diff: f64,
    pub mean_n_diff: f64,
    /// Oracle probability above the reduced truncation.
    pub oracle_mass_beyond: f64,
}

/// Steady state of the reduced solver at `n_reduced` against the full
/// dressed Liouvillian at `n_oracle >= n_reduced`.
pub fn oracle_agreement(
    dressed: &DressedParams,
    params: &ModelParams,
    n_reduced: usize,
    n_oracle: usize,
) -> Result<OracleAgreement> {
    assert!(n_oracle >= n_reduced);
    let reduced = solve_steady(&assemble(dressed, params, n_reduced)?)?;
    let oracle = steady_state_null(&build_dressed_liouvillian(dressed, params, n_oracle)?)?;
    let p = reduced.distribution();
    let q = oracle.distribution();
    let max_distribution_diff = p
        .iter()
        .zip(&q)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let mean_n_diff = (observables(&reduced)?.mean_n - oracle.stats()?.mean_n).abs();
    Ok(OracleAgreement {
        max_distribution_diff,
        mean_n_diff,
        oracle_mass_beyond: q[n_reduced + 1..].iter().sum(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<44} {:.3e} (tol {:.0e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.tolerance
        )
    }
}

fn outcome(name: String, value: Result<f64>, tolerance: f64) -> CheckOutcome {
    let value = value.unwrap_or(f64::INFINITY);
    CheckOutcome {
        name,
        passed: value <= tolerance,
        value,
        tolerance,
    }
}

/// Thermal fixed point, exact closure of the reduced equations, and
/// agreement with the full Liouvillian at equal truncation, for both modes.
pub fn run_selftest() -> Vec<CheckOutcome> {
    let base = reference_params();
    let mut out = Vec::new();
    for secular in [true, false] {
        let tag = if secular { "secular" } else { "beyond_secular" };

        let uncoupled = base.with_g(0.0).with_delta(1.0);
        out.push(outcome(
            format!("{tag}: g=0 steady state is thermal"),
            dress(&uncoupled, secular)
                .and_then(|d| solve_adaptive(&d, &uncoupled, 1e-12, 8))
                .and_then(|ss| observables(&ss))
                .map(|s| (s.mean_n - uncoupled.nbar).abs()),
            1e-8,
        ));

        for (kind, label) in [
            (SampleKind::FockDiagonal, "Fock-diagonal"),
            (SampleKind::General, "general"),
        ] {
            let p = base.with_delta(1.0);
            out.push(outcome(
                format!("{tag}: closure on {label} states"),
                dress(&p, secular).and_then(|d| projection_mismatch(&d, &p, 6, 20, 7, kind)),
                1e-10,
            ));
        }

        let worst = [-2.0, -1.0, 0.0, 1.0, 2.0]
            .iter()
            .map(|&delta| {
                let p = base.with_delta(delta);
                dress(&p, secular)
                    .and_then(|d| oracle_agreement(&d, &p, 20, 20))
                    .map(|a| a.max_distribution_diff)
            })
            .try_fold(0.0_f64, |acc, r| r.map(|v| acc.max(v)));
        out.push(outcome(
            format!("{tag}: reduced vs full Liouvillian"),
            worst,
            1e-8,
        ));
    }
    out
}
