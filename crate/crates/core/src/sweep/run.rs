use rayon::prelude::*;

use super::config::{Mode, RunConfig};
use super::output::{RowSink, SweepRow};
use crate::error::{Error, Result};
use crate::model::{dress, ModelParams};
use crate::oracle::{
    build_dressed_liouvillian, build_labframe_rotating_liouvillian, projection_mismatch,
    steady_state_null, SampleKind, GUARD_BAND,
};
use crate::reduced::solve_adaptive_capped;
use crate::statistics::observables;

/// Points evaluated between two writes to the output sink.
pub const CHUNK_POINTS: usize = 32;

const CLOSURE_N_MAX: usize = 6;
const CLOSURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Ordered by sweep point, then by mode.
    pub rows: Vec<SweepRow>,
    pub modes: Vec<Mode>,
}

impl SweepResult {
    pub fn rows_for(&self, mode: Mode) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.mode == mode)
    }
}

fn solve_reduced(
    config: &RunConfig,
    params: &ModelParams,
    mode: Mode,
    point: usize,
) -> Result<SweepRow> {
    let secular = mode == Mode::Secular;
    let dressed = dress(params, secular)?;
    let ss = solve_adaptive_capped(
        &dressed,
        params,
        config.tail_tol,
        config.n_start,
        config.n_cap,
    )?;
    let stats = observables(&ss)?;
    let mut warnings: Vec<String> = ss.warnings.iter().map(ToString::to_string).collect();
    if config.closure_samples > 0 {
        let seed = config.seed.wrapping_add(point as u64);
        let mismatch = projection_mismatch(
            &dressed,
            params,
            CLOSURE_N_MAX,
            config.closure_samples,
            seed,
            SampleKind::General,
        )?;
        if mismatch > CLOSURE_TOL {
            warnings.push(format!("closure mismatch {mismatch:.3e}"));
        }
    }
    Ok(SweepRow {
        sweep_value: 0.0,
        mode,
        mean_n: Some(stats.mean_n),
        g2: stats.g2,
        n_max_used: Some(ss.n_max),
        tail_mass: Some(ss.tail_mass),
        residual: Some(ss.residual),
        warnings,
    })
}

fn solve_oracle(config: &RunConfig, params: &ModelParams, mode: Mode) -> Result<SweepRow> {
    let n_max = config.oracle_n_max + GUARD_BAND;
    let (liouv, mut warnings) = match mode {
        Mode::OracleDressed => {
            let dressed = dress(params, false)?;
            let w = dressed.warnings.iter().map(ToString::to_string).collect();
            (build_dressed_liouvillian(&dressed, params, n_max)?, w)
        }
        Mode::OracleLabframe => (
            build_labframe_rotating_liouvillian(params, n_max)?,
            Vec::new(),
        ),
        _ => unreachable!("not an oracle mode"),
    };
    let ss = steady_state_null(&liouv)?;
    let stats = ss.stats()?;
    if stats.tail_mass > crate::reduced::TAIL_WARN {
        warnings.push(format!("truncation tail {:.3e}", stats.tail_mass));
    }
    Ok(SweepRow {
        sweep_value: 0.0,
        mode,
        mean_n: Some(stats.mean_n),
        g2: stats.g2,
        n_max_used: Some(n_max),
        tail_mass: Some(stats.tail_mass),
        residual: Some(ss.residual),
        warnings,
    })
}

/// All configured modes at one sweep value, in mode order. Failures become
/// marked rows instead of aborting.
pub fn evaluate_point(config: &RunConfig, point: usize, value: f64) -> Vec<SweepRow> {
    let params = config.sweep.axis.apply(config.params, value);
    config
        .modes
        .iter()
        .map(|&mode| {
            let outcome = params.validate().and_then(|_| match mode {
                Mode::Secular | Mode::BeyondSecular => solve_reduced(config, &params, mode, point),
                Mode::OracleDressed | Mode::OracleLabframe => solve_oracle(config, &params, mode),
            });
            match outcome {
                Ok(mut row) => {
                    row.sweep_value = value;
                    row
                }
                Err(e) => {
                    log::warn!("{} = {value}, {mode}: {e}", config.sweep.axis.name());
                    SweepRow::failed(value, mode, &e)
                }
            }
        })
        .collect()
}

/// Runs the sweep and streams rows to `sink` every [`CHUNK_POINTS`] points.
/// Output is identical for any thread count.
pub fn run_to(config: &RunConfig, mut sink: Option<&mut dyn RowSink>) -> Result<SweepResult> {
    config.validate()?;
    let values = config.sweep.values();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let indexed: Vec<(usize, f64)> = values.into_iter().enumerate().collect();
    let mut rows = Vec::with_capacity(indexed.len() * config.modes.len());
    for chunk in indexed.chunks(CHUNK_POINTS) {
        let batch: Vec<SweepRow> = if config.threads == 1 {
            chunk
                .iter()
                .flat_map(|&(i, v)| evaluate_point(config, i, v))
                .collect()
        } else {
            pool.install(|| {
                chunk
                    .par_iter()
                    .map(|&(i, v)| evaluate_point(config, i, v))
                    .collect::<Vec<_>>()
            })
            .into_iter()
            .flatten()
            .collect()
        };
        if let Some(s) = sink.as_deref_mut() {
            s.write_rows(&batch)?;
        }
        rows.extend(batch);
        log::info!(
            "{} / {} points done",
            chunk.last().map_or(0, |c| c.0 + 1),
            indexed.len()
        );
    }
    if let Some(s) = sink {
        s.finish()?;
    }
    Ok(SweepResult {
        rows,
        modes: config.modes.clone(),
    })
}

pub fn run(config: &RunConfig) -> Result<SweepResult> {
    run_to(config, None)
}
