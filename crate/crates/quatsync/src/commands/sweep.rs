use rayon::prelude::*;

use quatsync_core::lion::{equilibrium_sweep, lambda_critical, LionParams, SweepGrid};
use serde::Serialize;

use super::equilibria::lion_params;
use super::Outcome;
use crate::config::{ExperimentConfig, Mode};
use crate::error::CliError;
use crate::output::{csv_records, fmt_num, header, write_atomic, Envelope, IntegratorInfo};

/// Caps the worker count of coupling sweeps.
pub const THREADS_ENV: &str = "QUATSYNC_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub n_axis_eq: usize,
    pub n_interior_eq: usize,
    pub n_sinks: usize,
}

#[derive(Serialize)]
struct SweepOutput {
    lambda_crit: f64,
    /// Consecutive couplings between which the axis equilibrium count changes.
    axis_transitions: Vec<(f64, f64, usize, usize)>,
    rows: Vec<SweepRow>,
}

/// Worker count from the environment; `None` leaves rayon's default.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::config(format!("{THREADS_ENV}: expected a positive integer, found `{s}`"))),
        },
        Err(_) => Ok(None),
    }
}

/// Equilibrium census at every coupling, in input order.
pub fn sweep_rows(base: &LionParams, lambdas: &[f64], grid: &SweepGrid) -> Result<Vec<SweepRow>, CliError> {
    lambdas
        .par_iter()
        .map(|&l| {
            let p = base.with_lambda(l)?;
            let r = equilibrium_sweep(&p, grid)?;
            Ok(SweepRow { lambda: l, n_axis_eq: r.n_axis(), n_interior_eq: r.n_interior(), n_sinks: r.sink_count })
        })
        .collect()
}

pub fn sweep(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mode = cfg.require_mode(&[Mode::Lion])?;
    let range = cfg.lambda_range.ok_or_else(|| CliError::missing("lambda_range", "sweep"))?;
    if !(range.step > 0.0 && range.start > 0.0 && range.stop >= range.start) {
        return Err(CliError::config("field `lambda_range`: need 0 < start <= stop and step > 0"));
    }
    let base = if cfg.lambda.is_some() {
        lion_params(cfg)?
    } else {
        LionParams::new(cfg.omega_scalar(mode)?, range.start, cfg.n_osc_lion()?)?
    };
    let grid = cfg.grid.unwrap_or_default();
    let lambdas = range.values();

    let rows = match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::config(format!("{THREADS_ENV}: {e}")))?
            .install(|| sweep_rows(&base, &lambdas, &grid))?,
        None => sweep_rows(&base, &lambdas, &grid)?,
    };

    let out = cfg.out_dir();
    let csv = out.join("sweep.csv");
    let table = rows.iter().map(|r| {
        [fmt_num(r.lambda), r.n_axis_eq.to_string(), r.n_interior_eq.to_string(), r.n_sinks.to_string()]
    });
    let bytes = csv_records(&header(&["lambda", "n_axis_eq", "n_interior_eq", "n_sinks"]), table)?;
    write_atomic(&csv, &bytes)?;

    let axis_transitions: Vec<_> = rows
        .windows(2)
        .filter(|w| w[0].n_axis_eq != w[1].n_axis_eq)
        .map(|w| (w[0].lambda, w[1].lambda, w[0].n_axis_eq, w[1].n_axis_eq))
        .collect();
    let lambda_crit = lambda_critical(&base);
    let summary = format!(
        "{} couplings, axis count changes at {:?} (lambda_crit = {lambda_crit})",
        rows.len(),
        axis_transitions.iter().map(|t| (t.0, t.1)).collect::<Vec<_>>()
    );
    let json = out.join("sweep.json");
    let report = SweepOutput { lambda_crit, axis_transitions, rows };
    Envelope::new("sweep", cfg, IntegratorInfo::default(), report).write(&json)?;
    Ok(Outcome { files: vec![csv, json], summary })
}
