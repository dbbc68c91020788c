use quatsync_core::lion::{
    classify_regime, equilibrium_sweep, find_equilibria_n3, vector_field_grid, EquilibriumReport, LionParams, Regime,
};
use quatsync_core::planar::Stability;
use serde::Serialize;

use super::Outcome;
use crate::config::{ExperimentConfig, Mode};
use crate::error::CliError;
use crate::output::{header, write_csv, Envelope, IntegratorInfo};

#[derive(Serialize)]
struct EquilibriaOutput {
    lambda: f64,
    regime: Regime,
    lambda_crit: f64,
    /// `horizontal_cut` (three oscillators) or `grid_sweep`.
    method: &'static str,
    equilibria: Vec<EquilibriumReport>,
    sink_count: usize,
}

pub fn lion_params(cfg: &ExperimentConfig) -> Result<LionParams, CliError> {
    let mode = cfg.require_mode(&[Mode::Lion])?;
    let omega = cfg.omega_scalar(mode)?;
    let n = cfg.n_osc_lion()?;
    let lambda = cfg.lambda_lion(omega, n)?;
    Ok(LionParams::new(omega, lambda, n)?)
}

pub fn equilibria(cfg: &ExperimentConfig, field: bool) -> Result<Outcome, CliError> {
    let p = lion_params(cfg)?;
    let regime = classify_regime(&p);
    let grid = cfg.grid.unwrap_or_default();
    let (method, list) = if p.n_osc == 3 && p.lambda < p.omega && !cfg.force_sweep {
        ("horizontal_cut", find_equilibria_n3(&p)?)
    } else {
        ("grid_sweep", equilibrium_sweep(&p, &grid)?.equilibria)
    };
    let sink_count = list.iter().filter(|e| e.classification == Stability::Sink).count();

    let out = cfg.out_dir();
    let mut files = Vec::new();
    if field || cfg.field.is_some() {
        let g = cfg.field.unwrap_or_default();
        let rows = vector_field_grid(&p, g.nw, g.nv, g.v_max)?;
        let path = out.join("field.csv");
        write_csv(&path, &header(&["w", "v", "dw", "dv"]), rows)?;
        files.push(path);
    }
    let summary = format!(
        "{} regime, {} equilibria, {} sinks (lambda_crit = {})",
        super::regime::tag_name(regime.tag),
        list.len(),
        sink_count,
        regime.lambda_crit
    );
    let report = EquilibriaOutput {
        lambda: p.lambda,
        regime,
        lambda_crit: regime.lambda_crit,
        method,
        equilibria: list,
        sink_count,
    };
    let json = out.join("equilibria.json");
    Envelope::new("equilibria", cfg, IntegratorInfo::default(), report).write(&json)?;
    files.push(json);
    Ok(Outcome { files, summary })
}
