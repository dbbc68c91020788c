use std::f64::consts::FRAC_PI_2;

use quatsync_core::lion::{classify_regime, rhs_lion, LionParams, Regime};
use quatsync_core::model::{KuramotoModel, ModelParams, OscillatorState};
use quatsync_core::ode::{IntegratorConfig, Trajectory};
use quatsync_core::sync::{classify, lyapunov_energy, SyncReport};
use quatsync_core::two_osc::rhs_n2;
use quatsync_core::{Error, PlanarState};
use serde::Serialize;

use super::{run, Outcome};
use crate::config::{ExperimentConfig, InitialState, Mode};
use crate::error::CliError;
use crate::output::{for_output, full_header, full_rows, header, plain_rows, write_csv, Envelope, IntegratorInfo};

#[derive(Serialize)]
struct FullReport {
    t_reached: f64,
    error: Option<String>,
    sync: Option<SyncReport>,
    /// Accumulated real-frequency energy at the final sample.
    energy_final: Option<f64>,
}

#[derive(Serialize)]
struct PlanarReport {
    t_reached: f64,
    error: Option<String>,
    final_state: Option<PlanarState>,
    regime: Option<Regime>,
}

pub fn simulate(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    match cfg.require_mode(&[Mode::Full, Mode::Reduced2, Mode::Lion])? {
        Mode::Full => simulate_full(cfg),
        m => simulate_planar(cfg, m),
    }
}

fn t_end(cfg: &ExperimentConfig) -> Result<f64, CliError> {
    cfg.integrator.t_end.ok_or_else(|| CliError::missing("integrator.t_end", "simulate"))
}

fn check_initial(init: &InitialState, n: usize) -> Result<(), CliError> {
    for (name, v) in [("w", &init.w), ("x", &init.x), ("y", &init.y), ("z", &init.z)] {
        if v.len() != n {
            return Err(CliError::config(format!(
                "field `initial.{name}`: expected {n} values (one per frequency), found {}",
                v.len()
            )));
        }
    }
    Ok(())
}

fn finish(err: Option<Error>) -> Result<(), CliError> {
    match err {
        None => Ok(()),
        Some(e) => Err(e.into()),
    }
}

fn status(err: &Option<Error>) -> &'static str {
    match err {
        None => "ok",
        Some(Error::BlowUp { .. }) => "blow_up",
        Some(_) => "failed",
    }
}

fn simulate_full(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let omegas = cfg.omega_vector()?;
    let lambda = cfg.lambda_value(Mode::Full)?;
    let init = cfg.initial.as_ref().ok_or_else(|| CliError::missing("initial", "mode full"))?;
    check_initial(init, omegas.len())?;
    let mut p = ModelParams::new(omegas, lambda).map_err(|e| CliError::config(format!("field `omega`: {e}")))?;
    if cfg.rotating_frame {
        p = p.to_rotating_frame();
    }
    let icfg = cfg.integrator(IntegratorConfig::adaptive(t_end(cfg)?).with_max_dt(0.05))?;
    let output_dt = cfg.output_dt()?;
    let s0 = OscillatorState::from_parts(&init.w, &init.x, &init.y, &init.z)?;

    let model = KuramotoModel::new(p.clone());
    let (traj, err) = run(|_, y, d| model.eval(y, d), s0.as_slice(), &icfg);

    let dir = cfg.out_dir();
    let csv = dir.join("trajectory.csv");
    write_csv(&csv, &full_header(p.n_osc()), full_rows(&for_output(&traj, output_dt)))?;

    let (sync, energy_final) = if err.is_none() {
        let sync = classify(&traj, &p, &cfg.thresholds())?;
        let h = lyapunov_energy(&traj, &p)?;
        (Some(sync), h.last().map(|x| x.1))
    } else {
        (None, None)
    };
    let summary = match &sync {
        Some(s) => format!(
            "phase_locked={} freq_synced={} phase_synced={} (observed over [{}, {}])",
            s.verdict.phase_locked, s.verdict.freq_synced, s.verdict.phase_synced, s.horizon.0, s.horizon.1
        ),
        None => format!("stopped at t = {}", traj.t_end()),
    };
    let report = FullReport { t_reached: traj.t_end(), error: err.as_ref().map(|e| e.to_string()), sync, energy_final };
    let json = dir.join("report.json");
    Envelope::new("simulate", cfg, IntegratorInfo::new(&icfg, traj.meta), report)
        .with_status(status(&err))
        .write(&json)?;
    finish(err)?;
    Ok(Outcome { files: vec![csv, json], summary })
}

fn simulate_planar(cfg: &ExperimentConfig, mode: Mode) -> Result<Outcome, CliError> {
    let omega = cfg.omega_scalar(mode)?;
    let (lambda, lion) = match mode {
        Mode::Lion => {
            let n = cfg.n_osc_lion()?;
            let l = cfg.lambda_lion(omega, n)?;
            (l, Some(LionParams::new(omega, l, n)?))
        }
        _ => (cfg.lambda_value(mode)?, None),
    };
    let start = match (cfg.initial_planar, mode) {
        (Some(s), _) => s,
        (None, Mode::Reduced2) if cfg.v0.is_some() || cfg.initial_imag.is_some() => [FRAC_PI_2, cfg.v0()?],
        (None, _) => return Err(CliError::missing("initial_planar", &format!("simulate in mode {mode}"))),
    };
    let icfg = cfg.integrator(IntegratorConfig::adaptive(t_end(cfg)?).with_max_dt(0.05))?;
    let output_dt = cfg.output_dt()?;

    let field = |_: f64, y: &[f64], d: &mut [f64]| {
        let s = PlanarState::new(y[0], y[1]);
        let r = match &lion {
            Some(lp) => rhs_lion(s, lp)?,
            None => rhs_n2(s, omega, lambda)?,
        };
        d.copy_from_slice(&r);
        Ok(())
    };
    let (traj, err): (Trajectory, _) = run(field, &start, &icfg);

    let dir = cfg.out_dir();
    let csv = dir.join("trajectory.csv");
    write_csv(&csv, &header(&["t", "w", "v"]), plain_rows(&for_output(&traj, output_dt)))?;

    let final_state = traj.last_state().map(|s| PlanarState::new(s[0], s[1]));
    let report = PlanarReport {
        t_reached: traj.t_end(),
        error: err.as_ref().map(|e| e.to_string()),
        final_state,
        regime: lion.as_ref().map(classify_regime),
    };
    let json = dir.join("report.json");
    Envelope::new("simulate", cfg, IntegratorInfo::new(&icfg, traj.meta), report)
        .with_status(status(&err))
        .write(&json)?;
    finish(err)?;
    let summary = match final_state {
        Some(s) => format!("final (w, v) = ({}, {}) at t = {}", s.w, s.v, traj.t_end()),
        None => "empty trajectory".into(),
    };
    Ok(Outcome { files: vec![csv, json], summary })
}
