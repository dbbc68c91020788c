use rayon::prelude::*;

use quatsync_core::two_osc::{
    default_orbit_config, detect_periodic_orbit, equilibrium_n2, lift_check, lift_check_along, OrbitReport,
    PeriodicOrbit,
};
use serde::Serialize;

use super::Outcome;
use crate::config::{ExperimentConfig, Mode};
use crate::error::CliError;
use crate::output::{for_output, header, plain_rows, write_csv, Envelope, IntegratorInfo};

#[derive(Serialize)]
struct Ring {
    report: OrbitReport,
    /// Largest deviation of the lifted eight-dimensional run from the planar orbit.
    lift_deviation: f64,
}

#[derive(Serialize)]
struct OrbitOutput {
    alpha: f64,
    orbit: Ring,
    nested: Vec<Ring>,
    /// Each ring lies strictly inside the previous one.
    strictly_nested: Option<bool>,
}

/// Starting heights `alpha + (v0 - alpha) / 2^i` for `i = 0..k`.
fn nested_heights(alpha: f64, v0: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| alpha + (v0 - alpha) / f64::powi(2.0, i as i32)).collect()
}

fn strictly_nested(rings: &[Ring]) -> bool {
    rings.windows(2).all(|p| {
        let (outer, inner) = (&p[0].report, &p[1].report);
        inner.max_v < outer.max_v && inner.crossings[1].v > outer.crossings[1].v
    })
}

pub fn orbit(cfg: &ExperimentConfig, nested: Option<usize>) -> Result<Outcome, CliError> {
    let mode = cfg.require_mode(&[Mode::Reduced2])?;
    let omega = cfg.omega_scalar(mode)?;
    let lambda = cfg.lambda_value(mode)?;
    let alpha = equilibrium_n2(omega, lambda, 0)?.v;
    let v0 = cfg.v0()?;
    if v0 <= alpha {
        return Err(CliError::config(format!(
            "field `v0`: {v0} must exceed arccosh(omega / lambda) = {alpha}"
        )));
    }
    let icfg = cfg.integrator(default_orbit_config())?;
    let output_dt = cfg.output_dt()?;
    let direction = cfg.initial_imag.filter(|d| d.iter().any(|&c| c != 0.0));

    let ring = |v: f64| -> Result<(PeriodicOrbit, Ring), CliError> {
        let o = detect_periodic_orbit(v, omega, lambda, &icfg)?;
        let lift_deviation = match direction {
            Some(d) => lift_check_along(&o.report, d)?,
            None => lift_check(&o.report)?,
        };
        let r = Ring { report: o.report.clone(), lift_deviation };
        Ok((o, r))
    };

    let (main, main_ring) = ring(v0)?;
    let out = cfg.out_dir();
    let mut files = Vec::new();
    let csv = out.join("orbit.csv");
    write_csv(&csv, &header(&["t", "w", "v"]), plain_rows(&for_output(&main.trajectory, output_dt)))?;
    files.push(csv);

    let k = nested.or(cfg.nested).unwrap_or(0);
    let rings: Vec<(PeriodicOrbit, Ring)> = nested_heights(alpha, v0, k)
        .into_par_iter()
        .map(ring)
        .collect::<Result<_, _>>()?;
    for (i, (o, _)) in rings.iter().enumerate() {
        let path = out.join(format!("orbit_ring{}.csv", i + 1));
        write_csv(&path, &header(&["t", "w", "v"]), plain_rows(&for_output(&o.trajectory, output_dt)))?;
        files.push(path);
    }
    let nested: Vec<Ring> = rings.into_iter().map(|(_, r)| r).collect();
    let nest_flag = (!nested.is_empty()).then(|| strictly_nested(&nested));

    let summary = format!(
        "period {} closure {:e} symmetry {:e} lift {:e}{}",
        main_ring.report.period,
        main_ring.report.closure_error,
        main_ring.report.symmetry_error,
        main_ring.lift_deviation,
        nest_flag.map(|b| format!(" nested={b}")).unwrap_or_default()
    );
    let json = out.join("orbit.json");
    let meta = main.trajectory.meta;
    let report = OrbitOutput { alpha, orbit: main_ring, nested, strictly_nested: nest_flag };
    Envelope::new("orbit", cfg, IntegratorInfo::new(&icfg, meta), report).write(&json)?;
    files.push(json);
    Ok(Outcome { files, summary })
}
