//! CSV and JSON emission. Files are written to a temporary sibling and
//! renamed into place, so readers never see a half-written file.

use std::io::Write;
use std::path::{Path, PathBuf};

use quatsync_core::ode::{IntegratorConfig, Trajectory, TrajectoryMeta};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    let ctx = |e| CliError::io(format!("writing {}", path.display()), e);
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(ctx)?;
    tmp.write_all(bytes).map_err(ctx)?;
    tmp.as_file().sync_all().map_err(ctx)?;
    tmp.persist(path).map_err(|e| ctx(e.error))?;
    Ok(())
}

/// Renders a table of preformatted cells with a header row.
pub fn csv_records<R, I>(header: &[String], rows: I) -> Result<Vec<u8>, CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::io("formatting CSV", e.into());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::io("formatting CSV", e.into_error()))
}

/// Renders a numeric table with a header row.
pub fn csv_bytes<R: AsRef<[f64]>>(header: &[String], rows: impl IntoIterator<Item = R>) -> Result<Vec<u8>, CliError> {
    csv_records(header, rows.into_iter().map(|r| r.as_ref().iter().map(|&x| fmt_num(x)).collect::<Vec<_>>()))
}

pub fn write_csv<R: AsRef<[f64]>>(
    path: &Path,
    header: &[String],
    rows: impl IntoIterator<Item = R>,
) -> Result<(), CliError> {
    write_atomic(path, &csv_bytes(header, rows)?)
}

pub fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// `t,w1,x1,y1,z1,w2,...` for a flat `[w.., x.., y.., z..]` state.
pub fn full_header(n: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for i in 1..=n {
        h.extend(["w", "x", "y", "z"].iter().map(|c| format!("{c}{i}")));
    }
    h
}

/// Rows of `t` followed by each oscillator's four components in turn.
pub fn full_rows(traj: &Trajectory) -> Vec<Vec<f64>> {
    let n = traj.dim() / 4;
    traj.iter()
        .map(|(t, s)| {
            let mut row = Vec::with_capacity(1 + 4 * n);
            row.push(t);
            for i in 0..n {
                row.extend((0..4).map(|c| s[c * n + i]));
            }
            row
        })
        .collect()
}

/// Rows of `t` followed by the state, unchanged.
pub fn plain_rows(traj: &Trajectory) -> Vec<Vec<f64>> {
    traj.iter()
        .map(|(t, s)| std::iter::once(t).chain(s.iter().copied()).collect())
        .collect()
}

/// Thins a trajectory for output; `dt = 0` keeps every accepted step.
pub fn for_output(traj: &Trajectory, dt: f64) -> Trajectory {
    if dt > 0.0 && traj.len() > 1 {
        traj.resample(dt)
    } else {
        traj.clone()
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct IntegratorInfo {
    pub config: Option<IntegratorConfig>,
    pub meta: Option<TrajectoryMeta>,
}

impl IntegratorInfo {
    pub fn new(config: &IntegratorConfig, meta: TrajectoryMeta) -> Self {
        Self { config: Some(config.clone()), meta: Some(meta) }
    }
}

/// Common wrapper for every JSON report.
#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub status: &'a str,
    pub config: &'a ExperimentConfig,
    pub integrator: IntegratorInfo,
    pub report: T,
}

impl<'a, T: Serialize> Envelope<'a, T> {
    pub fn new(command: &'a str, config: &'a ExperimentConfig, integrator: IntegratorInfo, report: T) -> Self {
        Self { tool: TOOL, version: VERSION, command, status: "ok", config, integrator, report }
    }

    pub fn with_status(mut self, status: &'a str) -> Self {
        self.status = status;
        self
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::io(format!("serializing {}", path.display()), e.into()))?;
        text.push('\n');
        write_atomic(path, text.as_bytes())
    }
}
