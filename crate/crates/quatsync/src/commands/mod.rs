//! One function per subcommand. Each writes its files into the output
//! directory and returns what it wrote.

use std::path::PathBuf;

use quatsync_core::ode::{integrate, IntegratorConfig, Trajectory};
use quatsync_core::Error;

mod equilibria;
mod orbit;
mod regime;
mod simulate;
mod sweep;

pub use equilibria::equilibria;
pub use orbit::orbit;
pub use regime::regime;
pub use simulate::simulate;
pub use sweep::{sweep, sweep_rows, thread_cap, SweepRow, THREADS_ENV};

/// Files written by a successful command plus a one-line summary.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// Integrates and keeps the partial trajectory when the run fails.
fn run<F>(f: F, s0: &[f64], cfg: &IntegratorConfig) -> (Trajectory, Option<Error>)
where
    F: FnMut(f64, &[f64], &mut [f64]) -> quatsync_core::Result<()>,
{
    match integrate(f, s0, cfg) {
        Ok(t) => (t, None),
        Err(fail) => (fail.partial, Some(fail.error)),
    }
}
