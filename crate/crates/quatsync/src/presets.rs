//! Parameter sets from the reference experiments.

use quatsync_core::lion::SweepGrid;

use crate::config::{ExperimentConfig, InitialState, IntegratorSection, LambdaRange, LambdaSpec, Mode, Omega};

pub const STRONG_OMEGAS: [f64; 5] = [0.66, 0.10, -0.29, -0.34, -0.12];
pub const STRONG_LAMBDA: f64 = 1.1;

pub fn strong_initial() -> InitialState {
    InitialState {
        w: vec![0.14, 1.52, 0.36, 0.96, 0.15],
        x: vec![0.86, 0.21, 0.36, 1.22, 0.87],
        y: vec![0.09, 1.51, 0.15, 0.05, 1.27],
        z: vec![0.69, 0.22, 0.04, 0.12, 1.35],
    }
}

/// Five oscillators above the critical coupling, run to `t = 100`.
pub fn strong_n5() -> ExperimentConfig {
    ExperimentConfig {
        mode: Some(Mode::Full),
        omega: Some(Omega::Vector(STRONG_OMEGAS.to_vec())),
        lambda: Some(LambdaSpec::Value(STRONG_LAMBDA)),
        initial: Some(strong_initial()),
        integrator: IntegratorSection { t_end: Some(100.0), max_dt: Some(0.05), ..Default::default() },
        ..Default::default()
    }
}

/// As [`strong_n5`] with identical natural frequencies.
pub fn identical_n5() -> ExperimentConfig {
    ExperimentConfig { omega: Some(Omega::Vector(vec![0.0; 5])), ..strong_n5() }
}

/// Two oscillators with `omega = 2`, `lambda = 1`, started at `(pi/2, |(1, 1.05, 0)|)`.
pub fn peach_ring() -> ExperimentConfig {
    ExperimentConfig {
        mode: Some(Mode::Reduced2),
        omega: Some(Omega::Scalar(2.0)),
        lambda: Some(LambdaSpec::Value(1.0)),
        initial_imag: Some([1.0, 1.05, 0.0]),
        ..Default::default()
    }
}

pub fn lion(n_osc: usize, lambda: LambdaSpec) -> ExperimentConfig {
    ExperimentConfig {
        mode: Some(Mode::Lion),
        omega: Some(Omega::Scalar(1.0)),
        lambda: Some(lambda),
        n_osc: Some(n_osc),
        ..Default::default()
    }
}

/// Three oscillators at half the critically weak coupling.
pub fn lion_super_weak() -> ExperimentConfig {
    ExperimentConfig { initial_planar: Some([1.0, 0.8]), ..lion(3, LambdaSpec::Value(0.426095)) }
}

/// Three oscillators halfway between the critically weak coupling and `omega`.
pub fn lion_weak() -> ExperimentConfig {
    lion(3, LambdaSpec::Value(0.963047))
}

pub fn lion_critical(n_osc: usize) -> ExperimentConfig {
    ExperimentConfig { grid: Some(SweepGrid::default()), ..lion(n_osc, LambdaSpec::Named("critical".into())) }
}

/// Coupling scan across the axis-equilibrium birth for three oscillators.
pub fn lion_birth_sweep() -> ExperimentConfig {
    ExperimentConfig {
        lambda: None,
        lambda_range: Some(LambdaRange { start: 0.8, stop: 0.9, step: 0.005 }),
        ..lion(3, LambdaSpec::Value(0.8))
    }
}

/// Name and config of every bundled preset.
pub fn all() -> Vec<(&'static str, ExperimentConfig)> {
    vec![
        ("strong_n5", strong_n5()),
        ("identical_n5", identical_n5()),
        ("peach_ring", peach_ring()),
        ("lion_super_weak", lion_super_weak()),
        ("lion_weak", lion_weak()),
        ("lion_critical_n5", lion_critical(5)),
        ("lion_birth_sweep", lion_birth_sweep()),
    ]
}
