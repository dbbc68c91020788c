//! Dynamics of the quaternionic Kuramoto model.
//!
//! Every oscillator carries a quaternion phase `q_n = w_n + x_n i + y_n j + z_n k`
//! and all oscillators are coupled through the quaternion sine of their phase
//! differences. This crate provides:
//!
//! - [`quat`]: the quaternion value type, its 2x2 complex matrix embedding and
//!   closed-form `exp`/`sin`/`cos`, together with a matrix power-series oracle;
//! - [`model`]: the full `4N`-dimensional vector field;
//! - [`ode`]: fixed-step RK4 and adaptive Dormand–Prince integration with
//!   Hermite dense output and section-crossing detection;
//! - [`sync`]: phase-locking / synchronization metrics and decay checks;
//! - [`two_osc`]: the reduced planar system for two oscillators (periodic
//!   orbits around a center);
//! - [`lion`]: the planar "Lion Dance" flow for `N >= 3` oscillators with
//!   arithmetic-progression frequencies (equilibria, stability, bifurcation).
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod error;
pub mod lion;
pub mod model;
pub mod ode;
pub mod planar;
pub mod quat;
pub mod sync;
pub mod two_osc;

pub use error::{Error, Result};
pub use model::{KuramotoModel, ModelParams, OscillatorState, PairwiseDistances};
pub use ode::{IntegratorConfig, Method, Trajectory};
pub use planar::{PlanarState, Stability};
pub use quat::Quaternion;
