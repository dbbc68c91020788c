//! Phase-locking and synchronization diagnostics for full-model trajectories.
//!
//! All verdicts are observations over the sampled horizon of a finite run.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

// redundant when std is linked into the build
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{rhs_full, KuramotoModel, ModelParams, OscillatorState};
use crate::ode::Trajectory;

/// Largest pairwise Euclidean distance between the quaternions of `data`
/// (flat `[w.., x.., y.., z..]` layout).
fn max_pairwise(data: &[f64], n: usize) -> f64 {
    let mut best = 0.0f64;
    for a in 0..n {
        for b in a + 1..n {
            let mut s = 0.0;
            for c in 0..4 {
                let d = data[c * n + a] - data[c * n + b];
                s += d * d;
            }
            best = best.max(s);
        }
    }
    best.sqrt()
}

/// Largest pairwise distance restricted to one component block (0 = w, ..., 3 = z).
fn component_spread(data: &[f64], n: usize, c: usize) -> f64 {
    let block = &data[c * n..(c + 1) * n];
    let (lo, hi) = block
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    hi - lo
}

fn imag_spread(data: &[f64], n: usize) -> f64 {
    let mut best = 0.0f64;
    for a in 0..n {
        for b in a + 1..n {
            let mut s = 0.0;
            for c in 1..4 {
                let d = data[c * n + a] - data[c * n + b];
                s += d * d;
            }
            best = best.max(s);
        }
    }
    best.sqrt()
}

/// `max |w_n - w_m|` over all pairs.
pub fn w_spread(s: &[f64], n: usize) -> f64 {
    component_spread(s, n, 0)
}

pub fn pairwise_q_diff(s: &OscillatorState) -> f64 {
    max_pairwise(s.as_slice(), s.n_osc())
}

pub fn pairwise_qdot_diff(s: &OscillatorState, p: &ModelParams) -> Result<f64> {
    let d = rhs_full(s, p)?;
    Ok(max_pairwise(d.as_slice(), d.n_osc()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SyncThresholds {
    pub lock_bound: f64,
    pub sync_eps: f64,
    pub tail_fraction: f64,
    /// Uniform resampling interval used for suprema; `0` keeps the raw samples.
    pub sample_dt: f64,
}

impl Default for SyncThresholds {
    fn default() -> Self {
        Self { lock_bound: 10.0, sync_eps: 1e-4, tail_fraction: 0.2, sample_dt: 0.01 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Verdict {
    pub phase_locked: bool,
    pub freq_synced: bool,
    pub phase_synced: bool,
}

impl Verdict {
    pub fn none(&self) -> bool {
        !(self.phase_locked || self.freq_synced || self.phase_synced)
    }
}

/// Least-squares fit `ln(imag spread) ~ -rate * t + c`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayFit {
    pub rate: f64,
    pub r_squared: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SyncReport {
    pub max_phase_diff_sup: f64,
    pub final_freq_spread: f64,
    pub final_phase_spread: f64,
    pub verdict: Verdict,
    pub decay_fit: Option<DecayFit>,
    /// The verdict is observed over `[horizon.0, horizon.1]` only.
    pub horizon: (f64, f64),
}

/// Spreads below this are treated as round-off when fitting decay rates.
const FIT_FLOOR: f64 = 1e-13;

fn fit_decay(samples: &[(f64, f64)]) -> Option<DecayFit> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(_, s)| *s > FIT_FLOOR)
        .map(|&(t, s)| (t, s.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(t, y) in &pts {
        sxx += (t - mt) * (t - mt);
        sxy += (t - mt) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Some(DecayFit { rate: -slope, r_squared })
}

/// Phase-locking, frequency- and phase-synchronization verdicts for a
/// full-model trajectory.
pub fn classify(traj: &Trajectory, p: &ModelParams, th: &SyncThresholds) -> Result<SyncReport> {
    if traj.is_empty() {
        return Err(Error::InvalidArgument("empty trajectory"));
    }
    let n = p.n_osc();
    if traj.dim() != 4 * n {
        return Err(Error::InvalidArgument("trajectory dimension does not match parameters"));
    }
    let resampled;
    let tr = if th.sample_dt > 0.0 && traj.len() > 1 {
        resampled = traj.resample(th.sample_dt);
        &resampled
    } else {
        traj
    };
    let model = KuramotoModel::new(p.clone());
    let mut deriv = alloc::vec![0.0; 4 * n];
    let m = tr.len();
    let tail_start = ((m as f64) * (1.0 - th.tail_fraction.clamp(0.0, 1.0))).floor() as usize;
    let tail_start = tail_start.min(m - 1);

    let mut sup = 0.0f64;
    let mut tail_freq = 0.0f64;
    let mut tail_phase = 0.0f64;
    let mut imag = Vec::with_capacity(m);
    for i in 0..m {
        let s = tr.state(i);
        let q = max_pairwise(s, n);
        sup = sup.max(q);
        imag.push((tr.time(i), imag_spread(s, n)));
        if i >= tail_start {
            model.eval(s, &mut deriv)?;
            tail_freq = tail_freq.max(max_pairwise(&deriv, n));
            tail_phase = tail_phase.max(q);
        }
    }
    let last = tr.state(m - 1);
    model.eval(last, &mut deriv)?;
    let final_freq_spread = max_pairwise(&deriv, n);
    let final_phase_spread = max_pairwise(last, n);

    let phase_locked = sup.is_finite() && sup <= th.lock_bound;
    let phase_synced = phase_locked && tail_phase <= th.sync_eps;
    let verdict = Verdict { phase_locked, freq_synced: tail_freq <= th.sync_eps, phase_synced };
    Ok(SyncReport {
        max_phase_diff_sup: sup,
        final_freq_spread,
        final_phase_spread,
        verdict,
        decay_fit: fit_decay(&imag),
        horizon: (tr.t_start(), tr.t_end()),
    })
}

/// Running integral `H(t) = int_0^t sum_n w_n'(s)^2 ds` (trapezoid rule over
/// the samples).
pub fn lyapunov_energy(traj: &Trajectory, p: &ModelParams) -> Result<Vec<(f64, f64)>> {
    let n = p.n_osc();
    let model = KuramotoModel::new(p.clone());
    let mut d = alloc::vec![0.0; 4 * n];
    let mut out = Vec::with_capacity(traj.len());
    let mut h = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for (t, s) in traj.iter() {
        model.eval(s, &mut d)?;
        let g: f64 = d[..n].iter().map(|x| x * x).sum();
        if let Some((t0, g0)) = prev {
            h += 0.5 * (t - t0) * (g + g0);
        }
        prev = Some((t, g));
        out.push((t, h));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayCheck {
    pub holds: bool,
    /// Smallest `bound - actual` over samples and imaginary components.
    pub margin: f64,
}

/// Checks `D_c(t) <= D_c(t0) exp(-lambda sin(delta0) (t - t0))` for the
/// imaginary component spreads `D_x`, `D_y`, `D_z`, where `t0` is the first
/// sample. Requires the real-part spread to stay below `pi/2 - delta0`.
pub fn check_exponential_decay(traj: &Trajectory, lambda: f64, delta0: f64) -> Result<DecayCheck> {
    if traj.is_empty() || traj.dim() % 4 != 0 {
        return Err(Error::InvalidArgument("trajectory must hold full-model states"));
    }
    let n = traj.dim() / 4;
    let bound_w = FRAC_PI_2 - delta0;
    for (t, s) in traj.iter() {
        let spread = w_spread(s, n);
        if !(spread < bound_w) {
            return Err(Error::HypothesisViolated { t, spread, bound: bound_w });
        }
    }
    let t0 = traj.t_start();
    let s0 = traj.state(0);
    let d0 = [1, 2, 3].map(|c| component_spread(s0, n, c));
    let rate = lambda * delta0.sin();
    let mut margin = f64::INFINITY;
    let mut holds = true;
    for (t, s) in traj.iter() {
        let decay = (-rate * (t - t0)).exp();
        for (k, c) in [1, 2, 3].into_iter().enumerate() {
            let bound = d0[k] * decay;
            let actual = component_spread(s, n, c);
            margin = margin.min(bound - actual);
            if actual > bound + 1e-12 * (1.0 + d0[k]) {
                holds = false;
            }
        }
    }
    Ok(DecayCheck { holds, margin })
}

/// `pi/2 - (largest real-part spread from t_from on) - 0.01`.
pub fn default_delta0(traj: &Trajectory, t_from: f64) -> f64 {
    let n = traj.dim() / 4;
    let sup = traj
        .iter()
        .filter(|(t, _)| *t >= t_from)
        .map(|(_, s)| w_spread(s, n))
        .fold(0.0f64, f64::max);
    FRAC_PI_2 - sup - 0.01
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TransientCheck {
    /// First sample with real-part spread above `pi/2 - delta0`, if any.
    pub t_star: Option<f64>,
    pub beta: f64,
    pub t_c: f64,
    pub holds: bool,
}

/// Verifies that the real-part spread stays below `pi/2 - delta0` after
/// `T_c = t* + (beta - pi/2 + delta0) / (lambda sin(delta) - lambda_c)`.
pub fn check_transient_bound(
    traj: &Trajectory,
    lambda: f64,
    lambda_c: f64,
    delta: f64,
    delta0: f64,
) -> Result<TransientCheck> {
    let gap = lambda * delta.sin() - lambda_c;
    if !(gap > 0.0) {
        return Err(Error::InvalidArgument("need lambda sin(delta) > lambda_c"));
    }
    let n = traj.dim() / 4;
    let level = FRAC_PI_2 - delta0;
    let Some((t_star, beta)) = traj
        .iter()
        .map(|(t, s)| (t, w_spread(s, n)))
        .find(|&(_, sp)| sp > level)
    else {
        return Ok(TransientCheck { t_star: None, beta: 0.0, t_c: 0.0, holds: true });
    };
    let t_c = t_star + (beta - level) / gap;
    let holds = traj
        .iter()
        .filter(|(t, _)| *t > t_c)
        .all(|(_, s)| w_spread(s, n) < level);
    Ok(TransientCheck { t_star: Some(t_star), beta, t_c, holds })
}
