//! Runge–Kutta integration over flat real vectors.
//!
//! Two methods are available: classical fixed-step RK4 and the adaptive
//! Dormand–Prince 5(4) pair. Every accepted step is recorded together with the
//! vector field at that point, which gives cubic Hermite dense output between
//! samples. Section crossings are located on that interpolant.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

// redundant when std is linked into the build
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    Rk4Fixed,
    Rk45Adaptive,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntegratorConfig {
    pub method: Method,
    /// Step for RK4, initial step guess for the adaptive method.
    pub dt: f64,
    pub rtol: f64,
    pub atol: f64,
    pub t_end: f64,
    pub max_steps: usize,
    /// Upper bound on adaptive steps; keeps dense output accurate.
    pub max_dt: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Rk45Adaptive,
            dt: 1e-3,
            rtol: 1e-9,
            atol: 1e-12,
            t_end: 1.0,
            max_steps: 1_000_000,
            max_dt: None,
        }
    }
}

impl IntegratorConfig {
    pub fn adaptive(t_end: f64) -> Self {
        Self { t_end, ..Self::default() }
    }

    pub fn rk4(dt: f64, t_end: f64) -> Self {
        Self { method: Method::Rk4Fixed, dt, t_end, ..Self::default() }
    }

    pub fn with_tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    pub fn with_max_dt(mut self, max_dt: f64) -> Self {
        self.max_dt = Some(max_dt);
        self
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument("dt must be positive"));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidArgument("t_end must be finite and non-negative"));
        }
        if !(self.rtol >= 1e-14) {
            return Err(Error::InvalidArgument("rtol must be at least 1e-14"));
        }
        if !(self.atol >= 1e-16) {
            return Err(Error::InvalidArgument("atol must be at least 1e-16"));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidArgument("max_steps must be at least 1"));
        }
        if let Some(m) = self.max_dt {
            if !(m > 0.0) {
                return Err(Error::InvalidArgument("max_dt must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrajectoryMeta {
    pub steps_taken: usize,
    pub steps_rejected: usize,
    pub rhs_evals: usize,
}

/// Time-ordered samples with the vector field stored at each sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    dim: usize,
    times: Vec<f64>,
    states: Vec<f64>,
    derivs: Vec<f64>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            times: Vec::new(),
            states: Vec::new(),
            derivs: Vec::new(),
            meta: TrajectoryMeta::default(),
        }
    }

    /// Appends a sample. Times must increase strictly.
    pub fn push(&mut self, t: f64, state: &[f64], deriv: &[f64]) {
        assert_eq!(state.len(), self.dim);
        assert_eq!(deriv.len(), self.dim);
        if let Some(&last) = self.times.last() {
            assert!(t > last, "trajectory times must increase");
        }
        self.times.push(t);
        self.states.extend_from_slice(state);
        self.derivs.extend_from_slice(deriv);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn time(&self, i: usize) -> f64 {
        self.times[i]
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn deriv(&self, i: usize) -> &[f64] {
        &self.derivs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn t_start(&self) -> f64 {
        self.times.first().copied().unwrap_or(0.0)
    }

    pub fn t_end(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn last_state(&self) -> Option<&[f64]> {
        (!self.is_empty()).then(|| self.state(self.len() - 1))
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &[f64])> + '_ {
        self.times.iter().copied().zip(self.states.chunks_exact(self.dim.max(1)))
    }

    /// Index `i` of the interval `[t_i, t_{i+1}]` containing `t`.
    fn interval(&self, t: f64) -> Option<usize> {
        let n = self.len();
        if n == 0 || t < self.times[0] || t > self.times[n - 1] {
            return None;
        }
        if n == 1 {
            return Some(0);
        }
        let i = self.times.partition_point(|&s| s <= t);
        Some(i.clamp(1, n - 1) - 1)
    }

    fn hermite_into(&self, i: usize, t: f64, out: &mut [f64], deriv: Option<&mut [f64]>) {
        if self.len() == 1 {
            out.copy_from_slice(self.state(0));
            if let Some(d) = deriv {
                d.copy_from_slice(self.deriv(0));
            }
            return;
        }
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let (y0, y1) = (self.state(i), self.state(i + 1));
        let (f0, f1) = (self.deriv(i), self.deriv(i + 1));
        for k in 0..self.dim {
            out[k] = h00 * y0[k] + h * (h10 * f0[k] + h11 * f1[k]) + h01 * y1[k];
        }
        if let Some(d) = deriv {
            let d00 = (6.0 * s2 - 6.0 * s) / h;
            let d10 = 3.0 * s2 - 4.0 * s + 1.0;
            let d11 = 3.0 * s2 - 2.0 * s;
            for k in 0..self.dim {
                d[k] = d00 * (y0[k] - y1[k]) + d10 * f0[k] + d11 * f1[k];
            }
        }
    }

    /// Cubic Hermite interpolation; `false` if `t` lies outside the samples.
    pub fn interpolate(&self, t: f64, out: &mut [f64]) -> bool {
        match self.interval(t) {
            Some(i) => {
                self.hermite_into(i, t, out, None);
                true
            }
            None => false,
        }
    }

    pub fn state_at(&self, t: f64) -> Option<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.interpolate(t, &mut out).then_some(out)
    }

    /// Uniformly spaced copy (spacing `dt`, always including both endpoints).
    pub fn resample(&self, dt: f64) -> Trajectory {
        assert!(dt > 0.0);
        let mut out = Trajectory::new(self.dim);
        out.meta = self.meta;
        if self.is_empty() {
            return out;
        }
        let (t0, t1) = (self.t_start(), self.t_end());
        let mut y = vec![0.0; self.dim];
        let mut d = vec![0.0; self.dim];
        let mut k = 0usize;
        loop {
            let t = t0 + k as f64 * dt;
            if t > t1 - 1e-9 * dt {
                break;
            }
            let i = self.interval(t).unwrap();
            self.hermite_into(i, t, &mut y, Some(&mut d));
            out.push(t, &y, &d);
            k += 1;
        }
        out.push(t1, self.state(self.len() - 1), self.deriv(self.len() - 1));
        out
    }

    /// Samples from `t0` onward, starting with an interpolated sample at `t0`.
    pub fn tail_from(&self, t0: f64) -> Trajectory {
        let mut out = Trajectory::new(self.dim);
        out.meta = self.meta;
        let Some(i) = self.interval(t0) else {
            return out;
        };
        let mut y = vec![0.0; self.dim];
        let mut d = vec![0.0; self.dim];
        self.hermite_into(i, t0, &mut y, Some(&mut d));
        out.push(t0, &y, &d);
        for j in i + 1..self.len() {
            if self.times[j] > t0 {
                out.push(self.times[j], self.state(j), self.deriv(j));
            }
        }
        out
    }
}

/// Error raised during integration, with everything computed before it.
#[derive(Clone, Debug)]
pub struct IntegrationFailure {
    pub error: Error,
    pub partial: Trajectory,
}

impl fmt::Display for IntegrationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (partial trajectory up to t = {})", self.error, self.partial.t_end())
    }
}

impl core::error::Error for IntegrationFailure {}

impl From<IntegrationFailure> for Error {
    fn from(f: IntegrationFailure) -> Self {
        f.error
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

/// One classical RK4 step.
pub fn step_rk4<F>(mut f: F, s: &[f64], t: f64, dt: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let mut k1 = vec![0.0; s.len()];
    f(t, s, &mut k1)?;
    let mut ws = Rk4Workspace::new(s.len());
    let mut out = vec![0.0; s.len()];
    ws.step(&mut f, s, &k1, t, dt, &mut out)?;
    Ok(out)
}

struct Rk4Workspace {
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Workspace {
    fn new(n: usize) -> Self {
        Self { k2: vec![0.0; n], k3: vec![0.0; n], k4: vec![0.0; n], tmp: vec![0.0; n] }
    }

    fn step<F>(&mut self, f: &mut F, y: &[f64], k1: &[f64], t: f64, h: f64, out: &mut [f64]) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    {
        let n = y.len();
        for i in 0..n {
            self.tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        f(t + 0.5 * h, &self.tmp, &mut self.k2)?;
        for i in 0..n {
            self.tmp[i] = y[i] + 0.5 * h * self.k2[i];
        }
        f(t + 0.5 * h, &self.tmp, &mut self.k3)?;
        for i in 0..n {
            self.tmp[i] = y[i] + h * self.k3[i];
        }
        f(t + h, &self.tmp, &mut self.k4)?;
        for i in 0..n {
            out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
        Ok(())
    }
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// Integrates from `t = 0` to `cfg.t_end`.
pub fn integrate<F>(f: F, s0: &[f64], cfg: &IntegratorConfig) -> core::result::Result<Trajectory, IntegrationFailure>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    integrate_with(f, s0, cfg, |_| Flow::Continue)
}

/// Like [`integrate`], but calls `observe` after every accepted step and
/// stops early when it returns [`Flow::Stop`].
pub fn integrate_with<F, O>(
    mut f: F,
    s0: &[f64],
    cfg: &IntegratorConfig,
    mut observe: O,
) -> core::result::Result<Trajectory, IntegrationFailure>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    O: FnMut(&Trajectory) -> Flow,
{
    let n = s0.len();
    let mut traj = Trajectory::new(n);
    if let Err(error) = cfg.validate() {
        return Err(IntegrationFailure { error, partial: traj });
    }
    let mut k1 = vec![0.0; n];
    if let Err(error) = f(0.0, s0, &mut k1) {
        return Err(IntegrationFailure { error, partial: traj });
    }
    traj.meta.rhs_evals = 1;
    traj.push(0.0, s0, &k1);
    if cfg.t_end == 0.0 || observe(&traj) == Flow::Stop {
        return Ok(traj);
    }
    let result = match cfg.method {
        Method::Rk4Fixed => run_rk4(&mut f, cfg, &mut traj, k1, &mut observe),
        Method::Rk45Adaptive => run_dopri(&mut f, cfg, &mut traj, k1, &mut observe),
    };
    match result {
        Ok(()) => Ok(traj),
        Err(error) => Err(IntegrationFailure { error, partial: traj }),
    }
}

fn run_rk4<F, O>(f: &mut F, cfg: &IntegratorConfig, traj: &mut Trajectory, mut k1: Vec<f64>, observe: &mut O) -> Result<()>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    O: FnMut(&Trajectory) -> Flow,
{
    let n = k1.len();
    let mut ws = Rk4Workspace::new(n);
    let mut y = traj.state(0).to_vec();
    let mut y_new = vec![0.0; n];
    let steps = (cfg.t_end / cfg.dt - 1e-9).ceil().max(1.0) as usize;
    let mut t = 0.0;
    for i in 1..=steps {
        if i > cfg.max_steps {
            return Err(Error::MaxStepsExceeded { t, steps: cfg.max_steps });
        }
        let t_next = if i == steps { cfg.t_end } else { i as f64 * cfg.dt };
        ws.step(f, &y, &k1, t, t_next - t, &mut y_new)?;
        f(t_next, &y_new, &mut k1)?;
        traj.meta.rhs_evals += 4;
        traj.meta.steps_taken += 1;
        core::mem::swap(&mut y, &mut y_new);
        t = t_next;
        traj.push(t, &y, &k1);
        if observe(traj) == Flow::Stop {
            break;
        }
    }
    Ok(())
}

fn run_dopri<F, O>(f: &mut F, cfg: &IntegratorConfig, traj: &mut Trajectory, mut k1: Vec<f64>, observe: &mut O) -> Result<()>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    O: FnMut(&Trajectory) -> Flow,
{
    let n = k1.len();
    let mut y = traj.state(0).to_vec();
    let mut y_new = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let max_dt = cfg.max_dt.unwrap_or(f64::INFINITY);
    let mut h = cfg.dt.min(max_dt);
    let mut t = 0.0;
    let mut attempts = 0usize;
    while t < cfg.t_end {
        if attempts >= cfg.max_steps {
            return Err(Error::MaxStepsExceeded { t, steps: cfg.max_steps });
        }
        attempts += 1;
        let remaining = cfg.t_end - t;
        let last = h >= remaining * (1.0 - 1e-12);
        if last {
            h = remaining;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t, dt: h });
        }

        for i in 0..n {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        f(t + C2 * h, &tmp, &mut k2)?;
        for i in 0..n {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * h, &tmp, &mut k3)?;
        for i in 0..n {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * h, &tmp, &mut k4)?;
        for i in 0..n {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * h, &tmp, &mut k5)?;
        for i in 0..n {
            tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(t + h, &tmp, &mut k6)?;
        for i in 0..n {
            y_new[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        let t_new = if last { cfg.t_end } else { t + h };
        f(t_new, &y_new, &mut k7)?;
        traj.meta.rhs_evals += 6;

        let mut err = 0.0f64;
        for i in 0..n {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = cfg.atol + cfg.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max(e.abs() / scale);
        }
        if !err.is_finite() {
            traj.meta.steps_rejected += 1;
            h *= MIN_FACTOR;
            continue;
        }
        let factor = if err == 0.0 {
            MAX_FACTOR
        } else {
            (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
        };
        if err <= 1.0 {
            traj.meta.steps_taken += 1;
            t = t_new;
            core::mem::swap(&mut y, &mut y_new);
            core::mem::swap(&mut k1, &mut k7);
            traj.push(t, &y, &k1);
            if observe(traj) == Flow::Stop {
                break;
            }
            h = (h * factor).min(max_dt);
        } else {
            traj.meta.steps_rejected += 1;
            h *= factor.min(1.0);
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `g` goes from negative to non-negative.
    Up,
    /// `g` goes from positive to non-positive.
    Down,
    Any,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Crossing {
    pub t: f64,
    pub state: Vec<f64>,
    pub direction: Direction,
}

const CROSSING_TOL: f64 = 1e-10;

/// Zeros of `g` along the trajectory, refined by bisection on the Hermite
/// interpolant. A sample where `g` is exactly zero counts as the end of the
/// interval before it, so a trajectory starting on the section does not
/// report `t = 0`.
pub fn find_section_crossing<G>(traj: &Trajectory, mut g: G, direction: Direction) -> Vec<Crossing>
where
    G: FnMut(&[f64]) -> f64,
{
    let mut out = Vec::new();
    if traj.len() < 2 {
        return out;
    }
    let mut buf = vec![0.0; traj.dim()];
    let mut g0 = g(traj.state(0));
    for i in 0..traj.len() - 1 {
        let g1 = g(traj.state(i + 1));
        let dir = if g0 < 0.0 && g1 >= 0.0 {
            Some(Direction::Up)
        } else if g0 > 0.0 && g1 <= 0.0 {
            Some(Direction::Down)
        } else {
            None
        };
        if let Some(d) = dir {
            if direction == Direction::Any || direction == d {
                let t = refine_crossing(traj, i, g0, &mut g, &mut buf);
                traj.hermite_into(i, t, &mut buf, None);
                out.push(Crossing { t, state: buf.clone(), direction: d });
            }
        }
        g0 = g1;
    }
    out
}

fn refine_crossing<G>(traj: &Trajectory, i: usize, g_lo: f64, g: &mut G, buf: &mut [f64]) -> f64
where
    G: FnMut(&[f64]) -> f64,
{
    let (mut lo, mut hi) = (traj.time(i), traj.time(i + 1));
    let lo_sign = g_lo < 0.0;
    let mut mid = hi;
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        traj.hermite_into(i, mid, buf, None);
        let gm = g(buf);
        if gm.abs() < CROSSING_TOL {
            break;
        }
        if (gm < 0.0) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    mid
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn harmonic(_t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        dy[0] = y[1];
        dy[1] = -y[0];
        Ok(())
    }

    #[test]
    fn rk4_zero_field() {
        let y = step_rk4(|_, _, d: &mut [f64]| { d.fill(0.0); Ok(()) }, &[1.0, 2.0], 0.0, 0.5).unwrap();
        assert_eq!(y, vec![1.0, 2.0]);
    }

    #[test]
    fn rk4_exponential_step() {
        let y = step_rk4(|_, y: &[f64], d: &mut [f64]| { d[0] = y[0]; Ok(()) }, &[1.0], 0.0, 0.1).unwrap();
        // 1 + h + h^2/2 + h^3/6 + h^4/24
        assert!((y[0] - 1.1051708333333333).abs() < 1e-15);
        assert!((y[0] - 0.1f64.exp()).abs() < 1e-7);
    }

    #[test]
    fn rk4_half_steps_differ_at_fifth_order() {
        let decay = |_: f64, y: &[f64], d: &mut [f64]| { d[0] = -y[0]; Ok(()) };
        let diff = |h: f64| {
            let full = step_rk4(decay, &[1.0], 0.0, h).unwrap()[0];
            let half = step_rk4(decay, &[1.0], 0.0, h / 2.0).unwrap();
            let two = step_rk4(decay, &half, h / 2.0, h / 2.0).unwrap()[0];
            (full - two).abs()
        };
        let ratio = diff(0.2) / diff(0.1);
        assert!(ratio > 25.0 && ratio < 40.0, "ratio {ratio}");
    }

    #[test]
    fn adaptive_harmonic_period() {
        let cfg = IntegratorConfig::adaptive(2.0 * PI).with_tolerances(1e-10, 1e-12);
        let traj = integrate(harmonic, &[1.0, 0.0], &cfg).unwrap();
        let end = traj.last_state().unwrap();
        assert!((end[0] - 1.0).abs() < 1e-8 && end[1].abs() < 1e-8);
        assert_eq!(traj.t_end(), 2.0 * PI);
        assert!(traj.times().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn zero_field_is_constant() {
        let cfg = IntegratorConfig::adaptive(3.0);
        let traj = integrate(|_, _, d: &mut [f64]| { d.fill(0.0); Ok(()) }, &[0.5, -1.0], &cfg).unwrap();
        assert!(traj.iter().all(|(_, s)| s == [0.5, -1.0]));
    }

    #[test]
    fn fixed_step_lands_on_t_end() {
        let traj = integrate(harmonic, &[1.0, 0.0], &IntegratorConfig::rk4(0.3, 1.0)).unwrap();
        assert_eq!(traj.len(), 5);
        assert_eq!(traj.t_end(), 1.0);
    }

    #[test]
    fn blow_up_keeps_partial_trajectory() {
        let f = |t: f64, y: &[f64], d: &mut [f64]| {
            if t > 1.0 {
                return Err(Error::BlowUp { distance: 31.0, limit: 30.0 });
            }
            d[0] = y[0];
            Ok(())
        };
        let err = integrate(f, &[1.0], &IntegratorConfig::rk4(0.1, 2.0)).unwrap_err();
        assert!(matches!(err.error, Error::BlowUp { .. }));
        assert!(err.partial.t_end() >= 0.9 && err.partial.t_end() <= 1.0 + 1e-12);
    }

    #[test]
    fn max_steps_exceeded() {
        let cfg = IntegratorConfig { max_steps: 3, ..IntegratorConfig::rk4(0.1, 1.0) };
        let err = integrate(harmonic, &[1.0, 0.0], &cfg).unwrap_err();
        assert!(matches!(err.error, Error::MaxStepsExceeded { .. }));
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = IntegratorConfig { rtol: 1e-16, ..IntegratorConfig::default() };
        assert!(integrate(harmonic, &[1.0, 0.0], &cfg).is_err());
        let cfg = IntegratorConfig { dt: -1.0, ..IntegratorConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn sine_crossings_at_multiples_of_pi() {
        // y = (sin t, cos t)
        let cfg = IntegratorConfig::adaptive(10.0).with_tolerances(1e-11, 1e-13).with_max_dt(0.2);
        let traj = integrate(harmonic, &[0.0, 1.0], &cfg).unwrap();
        let xs = find_section_crossing(&traj, |s| s[0], Direction::Any);
        assert_eq!(xs.len(), 3);
        for (k, c) in xs.iter().enumerate() {
            assert!((c.t - (k + 1) as f64 * PI).abs() < 1e-9, "{} vs {}", c.t, (k + 1) as f64 * PI);
        }
        assert_eq!(xs[0].direction, Direction::Down);
        assert_eq!(find_section_crossing(&traj, |s| s[0], Direction::Up).len(), 1);
        assert!(find_section_crossing(&traj, |s| s[0] + 2.0, Direction::Any).is_empty());
    }

    #[test]
    fn resample_and_tail() {
        let cfg = IntegratorConfig::adaptive(1.0).with_tolerances(1e-12, 1e-14);
        let traj = integrate(harmonic, &[1.0, 0.0], &cfg).unwrap();
        let r = traj.resample(0.01);
        assert_eq!(r.len(), 101);
        for (t, s) in r.iter() {
            assert!((s[0] - t.cos()).abs() < 1e-9);
        }
        let tail = traj.tail_from(0.5);
        assert_eq!(tail.t_start(), 0.5);
        assert!((tail.state(0)[0] - 0.5f64.cos()).abs() < 1e-9);
    }
}
