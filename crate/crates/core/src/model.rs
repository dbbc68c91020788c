//! The separated quaternionic Kuramoto vector field.
//!
//! For oscillators `q_n = (w_n, x_n, y_n, z_n)` with natural frequencies
//! `omega_n` and coupling `lambda`:
//!
//! ```text
//! w_n' = omega_n + lambda/N sum_m sin(w_m - w_n) cosh(v_mn)
//! x_n' =           lambda/N sum_m cos(w_m - w_n) sinh(v_mn) (x_m - x_n) / v_mn
//! ```
//!
//! and likewise for `y`, `z`, where `v_mn` is the Euclidean distance between
//! the imaginary parts of oscillators `m` and `n`.
//!
//! States are stored as one flat vector `[w_1..w_N, x_1..x_N, y_1..y_N, z_1..z_N]`
//! so the integrators can treat them opaquely.

use alloc::vec;
use alloc::vec::Vec;

// redundant when std is linked into the build
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quat::{sinhc, Quaternion};

/// Default guard on `v_mn`; `cosh(30)` is about `5e12`.
pub const DEFAULT_V_MAX: f64 = 30.0;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelParams {
    pub omegas: Vec<f64>,
    pub lambda: f64,
}

impl ModelParams {
    /// Uncoupled runs (`lambda = 0`) are allowed.
    pub fn new(omegas: Vec<f64>, lambda: f64) -> Result<Self> {
        if omegas.len() < 2 {
            return Err(Error::InvalidArgument("need at least two oscillators"));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument("coupling must be finite and non-negative"));
        }
        if omegas.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidArgument("natural frequencies must be finite"));
        }
        Ok(Self { omegas, lambda })
    }

    pub fn n_osc(&self) -> usize {
        self.omegas.len()
    }

    /// Subtracts the mean natural frequency from every oscillator.
    pub fn to_rotating_frame(&self) -> Self {
        let mean = self.omegas.iter().sum::<f64>() / self.omegas.len() as f64;
        Self {
            omegas: self.omegas.iter().map(|o| o - mean).collect(),
            lambda: self.lambda,
        }
    }

    /// Largest pairwise natural-frequency gap, `max(omega) - min(omega)`.
    pub fn critical_coupling(&self) -> f64 {
        let (lo, hi) = self
            .omegas
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &o| {
                (lo.min(o), hi.max(o))
            });
        hi - lo
    }
}

pub fn to_rotating_frame(p: &ModelParams) -> ModelParams {
    p.to_rotating_frame()
}

pub fn critical_coupling(p: &ModelParams) -> f64 {
    p.critical_coupling()
}

/// Phases of `N` oscillators in the flat layout described at module level.
#[derive(Clone, Debug, PartialEq)]
pub struct OscillatorState {
    n: usize,
    data: Vec<f64>,
}

impl OscillatorState {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; 4 * n] }
    }

    pub fn from_parts(w: &[f64], x: &[f64], y: &[f64], z: &[f64]) -> Result<Self> {
        let n = w.len();
        if x.len() != n || y.len() != n || z.len() != n {
            return Err(Error::InvalidArgument("component vectors differ in length"));
        }
        let mut data = Vec::with_capacity(4 * n);
        for part in [w, x, y, z] {
            data.extend_from_slice(part);
        }
        Self::from_flat(data)
    }

    pub fn from_flat(data: Vec<f64>) -> Result<Self> {
        if data.is_empty() || data.len() % 4 != 0 {
            return Err(Error::InvalidArgument("flat state length must be a positive multiple of 4"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("state components must be finite"));
        }
        Ok(Self { n: data.len() / 4, data })
    }

    pub fn from_quaternions(qs: &[Quaternion]) -> Self {
        let mut s = Self::zeros(qs.len());
        for (i, q) in qs.iter().enumerate() {
            s.set(i, *q);
        }
        s
    }

    pub fn n_osc(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn w(&self) -> &[f64] {
        &self.data[..self.n]
    }

    pub fn x(&self) -> &[f64] {
        &self.data[self.n..2 * self.n]
    }

    pub fn y(&self) -> &[f64] {
        &self.data[2 * self.n..3 * self.n]
    }

    pub fn z(&self) -> &[f64] {
        &self.data[3 * self.n..]
    }

    pub fn quaternion(&self, i: usize) -> Quaternion {
        quaternion_at(&self.data, self.n, i)
    }

    pub fn set(&mut self, i: usize, q: Quaternion) {
        let n = self.n;
        self.data[i] = q.w;
        self.data[n + i] = q.x;
        self.data[2 * n + i] = q.y;
        self.data[3 * n + i] = q.z;
    }
}

/// Oscillator `i` of a flat state holding `n` oscillators.
#[inline]
pub fn quaternion_at(flat: &[f64], n: usize, i: usize) -> Quaternion {
    Quaternion::new(flat[i], flat[n + i], flat[2 * n + i], flat[3 * n + i])
}

/// Symmetric matrix of imaginary-part distances `v_mn`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairwiseDistances {
    n: usize,
    v: Vec<f64>,
}

impl PairwiseDistances {
    pub fn n_osc(&self) -> usize {
        self.n
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.v[m * self.n + n]
    }

    pub fn max(&self) -> f64 {
        self.v.iter().copied().fold(0.0, f64::max)
    }
}

#[inline]
fn imag_distance(flat: &[f64], n: usize, a: usize, b: usize) -> f64 {
    let dx = flat[n + a] - flat[n + b];
    let dy = flat[2 * n + a] - flat[2 * n + b];
    let dz = flat[3 * n + a] - flat[3 * n + b];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

pub fn pairwise_v(s: &OscillatorState) -> PairwiseDistances {
    let n = s.n;
    let mut v = vec![0.0; n * n];
    for a in 0..n {
        for b in a + 1..n {
            let d = imag_distance(&s.data, n, a, b);
            v[a * n + b] = d;
            v[b * n + a] = d;
        }
    }
    PairwiseDistances { n, v }
}

/// The full `4N`-dimensional vector field with a blow-up guard on `v_mn`.
#[derive(Clone, Debug, PartialEq)]
pub struct KuramotoModel {
    params: ModelParams,
    v_max: f64,
}

impl KuramotoModel {
    pub fn new(params: ModelParams) -> Self {
        Self { params, v_max: DEFAULT_V_MAX }
    }

    pub fn with_v_max(mut self, v_max: f64) -> Self {
        self.v_max = v_max;
        self
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        4 * self.params.n_osc()
    }

    /// Writes the time derivative of the flat state `y` into `dy`.
    pub fn eval(&self, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let n = self.params.n_osc();
        debug_assert_eq!(y.len(), 4 * n);
        debug_assert_eq!(dy.len(), 4 * n);
        dy.fill(0.0);
        // pair (a, b) with a < b; contributions to b are mirrored onto a
        for b in 0..n {
            for a in 0..b {
                let dx = y[n + a] - y[n + b];
                let dy_ = y[2 * n + a] - y[2 * n + b];
                let dz = y[3 * n + a] - y[3 * n + b];
                let v = (dx * dx + dy_ * dy_ + dz * dz).sqrt();
                if !(v <= self.v_max) {
                    return Err(Error::BlowUp { distance: v, limit: self.v_max });
                }
                let (s, c) = (y[a] - y[b]).sin_cos();
                let sw = s * v.cosh();
                dy[b] += sw;
                dy[a] -= sw;
                let k = c * sinhc(v);
                dy[n + b] += k * dx;
                dy[n + a] -= k * dx;
                dy[2 * n + b] += k * dy_;
                dy[2 * n + a] -= k * dy_;
                dy[3 * n + b] += k * dz;
                dy[3 * n + a] -= k * dz;
            }
        }
        let scale = self.params.lambda / n as f64;
        for d in dy.iter_mut() {
            *d *= scale;
        }
        for (d, o) in dy[..n].iter_mut().zip(&self.params.omegas) {
            *d += o;
        }
        Ok(())
    }
}

/// Time derivative of `s` under the default blow-up guard.
pub fn rhs_full(s: &OscillatorState, p: &ModelParams) -> Result<OscillatorState> {
    if s.n_osc() != p.n_osc() {
        return Err(Error::InvalidArgument("state and parameters disagree on oscillator count"));
    }
    let model = KuramotoModel::new(p.clone());
    let mut out = OscillatorState::zeros(s.n_osc());
    model.eval(&s.data, &mut out.data)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn identical_oscillators_have_zero_distances() {
        let q = Quaternion::new(0.3, 1.0, -2.0, 0.5);
        let s = OscillatorState::from_quaternions(&[q, q, q]);
        assert_eq!(pairwise_v(&s).max(), 0.0);
    }

    #[test]
    fn peach_ring_initial_distance() {
        let s = OscillatorState::from_parts(&[0.0, 0.0], &[1.0, 0.0], &[1.05, 0.0], &[0.0, 0.0])
            .unwrap();
        let v = pairwise_v(&s);
        assert!((v.get(0, 1) - 1.45).abs() < 1e-15);
        assert_eq!(v.get(0, 1), v.get(1, 0));
    }

    #[test]
    fn arithmetic_progression_distances() {
        let s = OscillatorState::from_parts(
            &[0.0, 0.0, 0.0],
            &[0.0, 0.3, 0.6],
            &[0.0, -0.2, -0.4],
            &[1.0, 1.1, 1.2],
        )
        .unwrap();
        let v = pairwise_v(&s);
        assert!((v.get(0, 2) - 2.0 * v.get(0, 1)).abs() < 1e-15);
    }

    #[test]
    fn coincident_state_is_fixed_point() {
        let q = Quaternion::new(1.0, 2.0, 3.0, 4.0);
        let s = OscillatorState::from_quaternions(&[q, q, q, q]);
        let p = ModelParams::new(vec![0.0; 4], 1.3).unwrap();
        let d = rhs_full(&s, &p).unwrap();
        assert!(d.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn equal_imaginary_parts_reduce_to_classical_kuramoto() {
        let p = ModelParams::new(vec![0.7, -0.4], 1.2).unwrap();
        let w = [0.3, 2.0];
        let s = OscillatorState::from_parts(&w, &[0.5, 0.5], &[-1.0, -1.0], &[2.0, 2.0]).unwrap();
        let d = rhs_full(&s, &p).unwrap();
        for n in 0..2 {
            let classical = p.omegas[n]
                + p.lambda / 2.0 * (0..2).map(|m| (w[m] - w[n]).sin()).sum::<f64>();
            assert!((d.w()[n] - classical).abs() < 1e-15);
        }
        assert!(d.x().iter().chain(d.y()).chain(d.z()).all(|&v| v == 0.0));
    }

    #[test]
    fn rotating_frame_examples() {
        let p = ModelParams::new(vec![1.0, 1.0], 1.0).unwrap();
        assert_eq!(p.to_rotating_frame().omegas, vec![0.0, 0.0]);
        let p = ModelParams::new(vec![3.0, -1.0], 1.0).unwrap();
        assert_eq!(p.to_rotating_frame().omegas, vec![2.0, -2.0]);
        let p = ModelParams::new(vec![0.66, 0.10, -0.29, -0.34, -0.12], 1.1).unwrap();
        let r = p.to_rotating_frame();
        assert!(r.omegas.iter().sum::<f64>().abs() < 1e-12);
        for (a, b) in p.omegas.iter().zip(&r.omegas) {
            assert!((a - b - 0.002).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_coupling_examples() {
        let p = ModelParams::new(vec![0.66, 0.10, -0.29, -0.34, -0.12], 1.1).unwrap();
        assert!((p.critical_coupling() - 1.0).abs() < 1e-15);
        let p = ModelParams::new(vec![0.4; 3], 1.0).unwrap();
        assert_eq!(p.critical_coupling(), 0.0);
        let p = ModelParams::new(vec![1.0, 0.0, -1.0], 1.0).unwrap();
        assert_eq!(p.critical_coupling(), 2.0);
    }

    #[test]
    fn blow_up_guard() {
        let p = ModelParams::new(vec![0.0, 0.0], 1.0).unwrap();
        let s = OscillatorState::from_parts(&[0.0, PI], &[0.0, 31.0], &[0.0; 2], &[0.0; 2]).unwrap();
        assert!(matches!(rhs_full(&s, &p), Err(Error::BlowUp { .. })));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ModelParams::new(vec![1.0], 1.0).is_err());
        assert!(ModelParams::new(vec![1.0, 2.0], -1.0).is_err());
        assert!(ModelParams::new(vec![1.0, f64::NAN], 1.0).is_err());
    }
}
