//! Shared machinery for the two-dimensional `(w, v)` reductions.

use num_complex::Complex64;
// redundant when std is linked into the build
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Result;

/// Real-part phase difference `w` and imaginary distance `v`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlanarState {
    pub w: f64,
    pub v: f64,
}

impl PlanarState {
    pub const fn new(w: f64, v: f64) -> Self {
        Self { w, v }
    }

    pub fn as_array(self) -> [f64; 2] {
        [self.w, self.v]
    }

    pub fn dist(self, other: Self) -> f64 {
        (self.w - other.w).hypot(self.v - other.v)
    }
}

impl From<[f64; 2]> for PlanarState {
    fn from(a: [f64; 2]) -> Self {
        Self::new(a[0], a[1])
    }
}

/// Row-major `[[dw'/dw, dw'/dv], [dv'/dw, dv'/dv]]`.
pub type Jacobian = [[f64; 2]; 2];

/// Real-part threshold below which an eigenvalue counts as neutral.
pub const STABILITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Stability {
    Sink,
    Source,
    Saddle,
    CenterCandidate,
}

/// Eigenvalues ordered by decreasing real part (then imaginary part).
pub fn eigenvalues(j: &Jacobian) -> [Complex64; 2] {
    let half_tr = 0.5 * (j[0][0] + j[1][1]);
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = half_tr * half_tr - det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [Complex64::new(half_tr + s, 0.0), Complex64::new(half_tr - s, 0.0)]
    } else {
        let s = (-disc).sqrt();
        [Complex64::new(half_tr, s), Complex64::new(half_tr, -s)]
    }
}

pub fn classify_eigenvalues(ev: &[Complex64; 2]) -> Stability {
    let (a, b) = (ev[0].re, ev[1].re);
    let neutral = |r: f64| r.abs() <= STABILITY_TOL;
    if neutral(a) || neutral(b) {
        Stability::CenterCandidate
    } else if a < 0.0 && b < 0.0 {
        Stability::Sink
    } else if a > 0.0 && b > 0.0 {
        Stability::Source
    } else {
        Stability::Saddle
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonResult {
    pub point: PlanarState,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub const NEWTON_MAX_ITER: usize = 50;

/// Damped Newton iteration for `f(p) = 0` in the plane. The step is halved
/// until the residual norm decreases.
pub fn newton2<F, J>(mut f: F, mut jac: J, start: PlanarState, tol: f64) -> Result<NewtonResult>
where
    F: FnMut(PlanarState) -> Result<[f64; 2]>,
    J: FnMut(PlanarState) -> Jacobian,
{
    let mut p = start;
    let mut r = f(p)?;
    let mut res = r[0].hypot(r[1]);
    for it in 0..NEWTON_MAX_ITER {
        if res < tol {
            return Ok(NewtonResult { point: p, residual: res, iterations: it, converged: true });
        }
        let j = jac(p);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dw = (j[1][1] * r[0] - j[0][1] * r[1]) / det;
        let dv = (-j[1][0] * r[0] + j[0][0] * r[1]) / det;
        let mut scale = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let q = PlanarState::new(p.w - scale * dw, p.v - scale * dv);
            if let Ok(rq) = f(q) {
                let rn = rq[0].hypot(rq[1]);
                if rn < res {
                    p = q;
                    r = rq;
                    res = rn;
                    improved = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok(NewtonResult { point: p, residual: res, iterations: NEWTON_MAX_ITER, converged: res < tol })
}
