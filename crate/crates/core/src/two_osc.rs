//! Two oscillators in the weak regime.
//!
//! With `q = q_1 - q_2 = (w, x, y, z)` and `v = |(x, y, z)|`, the pair reduces
//! to the planar system
//!
//! ```text
//! w' = omega - lambda sin(w) cosh(v)
//! v' =       - lambda cos(w) sinh(v)
//! ```
//!
//! For `lambda < omega` it has centers at `(2k pi + pi/2, alpha)` with
//! `alpha = arccosh(omega / lambda)`, surrounded by closed orbits.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

// redundant when std is linked into the build
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{KuramotoModel, ModelParams, OscillatorState, DEFAULT_V_MAX};
use crate::ode::{find_section_crossing, integrate, integrate_with, Direction, Flow, IntegratorConfig, Trajectory};
use crate::planar::{eigenvalues, Jacobian, PlanarState};

pub fn rhs_n2(s: PlanarState, omega: f64, lambda: f64) -> Result<[f64; 2]> {
    if s.v > DEFAULT_V_MAX {
        return Err(Error::BlowUp { distance: s.v, limit: DEFAULT_V_MAX });
    }
    let (sw, cw) = s.w.sin_cos();
    Ok([omega - lambda * sw * s.v.cosh(), -lambda * cw * s.v.sinh()])
}

pub fn jacobian_n2(s: PlanarState, lambda: f64) -> Jacobian {
    let (sw, cw) = s.w.sin_cos();
    let (ch, sh) = (s.v.cosh(), s.v.sinh());
    [[-lambda * cw * ch, -lambda * sw * sh], [lambda * sw * sh, -lambda * cw * ch]]
}

/// `ln(x + sqrt(x^2 - 1))` for `x >= 1`.
pub fn arccosh(x: f64) -> f64 {
    (x + (x * x - 1.0).sqrt()).ln()
}

pub fn equilibrium_n2(omega: f64, lambda: f64, k: i32) -> Result<PlanarState> {
    if !(lambda > 0.0 && lambda < omega) {
        return Err(Error::NotWeak { omega, lambda });
    }
    Ok(PlanarState::new(2.0 * k as f64 * PI + FRAC_PI_2, arccosh(omega / lambda)))
}

/// Time derivative of `((w - w_k)^2 + (v - alpha)^2) / 2` divided by `lambda`,
/// with `gamma = omega / lambda`.
pub fn lyapunov_f(s: PlanarState, k: i32, gamma: f64) -> f64 {
    let wk = 2.0 * k as f64 * PI + FRAC_PI_2;
    let alpha = arccosh(gamma);
    (s.w - wk) * (gamma - s.w.sin() * s.v.cosh()) - (s.v - alpha) * s.w.cos() * s.v.sinh()
}

const BAND_SAMPLES: usize = 2001;
const BAND_TOL: f64 = 1e-8;
const BAND_CAP: f64 = 0.5;

/// Largest `eps <= 0.5` such that on `[(1-eps) alpha, (1+eps) alpha]` both
/// `|(v - alpha) sinh v| < pi gamma / 2` and `2 cosh v - (v - alpha) sinh v > 0`.
/// Each inequality is checked on a fine sample of the band and bisected
/// separately; the smaller bound is returned.
pub fn epsilon_band(gamma: f64) -> f64 {
    let alpha = arccosh(gamma);
    let h1 = move |v: f64| ((v - alpha) * v.sinh()).abs() < PI * gamma / 2.0;
    let h2 = move |v: f64| 2.0 * v.cosh() - (v - alpha) * v.sinh() > 0.0;
    bisect_band(alpha, h1).min(bisect_band(alpha, h2))
}

fn band_holds(alpha: f64, eps: f64, pred: &impl Fn(f64) -> bool) -> bool {
    let (lo, hi) = ((1.0 - eps) * alpha, (1.0 + eps) * alpha);
    (0..BAND_SAMPLES).all(|i| pred(lo + (hi - lo) * i as f64 / (BAND_SAMPLES - 1) as f64))
}

fn bisect_band(alpha: f64, pred: impl Fn(f64) -> bool) -> f64 {
    if band_holds(alpha, BAND_CAP, &pred) {
        return BAND_CAP;
    }
    let (mut good, mut bad) = (0.0, BAND_CAP);
    while bad - good > BAND_TOL {
        let mid = 0.5 * (good + bad);
        if band_holds(alpha, mid, &pred) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

/// Integration settings used for orbit detection unless the caller overrides them.
pub fn default_orbit_config() -> IntegratorConfig {
    IntegratorConfig::adaptive(1000.0).with_tolerances(1e-11, 1e-13).with_max_dt(0.02)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrbitReport {
    pub omega: f64,
    pub lambda: f64,
    pub v0: f64,
    pub period: f64,
    /// Time of the lower section crossing.
    pub half_period: f64,
    pub closure_error: f64,
    pub symmetry_error: f64,
    /// Upper `(pi/2, v0)` and lower `(pi/2, u0)` section states.
    pub crossings: [PlanarState; 2],
    /// `(v0 - alpha, alpha - u0)`.
    pub ring_halfwidths: (f64, f64),
    /// `alpha - u0 < v0 - alpha` with a margin of `1e-9`.
    pub contracts: bool,
    pub max_v: f64,
}

#[derive(Clone, Debug)]
pub struct PeriodicOrbit {
    pub report: OrbitReport,
    /// Planar `(w, v)` samples over one period.
    pub trajectory: Trajectory,
}

const SYMMETRY_SAMPLES: usize = 1000;

fn planar_field(omega: f64, lambda: f64) -> impl FnMut(f64, &[f64], &mut [f64]) -> Result<()> {
    move |_, y, d| {
        let r = rhs_n2(PlanarState::new(y[0], y[1]), omega, lambda)?;
        d.copy_from_slice(&r);
        Ok(())
    }
}

/// Follows the orbit through `(pi/2, v0)` once around, using `w = pi/2` as
/// the section: first the lower crossing (`w' > 0`), then the return from
/// above (`w' < 0`).
pub fn detect_periodic_orbit(v0: f64, omega: f64, lambda: f64, cfg: &IntegratorConfig) -> Result<PeriodicOrbit> {
    let eq = equilibrium_n2(omega, lambda, 0)?;
    let alpha = eq.v;
    if !(v0 > alpha) {
        return Err(Error::InvalidArgument("v0 must exceed arccosh(omega / lambda)"));
    }
    let g = |s: &[f64]| s[0] - FRAC_PI_2;
    let mut seen_up = false;
    let observer = |tr: &Trajectory| {
        let n = tr.len();
        if n < 2 {
            return Flow::Continue;
        }
        let (a, b) = (g(tr.state(n - 2)), g(tr.state(n - 1)));
        if a < 0.0 && b >= 0.0 {
            seen_up = true;
        } else if seen_up && a > 0.0 && b <= 0.0 {
            return Flow::Stop;
        }
        Flow::Continue
    };
    let traj = match integrate_with(planar_field(omega, lambda), &[FRAC_PI_2, v0], cfg, observer) {
        Ok(t) => t,
        Err(f) => {
            return Err(match f.error {
                Error::MaxStepsExceeded { t, .. } => Error::NoReturn { t },
                e => e,
            })
        }
    };
    let ups = find_section_crossing(&traj, g, Direction::Up);
    let downs = find_section_crossing(&traj, g, Direction::Down);
    let (Some(lower), Some(upper)) = (ups.first(), downs.iter().find(|c| ups.first().is_some_and(|u| c.t > u.t))) else {
        return Err(Error::NoReturn { t: traj.t_end() });
    };
    let period = upper.t;
    let half = lower.t;
    let start = PlanarState::new(FRAC_PI_2, v0);
    let end = PlanarState::new(upper.state[0], upper.state[1]);
    let u0 = lower.state[1];

    let mut a = [0.0; 2];
    let mut b = [0.0; 2];
    let mut symmetry_error = 0.0f64;
    for i in 0..=SYMMETRY_SAMPLES {
        let dt = half * i as f64 / SYMMETRY_SAMPLES as f64;
        let (ta, tb) = (half - dt, (half + dt).min(traj.t_end()));
        if traj.interpolate(ta, &mut a) && traj.interpolate(tb, &mut b) {
            symmetry_error = symmetry_error.max((a[0] + b[0] - PI).abs());
        }
    }
    let max_v = traj.iter().map(|(_, s)| s[1]).fold(f64::NEG_INFINITY, f64::max);
    let widths = (v0 - alpha, alpha - u0);
    let report = OrbitReport {
        omega,
        lambda,
        v0,
        period,
        half_period: half,
        closure_error: end.dist(start),
        symmetry_error,
        crossings: [start, PlanarState::new(lower.state[0], u0)],
        ring_halfwidths: widths,
        contracts: widths.1 > 0.0 && widths.1 < widths.0 - 1e-9,
        max_v,
    };
    Ok(PeriodicOrbit { report, trajectory: traj })
}

/// Lifts the orbit to the full eight-dimensional model with frequencies
/// `(omega/2, -omega/2)`, `q_2 = 0` and the initial imaginary difference of
/// length `v0` along `direction`. Both systems are re-integrated over one
/// period; returns the largest deviation of `(w_1 - w_2, v_12)` from the
/// planar solution on a grid of spacing `0.01`.
pub fn lift_check_along(orbit: &OrbitReport, direction: [f64; 3]) -> Result<f64> {
    let norm = (direction[0].powi(2) + direction[1].powi(2) + direction[2].powi(2)).sqrt();
    if !(norm > 0.0) {
        return Err(Error::InvalidArgument("direction must be nonzero"));
    }
    let (omega, lambda, v0) = (orbit.omega, orbit.lambda, orbit.v0);
    let d = direction.map(|c| c * v0 / norm);
    let cfg = IntegratorConfig::adaptive(orbit.period).with_tolerances(1e-12, 1e-14).with_max_dt(0.01);

    let planar = integrate(planar_field(omega, lambda), &[FRAC_PI_2, v0], &cfg)?;
    let p = ModelParams::new(alloc::vec![omega / 2.0, -omega / 2.0], lambda)?;
    let model = KuramotoModel::new(p);
    let s0 = OscillatorState::from_parts(&[FRAC_PI_2, 0.0], &[d[0], 0.0], &[d[1], 0.0], &[d[2], 0.0])?;
    let full = integrate(|_, y, dy| model.eval(y, dy), s0.as_slice(), &cfg)?;

    let mut a = [0.0; 2];
    let mut b = [0.0; 8];
    let mut dev = 0.0f64;
    let steps = (orbit.period / 0.01).ceil() as usize;
    for i in 0..=steps {
        let t = (i as f64 * 0.01).min(orbit.period);
        if !(planar.interpolate(t, &mut a) && full.interpolate(t, &mut b)) {
            continue;
        }
        let w = b[0] - b[1];
        let v = ((b[2] - b[3]).powi(2) + (b[4] - b[5]).powi(2) + (b[6] - b[7]).powi(2)).sqrt();
        dev = dev.max((w - a[0]).abs()).max((v - a[1]).abs());
    }
    Ok(dev)
}

/// [`lift_check_along`] with the imaginary difference along `(1, 1.05, 0)`.
pub fn lift_check(orbit: &OrbitReport) -> Result<f64> {
    lift_check_along(orbit, [1.0, 1.05, 0.0])
}

/// Nested rings through `(pi/2, alpha + offset)` for each offset.
pub fn nested_orbits(omega: f64, lambda: f64, offsets: &[f64], cfg: &IntegratorConfig) -> Result<Vec<PeriodicOrbit>> {
    let alpha = equilibrium_n2(omega, lambda, 0)?.v;
    offsets.iter().map(|o| detect_periodic_orbit(alpha + o, omega, lambda, cfg)).collect()
}

/// Eigenvalues of the linearization at the center; purely imaginary in theory.
pub fn center_eigenvalues(omega: f64, lambda: f64) -> Result<[num_complex::Complex64; 2]> {
    let eq = equilibrium_n2(omega, lambda, 0)?;
    Ok(eigenvalues(&jacobian_n2(eq, lambda)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::{classify_eigenvalues, Stability};

    const ALPHA2: f64 = 1.3169578969248167;

    #[test]
    fn rhs_examples() {
        let r = rhs_n2(PlanarState::new(FRAC_PI_2, ALPHA2), 2.0, 1.0).unwrap();
        assert!(r[0].abs() < 1e-14 && r[1].abs() < 1e-14);
        let r = rhs_n2(PlanarState::new(0.7, 0.0), 2.0, 1.0).unwrap();
        assert_eq!(r[1], 0.0);
        assert!((r[0] - (2.0 - 0.7f64.sin())).abs() < 1e-15);
        let r = rhs_n2(PlanarState::new(0.0, 1.0), 2.0, 1.0).unwrap();
        assert!((r[0] - 2.0).abs() < 1e-15 && (r[1] + 1.0f64.sinh()).abs() < 1e-15);
        assert!(matches!(rhs_n2(PlanarState::new(0.0, 31.0), 2.0, 1.0), Err(Error::BlowUp { .. })));
    }

    #[test]
    fn equilibria() {
        let e = equilibrium_n2(2.0, 1.0, 0).unwrap();
        assert!((e.v - ALPHA2).abs() < 1e-15 && (e.w - FRAC_PI_2).abs() < 1e-15);
        let e1 = equilibrium_n2(2.0, 1.0, 1).unwrap();
        assert!((e1.w - (FRAC_PI_2 + 2.0 * PI)).abs() < 1e-14);
        assert!(equilibrium_n2(2.0, 2.0 - 1e-12, 0).unwrap().v < 1e-5);
        assert!(matches!(equilibrium_n2(1.0, 1.0, 0), Err(Error::NotWeak { .. })));
    }

    #[test]
    fn center_linearization() {
        let ev = center_eigenvalues(2.0, 1.0).unwrap();
        assert!(ev[0].re.abs() < 1e-12 && ev[1].re.abs() < 1e-12);
        assert!((ev[0].im - 3.0f64.sqrt()).abs() < 1e-12);
        assert_eq!(classify_eigenvalues(&ev), Stability::CenterCandidate);
    }

    #[test]
    fn lyapunov_examples() {
        assert_eq!(lyapunov_f(PlanarState::new(FRAC_PI_2, ALPHA2), 0, 2.0).abs() < 1e-14, true);
        assert!(lyapunov_f(PlanarState::new(FRAC_PI_2, 0.3), 0, 2.0).abs() < 1e-15);
        assert!((lyapunov_f(PlanarState::new(0.0, ALPHA2), 0, 2.0) + PI).abs() < 1e-14);
    }

    #[test]
    fn band_for_gamma_two() {
        let eps = epsilon_band(2.0);
        assert!(eps > 0.0 && eps <= 0.5);
        for v in [(1.0 - eps) * ALPHA2, (1.0 + eps) * ALPHA2] {
            assert!(((v - ALPHA2) * v.sinh()).abs() < PI + 1e-6);
            assert!(2.0 * v.cosh() - (v - ALPHA2) * v.sinh() > -1e-6);
        }
    }

    #[test]
    fn band_near_gamma_one_stays_positive() {
        assert!(epsilon_band(1.0 + 1e-6) > 0.0);
        let eps = epsilon_band(20.0);
        assert!(eps > 0.0 && eps < 0.5);
    }

    #[test]
    fn band_for_large_gamma_is_bisected() {
        let gamma = 50.0;
        let alpha = arccosh(gamma);
        let eps = epsilon_band(gamma);
        let v = (1.0 + eps) * alpha;
        let h2 = 2.0 * v.cosh() - (v - alpha) * v.sinh();
        let h1 = (v - alpha) * v.sinh() - PI * gamma / 2.0;
        // one of the two inequalities is tight at the upper edge
        assert!(h2.abs() < 1e-4 * v.cosh() || h1.abs() < 1e-4 * gamma, "{h1} {h2}");
    }

    #[test]
    fn orbit_small_ring() {
        let o = detect_periodic_orbit(ALPHA2 + 0.01, 2.0, 1.0, &default_orbit_config()).unwrap();
        assert!(o.report.contracts);
        assert!((o.report.period - 2.0 * PI / 3.0f64.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn v0_below_alpha_rejected() {
        assert!(detect_periodic_orbit(1.0, 2.0, 1.0, &default_orbit_config()).is_err());
    }
}
