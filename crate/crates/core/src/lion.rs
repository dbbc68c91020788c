//! The "Lion Dance" flow.
//!
//! When `N >= 3` oscillators have natural frequencies in arithmetic progression
//! with span `omega` and start with quaternion phases in arithmetic
//! progression, consecutive differences stay equal (exactly for `N = 3`). The
//! common difference `(w, v)` then obeys
//!
//! ```text
//! w' = omega/(N-1) - lambda/N sum_{m=1}^{N-1} sin(m w) cosh(m v)
//! v' =             - lambda/N sum_{m=1}^{N-1} cos(m w) sinh(m v)
//! ```
//!
//! Below `lambda = omega` three weak regimes are distinguished by the
//! threshold `Lambda_c = N omega / ((N-1) max_w sum_m sin(m w))`, where
//! equilibria on the axis `v = 0` appear by tangency.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
// redundant when std is linked into the build
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{KuramotoModel, ModelParams, OscillatorState, DEFAULT_V_MAX};
use crate::ode::{integrate, IntegratorConfig};
use crate::planar::{classify_eigenvalues, eigenvalues, newton2, Jacobian, PlanarState, Stability};

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LionParams {
    /// Frequency span `omega_1 - omega_N`, which is also the critical coupling.
    pub omega: f64,
    pub lambda: f64,
    pub n_osc: usize,
}

impl LionParams {
    pub fn new(omega: f64, lambda: f64, n_osc: usize) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidArgument("omega must be positive"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument("lambda must be positive"));
        }
        if n_osc < 3 {
            return Err(Error::InvalidArgument("the Lion Dance flow needs at least three oscillators"));
        }
        Ok(Self { omega, lambda, n_osc })
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        Self::new(self.omega, lambda, self.n_osc)
    }

    fn drift(&self) -> f64 {
        self.omega / (self.n_osc - 1) as f64
    }

    fn gain(&self) -> f64 {
        self.lambda / self.n_osc as f64
    }
}

pub fn rhs_lion(s: PlanarState, p: &LionParams) -> Result<[f64; 2]> {
    let top = (p.n_osc - 1) as f64 * s.v;
    if top > DEFAULT_V_MAX {
        return Err(Error::BlowUp { distance: top, limit: DEFAULT_V_MAX });
    }
    let (mut a, mut b) = (0.0, 0.0);
    for m in 1..p.n_osc {
        let mf = m as f64;
        let (sw, cw) = (mf * s.w).sin_cos();
        a += sw * (mf * s.v).cosh();
        b += cw * (mf * s.v).sinh();
    }
    Ok([p.drift() - p.gain() * a, -p.gain() * b])
}

/// Analytic Jacobian. It always has the form `[[a, b], [-b, a]]`.
pub fn jacobian_lion(s: PlanarState, p: &LionParams) -> Jacobian {
    let (mut a, mut b) = (0.0, 0.0);
    for m in 1..p.n_osc {
        let mf = m as f64;
        let (sw, cw) = (mf * s.w).sin_cos();
        a += mf * cw * (mf * s.v).cosh();
        b += mf * sw * (mf * s.v).sinh();
    }
    let g = p.gain();
    [[-g * a, -g * b], [g * b, -g * a]]
}

/// `sum_{m=1}^{N-1} sin(m w)`.
pub fn sine_sum(w: f64, n_osc: usize) -> f64 {
    (1..n_osc).map(|m| (m as f64 * w).sin()).sum()
}

fn sine_sum_deriv(w: f64, n_osc: usize) -> f64 {
    (1..n_osc).map(|m| m as f64 * (m as f64 * w).cos()).sum()
}

const GOLDEN_TOL: f64 = 1e-12;
const SCAN_POINTS: usize = 4096;

/// Location and value of the maximum of [`sine_sum`] over `(0, pi)`, which
/// is also its global maximum since the sum is odd and `2 pi`-periodic.
pub fn sine_sum_max(n_osc: usize) -> (f64, f64) {
    let h = PI / SCAN_POINTS as f64;
    let best = (1..SCAN_POINTS)
        .map(|i| i as f64 * h)
        .max_by(|a, b| sine_sum(*a, n_osc).total_cmp(&sine_sum(*b, n_osc)))
        .unwrap();
    // golden-section search on the bracketing cells
    let (mut a, mut b) = (best - h, best + h);
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    while b - a > 1e-6 {
        if sine_sum(c, n_osc) > sine_sum(d, n_osc) {
            b = d;
        } else {
            a = c;
        }
        c = b - inv_phi * (b - a);
        d = a + inv_phi * (b - a);
    }
    // refine on the zero of the derivative
    let (mut lo, mut hi) = (a - 1e-6, b + 1e-6);
    if sine_sum_deriv(lo, n_osc) > 0.0 && sine_sum_deriv(hi, n_osc) < 0.0 {
        while hi - lo > GOLDEN_TOL {
            let mid = 0.5 * (lo + hi);
            if sine_sum_deriv(mid, n_osc) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let w = 0.5 * (lo + hi);
    (w, sine_sum(w, n_osc))
}

/// `Lambda_c = N omega / ((N-1) max_w sum_m sin(m w))`.
pub fn lambda_critical(p: &LionParams) -> f64 {
    lambda_critical_for(p.omega, p.n_osc)
}

pub fn lambda_critical_for(omega: f64, n_osc: usize) -> f64 {
    let (_, max) = sine_sum_max(n_osc);
    n_osc as f64 * omega / ((n_osc - 1) as f64 * max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RegimeTag {
    SuperWeak,
    CriticallyWeak,
    Weak,
    AtOrAboveLambdaC,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Regime {
    pub tag: RegimeTag,
    pub lambda_crit: f64,
    pub lambda_c: f64,
}

pub const CRITICAL_BAND: f64 = 1e-12;

pub fn classify_regime(p: &LionParams) -> Regime {
    let lc = lambda_critical(p);
    let tag = if (p.lambda - lc).abs() <= CRITICAL_BAND {
        RegimeTag::CriticallyWeak
    } else if p.lambda < lc {
        RegimeTag::SuperWeak
    } else if p.lambda < p.omega {
        RegimeTag::Weak
    } else {
        RegimeTag::AtOrAboveLambdaC
    };
    Regime { tag, lambda_crit: lc, lambda_c: p.omega }
}

/// `4x^3 + (6 omega / lambda) x^2 - 3x - 6 omega / lambda`.
pub fn cubic_p(x: f64, p: &LionParams) -> f64 {
    let r = 6.0 * p.omega / p.lambda;
    4.0 * x * x * x + r * x * x - 3.0 * x - r
}

/// The single root of [`cubic_p`] in `(0, 1)`.
pub fn cubic_root(p: &LionParams) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if cubic_p(mid, p) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The four solutions of `-cos(w) / cos(2w) = 2` in `(0, 2 pi)`, increasing.
pub fn boundary_roots() -> [f64; 4] {
    let s = 33.0f64.sqrt();
    let r1 = ((-1.0 + s) / 8.0).acos();
    let r2 = ((-1.0 - s) / 8.0).acos();
    [r1, r2, TAU - r2, TAU - r1]
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Bracket {
    pub w_lo: f64,
    pub w_hi: f64,
    pub v_lo: f64,
    pub v_hi: f64,
}

impl Bracket {
    pub fn point(s: PlanarState) -> Self {
        Self { w_lo: s.w, w_hi: s.w, v_lo: s.v, v_hi: s.v }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EquilibriumReport {
    pub location: PlanarState,
    pub eigenvalues: [Complex64; 2],
    pub classification: Stability,
    pub bracket: Bracket,
    pub on_axis: bool,
    pub residual: f64,
    /// `-(lambda/3)(cos w cosh v + 2 cos 2w cosh 2v)` for three oscillators.
    pub re_closed_form: Option<f64>,
}

pub const EQUILIBRIUM_TOL: f64 = 1e-10;
const NEWTON_TOL: f64 = 1e-12;
const AXIS_EPS: f64 = 1e-12;
const NEAR_AXIS: f64 = 1e-4;

pub fn classify_equilibrium(loc: PlanarState, p: &LionParams, bracket: Bracket) -> Result<EquilibriumReport> {
    let r = rhs_lion(loc, p)?;
    let residual = r[0].hypot(r[1]);
    if !(residual < EQUILIBRIUM_TOL) {
        return Err(Error::NotEquilibrium { residual });
    }
    let j = jacobian_lion(loc, p);
    let ev = eigenvalues(&j);
    let re_closed_form = (p.n_osc == 3).then(|| {
        -(p.lambda / 3.0) * (loc.w.cos() * loc.v.cosh() + 2.0 * (2.0 * loc.w).cos() * (2.0 * loc.v).cosh())
    });
    Ok(EquilibriumReport {
        location: loc,
        eigenvalues: ev,
        classification: classify_eigenvalues(&ev),
        bracket,
        on_axis: loc.v.abs() <= AXIS_EPS,
        residual,
        re_closed_form,
    })
}

fn wrap(w: f64) -> f64 {
    let r = w.rem_euclid(TAU);
    if r >= TAU { 0.0 } else { r }
}

fn circular_dist(a: PlanarState, b: PlanarState) -> f64 {
    let dw = (a.w - b.w).rem_euclid(TAU);
    dw.min(TAU - dw).hypot(a.v - b.v)
}

const DEDUPE: f64 = 1e-6;

fn push_unique(list: &mut Vec<EquilibriumReport>, e: EquilibriumReport) {
    if list.iter().all(|o| circular_dist(o.location, e.location) > DEDUPE) {
        list.push(e);
    }
}

fn sort_reports(list: &mut [EquilibriumReport]) {
    list.sort_by(|a, b| {
        a.location.w.total_cmp(&b.location.w).then(a.location.v.total_cmp(&b.location.v))
    });
}

fn refine(p: &LionParams, start: PlanarState) -> Result<Option<PlanarState>> {
    let r = newton2(|s| rhs_lion(s, p), |s| jacobian_lion(s, p), start, NEWTON_TOL)?;
    Ok(r.converged.then_some(r.point))
}

fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let flo = f(lo) < 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == flo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Zeros of `sum_m m cos(m w)` in `[0, 2 pi)`.
fn sine_sum_critical_points(n_osc: usize) -> Vec<f64> {
    let k = 2000 * n_osc;
    let h = TAU / k as f64;
    let mut out = Vec::new();
    for i in 0..k {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        let (fa, fb) = (sine_sum_deriv(a, n_osc), sine_sum_deriv(b, n_osc));
        if fa == 0.0 {
            out.push(a);
        } else if fa * fb < 0.0 {
            out.push(bisect(|w| sine_sum_deriv(w, n_osc), a, b, 1e-14));
        }
    }
    out
}

/// Solutions of `omega/(N-1) = (lambda/N) sum_m sin(m w)` in `[0, 2 pi)`,
/// including tangencies where the drift vanishes to within `1e-10`.
pub fn axis_equilibria(p: &LionParams) -> Vec<f64> {
    let g = |w: f64| p.drift() - p.gain() * sine_sum(w, p.n_osc);
    let mut nodes = sine_sum_critical_points(p.n_osc);
    nodes.insert(0, 0.0);
    nodes.push(TAU);
    let mut roots: Vec<f64> = Vec::new();
    let add = |w: f64, roots: &mut Vec<f64>| {
        let w = wrap(w);
        if roots.iter().all(|r| {
            let d = (r - w).rem_euclid(TAU);
            d.min(TAU - d) > DEDUPE
        }) {
            roots.push(w);
        }
    };
    for &c in &nodes[1..nodes.len() - 1] {
        if g(c).abs() <= 1e-10 {
            add(c, &mut roots);
        }
    }
    for seg in nodes.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let (ga, gb) = (g(a), g(b));
        if ga == 0.0 {
            add(a, &mut roots);
        } else if ga * gb < 0.0 {
            add(bisect(g, a, b, 1e-15), &mut roots);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

fn axis_reports(p: &LionParams) -> Result<Vec<EquilibriumReport>> {
    axis_equilibria(p)
        .into_iter()
        .map(|w| classify_equilibrium(PlanarState::new(w, 0.0), p, Bracket::point(PlanarState::new(w, 0.0))))
        .collect()
}

/// Equilibria of the three-oscillator flow in `[0, 2 pi) x [0, inf)`.
///
/// Off-axis equilibria are located by bisection along the curve `v' = 0`,
/// `cosh v = -cos w / (2 cos 2w)`, on `(pi/4, r1)` and `(r3, 5 pi/4)`, then
/// polished by Newton's method. Axis equilibria come from [`axis_equilibria`].
pub fn find_equilibria_n3(p: &LionParams) -> Result<Vec<EquilibriumReport>> {
    if p.n_osc != 3 {
        return Err(Error::InvalidArgument("find_equilibria_n3 needs three oscillators"));
    }
    let [r1, _, r3, _] = boundary_roots();
    let cut_v = |w: f64| {
        let c = -w.cos() / (2.0 * (2.0 * w).cos());
        if c <= 1.0 { 0.0 } else { crate::two_osc::arccosh(c) }
    };
    let phi = |w: f64| {
        let v = cut_v(w);
        3.0 * p.omega / (2.0 * p.lambda) - (w.sin() * v.cosh() + (2.0 * w).sin() * (2.0 * v).cosh())
    };
    let mut out = Vec::new();
    for (lo, hi) in [(FRAC_PI_4 + 1e-6, r1), (r3, 5.0 * FRAC_PI_4 - 1e-6)] {
        if phi(lo) * phi(hi) >= 0.0 {
            continue;
        }
        let w = bisect(phi, lo, hi, 1e-14);
        let guess = PlanarState::new(w, cut_v(w));
        if guess.v <= AXIS_EPS {
            continue;
        }
        let Some(root) = refine(p, guess)? else { continue };
        let bracket = Bracket { w_lo: lo, w_hi: hi, v_lo: cut_v(hi).min(cut_v(lo)), v_hi: cut_v(hi).max(cut_v(lo)) };
        push_unique(&mut out, classify_equilibrium(PlanarState::new(wrap(root.w), root.v), p, bracket)?);
    }
    for e in axis_reports(p)? {
        push_unique(&mut out, e);
    }
    sort_reports(&mut out);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepGrid {
    pub nw: usize,
    pub nv: usize,
    pub v_max: f64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self { nw: 400, nv: 200, v_max: 3.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepResult {
    pub equilibria: Vec<EquilibriumReport>,
    pub sink_count: usize,
}

impl SweepResult {
    pub fn n_axis(&self) -> usize {
        self.equilibria.iter().filter(|e| e.on_axis).count()
    }

    pub fn n_interior(&self) -> usize {
        self.equilibria.len() - self.n_axis()
    }
}

/// Grid search for equilibria of the flow for any `N >= 3`.
///
/// Cells of an `nw x nv` grid over `[0, 2 pi) x [v_max/nv, v_max]` in which
/// both components of the field change sign at the corners seed Newton's
/// method; axis equilibria are added from [`axis_equilibria`].
pub fn equilibrium_sweep(p: &LionParams, grid: &SweepGrid) -> Result<SweepResult> {
    if grid.nw == 0 || grid.nv < 2 || !(grid.v_max > 0.0) {
        return Err(Error::InvalidArgument("sweep grid needs nw >= 1, nv >= 2 and v_max > 0"));
    }
    let hw = TAU / grid.nw as f64;
    let hv = grid.v_max / grid.nv as f64;
    // field at nodes (i, j) for i in 0..=nw, j in 1..=nv
    let cols = grid.nv;
    let mut field = Vec::with_capacity((grid.nw + 1) * cols);
    for i in 0..=grid.nw {
        for j in 1..=grid.nv {
            field.push(rhs_lion(PlanarState::new(i as f64 * hw, j as f64 * hv), p)?);
        }
    }
    let at = |i: usize, j: usize| field[i * cols + (j - 1)];
    let changes = |k: usize, c: [[f64; 2]; 4]| {
        let lo = c.iter().map(|x| x[k]).fold(f64::INFINITY, f64::min);
        let hi = c.iter().map(|x| x[k]).fold(f64::NEG_INFINITY, f64::max);
        lo <= 0.0 && hi >= 0.0
    };
    let mut out = Vec::new();
    for i in 0..grid.nw {
        for j in 1..grid.nv {
            let c = [at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)];
            if !(changes(0, c) && changes(1, c)) {
                continue;
            }
            let centre = PlanarState::new((i as f64 + 0.5) * hw, (j as f64 + 0.5) * hv);
            let Some(root) = refine(p, centre)? else { continue };
            // the flat tangency on the axis attracts Newton to v ~ 1e-6;
            // axis points come from the one-dimensional solver instead
            if root.v <= NEAR_AXIS {
                continue;
            }
            let loc = PlanarState::new(wrap(root.w), root.v);
            let bracket = Bracket { w_lo: i as f64 * hw, w_hi: (i + 1) as f64 * hw, v_lo: j as f64 * hv, v_hi: (j + 1) as f64 * hv };
            push_unique(&mut out, classify_equilibrium(loc, p, bracket)?);
        }
    }
    for e in axis_reports(p)? {
        push_unique(&mut out, e);
    }
    sort_reports(&mut out);
    let sink_count = out.iter().filter(|e| e.classification == Stability::Sink).count();
    Ok(SweepResult { equilibria: out, sink_count })
}

/// Samples `(w, v, w', v')` on an `nw x nv` grid over `[0, 2 pi) x [0, v_max]`.
pub fn vector_field_grid(p: &LionParams, nw: usize, nv: usize, v_max: f64) -> Result<Vec<[f64; 4]>> {
    let mut out = Vec::with_capacity(nw * nv);
    for i in 0..nw {
        let w = TAU * i as f64 / nw as f64;
        for j in 0..nv {
            let v = if nv > 1 { v_max * j as f64 / (nv - 1) as f64 } else { 0.0 };
            let r = rhs_lion(PlanarState::new(w, v), p)?;
            out.push([w, v, r[0], r[1]]);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ManifoldCheck {
    /// Largest `|(w_1 - w_2, v_12) - (w, v)|` against the planar flow.
    pub planar_deviation: f64,
    /// Largest `|(q_i - q_{i+1}) - (q_1 - q_2)|` over consecutive pairs.
    pub spacing_deviation: f64,
    pub planar_end: PlanarState,
}

impl ManifoldCheck {
    pub fn total(&self) -> f64 {
        self.planar_deviation + self.spacing_deviation
    }
}

/// Runs the full model from an arithmetic progression realising `init` and
/// compares it with the planar flow up to `t_end`.
pub fn manifold_consistency(p: &LionParams, init: PlanarState, t_end: f64) -> Result<ManifoldCheck> {
    let n = p.n_osc;
    let omegas: Vec<f64> = (0..n).map(|i| p.omega * (0.5 - i as f64 / (n - 1) as f64)).collect();
    let model = KuramotoModel::new(ModelParams::new(omegas, p.lambda)?);
    // imaginary part of the common difference along (0.6, 0.8, 0)
    let dir = [0.6, 0.8, 0.0];
    let c = (n - 1) as f64 / 2.0;
    let mut s0 = OscillatorState::zeros(n);
    for i in 0..n {
        let k = c - i as f64;
        s0.set(i, crate::quat::Quaternion::new(k * init.w, k * init.v * dir[0], k * init.v * dir[1], k * init.v * dir[2]));
    }
    let cfg = IntegratorConfig::adaptive(t_end).with_tolerances(1e-12, 1e-14).with_max_dt(0.05);
    let full = integrate(|_, y, d| model.eval(y, d), s0.as_slice(), &cfg)?;
    let planar = integrate(
        |_, y, d| {
            d.copy_from_slice(&rhs_lion(PlanarState::new(y[0], y[1]), p)?);
            Ok(())
        },
        &init.as_array(),
        &cfg,
    )?;
    let mut a = [0.0; 2];
    let mut b = alloc::vec![0.0; 4 * n];
    let mut planar_deviation = 0.0f64;
    let mut spacing_deviation = 0.0f64;
    let steps = (t_end / 0.01).ceil() as usize;
    for k in 0..=steps {
        let t = (k as f64 * 0.01).min(t_end);
        if !(planar.interpolate(t, &mut a) && full.interpolate(t, &mut b)) {
            continue;
        }
        let q = |i: usize| crate::model::quaternion_at(&b, n, i);
        let d12 = q(0) - q(1);
        let v12 = d12.imag_norm();
        planar_deviation = planar_deviation.max((d12.w - a[0]).abs()).max((v12 - a[1]).abs());
        for i in 1..n - 1 {
            spacing_deviation = spacing_deviation.max(((q(i) - q(i + 1)) - d12).norm());
        }
    }
    let end = planar.last_state().unwrap();
    Ok(ManifoldCheck { planar_deviation, spacing_deviation, planar_end: PlanarState::new(end[0], end[1]) })
}
