use proptest::prelude::*;
use quatsync_core::model::{rhs_full, KuramotoModel, ModelParams, OscillatorState};
use quatsync_core::ode::{integrate, IntegratorConfig};
use quatsync_core::Quaternion;

fn setup() -> impl Strategy<Value = (ModelParams, OscillatorState)> {
    (2usize..7).prop_flat_map(|n| {
        (
            prop::collection::vec(-1.0f64..1.0, n),
            0.0f64..3.0,
            prop::collection::vec(-2.0f64..2.0, 4 * n),
        )
            .prop_map(|(omegas, lambda, flat)| {
                (ModelParams::new(omegas, lambda).unwrap(), OscillatorState::from_flat(flat).unwrap())
            })
    })
}

fn unit_quat() -> impl Strategy<Value = Quaternion> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter("nonzero", |(a, b, c, d)| a * a + b * b + c * c + d * d > 1e-3)
        .prop_map(|(a, b, c, d)| {
            let q = Quaternion::new(a, b, c, d);
            q * (1.0 / q.norm())
        })
}

/// Rotates the imaginary part of `q` by `u (.) u*`, leaving the real part alone.
fn rotate(u: Quaternion, q: Quaternion) -> Quaternion {
    let im = Quaternion::new(0.0, q.x, q.y, q.z);
    let r = u * im * u.conj();
    Quaternion::new(q.w, r.x, r.y, r.z)
}

fn map_state(s: &OscillatorState, f: impl Fn(Quaternion) -> Quaternion) -> OscillatorState {
    let mut out = s.clone();
    for i in 0..s.n_osc() {
        out.set(i, f(s.quaternion(i)));
    }
    out
}

fn max_diff(a: &OscillatorState, b: &OscillatorState) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn mean_frequency_is_conserved((p, s) in setup()) {
        let d = rhs_full(&s, &p).unwrap();
        let n = p.n_osc() as f64;
        let mean_w: f64 = d.w().iter().sum::<f64>() / n;
        let mean_omega: f64 = p.omegas.iter().sum::<f64>() / n;
        prop_assert!((mean_w - mean_omega).abs() < 1e-10);
        for c in [d.x(), d.y(), d.z()] {
            prop_assert!(c.iter().sum::<f64>().abs() < 1e-10);
        }
    }

    #[test]
    fn field_is_so3_equivariant((p, s) in setup(), u in unit_quat()) {
        let rotated = map_state(&s, |q| rotate(u, q));
        let lhs = rhs_full(&rotated, &p).unwrap();
        let rhs = map_state(&rhs_full(&s, &p).unwrap(), |q| rotate(u, q));
        prop_assert!(max_diff(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn field_is_translation_invariant((p, s) in setup(), c in (-3.0f64..3.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0)) {
        let shift = Quaternion::new(c.0, c.1, c.2, c.3);
        let moved = map_state(&s, |q| q + shift);
        let a = rhs_full(&moved, &p).unwrap();
        let b = rhs_full(&s, &p).unwrap();
        prop_assert!(max_diff(&a, &b) < 1e-12);
    }

    #[test]
    fn rotating_frame_only_shifts_real_drift((p, s) in setup()) {
        let r = p.to_rotating_frame();
        prop_assert!(r.omegas.iter().sum::<f64>().abs() < 1e-12);
        let a = rhs_full(&s, &p).unwrap();
        let b = rhs_full(&s, &r).unwrap();
        let shift = p.omegas.iter().sum::<f64>() / p.n_osc() as f64;
        for (x, y) in a.w().iter().zip(b.w()) {
            prop_assert!((x - y - shift).abs() < 1e-12);
        }
        prop_assert_eq!(a.x(), b.x());
    }

    #[test]
    fn classical_reduction((omegas, lambda, w) in (2usize..6).prop_flat_map(|n| (
        prop::collection::vec(-1.0f64..1.0, n), 0.0f64..2.0, prop::collection::vec(-3.0f64..3.0, n)))) {
        let n = w.len();
        let p = ModelParams::new(omegas.clone(), lambda).unwrap();
        let zeros = vec![0.0; n];
        let s = OscillatorState::from_parts(&w, &zeros, &zeros, &zeros).unwrap();
        let d = rhs_full(&s, &p).unwrap();
        for i in 0..n {
            let k: f64 = omegas[i] + lambda / n as f64 * (0..n).map(|m| (w[m] - w[i]).sin()).sum::<f64>();
            prop_assert!((d.w()[i] - k).abs() < 1e-12);
            prop_assert_eq!(d.x()[i], 0.0);
        }
    }
}

#[test]
fn mean_phase_drifts_at_mean_frequency() {
    let p = ModelParams::new(vec![0.66, 0.10, -0.29, -0.34, -0.12], 1.1).unwrap();
    let s0 = OscillatorState::from_parts(
        &[0.14, 1.52, 0.36, 0.96, 0.15],
        &[0.86, 0.21, 0.36, 1.22, 0.87],
        &[0.09, 1.51, 0.15, 0.05, 1.27],
        &[0.69, 0.22, 0.04, 0.12, 1.35],
    )
    .unwrap();
    let m = KuramotoModel::new(p.clone());
    let traj = integrate(|_, y, d| m.eval(y, d), s0.as_slice(), &IntegratorConfig::adaptive(20.0)).unwrap();
    let mean_omega = p.omegas.iter().sum::<f64>() / 5.0;
    let mean0: f64 = s0.w().iter().sum::<f64>() / 5.0;
    for (t, s) in traj.iter() {
        let mean: f64 = s[..5].iter().sum::<f64>() / 5.0;
        assert!((mean - mean0 - mean_omega * t).abs() < 1e-10, "t = {t}");
        for c in 1..4 {
            let m: f64 = s[5 * c..5 * (c + 1)].iter().sum::<f64>() / 5.0;
            let m0: f64 = s0.as_slice()[5 * c..5 * (c + 1)].iter().sum::<f64>() / 5.0;
            assert!((m - m0).abs() < 1e-10);
        }
    }
}

#[test]
fn zero_imaginary_parts_stay_zero() {
    let p = ModelParams::new(vec![0.3, -0.1, -0.2], 0.8).unwrap();
    let s0 = OscillatorState::from_parts(&[0.0, 1.0, 2.0], &[0.0; 3], &[0.0; 3], &[0.0; 3]).unwrap();
    let m = KuramotoModel::new(p);
    let traj = integrate(|_, y, d| m.eval(y, d), s0.as_slice(), &IntegratorConfig::adaptive(10.0)).unwrap();
    assert!(traj.iter().all(|(_, s)| s[3..].iter().all(|&x| x == 0.0)));
}
