mod common;

use common::*;
use hagedorn_core::dynamics::*;
use hagedorn_core::linalg::{self, RMatrix};
use hagedorn_core::Error;

const PI: f64 = std::f64::consts::PI;

fn start() -> TrajectoryState {
    TrajectoryState::new(params_1d(1.0, 1.0, 0.0, c(1.0, 0.0), c(0.0, 1.0)))
}

fn state_distance(a: &TrajectoryState, b: &TrajectoryState) -> f64 {
    let mut e: f64 = 0.0;
    for (x, y) in a.params.position().iter().zip(b.params.position()) {
        e = e.max((x - y).abs());
    }
    for (x, y) in a.params.momentum().iter().zip(b.params.momentum()) {
        e = e.max((x - y).abs());
    }
    e = e.max(linalg::max_abs(&(a.params.q_matrix() - b.params.q_matrix())));
    e = e.max(linalg::max_abs(&(a.params.p_matrix() - b.params.p_matrix())));
    e.max((a.action - b.action).abs())
}

struct Free(usize);

impl Potential for Free {
    fn dim(&self) -> usize {
        self.0
    }
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        vec![0.0; x.len()]
    }
    fn hessian(&self, x: &[f64]) -> RMatrix {
        RMatrix::zeros(x.len(), x.len())
    }
}

#[test]
fn free_particle_is_exact() {
    let params = random_params(&mut rng(1), 2, 0.5, 0.7);
    let s0 = TrajectoryState::new(params.clone());
    let dt = 0.125;
    let s1 = step(&s0, &Free(2), dt, &StepConfig::default()).unwrap();
    for j in 0..2 {
        assert_eq!(s1.params.position()[j], params.position()[j] + dt * params.momentum()[j]);
        assert_eq!(s1.params.momentum()[j], params.momentum()[j]);
    }
    let want = params.q_matrix() + params.p_matrix() * c(dt, 0.0);
    assert!(linalg::max_abs(&(s1.params.q_matrix() - want)) == 0.0);
    let traj = propagate(&s0, &Free(2), 3.0, 0.125, &StepConfig::default()).unwrap();
    let last = traj.last();
    for j in 0..2 {
        assert!((last.params.position()[j] - (params.position()[j] + 3.0 * params.momentum()[j])).abs() < 1e-14);
    }
}

#[test]
fn harmonic_reference_examples() {
    let s0 = start();
    let pot = Quadratic::harmonic(1);
    let r0 = harmonic_reference(&s0, &pot, 0.0).unwrap();
    assert!(state_distance(&r0, &s0) < 1e-15);
    let r = harmonic_reference(&s0, &pot, PI / 2.0).unwrap();
    assert!(r.params.position()[0].abs() < 1e-15);
    assert!((r.params.momentum()[0] + 1.0).abs() < 1e-15);
    assert!((r.params.q_matrix()[(0, 0)] - c(0.0, 1.0)).norm() < 1e-15);
    assert!((r.params.p_matrix()[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-15);
    for t in [0.3, 1.7, 4.0, 9.5] {
        let r = harmonic_reference(&s0, &pot, t).unwrap();
        assert!(r.residual < 1e-13);
        let qt = r.params.q_matrix()[(0, 0)];
        assert!((qt - c(0.0, t).exp()).norm() < 1e-13);
        // S_t = ∫ ½sin² − ½cos² = −¼ sin 2t
        assert!((r.action + 0.25 * (2.0 * t).sin()).abs() < 1e-13);
        assert!((r.det_root * r.det_root * qt - c(1.0, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn one_step_is_locally_third_order() {
    let s0 = start();
    let pot = Quadratic::harmonic(1);
    let err = |dt: f64| {
        let s = step(&s0, &pot, dt, &StepConfig::default()).unwrap();
        state_distance(&s, &harmonic_reference(&s0, &pot, dt).unwrap())
    };
    let ratio = err(0.02) / err(0.01);
    assert!((7.0..9.0).contains(&ratio), "ratio {ratio}");
    let s = step(&s0, &pot, 0.1, &StepConfig::default()).unwrap();
    assert!(s.residual <= 1e-12);
}

#[test]
fn harmonic_period_has_second_order_global_error() {
    let pot = Quadratic::harmonic(1);
    let s0 = start();
    let reference = harmonic_reference(&s0, &pot, 2.0 * PI).unwrap();
    assert!((reference.params.position()[0] - 1.0).abs() < 1e-13);
    let err = |n: usize| {
        let traj = propagate(&s0, &pot, 2.0 * PI, 2.0 * PI / n as f64, &StepConfig::default()).unwrap();
        assert!(traj.failure.is_none());
        state_distance(traj.last(), &reference)
    };
    let (e1, e2) = (err(500), err(1000));
    let ratio = e1 / e2;
    assert!((3.6..4.4).contains(&ratio), "ratio {ratio}");
}

#[test]
fn coupled_and_unstable_quadratics_follow_reference() {
    let h = RMatrix::from_row_slice(2, 2, &[1.0, 0.4, 0.4, -0.3]);
    let pot = Quadratic::new(h, vec![0.2, -0.1], 0.5).unwrap();
    let s0 = TrajectoryState::new(random_params(&mut rng(2), 2, 0.5, 0.5));
    let reference = harmonic_reference(&s0, &pot, 2.0).unwrap();
    let err = |n: usize| {
        let traj = propagate(&s0, &pot, 2.0, 2.0 / n as f64, &StepConfig::default()).unwrap();
        state_distance(traj.last(), &reference)
    };
    let ratio = err(400) / err(800);
    assert!((3.6..4.4).contains(&ratio), "ratio {ratio}");
    // The continued root agrees with the reference's branch.
    let traj = propagate(&s0, &pot, 2.0, 2.0 / 800.0, &StepConfig::default()).unwrap();
    assert!((traj.last().det_root - reference.det_root).norm() < 1e-4);
}

#[test]
fn structure_is_preserved_over_a_thousand_steps() {
    let cfg = StepConfig::default();
    let harmonic = Quadratic::harmonic(2);
    let s0 = TrajectoryState::new(random_params(&mut rng(3), 2, 0.5, 0.7));
    let traj = propagate(&s0, &harmonic, 10.0, 0.01, &cfg).unwrap();
    assert!(traj.failure.is_none());
    assert_eq!(traj.states.len(), 1001);
    assert!(traj.max_residual() <= 1e-8, "{}", traj.max_residual());
    let energy = |s: &TrajectoryState| {
        let p = s.params.momentum();
        0.5 * p.iter().map(|v| v * v).sum::<f64>() + harmonic.value(s.params.position())
    };
    let e0 = energy(&traj.states[0]);
    let drift = traj.states.iter().map(|s| (energy(s) - e0).abs()).fold(0.0, f64::max);
    assert!(drift <= 1e-6 * e0.abs().max(1.0) * 10.0, "energy drift {drift}");

    let quartic = Quartic { dim: 1 };
    let s0 = TrajectoryState::new(params_1d(1.0, 1.0, 0.3, c(1.0, 0.0), c(0.0, 1.0)));
    let traj = propagate(&s0, &quartic, 5.0, 1e-3, &cfg).unwrap();
    assert!(traj.failure.is_none());
    assert!(traj.max_residual() <= 1e-8, "{}", traj.max_residual());
}

#[test]
fn determinant_root_is_continuous_through_a_period() {
    let pot = Quadratic::harmonic(1);
    let traj = propagate(&start(), &pot, 2.0 * PI, 2.0 * PI / 1000.0, &StepConfig::default()).unwrap();
    let mut prev = traj.states[0].det_root;
    for s in &traj.states[1..] {
        let jump = (s.det_root / prev).arg().abs();
        assert!(jump < 0.5, "jump {jump} at t={}", s.t);
        let det = s.params.q_matrix().determinant();
        assert!((s.det_root * s.det_root * det - c(1.0, 0.0)).norm() < 1e-10);
        assert_eq!(s.params.det_q_inv_sqrt(), s.det_root);
        prev = s.det_root;
    }
    // Q_t = e^{it} winds once, so the continued root ends on the other sheet.
    let end = traj.last().det_root;
    assert!((end + c(1.0, 0.0)).norm() < 1e-4, "{end:?}");
}

#[test]
fn rejections_keep_the_partial_trajectory() {
    let quartic = Quartic { dim: 1 };
    let s0 = TrajectoryState::new(params_1d(1.0, 2.0, 0.0, c(1.0, 0.0), c(0.0, 1.0)));
    let strict = StepConfig { drift_tol: 1e-17 };
    let traj = propagate(&s0, &quartic, 1.0, 0.1, &strict).unwrap();
    assert!(matches!(traj.failure, Some(Error::DriftExceeded { .. })));
    assert!(!traj.states.is_empty() && traj.states.len() < 11);
    assert!(propagate(&s0, &quartic, 1.0, 0.3, &StepConfig::default()).is_err());
    assert!(step(&s0, &quartic, -0.1, &StepConfig::default()).is_err());
}

#[test]
fn non_symmetric_hessians_are_rejected() {
    let bad = Callable {
        dim: 2,
        value: Box::new(|_| 0.0),
        gradient: Box::new(|_| vec![0.0, 0.0]),
        hessian: Box::new(|_| RMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0])),
    };
    let s0 = TrajectoryState::new(hermite_params(2, 1.0));
    assert!(step(&s0, &bad, 0.1, &StepConfig::default()).is_err());
    assert!(Quadratic::new(RMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]), vec![0.0; 2], 0.0).is_err());
}

#[test]
fn callable_matches_builtin_quartic() {
    let callable = Callable {
        dim: 1,
        value: Box::new(|x| 0.25 * x[0].powi(4)),
        gradient: Box::new(|x| vec![x[0].powi(3)]),
        hessian: Box::new(|x| RMatrix::from_element(1, 1, 3.0 * x[0] * x[0])),
    };
    let s0 = TrajectoryState::new(params_1d(0.5, 0.8, -0.2, c(1.0, 0.0), c(0.3, 1.0)));
    let a = propagate(&s0, &callable, 1.0, 0.01, &StepConfig::default()).unwrap();
    let b = propagate(&s0, &Quartic { dim: 1 }, 1.0, 0.01, &StepConfig::default()).unwrap();
    assert!(state_distance(a.last(), b.last()) < 1e-14);
}
