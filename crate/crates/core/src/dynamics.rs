//! Semiclassical propagation of `(q, p, Q, P, S)` by a Störmer–Verlet
//! splitting:
//!
//! ```text
//! q̇ = p,  ṗ = −∇V(q),  Q̇ = P,  Ṗ = −∇²V(q) Q,  Ṡ = ½|p|² − V(q).
//! ```
//!
//! Each kick and drift is a linear symplectic map on `(Q, P)`, so the
//! structural conditions hold to rounding at every step. The branch of
//! `det(Q)^{-1/2}` is carried along by continuity rather than taken principal.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fm;
use crate::linalg::{self, CMatrix, RMatrix};
use crate::params::{ParameterSet, DEFAULT_TOL};

pub trait Potential {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    fn hessian(&self, x: &[f64]) -> RMatrix;
}

/// `V(x) = ½xᵀHx + gᵀx + v₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadratic {
    pub h: RMatrix,
    pub g: Vec<f64>,
    pub v0: f64,
}

impl Quadratic {
    pub fn new(h: RMatrix, g: Vec<f64>, v0: f64) -> Result<Self> {
        let d = g.len();
        if h.nrows() != d || h.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: h.nrows() });
        }
        check_symmetric(&h)?;
        Ok(Quadratic { h, g, v0 })
    }

    /// `V(x) = ½|x|²`.
    pub fn harmonic(d: usize) -> Self {
        Quadratic { h: RMatrix::identity(d, d), g: vec![0.0; d], v0: 0.0 }
    }
}

impl Potential for Quadratic {
    fn dim(&self) -> usize {
        self.g.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let hx = linalg::mat_vec_real(&self.h, x);
        let quad: f64 = x.iter().zip(&hx).map(|(a, b)| a * b).sum();
        let lin: f64 = x.iter().zip(&self.g).map(|(a, b)| a * b).sum();
        0.5 * quad + lin + self.v0
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        linalg::mat_vec_real(&self.h, x).iter().zip(&self.g).map(|(a, b)| a + b).collect()
    }

    fn hessian(&self, _x: &[f64]) -> RMatrix {
        self.h.clone()
    }
}

/// `V(x) = Σ_j x_j⁴ / 4`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quartic {
    pub dim: usize,
}

impl Potential for Quartic {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| 0.25 * v * v * v * v).sum()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| v * v * v).collect()
    }

    fn hessian(&self, x: &[f64]) -> RMatrix {
        RMatrix::from_diagonal(&nalgebra::DVector::from_iterator(x.len(), x.iter().map(|v| 3.0 * v * v)))
    }
}

/// A potential given by closures for value, gradient and Hessian.
pub struct Callable {
    pub dim: usize,
    pub value: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    pub gradient: Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
    pub hessian: Box<dyn Fn(&[f64]) -> RMatrix + Send + Sync>,
}

impl Potential for Callable {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }

    fn hessian(&self, x: &[f64]) -> RMatrix {
        (self.hessian)(x)
    }
}

fn check_symmetric(h: &RMatrix) -> Result<()> {
    let scale = linalg::max_abs_real(h).max(1.0);
    if linalg::max_abs_real(&(h - h.transpose())) > 1e-12 * scale {
        return Err(Error::InvalidInput("Hessian is not symmetric".into()));
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("Hessian"));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct TrajectoryState {
    pub t: f64,
    pub params: ParameterSet,
    pub action: f64,
    /// `det(Q)^{-1/2}` continued along the trajectory; also installed in `params`.
    pub det_root: C64,
    /// Worst structural residual of `(Q, P)` at this state.
    pub residual: f64,
}

impl TrajectoryState {
    pub fn new(params: ParameterSet) -> Self {
        let residual = params.report(DEFAULT_TOL).worst_residual();
        let det_root = params.det_q_inv_sqrt();
        TrajectoryState { t: 0.0, params, action: 0.0, det_root, residual }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepConfig {
    /// A step whose residual exceeds this is rejected.
    pub drift_tol: f64,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig { drift_tol: 1e-8 }
    }
}

/// The root of `1/det(Q)` closest to `previous`.
fn continue_root(qm: &CMatrix, previous: C64) -> C64 {
    let r = C64::new(1.0, 0.0) / qm.determinant().sqrt();
    if (r - previous).norm() <= (r + previous).norm() {
        r
    } else {
        -r
    }
}

fn assemble(
    state: &TrajectoryState,
    t: f64,
    q: Vec<f64>,
    p: Vec<f64>,
    qm: CMatrix,
    pm: CMatrix,
    action: f64,
    cfg: &StepConfig,
) -> Result<TrajectoryState> {
    let eps = state.params.eps();
    let params = match ParameterSet::with_tolerance(eps, q, p, qm, pm, cfg.drift_tol) {
        Ok(params) => params,
        Err(Error::InvalidParameters(report)) => {
            return Err(Error::DriftExceeded { t, residual: report.worst_residual() })
        }
        Err(e) => return Err(e),
    };
    let det_root = continue_root(params.q_matrix(), state.det_root);
    let params = params.with_det_root(det_root)?;
    let residual = params.report(cfg.drift_tol).worst_residual();
    Ok(TrajectoryState { t, params, action, det_root, residual })
}

fn check_potential(state: &TrajectoryState, pot: &dyn Potential) -> Result<()> {
    if pot.dim() != state.params.dim() {
        return Err(Error::DimensionMismatch { expected: state.params.dim(), found: pot.dim() });
    }
    Ok(())
}

/// One kick–drift–kick step.
pub fn step(state: &TrajectoryState, pot: &dyn Potential, dt: f64, cfg: &StepConfig) -> Result<TrajectoryState> {
    check_potential(state, pot)?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidInput("time step must be finite and positive".into()));
    }
    let params = &state.params;
    let q0 = params.position().to_vec();
    let h0 = pot.hessian(&q0);
    check_symmetric(&h0)?;
    let g0 = pot.gradient(&q0);
    let half = 0.5 * dt;
    let p_half: Vec<f64> = params.momentum().iter().zip(&g0).map(|(p, g)| p - half * g).collect();
    let pm_half = params.p_matrix() - linalg::complexify(&h0) * params.q_matrix() * C64::new(half, 0.0);
    let q1: Vec<f64> = q0.iter().zip(&p_half).map(|(q, p)| q + dt * p).collect();
    let qm1 = params.q_matrix() + &pm_half * C64::new(dt, 0.0);
    let h1 = pot.hessian(&q1);
    check_symmetric(&h1)?;
    let g1 = pot.gradient(&q1);
    let p1: Vec<f64> = p_half.iter().zip(&g1).map(|(p, g)| p - half * g).collect();
    let pm1 = pm_half - linalg::complexify(&h1) * &qm1 * C64::new(half, 0.0);
    let kinetic: f64 = 0.5 * p_half.iter().map(|p| p * p).sum::<f64>();
    let action = state.action + dt * (kinetic - 0.5 * (pot.value(&q0) + pot.value(&q1)));
    if q1.iter().chain(&p1).any(|v| !v.is_finite()) || !action.is_finite() {
        return Err(Error::NonFinite("trajectory"));
    }
    assemble(state, state.t + dt, q1, p1, qm1, pm1, action, cfg)
}

/// The states produced by [`propagate`]. A rejected step ends the run early:
/// `states` then holds everything accepted before it.
#[derive(Debug)]
pub struct Trajectory {
    pub states: Vec<TrajectoryState>,
    pub failure: Option<Error>,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectoryState {
        self.states.last().expect("a trajectory holds its initial state")
    }

    /// Largest structural residual over the accepted states.
    pub fn max_residual(&self) -> f64 {
        self.states.iter().map(|s| s.residual).fold(0.0, f64::max)
    }

    pub fn into_result(self) -> Result<Vec<TrajectoryState>> {
        match self.failure {
            Some(e) => Err(e),
            None => Ok(self.states),
        }
    }
}

/// Integrates to `t_final` with `n = round(t_final/dt)` steps; `n·dt` must
/// match `t_final` to relative rounding `1e-9`. The initial state is
/// included.
pub fn propagate(
    state: &TrajectoryState,
    pot: &dyn Potential,
    t_final: f64,
    dt: f64,
    cfg: &StepConfig,
) -> Result<Trajectory> {
    if !(t_final.is_finite() && t_final >= 0.0 && dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidInput("T must be ≥ 0 and dt > 0".into()));
    }
    check_potential(state, pot)?;
    let n = fm::round(t_final / dt);
    if fm::abs(n * dt - t_final) > 1e-9 * t_final.max(dt) {
        return Err(Error::InvalidInput("dt does not divide T".into()));
    }
    let mut states = Vec::with_capacity(n as usize + 1);
    states.push(state.clone());
    for _ in 0..n as usize {
        match step(states.last().expect("non-empty"), pot, dt, cfg) {
            Ok(next) => states.push(next),
            Err(e) => return Ok(Trajectory { states, failure: Some(e) }),
        }
    }
    Ok(Trajectory { states, failure: None })
}

/// Per-mode propagator entries for `ÿ = −λy + f`: `(c, s, u)` with
/// `y(t) = c·y₀ + s·v₀ + u·f` and `v(t) = −λs·y₀ + c·v₀ + s·f`.
fn mode(lambda: f64, t: f64) -> (f64, f64, f64) {
    if lambda > 0.0 {
        let w = fm::sqrt(lambda);
        let c = fm::cos(w * t);
        (c, fm::sin(w * t) / w, (1.0 - c) / lambda)
    } else if lambda < 0.0 {
        let w = fm::sqrt(-lambda);
        let c = fm::cosh(w * t);
        (c, fm::sinh(w * t) / w, (1.0 - c) / lambda)
    } else {
        (1.0, t, 0.5 * t * t)
    }
}

struct ExactFlow {
    v: RMatrix,
    lambda: Vec<f64>,
    y0: Vec<f64>,
    w0: Vec<f64>,
    force: Vec<f64>,
    qm0: CMatrix,
    pm0: CMatrix,
}

impl ExactFlow {
    fn new(state: &TrajectoryState, pot: &Quadratic) -> Result<Self> {
        let (lambda, v) = linalg::jacobi_eigen(&pot.h)?;
        let vt = v.transpose();
        let params = &state.params;
        Ok(ExactFlow {
            lambda,
            y0: linalg::mat_vec_real(&vt, params.position()),
            w0: linalg::mat_vec_real(&vt, params.momentum()),
            force: linalg::mat_vec_real(&vt, &pot.g).iter().map(|g| -g).collect(),
            qm0: linalg::complexify(&vt) * params.q_matrix(),
            pm0: linalg::complexify(&vt) * params.p_matrix(),
            v,
        })
    }

    fn phase_point(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let d = self.lambda.len();
        let mut y = vec![0.0; d];
        let mut w = vec![0.0; d];
        for i in 0..d {
            let l = self.lambda[i];
            let (c, s, u) = mode(l, t);
            y[i] = c * self.y0[i] + s * self.w0[i] + u * self.force[i];
            w[i] = -l * s * self.y0[i] + c * self.w0[i] + s * self.force[i];
        }
        (linalg::mat_vec_real(&self.v, &y), linalg::mat_vec_real(&self.v, &w))
    }

    fn matrices(&self, t: f64) -> (CMatrix, CMatrix) {
        let d = self.lambda.len();
        let mut qm = self.qm0.clone();
        let mut pm = self.pm0.clone();
        for i in 0..d {
            let (c, s, _) = mode(self.lambda[i], t);
            for j in 0..d {
                qm[(i, j)] = self.qm0[(i, j)] * c + self.pm0[(i, j)] * s;
                pm[(i, j)] = -self.qm0[(i, j)] * (self.lambda[i] * s) + self.pm0[(i, j)] * c;
            }
        }
        let vc = linalg::complexify(&self.v);
        (&vc * qm, &vc * pm)
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = fm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if fm::abs(dz) < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// The exact flow of a quadratic potential at time `t`, built from the
/// eigen-decomposition of `H`. The action integral uses composite
/// Gauss–Legendre quadrature of the exact path, and the determinant branch is
/// followed on a fine time mesh.
pub fn harmonic_reference(state0: &TrajectoryState, pot: &Quadratic, t: f64) -> Result<TrajectoryState> {
    check_potential(state0, pot)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidInput("time must be finite and non-negative".into()));
    }
    let flow = ExactFlow::new(state0, pot)?;
    let panels = (fm::ceil(t / 0.25) as usize).max(1);
    let width = t / panels as f64;
    let (gx, gw) = gauss_legendre(20);
    let mut action = state0.action;
    for m in 0..panels {
        let mid = (m as f64 + 0.5) * width;
        for (x, w) in gx.iter().zip(&gw) {
            let (q, p) = flow.phase_point(mid + 0.5 * width * x);
            let kinetic: f64 = 0.5 * p.iter().map(|v| v * v).sum::<f64>();
            action += 0.5 * width * w * (kinetic - pot.value(&q));
        }
    }
    let steps = (fm::ceil(t * 1000.0) as usize).max(1);
    let mut root = state0.det_root;
    for i in 1..=steps {
        let (qm, _) = flow.matrices(t * i as f64 / steps as f64);
        root = continue_root(&qm, root);
    }
    let (q, p) = flow.phase_point(t);
    let (qm, pm) = flow.matrices(t);
    let eps = state0.params.eps();
    let params = ParameterSet::new(eps, q, p, qm, pm)?.with_det_root(root)?;
    let residual = params.report(DEFAULT_TOL).worst_residual();
    Ok(TrajectoryState { t: state0.t + t, params, action, det_root: root, residual })
}
