//! Projection of functions onto wavepacket bases over hyperbolic-cross index
//! sets, and the error bookkeeping that goes with it.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fm;
use crate::hagedorn::{wavepacket_table, CoefficientVector};
use crate::index::IndexSet;
use crate::params::ParameterSet;
use crate::phase::{wigner_superposition, PhasePoint};
use crate::quadrature::{integrate, integrate_vec, QuadratureSpec, Window};

/// Minimum trapezoid nodes per axis used by [`projection_spec`].
pub const DEFAULT_PROJECTION_NODES: usize = 160;

/// Largest index set [`hyperbolic_set`] will build.
pub const HYPERBOLIC_SET_CAP: usize = 1 << 20;

/// Number of `k ∈ ℕ^dim` with `Π(1 + k_j) ≤ cap`, or `None` once it passes
/// `limit`.
fn hyperbolic_count(dim: usize, cap: u64, limit: usize) -> Option<usize> {
    if dim == 0 {
        return Some(1);
    }
    let mut total = 0usize;
    for first in 1..=cap {
        total += hyperbolic_count(dim - 1, cap / first, limit - total)?;
        if total > limit {
            return None;
        }
    }
    Some(total)
}

/// `{k : Π(1 + k_j) ≤ K}` in graded-lexicographic order.
pub fn hyperbolic_set(dim: usize, cap: u64) -> Result<IndexSet> {
    if dim == 0 || cap == 0 {
        return Err(Error::InvalidInput("hyperbolic set needs d ≥ 1 and K ≥ 1".into()));
    }
    match hyperbolic_count(dim, cap, HYPERBOLIC_SET_CAP) {
        Some(_) => Ok(IndexSet::hyperbolic(dim, cap)),
        None => Err(Error::ExceedsCap {
            what: "hyperbolic index set",
            requested: HYPERBOLIC_SET_CAP + 1,
            cap: HYPERBOLIC_SET_CAP,
        }),
    }
}

/// A trapezoid rule in [`Window::position`] units that resolves every `φ_k`
/// of the set: the box reaches six units past the turning point
/// `√(2|k|+1)` and the step resolves the doubled band limit of a product.
pub fn projection_spec(set: &IndexSet) -> QuadratureSpec {
    let turning = fm::sqrt(2.0 * set.max_order() as f64 + 1.0);
    let radius = turning + 6.0;
    let band = 2.0 * (turning + 6.0);
    let h = 2.0 * core::f64::consts::PI / (1.5 * band);
    let nodes = (fm::ceil(2.0 * radius / h) as usize + 1).max(DEFAULT_PROJECTION_NODES);
    QuadratureSpec::trapezoid(nodes, radius)
}

#[derive(Clone, Debug)]
pub struct Projection {
    pub coeffs: CoefficientVector,
    pub max_refinement_delta: f64,
    pub boundary_ratio: f64,
}

/// `c_k = ⟨φ_k, f⟩` for every `k` in the set.
pub fn project(
    params: &ParameterSet,
    set: &IndexSet,
    window: &Window,
    spec: &QuadratureSpec,
    mut f: impl FnMut(&[f64]) -> Result<C64>,
) -> Result<Projection> {
    if window.dim() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), found: window.dim() });
    }
    let results = integrate_vec(window, spec, set.len(), |x, buf| {
        let fx = f(x)?;
        let table = wavepacket_table(params, set, x)?;
        for (b, phi) in buf.iter_mut().zip(&table) {
            *b = phi.conj() * fx;
        }
        Ok(())
    })?;
    let coeffs = results.iter().map(|r| r.value).collect();
    let max_refinement_delta = results.iter().map(|r| r.refinement_delta).fold(0.0, f64::max);
    let boundary_ratio = results.first().map_or(0.0, |r| r.boundary_ratio);
    Ok(Projection { coeffs: CoefficientVector::new(set.clone(), coeffs)?, max_refinement_delta, boundary_ratio })
}

/// `Σ_k c_k φ_k(x)`.
pub fn reconstruct(params: &ParameterSet, cv: &CoefficientVector, x: &[f64]) -> Result<C64> {
    cv.evaluate(params, x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    /// `‖f − Σ c_k φ_k‖`.
    pub l2_residual: f64,
    /// `‖f‖² − Σ |c_k|²`, non-negative up to quadrature error.
    pub bessel_defect: f64,
    pub norm_sqr: f64,
    /// `Σ_{|k| = n} |c_k|²` for `n = 0, 1, …`.
    pub shell_energy: Vec<f64>,
}

pub fn error_report(
    params: &ParameterSet,
    cv: &CoefficientVector,
    window: &Window,
    spec: &QuadratureSpec,
    mut f: impl FnMut(&[f64]) -> Result<C64>,
) -> Result<ErrorReport> {
    let r = integrate_vec(window, spec, 2, |x, buf| {
        let fx = f(x)?;
        let approx = cv.evaluate(params, x)?;
        buf[0] = C64::new((fx - approx).norm_sqr(), 0.0);
        buf[1] = C64::new(fx.norm_sqr(), 0.0);
        Ok(())
    })?;
    let norm_sqr = r[1].value.re;
    let mut shell_energy = vec![0.0; cv.set().max_order() as usize + 1];
    for (k, c) in cv.iter() {
        shell_energy[k.order() as usize] += c.norm_sqr();
    }
    let captured: f64 = shell_energy.iter().sum();
    Ok(ErrorReport {
        l2_residual: fm::sqrt(r[0].value.re.max(0.0)),
        bessel_defect: norm_sqr - captured,
        norm_sqr,
        shell_energy,
    })
}

/// `‖f‖²` by the same rule as [`error_report`].
pub fn norm_sqr(window: &Window, spec: &QuadratureSpec, mut f: impl FnMut(&[f64]) -> Result<C64>) -> Result<f64> {
    Ok(integrate(window, spec, |x| Ok(C64::new(f(x)?.norm_sqr(), 0.0)))?.value.re)
}

/// The Wigner function of `Σ c_k φ_k`, real by construction.
pub fn wigner_of_function(params: &ParameterSet, cv: &CoefficientVector, pt: &PhasePoint) -> Result<f64> {
    Ok(wigner_superposition(params, cv, pt)?.re)
}
