//! Brute-force quadrature used as an independent reference for every closed
//! form in the crate.
//!
//! Integrals run over an affine window `x = center + S·t` with the tensor
//! grid laid out in `t`. Each result carries the change against the rule with
//! half as many nodes per axis, and for trapezoid rules the largest integrand
//! modulus on the boundary of the box relative to the interior maximum.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fm;
use crate::linalg::{self, RMatrix};
use crate::params::{symplectic_embed, ParameterSet};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Relative boundary magnitude above which a truncation is flagged.
pub const BOUNDARY_WARNING: f64 = 1e-3;

/// Largest Gauss–Hermite rule; beyond it the weights leave `f64` range.
pub const GAUSS_HERMITE_CAP: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Exact for polynomials times `e^{-|t|²}` up to degree `2n − 1`.
    GaussHermite,
    /// Spectrally accurate for smooth integrands that vanish at the box edge.
    Trapezoid,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub nodes_per_axis: usize,
    pub scheme: Scheme,
    /// Half-width of the box `[−R, R]^d` in window units.
    pub truncation_radius: f64,
}

impl Default for QuadratureSpec {
    /// 64 trapezoid nodes over eight standard deviations of `e^{-|t|²}`.
    fn default() -> Self {
        QuadratureSpec {
            nodes_per_axis: 64,
            scheme: Scheme::Trapezoid,
            truncation_radius: 8.0 * core::f64::consts::FRAC_1_SQRT_2,
        }
    }
}

impl QuadratureSpec {
    pub fn trapezoid(nodes_per_axis: usize, truncation_radius: f64) -> Self {
        QuadratureSpec { nodes_per_axis, scheme: Scheme::Trapezoid, truncation_radius }
    }

    pub fn gauss_hermite(nodes_per_axis: usize) -> Self {
        QuadratureSpec { nodes_per_axis, scheme: Scheme::GaussHermite, truncation_radius: f64::INFINITY }
    }
}

/// The affine map `x = center + scale·t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub center: Vec<f64>,
    pub scale: RMatrix,
}

impl Window {
    pub fn new(center: Vec<f64>, scale: RMatrix) -> Result<Self> {
        let n = center.len();
        if scale.nrows() != n || scale.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: scale.nrows() });
        }
        Ok(Window { center, scale })
    }

    pub fn isotropic(center: Vec<f64>, width: f64) -> Self {
        let n = center.len();
        Window { center, scale: RMatrix::identity(n, n) * width }
    }

    /// `|φ_0|²` becomes `e^{-|t|²}`: `S = √ε L` with `LLᵀ = QQ*`.
    pub fn position(params: &ParameterSet) -> Result<Self> {
        let qm = params.q_matrix();
        let gram = linalg::real_part(&(qm * qm.adjoint()));
        let l = linalg::cholesky(&gram, "QQ*")?;
        Ok(Window { center: params.position().to_vec(), scale: l * fm::sqrt(params.eps()) })
    }

    /// `|ℱφ_0|²` becomes `e^{-|t|²}`: `S = √ε L` with `LLᵀ = PP*`.
    pub fn momentum(params: &ParameterSet) -> Result<Self> {
        let pm = params.p_matrix();
        let gram = linalg::real_part(&(pm * pm.adjoint()));
        let l = linalg::cholesky(&gram, "PP*")?;
        Ok(Window { center: params.momentum().to_vec(), scale: l * fm::sqrt(params.eps()) })
    }

    /// Phase space around `(q, p)` with `S = √ε F`, so `e^{-|z|²/ε}` becomes
    /// `e^{-|t|²}`.
    pub fn phase_space(params: &ParameterSet) -> Self {
        let mut center = params.position().to_vec();
        center.extend_from_slice(params.momentum());
        Window { center, scale: symplectic_embed(params) * fm::sqrt(params.eps()) }
    }

    /// The lag variable `y` of a Wigner integral between functions living in
    /// this window: centred at zero and twice as wide.
    pub fn lag(&self) -> Self {
        Window { center: vec![0.0; self.center.len()], scale: &self.scale * 2.0 }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Window { center: self.center.clone(), scale: &self.scale * factor }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn map(&self, t: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut v = self.center[i];
            for j in 0..n {
                v += self.scale[(i, j)] * t[j];
            }
            out[i] = v;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleResult {
    pub value: C64,
    /// `|I_n − I_{n/2}|`.
    pub refinement_delta: f64,
    /// Boundary-to-interior modulus ratio; zero for Gauss–Hermite.
    pub boundary_ratio: f64,
}

impl OracleResult {
    pub fn boundary_warning(&self) -> bool {
        self.boundary_ratio > BOUNDARY_WARNING
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Compensated {
    sum: C64,
    comp: C64,
}

fn two_sum(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if fm::abs(*sum) >= fm::abs(x) {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl Compensated {
    pub fn add(&mut self, x: C64) {
        two_sum(&mut self.sum.re, &mut self.comp.re, x.re);
        two_sum(&mut self.sum.im, &mut self.comp.im, x.im);
    }

    pub fn value(&self) -> C64 {
        self.sum + self.comp
    }
}

/// Physicists' Gauss–Hermite nodes and weights for `∫ f(t) e^{-t²} dt`.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || n > GAUSS_HERMITE_CAP {
        return Err(Error::ExceedsCap { what: "Gauss-Hermite nodes", requested: n, cap: GAUSS_HERMITE_CAP });
    }
    let pim4 = 1.0 / fm::sqrt(fm::sqrt(core::f64::consts::PI));
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => fm::sqrt(2.0 * nf + 1.0) - 1.85575 * libm::pow(2.0 * nf + 1.0, -1.0 / 6.0),
            1 => z - 1.14 * libm::pow(nf, 0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        let mut converged = false;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * fm::sqrt(2.0 / (jf + 1.0)) * p2 - fm::sqrt(jf / (jf + 1.0)) * p3;
            }
            pp = fm::sqrt(2.0 * nf) * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if fm::abs(z - z1) <= 1e-15 * fm::abs(z).max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence("Gauss-Hermite nodes"));
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    x.reverse();
    w.reverse();
    Ok((x, w))
}

/// One-dimensional rule: nodes, weights (already including `e^{t²}` for
/// Gauss–Hermite) and a boundary flag per node.
fn rule_1d(spec: &QuadratureSpec, n: usize) -> Result<(Vec<f64>, Vec<f64>, Vec<bool>)> {
    match spec.scheme {
        Scheme::GaussHermite => {
            let (x, w) = gauss_hermite(n)?;
            let w = x.iter().zip(&w).map(|(t, wi)| wi * fm::exp(t * t)).collect();
            Ok((x, w, vec![false; n]))
        }
        Scheme::Trapezoid => {
            if n < 2 || !(spec.truncation_radius.is_finite() && spec.truncation_radius > 0.0) {
                return Err(Error::InvalidInput("trapezoid needs ≥ 2 nodes and a finite radius".into()));
            }
            let r = spec.truncation_radius;
            let h = 2.0 * r / (n - 1) as f64;
            let x = (0..n).map(|i| -r + h * i as f64).collect();
            let mut w = vec![h; n];
            w[0] *= 0.5;
            w[n - 1] *= 0.5;
            let mut edge = vec![false; n];
            edge[0] = true;
            edge[n - 1] = true;
            Ok((x, w, edge))
        }
    }
}

struct Sweep {
    values: Vec<C64>,
    interior_max: f64,
    boundary_max: f64,
}

fn sweep(
    window: &Window,
    spec: &QuadratureSpec,
    n: usize,
    len: usize,
    f: &mut dyn FnMut(&[f64], &mut [C64]) -> Result<()>,
) -> Result<Sweep> {
    let d = window.dim();
    let (nodes, weights, edge) = rule_1d(spec, n)?;
    let jac = fm::abs(window.scale.determinant());
    let mut acc = vec![Compensated::default(); len];
    let mut counter = vec![0usize; d];
    let mut t = vec![0.0; d];
    let mut x = vec![0.0; d];
    let mut buf = vec![C64::new(0.0, 0.0); len];
    let mut interior_max: f64 = 0.0;
    let mut boundary_max: f64 = 0.0;
    let total = n.pow(d as u32);
    for _ in 0..total {
        let mut w = jac;
        let mut on_edge = false;
        for j in 0..d {
            t[j] = nodes[counter[j]];
            w *= weights[counter[j]];
            on_edge |= edge[counter[j]];
        }
        window.map(&t, &mut x);
        f(&x, &mut buf)?;
        let mut mag: f64 = 0.0;
        for (a, b) in acc.iter_mut().zip(&buf) {
            a.add(b * w);
            mag = mag.max(b.norm());
        }
        if !mag.is_finite() {
            return Err(Error::NonFinite("quadrature integrand"));
        }
        interior_max = interior_max.max(mag);
        if on_edge {
            boundary_max = boundary_max.max(mag);
        }
        for j in (0..d).rev() {
            counter[j] += 1;
            if counter[j] < n {
                break;
            }
            counter[j] = 0;
        }
    }
    Ok(Sweep { values: acc.iter().map(|a| a.value()).collect(), interior_max, boundary_max })
}

/// Integrates a vector-valued integrand of length `len` over a window.
pub fn integrate_vec(
    window: &Window,
    spec: &QuadratureSpec,
    len: usize,
    mut f: impl FnMut(&[f64], &mut [C64]) -> Result<()>,
) -> Result<Vec<OracleResult>> {
    let n = spec.nodes_per_axis;
    let fine = sweep(window, spec, n, len, &mut f)?;
    let coarse = sweep(window, spec, n.div_ceil(2).max(2), len, &mut f)?;
    let ratio = if fine.interior_max > 0.0 { fine.boundary_max / fine.interior_max } else { 0.0 };
    Ok(fine
        .values
        .iter()
        .zip(&coarse.values)
        .map(|(a, b)| OracleResult { value: *a, refinement_delta: (a - b).norm(), boundary_ratio: ratio })
        .collect())
}

pub fn integrate(window: &Window, spec: &QuadratureSpec, mut f: impl FnMut(&[f64]) -> Result<C64>) -> Result<OracleResult> {
    let out = integrate_vec(window, spec, 1, |x, buf| {
        buf[0] = f(x)?;
        Ok(())
    })?;
    Ok(out[0])
}

/// `⟨f, g⟩ = ∫ f̄ g`.
pub fn inner_product(
    window: &Window,
    spec: &QuadratureSpec,
    mut f: impl FnMut(&[f64]) -> Result<C64>,
    mut g: impl FnMut(&[f64]) -> Result<C64>,
) -> Result<OracleResult> {
    integrate(window, spec, |x| Ok(f(x)?.conj() * g(x)?))
}

fn scale_result(r: OracleResult, s: f64) -> OracleResult {
    OracleResult { value: r.value * s, refinement_delta: r.refinement_delta * s, ..r }
}

/// `(2πε)^{-d} ∫ f̄(x + y/2) g(x − y/2) e^{iyᵀξ/ε} dy`, with `lag` the window
/// of the variable `y`.
pub fn wigner_quadrature(
    eps: f64,
    lag: &Window,
    spec: &QuadratureSpec,
    x: &[f64],
    xi: &[f64],
    mut f: impl FnMut(&[f64]) -> Result<C64>,
    mut g: impl FnMut(&[f64]) -> Result<C64>,
) -> Result<OracleResult> {
    let d = x.len();
    if lag.dim() != d || xi.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: lag.dim() });
    }
    let mut a = vec![0.0; d];
    let mut b = vec![0.0; d];
    let r = integrate(lag, spec, |y| {
        let mut phase = 0.0;
        for j in 0..d {
            a[j] = x[j] + 0.5 * y[j];
            b[j] = x[j] - 0.5 * y[j];
            phase += y[j] * xi[j];
        }
        Ok(f(&a)?.conj() * g(&b)? * (I * (phase / eps)).exp())
    })?;
    Ok(scale_result(r, 1.0 / fm::powi(2.0 * core::f64::consts::PI * eps, d as i32)))
}

/// `(2πε)^{-d/2} ∫ conj(g_{x,ξ}(y)) f(y) dy` for the coherent state
/// `g_{x,ξ}(y) = (πε)^{-d/4} exp(−|y−x|²/(2ε) + (i/ε)ξᵀ(y−x))`.
pub fn fbi_quadrature(
    eps: f64,
    window: &Window,
    spec: &QuadratureSpec,
    x: &[f64],
    xi: &[f64],
    mut f: impl FnMut(&[f64]) -> Result<C64>,
) -> Result<OracleResult> {
    let d = x.len();
    if window.dim() != d || xi.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: window.dim() });
    }
    let r = integrate(window, spec, |y| {
        let mut r2 = 0.0;
        let mut phase = 0.0;
        for j in 0..d {
            let u = y[j] - x[j];
            r2 += u * u;
            phase += xi[j] * u;
        }
        Ok(f(y)? * C64::new(-0.5 * r2 / eps, -phase / eps).exp())
    })?;
    let pe = core::f64::consts::PI * eps;
    let pre = 1.0 / fm::sqrt(fm::powi(2.0 * pe, d as i32)) / fm::sqrt(fm::sqrt(fm::powi(pe, d as i32)));
    Ok(scale_result(r, pre))
}

/// `(2πε)^{-d/2} ∫ f(x) e^{-ixᵀξ/ε} dx`.
pub fn fourier_quadrature(
    eps: f64,
    window: &Window,
    spec: &QuadratureSpec,
    xi: &[f64],
    mut f: impl FnMut(&[f64]) -> Result<C64>,
) -> Result<OracleResult> {
    let d = xi.len();
    if window.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: window.dim() });
    }
    let r = integrate(window, spec, |x| {
        let phase: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum();
        Ok(f(x)? * (-I * (phase / eps)).exp())
    })?;
    Ok(scale_result(r, 1.0 / fm::sqrt(fm::powi(2.0 * core::f64::consts::PI * eps, d as i32))))
}

/// One axis `min:max:count` of a tensor grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if count == 0 || !(min.is_finite() && max.is_finite()) || (count > 1 && max <= min) {
            return Err(Error::InvalidInput("axis needs count ≥ 1 and min < max".into()));
        }
        Ok(Axis { min, max, count })
    }

    pub fn step(&self) -> f64 {
        if self.count > 1 {
            (self.max - self.min) / (self.count - 1) as f64
        } else {
            0.0
        }
    }

    pub fn node(&self, i: usize) -> f64 {
        self.min + self.step() * i as f64
    }
}

/// A tensor grid; points are enumerated with the last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Self {
        Grid { axes }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, mut flat: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (j, a) in self.axes.iter().enumerate().rev() {
            out[j] = a.node(flat % a.count);
            flat /= a.count;
        }
        out
    }

    /// Trapezoid weight of a flat index.
    pub fn weight(&self, mut flat: usize) -> f64 {
        let mut w = 1.0;
        for a in self.axes.iter().rev() {
            let i = flat % a.count;
            flat /= a.count;
            let mut h = a.step();
            if i == 0 || i + 1 == a.count {
                h *= 0.5;
            }
            w *= h;
        }
        w
    }
}

/// `(G^ε ∗ W)(x, ξ)` with `G^ε(z) = (πε)^{-d} e^{-|z|²/ε}`, by the trapezoid
/// rule over sampled Wigner values on a phase-space grid (coordinates
/// `x₁..x_d, ξ₁..ξ_d`).
pub fn husimi_convolution(eps: f64, grid: &Grid, values: &[f64], x: &[f64], xi: &[f64]) -> Result<f64> {
    let d = x.len();
    if grid.dim() != 2 * d || xi.len() != d {
        return Err(Error::DimensionMismatch { expected: 2 * d, found: grid.dim() });
    }
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
    }
    let mut acc = Compensated::default();
    for (i, v) in values.iter().enumerate() {
        let node = grid.point(i);
        let mut r2 = 0.0;
        for j in 0..d {
            r2 += (node[j] - x[j]) * (node[j] - x[j]) + (node[d + j] - xi[j]) * (node[d + j] - xi[j]);
        }
        acc.add(C64::new(v * grid.weight(i) * fm::exp(-r2 / eps), 0.0));
    }
    Ok(acc.value().re / fm::powi(core::f64::consts::PI * eps, d as i32))
}

/// Value, gradient and Hessian at a real point of a function analytic in each
/// coordinate, by the trapezoid rule on circles of radius `r` in the complex
/// coordinate planes (Cauchy's integral formula).
///
/// The aliasing error decays like `r^n` times the `n`-th Taylor coefficient.
#[derive(Clone, Debug)]
pub struct Derivatives {
    pub value: C64,
    pub gradient: Vec<C64>,
    /// Row-major `d×d`.
    pub hessian: Vec<C64>,
}

pub fn contour_derivatives(
    x: &[f64],
    radius: f64,
    nodes: usize,
    mut f: impl FnMut(&[C64]) -> Result<C64>,
) -> Result<Derivatives> {
    if nodes < 4 || radius <= 0.0 || !radius.is_finite() {
        return Err(Error::InvalidInput("contour needs at least 4 nodes and a positive radius".into()));
    }
    let d = x.len();
    let base: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
    let circle: Vec<C64> = (0..nodes)
        .map(|m| C64::from_polar(1.0, 2.0 * core::f64::consts::PI * m as f64 / nodes as f64))
        .collect();
    let value = f(&base)?;
    let mut gradient = vec![C64::new(0.0, 0.0); d];
    let mut hessian = vec![C64::new(0.0, 0.0); d * d];
    let mut pt = base.clone();
    for a in 0..d {
        let mut g = Compensated::default();
        let mut h = Compensated::default();
        for w in &circle {
            pt[a] = base[a] + w * radius;
            let v = f(&pt)?;
            g.add(v * w.conj());
            h.add(v * (w.conj() * w.conj()));
        }
        pt[a] = base[a];
        gradient[a] = g.value() / (nodes as f64 * radius);
        hessian[a * d + a] = h.value() * 2.0 / (nodes as f64 * radius * radius);
        for b in a + 1..d {
            let mut acc = Compensated::default();
            for wa in &circle {
                for wb in &circle {
                    pt[a] = base[a] + wa * radius;
                    pt[b] = base[b] + wb * radius;
                    acc.add(f(&pt)? * (wa.conj() * wb.conj()));
                }
            }
            pt[a] = base[a];
            pt[b] = base[b];
            let v = acc.value() / ((nodes * nodes) as f64 * radius * radius);
            hessian[a * d + b] = v;
            hessian[b * d + a] = v;
        }
    }
    Ok(Derivatives { value, gradient, hessian })
}
