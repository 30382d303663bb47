//! Wigner and FBI transforms of Hagedorn wavepackets in closed form.
//!
//! `W(f, g)(x, ξ) = (2πε)^{-d} ∫ f̄(x + y/2) g(x − y/2) e^{iyᵀξ/ε} dy`, and
//! every formula here is phrased through
//! `z(x, ξ) = −i(Pᵀ(x − q) − Qᵀ(ξ − p))`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fm;
use crate::hagedorn::{moment_coefficients, CoefficientVector};
use crate::index::{IndexSet, MultiIndex};
use crate::linalg;
use crate::params::{symplectic_embed, symplectic_inverse, ParameterSet};
use crate::special;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, xi: Vec<f64>) -> Self {
        PhasePoint { x, xi }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

fn check(params: &ParameterSet, pt: &PhasePoint) -> Result<()> {
    let d = params.dim();
    if pt.x.len() != d || pt.xi.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: pt.x.len() });
    }
    if pt.x.iter().chain(&pt.xi).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("phase-space point"));
    }
    Ok(())
}

fn check_index(params: &ParameterSet, k: &MultiIndex) -> Result<()> {
    if k.dim() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), found: k.dim() });
    }
    Ok(())
}

fn offsets(params: &ParameterSet, pt: &PhasePoint) -> (Vec<f64>, Vec<f64>) {
    let a = pt.x.iter().zip(params.position()).map(|(x, q)| x - q).collect();
    let b = pt.xi.iter().zip(params.momentum()).map(|(x, p)| x - p).collect();
    (a, b)
}

/// `z = −i(Pᵀ(x − q) − Qᵀ(ξ − p))`.
pub fn z_of(params: &ParameterSet, pt: &PhasePoint) -> Result<Vec<C64>> {
    check(params, pt)?;
    let d = params.dim();
    let (a, b) = offsets(params, pt);
    let qm = params.q_matrix();
    let pm = params.p_matrix();
    Ok((0..d)
        .map(|j| {
            let s: C64 = (0..d).map(|m| pm[(m, j)] * a[m] - qm[(m, j)] * b[m]).sum();
            -I * s
        })
        .collect())
}

/// `(πε)^{-d} e^{-|z|²/ε}`, the Wigner function of `φ_0`.
fn ground(params: &ParameterSet, z: &[C64]) -> f64 {
    let eps = params.eps();
    let r2: f64 = z.iter().map(|v| v.norm_sqr()).sum();
    fm::exp(-r2 / eps) / fm::powi(core::f64::consts::PI * eps, params.dim() as i32)
}

/// `W(φ_k, φ_l)` as a product of one-argument Laguerre kernels:
/// `(πε)^{-d} e^{-|z|²/ε} (−1)^{|l|} Π_j ℒ_{k_j,l_j}(z_j/√ε) / √(2^{|k|+|l|} k! l!)`.
pub fn wigner_closed(params: &ParameterSet, k: &MultiIndex, l: &MultiIndex, pt: &PhasePoint) -> Result<C64> {
    check_index(params, k)?;
    check_index(params, l)?;
    let z = z_of(params, pt)?;
    let se = fm::sqrt(params.eps());
    let mut acc = ONE * ground(params, &z);
    if l.order() % 2 == 1 {
        acc = -acc;
    }
    for j in 0..params.dim() {
        acc *= special::laguerre_kernel_one_normalized(k.get(j), l.get(j), z[j] / se)?;
    }
    Ok(acc)
}

/// `W_{kl}` for all `k, l` in a set, row-major in `k`.
#[derive(Clone, Debug)]
pub struct WignerTable {
    pub set: IndexSet,
    pub values: Vec<C64>,
}

impl WignerTable {
    pub fn get(&self, k: &MultiIndex, l: &MultiIndex) -> Option<C64> {
        let n = self.set.len();
        Some(self.values[self.set.position(k)? * n + self.set.position(l)?])
    }

    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.set.len() + j]
    }
}

/// Which index is raised first when filling a [`WignerTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FillOrder {
    /// Row `k = 0` first, then rows by raising `k`.
    LFirst,
    /// Column `l = 0` first, then columns by raising `l`.
    KFirst,
}

/// The Wigner table by the phase-space recurrences
/// `√(k_j+1) W_{k+e_j,l} = √(2/ε) z_j W_{kl} − √l_j W_{k,l−e_j}` and
/// `√(l_j+1) W_{k,l+e_j} = √(2/ε) z̄_j W_{kl} − √k_j W_{k−e_j,l}`.
pub fn wigner_table(params: &ParameterSet, set: &IndexSet, pt: &PhasePoint) -> Result<WignerTable> {
    wigner_table_ordered(params, set, pt, FillOrder::LFirst)
}

pub fn wigner_table_ordered(
    params: &ParameterSet,
    set: &IndexSet,
    pt: &PhasePoint,
    order: FillOrder,
) -> Result<WignerTable> {
    if set.dim() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), found: set.dim() });
    }
    let z = z_of(params, pt)?;
    let s = fm::sqrt(2.0 / params.eps());
    let n = set.len();
    let mut w = vec![ZERO; n * n];
    if n == 0 {
        return Ok(WignerTable { set: set.clone(), values: w });
    }
    let (rz, cz): (Vec<C64>, Vec<C64>) = match order {
        FillOrder::LFirst => (z.clone(), z.iter().map(|v| v.conj()).collect()),
        FillOrder::KFirst => (z.iter().map(|v| v.conj()).collect(), z.clone()),
    };
    // Fill a generic table t[a][b] where `a` is raised with `rz` after the
    // `a = 0` line has been raised along `b` with `cz`.
    let mut t = vec![ZERO; n * n];
    t[0] = ONE * ground(params, &z);
    for (i, k) in set.iter().enumerate().skip(1) {
        let j = k.first_nonzero().expect("nonzero index");
        let b = set.back(i, j).expect("downward closed");
        t[i] = t[b] * cz[j] * s / fm::sqrt(k.get(j) as f64);
    }
    for (ia, ka) in set.iter().enumerate().skip(1) {
        let j = ka.first_nonzero().expect("nonzero index");
        let pa = set.back(ia, j).expect("downward closed");
        let norm = fm::sqrt(ka.get(j) as f64);
        for (ib, kb) in set.iter().enumerate() {
            let mut v = t[pa * n + ib] * rz[j] * s;
            if let Some(pb) = set.back(ib, j) {
                v -= t[pa * n + pb] * fm::sqrt(kb.get(j) as f64);
            }
            t[ia * n + ib] = v / norm;
        }
    }
    match order {
        FillOrder::LFirst => w = t,
        FillOrder::KFirst => {
            for a in 0..n {
                for b in 0..n {
                    w[b * n + a] = t[a * n + b];
                }
            }
        }
    }
    for v in &w {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite("Wigner table"));
        }
    }
    Ok(WignerTable { set: set.clone(), values: w })
}

/// `W(ψ, ψ) = Σ_{k,l} c̄_k c_l W_{kl}` for `ψ = Σ c_k φ_k`.
pub fn wigner_superposition(params: &ParameterSet, cv: &CoefficientVector, pt: &PhasePoint) -> Result<C64> {
    let table = wigner_table(params, cv.set(), pt)?;
    let c = cv.coeffs();
    let n = c.len();
    let mut acc = ZERO;
    for a in 0..n {
        if c[a] == ZERO {
            continue;
        }
        let row: C64 = (0..n).map(|b| table.at(a, b) * c[b]).sum();
        acc += c[a].conj() * row;
    }
    Ok(acc)
}

/// `Σ_{|k|=n} W(φ_k, φ_k) = (−1)^n (πε)^{-d} e^{-|z|²/ε} L_n^{(d−1)}(2|z|²/ε)`.
pub fn eigenspace_trace(params: &ParameterSet, n: u32, pt: &PhasePoint) -> Result<f64> {
    let z = z_of(params, pt)?;
    let r2: f64 = z.iter().map(|v| v.norm_sqr()).sum();
    let d = params.dim();
    let lag = special::laguerre_poly(n, d as f64 - 1.0, ONE * (2.0 * r2 / params.eps()))?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * ground(params, &z) * lag.re)
}

/// `(2πε)^{-d/2} ⟨g_{x,ξ}, φ_k⟩` with the coherent state
/// `g_{x,ξ}(y) = (πε)^{-d/4} exp(−|y−x|²/(2ε) + (i/ε)ξᵀ(y−x))`.
///
/// Completing the square with `G = Id − iC`, `w = G⁻¹((x−q) − i(ξ−p))` gives
/// `(2πε)^{-d/2}(πε)^{-d/2} det(Q)^{-1/2} / √(2^{|k|}k!)
///  · exp((½wᵀGw − ½|x−q|² + iξᵀ(x−q))/ε)
///  · Σ_{ν≤k} binom(k,ν) ((2/√ε)Q⁻¹w)^{k−ν} c_ν`
/// where `c_ν` are the Gaussian moments for `M = ½(Id − iC̄)`.
pub fn fbi_closed(params: &ParameterSet, k: &MultiIndex, x: &[f64], xi: &[f64]) -> Result<C64> {
    let d = params.dim();
    let isotropic = linalg::max_abs(&(params.width() - linalg::identity(d) * I)) <= 1e-14;
    if isotropic {
        fbi_isotropic(params, k, x, xi)
    } else {
        fbi_general(params, k, x, xi)
    }
}

/// [`fbi_closed`] without the `C = i·Id` fast path.
pub fn fbi_general(params: &ParameterSet, k: &MultiIndex, x: &[f64], xi: &[f64]) -> Result<C64> {
    check_index(params, k)?;
    let pt = PhasePoint::new(x.to_vec(), xi.to_vec());
    check(params, &pt)?;
    let d = params.dim();
    let eps = params.eps();
    let (a, b) = offsets(params, &pt);
    let c = params.width();
    let g = linalg::identity(d) - c * I;
    let rhs: Vec<C64> = a.iter().zip(&b).map(|(u, v)| C64::new(*u, -*v)).collect();
    let w = linalg::mat_vec(&linalg::inverse(&g, "Id − iC")?, &rhs);
    let a2: f64 = a.iter().map(|v| v * v).sum();
    let xi_a: f64 = xi.iter().zip(&a).map(|(u, v)| u * v).sum();
    let expo = (linalg::bilinear(&g, &w) * 0.5 - a2 * 0.5 + I * xi_a) / eps;
    let m = (linalg::identity(d) - linalg::conj(c) * I) * C64::new(0.5, 0.0);
    let set = IndexSet::lower_box(k);
    let moments = moment_coefficients(params, &set, &m)?;
    let s = 2.0 / fm::sqrt(eps);
    let shift: Vec<C64> = linalg::mat_vec(params.q_inverse(), &w).into_iter().map(|v| v * s).collect();
    let mut sum = ZERO;
    for (nu, cv) in set.iter().zip(&moments) {
        if *cv == ZERO {
            continue;
        }
        let mut term = *cv;
        for j in 0..d {
            term *= shift[j].powu(k.get(j) - nu.get(j)) * fm::binomial(k.get(j), nu.get(j));
        }
        sum += term;
    }
    let ln_norm = k.order() as f64 * core::f64::consts::LN_2
        + k.0.iter().map(|&kj| fm::ln_factorial(kj)).sum::<f64>();
    let pre = fm::powi(2.0 * core::f64::consts::PI * eps, d as i32)
        * fm::powi(core::f64::consts::PI * eps, d as i32);
    let value = params.det_q_inv_sqrt() * sum * expo.exp() * (fm::exp(-0.5 * ln_norm) / fm::sqrt(pre));
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::NonFinite("FBI transform"));
    }
    Ok(value)
}

/// `C = i·Id`: the moments collapse to `c_0 = (πε)^{d/2}|det Q|` and
/// `T = (2πε)^{-d/2} |det Q| det(Q)^{-1/2} / √(2^{|k|}k!) · ((2/√ε)Q⁻¹w)^k
///  · exp(−(|x−q|² + |ξ−p|²)/(4ε) + (i/2ε)(x−q)ᵀ(ξ+p))`, `w = ((x−q) − i(ξ−p))/2`.
fn fbi_isotropic(params: &ParameterSet, k: &MultiIndex, x: &[f64], xi: &[f64]) -> Result<C64> {
    check_index(params, k)?;
    let pt = PhasePoint::new(x.to_vec(), xi.to_vec());
    check(params, &pt)?;
    let d = params.dim();
    let eps = params.eps();
    let (a, b) = offsets(params, &pt);
    let w: Vec<C64> = a.iter().zip(&b).map(|(u, v)| C64::new(0.5 * u, -0.5 * v)).collect();
    let s = 2.0 / fm::sqrt(eps);
    let shift = linalg::mat_vec(params.q_inverse(), &w);
    let mut mono = ONE;
    for j in 0..d {
        mono *= (shift[j] * s).powu(k.get(j));
    }
    let r2: f64 = a.iter().chain(&b).map(|v| v * v).sum();
    let twist: f64 = (0..d).map(|j| a[j] * (xi[j] + params.momentum()[j])).sum();
    let expo = C64::new(-r2 / (4.0 * eps), twist / (2.0 * eps));
    let ln_norm = k.order() as f64 * core::f64::consts::LN_2
        + k.0.iter().map(|&kj| fm::ln_factorial(kj)).sum::<f64>();
    let det = params.q_matrix().determinant().norm();
    let pre = det * fm::exp(-0.5 * ln_norm) / fm::sqrt(fm::powi(2.0 * core::f64::consts::PI * eps, d as i32));
    let value = params.det_q_inv_sqrt() * mono * expo.exp() * pre;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::NonFinite("FBI transform"));
    }
    Ok(value)
}

/// `|T φ_k|²`.
pub fn husimi(params: &ParameterSet, k: &MultiIndex, x: &[f64], xi: &[f64]) -> Result<f64> {
    fbi_closed(params, k, x, xi).map(|t| t.norm_sqr())
}

/// `W(φ_k, φ_l)` through the symplectic change of variables:
/// `ε^{-d} Π_j W₁(h_{k_j}, h_{l_j})(s_j/√ε, s_{d+j}/√ε)` with
/// `s = F⁻¹(x − q, ξ − p)`.
pub fn wigner_metaplectic(params: &ParameterSet, k: &MultiIndex, l: &MultiIndex, pt: &PhasePoint) -> Result<C64> {
    check_index(params, k)?;
    check_index(params, l)?;
    check(params, pt)?;
    let d = params.dim();
    let (a, b) = offsets(params, pt);
    let f_inv = symplectic_inverse(&symplectic_embed(params));
    let mut v = a;
    v.extend(b);
    let s = linalg::mat_vec_real(&f_inv, &v);
    let eps = params.eps();
    let se = fm::sqrt(eps);
    let mut acc = ONE / fm::powi(eps, d as i32);
    for j in 0..d {
        acc *= special::hermite_wigner(k.get(j), l.get(j), s[j] / se, s[d + j] / se)?;
    }
    Ok(acc)
}

/// Suggested finite-difference step of [`phase_ladder_residual`] in units
/// of `√ε`.
pub const LADDER_STEP: f64 = 1e-3;

/// Largest defect of the phase-space raising identities
/// `√(k_j+1) W_{k+e_j,l} = 𝒜_j† W_{kl}` (first slot) and the analogue in the
/// second slot, with the differential operators applied by central
/// differences of step `h` to the closed form.
///
/// First slot: `(−i/√(2ε)) Σ_m [P_{mj}((x−q)_m − (iε/2)∂_{ξ_m}) − Q_{mj}((ξ−p)_m + (iε/2)∂_{x_m})]`.
/// Second slot: `(i/√(2ε)) Σ_m [P̄_{mj}((x−q)_m + (iε/2)∂_{ξ_m}) − Q̄_{mj}((ξ−p)_m − (iε/2)∂_{x_m})]`.
pub fn phase_ladder_residual(
    params: &ParameterSet,
    k: &MultiIndex,
    l: &MultiIndex,
    pt: &PhasePoint,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput("finite-difference step must be positive".into()));
    }
    let d = params.dim();
    let eps = params.eps();
    let w = wigner_closed(params, k, l, pt)?;
    let mut dx = Vec::with_capacity(d);
    let mut dxi = Vec::with_capacity(d);
    for m in 0..d {
        let mut plus = pt.clone();
        let mut minus = pt.clone();
        plus.x[m] += h;
        minus.x[m] -= h;
        dx.push((wigner_closed(params, k, l, &plus)? - wigner_closed(params, k, l, &minus)?) / (2.0 * h));
        let mut plus = pt.clone();
        let mut minus = pt.clone();
        plus.xi[m] += h;
        minus.xi[m] -= h;
        dxi.push((wigner_closed(params, k, l, &plus)? - wigner_closed(params, k, l, &minus)?) / (2.0 * h));
    }
    let (a, b) = offsets(params, pt);
    let qm = params.q_matrix();
    let pm = params.p_matrix();
    let half = I * (0.5 * eps);
    let norm = 1.0 / fm::sqrt(2.0 * eps);
    let mut worst: f64 = 0.0;
    for j in 0..d {
        let mut first = ZERO;
        let mut second = ZERO;
        for m in 0..d {
            first += pm[(m, j)] * (w * a[m] - half * dxi[m]) - qm[(m, j)] * (w * b[m] + half * dx[m]);
            second += pm[(m, j)].conj() * (w * a[m] + half * dxi[m])
                - qm[(m, j)].conj() * (w * b[m] - half * dx[m]);
        }
        let first = -I * first * norm;
        let second = I * second * norm;
        let kp = k.plus(j);
        let lp = l.plus(j);
        let want_first = wigner_closed(params, &kp, l, pt)? * fm::sqrt(k.get(j) as f64 + 1.0);
        let want_second = wigner_closed(params, k, &lp, pt)? * fm::sqrt(l.get(j) as f64 + 1.0);
        worst = worst.max((first - want_first).norm()).max((second - want_second).norm());
    }
    Ok(worst)
}
