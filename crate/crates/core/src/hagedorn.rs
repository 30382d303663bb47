//! Hagedorn wavepackets `φ_k[q,p,Q,P]`, their polynomial prefactors, and the
//! ladder algebra on coefficient vectors.
//!
//! Conventions: `φ_k = p_k φ_0 / √(2^{|k|} k!)` with
//! `φ_0(x) = (πε)^{-d/4} det(Q)^{-1/2} exp(i/(2ε) uᵀCu + (i/ε) pᵀu)`, `u = x − q`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fm;
use crate::index::{IndexSet, MultiIndex};
use crate::linalg::{self, CMatrix};
use crate::params::ParameterSet;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Above this order `wavepacket_eval` switches to the normalized recurrence.
pub const NORMALIZED_THRESHOLD: u32 = 100;

/// Largest `|k|` accepted by [`poly_rodriguez`].
pub const RODRIGUEZ_CAP: u32 = 8;

/// Largest redundant vector length `d^n` accepted by [`eigenspace_vector`].
pub const EIGENSPACE_SLOT_CAP: usize = 256;

fn check_point<T>(params: &ParameterSet, x: &[T]) -> Result<()> {
    if x.len() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), found: x.len() });
    }
    Ok(())
}

fn check_set(params: &ParameterSet, set: &IndexSet) -> Result<()> {
    if set.dim() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), found: set.dim() });
    }
    Ok(())
}

fn centered(params: &ParameterSet, x: &[C64]) -> Vec<C64> {
    x.iter().zip(params.position()).map(|(a, b)| a - b).collect()
}

fn complexify(x: &[f64]) -> Vec<C64> {
    x.iter().map(|&v| C64::new(v, 0.0)).collect()
}

fn finite(z: C64, what: &'static str) -> Result<C64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(what))
    }
}

/// `φ_0` at a real point.
pub fn gaussian_eval(params: &ParameterSet, x: &[f64]) -> Result<C64> {
    gaussian_eval_complex(params, &complexify(x))
}

/// `φ_0` continued analytically to complex arguments.
pub fn gaussian_eval_complex(params: &ParameterSet, x: &[C64]) -> Result<C64> {
    check_point(params, x)?;
    let eps = params.eps();
    let u = centered(params, x);
    let quad = linalg::bilinear(params.width(), &u);
    let lin: C64 = u.iter().zip(params.momentum()).map(|(a, b)| a * b).sum();
    let pre = fm::powi(core::f64::consts::PI * eps, params.dim() as i32);
    let pre = 1.0 / fm::sqrt(fm::sqrt(pre));
    finite(
        params.det_q_inv_sqrt() * pre * ((I * quad * 0.5 + I * lin) / eps).exp(),
        "gaussian",
    )
}

/// `Q⁻¹Q̄`, the coupling matrix of both recurrences.
fn coupling(params: &ParameterSet) -> CMatrix {
    params.q_inverse() * linalg::conj(params.q_matrix())
}

/// The polynomial prefactors `p_k(x)` for every `k` in `set`, aligned with it.
///
/// `p_{k+e_j} = (2/√ε)(Q⁻¹(x−q))_j p_k − 2 Σ_i (Q⁻¹Q̄)_{ji} k_i p_{k−e_i}`.
pub fn polys_eval(params: &ParameterSet, set: &IndexSet, x: &[C64]) -> Result<Vec<C64>> {
    check_set(params, set)?;
    check_point(params, x)?;
    let d = params.dim();
    let s = 2.0 / fm::sqrt(params.eps());
    let y = linalg::mat_vec(params.q_inverse(), &centered(params, x));
    let m = coupling(params);
    let mut out = vec![ZERO; set.len()];
    for (i, k) in set.iter().enumerate() {
        let Some(j) = k.first_nonzero() else {
            out[i] = ONE;
            continue;
        };
        let b = set.back(i, j).expect("downward closed");
        let parent = set.get(b);
        let mut acc = y[j] * out[b] * s;
        for ii in 0..d {
            if let Some(bb) = set.back(b, ii) {
                acc -= m[(j, ii)] * out[bb] * (2.0 * parent.get(ii) as f64);
            }
        }
        out[i] = acc;
    }
    for v in &out {
        finite(*v, "polynomial table")?;
    }
    Ok(out)
}

/// Every `φ_k(x)`, `k ∈ set`, by the normalized three-term recurrence.
pub fn wavepacket_table(params: &ParameterSet, set: &IndexSet, x: &[f64]) -> Result<Vec<C64>> {
    wavepacket_table_complex(params, set, &complexify(x))
}

/// As [`wavepacket_table`], continued analytically to complex arguments.
pub fn wavepacket_table_complex(
    params: &ParameterSet,
    set: &IndexSet,
    x: &[C64],
) -> Result<Vec<C64>> {
    check_set(params, set)?;
    check_point(params, x)?;
    let d = params.dim();
    let s = fm::sqrt(2.0 / params.eps());
    let y = linalg::mat_vec(params.q_inverse(), &centered(params, x));
    let m = coupling(params);
    let mut out = vec![ZERO; set.len()];
    for (i, k) in set.iter().enumerate() {
        let Some(j) = k.first_nonzero() else {
            out[i] = gaussian_eval_complex(params, x)?;
            continue;
        };
        let b = set.back(i, j).expect("downward closed");
        let parent = set.get(b);
        let mut acc = y[j] * out[b] * s;
        for ii in 0..d {
            if let Some(bb) = set.back(b, ii) {
                acc -= m[(j, ii)] * out[bb] * fm::sqrt(parent.get(ii) as f64);
            }
        }
        out[i] = acc / fm::sqrt(k.get(j) as f64);
    }
    for v in &out {
        finite(*v, "wavepacket table")?;
    }
    Ok(out)
}

/// `φ_k(x)`; polynomial form up to order [`NORMALIZED_THRESHOLD`], the
/// normalized recurrence beyond.
pub fn wavepacket_eval(params: &ParameterSet, k: &MultiIndex, x: &[f64]) -> Result<C64> {
    if k.dim() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), found: k.dim() });
    }
    let set = IndexSet::lower_box(k);
    let last = set.len() - 1;
    if k.order() > NORMALIZED_THRESHOLD {
        return Ok(wavepacket_table(params, &set, x)?[last]);
    }
    let polys = polys_eval(params, &set, &complexify(x))?;
    let ln_norm = k.order() as f64 * core::f64::consts::LN_2
        + k.0.iter().map(|&kj| fm::ln_factorial(kj)).sum::<f64>();
    finite(
        polys[last] * gaussian_eval(params, x)? * fm::exp(-0.5 * ln_norm),
        "wavepacket",
    )
}

/// `(2/√ε) Q⁻¹ z`, the shift variable of the sum rule.
fn shift_variable(params: &ParameterSet, z: &[C64]) -> Vec<C64> {
    let s = 2.0 / fm::sqrt(params.eps());
    linalg::mat_vec(params.q_inverse(), z).into_iter().map(|v| v * s).collect()
}

fn monomial(w: &[C64], k: &MultiIndex) -> C64 {
    w.iter().zip(&k.0).fold(ONE, |acc, (wj, &kj)| acc * wj.powu(kj))
}

fn multi_binomial(k: &MultiIndex, nu: &MultiIndex) -> f64 {
    k.0.iter().zip(&nu.0).map(|(&a, &b)| fm::binomial(a, b)).product()
}

fn difference(k: &MultiIndex, nu: &MultiIndex) -> MultiIndex {
    MultiIndex(k.0.iter().zip(&nu.0).map(|(a, b)| a - b).collect())
}

/// `p_k(x + z)` through the sum rule
/// `Σ_{ν≤k} binom(k,ν) ((2/√ε)Q⁻¹z)^{k−ν} p_ν(x)`.
pub fn poly_translate(params: &ParameterSet, k: &MultiIndex, x: &[C64], z: &[C64]) -> Result<C64> {
    check_point(params, z)?;
    let set = IndexSet::lower_box(k);
    let polys = polys_eval(params, &set, x)?;
    let w = shift_variable(params, z);
    let sum = set
        .iter()
        .zip(&polys)
        .map(|(nu, p)| p * monomial(&w, &difference(k, nu)) * multi_binomial(k, nu))
        .sum();
    finite(sum, "translated polynomial")
}

/// Sparse polynomial in the centered variable `u = x − q`.
#[derive(Clone, Debug, Default)]
struct Poly(BTreeMap<Vec<u32>, C64>);

impl Poly {
    fn one(d: usize) -> Self {
        let mut m = BTreeMap::new();
        m.insert(vec![0; d], ONE);
        Poly(m)
    }

    fn add_term(&mut self, e: Vec<u32>, c: C64) {
        *self.0.entry(e).or_insert(ZERO) += c;
    }

    fn eval(&self, u: &[C64]) -> C64 {
        self.0
            .iter()
            .map(|(e, c)| c * u.iter().zip(e).fold(ONE, |acc, (x, &n)| acc * x.powu(n)))
            .sum()
    }
}

/// `p_k = |φ_0|^{-2} (−√ε Q*∇)^k |φ_0|²`, expanded symbolically.
///
/// Writing `|φ_0|² ∝ exp(−uᵀGu/ε)` with `G = Im C`, one directional derivative
/// maps the prefactor `P` to `−√ε Σ_m (Q*)_{jm} (∂_m P − (2/ε)(Gu)_m P)`.
pub fn poly_rodriguez(params: &ParameterSet, k: &MultiIndex, x: &[C64]) -> Result<C64> {
    check_point(params, x)?;
    if k.dim() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), found: k.dim() });
    }
    if k.order() > RODRIGUEZ_CAP {
        return Err(Error::ExceedsCap {
            what: "Rodriguez order",
            requested: k.order() as usize,
            cap: RODRIGUEZ_CAP as usize,
        });
    }
    let d = params.dim();
    let eps = params.eps();
    let se = fm::sqrt(eps);
    let g = linalg::imag_part(params.width());
    let qa = params.q_matrix().adjoint();
    let mut poly = Poly::one(d);
    for j in 0..d {
        for _ in 0..k.get(j) {
            let mut next = Poly::default();
            for (e, c) in &poly.0 {
                for m in 0..d {
                    let w = -qa[(j, m)] * se;
                    if w == ZERO {
                        continue;
                    }
                    if e[m] > 0 {
                        let mut de = e.clone();
                        de[m] -= 1;
                        next.add_term(de, c * w * e[m] as f64);
                    }
                    for n in 0..d {
                        if g[(m, n)] != 0.0 {
                            let mut ne = e.clone();
                            ne[n] += 1;
                            next.add_term(ne, c * w * (-2.0 * g[(m, n)] / eps));
                        }
                    }
                }
            }
            poly = next;
        }
    }
    finite(poly.eval(&centered(params, x)), "Rodriguez polynomial")
}

/// The moments `c_ν = ∫ p_ν(x) exp(−(1/ε)(x−q)ᵀ(Im C + M)(x−q)) dx` for
/// every `ν` in `set`.
///
/// `c_ν = 0` for odd `|ν|`; even orders follow
/// `(Id + Q*MQ)(c_{ν+e_j})_j = −2 Q*MQ̄ (ν_j c_{ν−e_j})_j`.
pub fn moment_coefficients(params: &ParameterSet, set: &IndexSet, m: &CMatrix) -> Result<Vec<C64>> {
    check_set(params, set)?;
    let d = params.dim();
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: m.nrows() });
    }
    let im_c = linalg::complexify(&linalg::imag_part(params.width()));
    let re_sum = linalg::imag_part(params.width()) + linalg::real_part(m);
    if linalg::min_sym_eigenvalue(&re_sum) <= 0.0 {
        return Err(Error::NotPositiveDefinite("Im C + Re M"));
    }
    let qm = params.q_matrix();
    let qa = qm.adjoint();
    let lhs = linalg::identity(d) + &qa * m * qm;
    let rhs = &qa * m * linalg::conj(qm) * C64::new(-2.0, 0.0);
    let step = linalg::inverse(&lhs, "Id + Q*MQ")? * rhs;
    let c0 = linalg::det_inv_sqrt_right_half(&(im_c + m), "Im C + M")?
        * fm::sqrt(fm::powi(core::f64::consts::PI * params.eps(), d as i32));
    let mut out = vec![ZERO; set.len()];
    for (i, mu) in set.iter().enumerate() {
        let Some(j) = mu.first_nonzero() else {
            out[i] = c0;
            continue;
        };
        if mu.order() % 2 == 1 {
            continue;
        }
        let b = set.back(i, j).expect("downward closed");
        let nu = set.get(b);
        let mut acc = ZERO;
        for ii in 0..d {
            if let Some(bb) = set.back(b, ii) {
                acc += step[(j, ii)] * out[bb] * nu.get(ii) as f64;
            }
        }
        out[i] = acc;
    }
    Ok(out)
}

/// `∫ p_k(x + z) exp(−(1/ε)(x−q)ᵀ(Im C + M)(x−q)) dx`.
pub fn gaussian_moment(params: &ParameterSet, k: &MultiIndex, z: &[C64], m: &CMatrix) -> Result<C64> {
    check_point(params, z)?;
    let set = IndexSet::lower_box(k);
    let c = moment_coefficients(params, &set, m)?;
    let w = shift_variable(params, z);
    let sum = set
        .iter()
        .zip(&c)
        .map(|(nu, cv)| cv * monomial(&w, &difference(k, nu)) * multi_binomial(k, nu))
        .sum();
    finite(sum, "gaussian moment")
}

/// One-dimensional closed form `√(πεα₁) α₂^{k/2} h_k(Q⁻¹z/√(α₂ε))` with
/// `α₁ = 1/(Im C + M)` and `α₂ = Q̄²M/(1 + |Q|²M)`.
pub fn gaussian_moment_1d(params: &ParameterSet, k: u32, z: C64, m: C64) -> Result<C64> {
    if params.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: params.dim() });
    }
    let eps = params.eps();
    let q = params.q_matrix()[(0, 0)];
    let im_c = params.width()[(0, 0)].im;
    let a = ONE * im_c + m;
    if a.re <= 0.0 {
        return Err(Error::NotPositiveDefinite("Im C + Re M"));
    }
    let c0 = (ONE * (core::f64::consts::PI * eps) / a).sqrt();
    let y = z / q / fm::sqrt(eps);
    let alpha2 = q.conj() * q.conj() * m / (ONE + m * q.norm_sqr());
    // α₂^{k/2} h_k(y/√α₂) is a polynomial in α₂, so the root's branch cancels.
    let mut prev = ZERO;
    let mut cur = ONE;
    for n in 0..k {
        let next = y * cur * 2.0 - alpha2 * prev * (2.0 * n as f64);
        prev = cur;
        cur = next;
    }
    finite(c0 * cur, "gaussian moment")
}

/// Coefficients of `Σ c_k φ_k` over a downward-closed set.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientVector {
    set: IndexSet,
    coeffs: Vec<C64>,
}

impl CoefficientVector {
    pub fn new(set: IndexSet, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != set.len() {
            return Err(Error::DimensionMismatch { expected: set.len(), found: coeffs.len() });
        }
        Ok(CoefficientVector { set, coeffs })
    }

    pub fn zeros(set: IndexSet) -> Self {
        let n = set.len();
        CoefficientVector { set, coeffs: vec![ZERO; n] }
    }

    pub fn unit(k: &MultiIndex) -> Self {
        let set = IndexSet::lower_box(k);
        let mut coeffs = vec![ZERO; set.len()];
        coeffs[set.len() - 1] = ONE;
        CoefficientVector { set, coeffs }
    }

    /// Builds over the downward closure of the support.
    pub fn from_map(dim: usize, map: &BTreeMap<MultiIndex, C64>) -> Result<Self> {
        let set = IndexSet::closure(dim, map.keys().cloned())?;
        let coeffs = set.iter().map(|k| map.get(k).copied().unwrap_or(ZERO)).collect();
        Ok(CoefficientVector { set, coeffs })
    }

    pub fn set(&self) -> &IndexSet {
        &self.set
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn get(&self, k: &MultiIndex) -> C64 {
        self.set.position(k).map_or(ZERO, |i| self.coeffs[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &C64)> {
        self.set.iter().zip(self.coeffs.iter())
    }

    pub fn to_map(&self) -> BTreeMap<MultiIndex, C64> {
        self.iter().map(|(k, c)| (k.clone(), *c)).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Largest coefficient difference, treating absent entries as zero.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let mut keys = self.to_map();
        for (k, _) in other.iter() {
            keys.entry(k.clone()).or_insert(ZERO);
        }
        keys.keys()
            .map(|k| (self.get(k) - other.get(k)).norm())
            .fold(0.0, f64::max)
    }

    /// `Σ_k c_k φ_k(x)`.
    pub fn evaluate(&self, params: &ParameterSet, x: &[f64]) -> Result<C64> {
        let table = wavepacket_table(params, &self.set, x)?;
        Ok(table.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum())
    }
}

fn accumulate(map: &mut BTreeMap<MultiIndex, C64>, k: MultiIndex, c: C64) {
    *map.entry(k).or_insert(ZERO) += c;
}

fn raise_into(map: &mut BTreeMap<MultiIndex, C64>, cv: &CoefficientVector, j: usize, w: C64) {
    for (k, c) in cv.iter() {
        accumulate(map, k.plus(j), c * w * fm::sqrt(k.get(j) as f64 + 1.0));
    }
}

fn lower_into(map: &mut BTreeMap<MultiIndex, C64>, cv: &CoefficientVector, j: usize, w: C64) {
    for (k, c) in cv.iter() {
        if let Some(km) = k.minus(j) {
            accumulate(map, km, c * w * fm::sqrt(k.get(j) as f64));
        }
    }
}

/// `A_j†`: `(A_j† c)_k = √k_j c_{k−e_j}`.
pub fn raise_coeffs(cv: &CoefficientVector, j: usize) -> Result<CoefficientVector> {
    let mut map = BTreeMap::new();
    raise_into(&mut map, cv, j, ONE);
    CoefficientVector::from_map(cv.dim(), &map)
}

/// `A_j`: `(A_j c)_k = √(k_j+1) c_{k+e_j}`.
pub fn lower_coeffs(cv: &CoefficientVector, j: usize) -> Result<CoefficientVector> {
    let mut map = BTreeMap::new();
    lower_into(&mut map, cv, j, ONE);
    CoefficientVector::from_map(cv.dim(), &map)
}

/// `√(ε/2) Σ_n (conj(B)_{mn} A_n + B_{mn} A_n†)` for `B = Q` or `B = P`.
fn quadrature_action(params: &ParameterSet, cv: &CoefficientVector, b: &CMatrix, m: usize) -> Result<CoefficientVector> {
    let s = fm::sqrt(0.5 * params.eps());
    let mut map = BTreeMap::new();
    for n in 0..params.dim() {
        lower_into(&mut map, cv, n, b[(m, n)].conj() * s);
        raise_into(&mut map, cv, n, b[(m, n)] * s);
    }
    CoefficientVector::from_map(cv.dim(), &map)
}

/// `(x − q)_m` on coefficients: `√(ε/2) (Q̄A + QA†)_m`.
pub fn position_action(params: &ParameterSet, cv: &CoefficientVector) -> Result<Vec<CoefficientVector>> {
    (0..params.dim())
        .map(|m| quadrature_action(params, cv, params.q_matrix(), m))
        .collect()
}

/// `(−iε∇ − p)_m` on coefficients: `√(ε/2) (P̄A + PA†)_m`.
pub fn momentum_action(params: &ParameterSet, cv: &CoefficientVector) -> Result<Vec<CoefficientVector>> {
    (0..params.dim())
        .map(|m| quadrature_action(params, cv, params.p_matrix(), m))
        .collect()
}

fn add_scaled(map: &mut BTreeMap<MultiIndex, C64>, cv: &CoefficientVector, w: C64) {
    for (k, c) in cv.iter() {
        accumulate(map, k.clone(), c * w);
    }
}

/// `½ Σ_j (A_j A_j† + A_j† A_j)`.
pub fn oscillator_ladder(cv: &CoefficientVector) -> Result<CoefficientVector> {
    let mut map = BTreeMap::new();
    for j in 0..cv.dim() {
        add_scaled(&mut map, &lower_coeffs(&raise_coeffs(cv, j)?, j)?, C64::new(0.5, 0.0));
        add_scaled(&mut map, &raise_coeffs(&lower_coeffs(cv, j)?, j)?, C64::new(0.5, 0.0));
    }
    CoefficientVector::from_map(cv.dim(), &map)
}

/// The same oscillator written in the quadratures `X = x − q`, `Π = −iε∇ − p`:
/// `(1/2ε)[Xᵀ PP* X + Πᵀ QQ* Π − ½ Σ M_{ab}(X_aΠ_b + Π_bX_a)]`, `M = PQ* + P̄Qᵀ`.
pub fn oscillator_quadratures(params: &ParameterSet, cv: &CoefficientVector) -> Result<CoefficientVector> {
    let d = params.dim();
    let qm = params.q_matrix();
    let pm = params.p_matrix();
    let pp = pm * pm.adjoint();
    let qq = qm * qm.adjoint();
    let mm = pm * qm.adjoint() + linalg::conj(pm) * qm.transpose();
    let xs = position_action(params, cv)?;
    let ps = momentum_action(params, cv)?;
    let scale = 0.5 / params.eps();
    let mut map = BTreeMap::new();
    for a in 0..d {
        let xa = position_action(params, &ps[a])?;
        let xx = position_action(params, &xs[a])?;
        let pa = momentum_action(params, &xs[a])?;
        let pp_a = momentum_action(params, &ps[a])?;
        for b in 0..d {
            add_scaled(&mut map, &xx[b], pp[(b, a)] * scale);
            add_scaled(&mut map, &pp_a[b], qq[(b, a)] * scale);
            // X_a Π_b and Π_b X_a with weight M_{ab}.
            add_scaled(&mut map, &xa[b], -mm[(b, a)] * (0.5 * scale));
            add_scaled(&mut map, &pa[b], -mm[(a, b)] * (0.5 * scale));
        }
    }
    CoefficientVector::from_map(cv.dim(), &map)
}

/// The redundant enumeration of the order-`n` eigenspace.
///
/// Slot `s = j·d^{n−1} + i` holds `ν_{n−1,i} + e_j`, so the newest axis is
/// the outer Kronecker factor.
#[derive(Clone, Debug)]
pub struct EigenspaceVector {
    pub dim: usize,
    pub order: u32,
    pub slots: Vec<MultiIndex>,
    /// `√(ν!) φ_ν(x)`, the raw products of raising operators on `φ_0`.
    pub ladder: Vec<C64>,
    /// `φ_ν(x)` at the first occurrence of each `ν`, zero at repeats.
    pub entries: Vec<C64>,
}

impl EigenspaceVector {
    pub fn nonzero_slots(&self) -> usize {
        self.entries.iter().filter(|z| **z != ZERO).count()
    }
}

pub fn redundant_slots(dim: usize, n: u32) -> Vec<MultiIndex> {
    let mut slots = vec![MultiIndex::zero(dim)];
    for _ in 0..n {
        let mut next = Vec::with_capacity(slots.len() * dim);
        for j in 0..dim {
            for s in &slots {
                next.push(s.plus(j));
            }
        }
        slots = next;
    }
    slots
}

pub fn eigenspace_vector(params: &ParameterSet, n: u32, x: &[f64]) -> Result<EigenspaceVector> {
    let d = params.dim();
    let len = (d as u64).checked_pow(n).unwrap_or(u64::MAX);
    if len > EIGENSPACE_SLOT_CAP as u64 {
        return Err(Error::ExceedsCap {
            what: "eigenspace slots",
            requested: len.min(usize::MAX as u64) as usize,
            cap: EIGENSPACE_SLOT_CAP,
        });
    }
    let set = IndexSet::total_degree(d, n);
    let table = wavepacket_table(params, &set, x)?;
    let slots = redundant_slots(d, n);
    let mut seen = BTreeMap::new();
    let mut ladder = Vec::with_capacity(slots.len());
    let mut entries = Vec::with_capacity(slots.len());
    for s in &slots {
        let v = table[set.position(s).expect("slot has order n")];
        let f: f64 = s.0.iter().map(|&k| fm::factorial(k)).product();
        ladder.push(v * fm::sqrt(f));
        entries.push(if seen.insert(s.clone(), ()).is_none() { v } else { ZERO });
    }
    Ok(EigenspaceVector { dim: d, order: n, slots, ladder, entries })
}
