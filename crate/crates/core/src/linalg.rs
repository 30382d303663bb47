//! Small dense helpers over `nalgebra` for the d×d blocks used everywhere else.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fm;

pub type CMatrix = DMatrix<C64>;
pub type RMatrix = DMatrix<f64>;

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn complexify(m: &RMatrix) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

pub fn real_part(m: &CMatrix) -> RMatrix {
    m.map(|z| z.re)
}

pub fn imag_part(m: &CMatrix) -> RMatrix {
    m.map(|z| z.im)
}

pub fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_real(m: &RMatrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(fm::abs(*x)))
}

pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn inverse(m: &CMatrix, what: &'static str) -> Result<CMatrix> {
    m.clone().try_inverse().ok_or(Error::Singular(what))
}

/// Smallest eigenvalue of the symmetric part of a real matrix; NaN if the
/// eigensolver fails.
pub fn min_sym_eigenvalue(m: &RMatrix) -> f64 {
    let s = (m + m.transpose()) * 0.5;
    match jacobi_eigen(&s) {
        Ok((vals, _)) => vals.into_iter().fold(f64::INFINITY, f64::min),
        Err(_) => f64::NAN,
    }
}

/// Eigenvalues of a Hermitian matrix, each repeated twice.
fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    jacobi_eigen(&real_embedding(h)).map(|(v, _)| v).unwrap_or_else(|_| alloc::vec![f64::NAN])
}

/// `[[A, −B], [B, A]]` for `A + iB`.
fn real_embedding(h: &CMatrix) -> RMatrix {
    let d = h.nrows();
    RMatrix::from_fn(2 * d, 2 * d, |i, j| {
        let z = h[(i % d, j % d)];
        match (i < d, j < d) {
            (true, false) => -z.im,
            (false, true) => z.im,
            _ => z.re,
        }
    })
}

pub fn min_singular_value(m: &CMatrix) -> f64 {
    let lo = hermitian_eigenvalues(&(m.adjoint() * m)).into_iter().fold(f64::INFINITY, f64::min);
    fm::sqrt(lo.max(0.0))
}

/// Spectral norm via the Gram matrix.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    let hi = hermitian_eigenvalues(&(m.adjoint() * m)).into_iter().fold(0.0, f64::max);
    fm::sqrt(hi)
}

/// `f(A)` for Hermitian `A`, applied through its eigendecomposition.
fn hermitian_fn(a: &CMatrix, f: impl Fn(f64) -> f64, what: &'static str) -> Result<CMatrix> {
    // Embedded as the real symmetric [[A, −B], [B, A]] for H = A + iB; the
    // complex Hermitian eigensolver loses about seven digits.
    let d = a.nrows();
    let h = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let (vals, v) = jacobi_eigen(&real_embedding(&h))?;
    if vals.iter().any(|&l| l <= 0.0) {
        return Err(Error::NotPositiveDefinite(what));
    }
    let diag = RMatrix::from_fn(2 * d, 2 * d, |i, j| if i == j { f(vals[i]) } else { 0.0 });
    let g = &v * diag * v.transpose();
    Ok(CMatrix::from_fn(d, d, |i, j| C64::new(g[(i, j)], g[(i + d, j)])))
}

/// Cyclic Jacobi eigendecomposition of a real symmetric matrix: `(λ, V)` with
/// `A = V diag(λ) Vᵀ`. Accurate to roundoff relative to `‖A‖`.
pub fn jacobi_eigen(a: &RMatrix) -> Result<(Vec<f64>, RMatrix)> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = RMatrix::identity(n, n);
    let scale = m.iter().fold(0.0f64, |acc, x| acc.max(fm::abs(*x)));
    if !scale.is_finite() {
        return Err(Error::NonFinite("symmetric matrix"));
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off <= (f64::EPSILON * scale) * (f64::EPSILON * scale) {
            return Ok(((0..n).map(|i| m[(i, i)]).collect(), v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if fm::abs(apq) <= 1e-3 * f64::EPSILON * (fm::abs(m[(p, p)]) + fm::abs(m[(q, q)])) {
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (fm::abs(theta) + fm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / fm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::NoConvergence("Jacobi eigenvalue sweep"))
}

/// Principal square root of a Hermitian positive definite matrix.
pub fn hermitian_sqrt(a: &CMatrix, what: &'static str) -> Result<CMatrix> {
    hermitian_fn(a, fm::sqrt, what)
}

pub fn hermitian_inv_sqrt(a: &CMatrix, what: &'static str) -> Result<CMatrix> {
    hermitian_fn(a, |l| 1.0 / fm::sqrt(l), what)
}

/// Eigenvalues of a general complex matrix.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<C64>> {
    let ev = a
        .clone()
        .try_schur(1e-15, 10_000)
        .and_then(|s| s.eigenvalues())
        .ok_or(Error::NoConvergence("Schur decomposition"))?;
    Ok(ev.iter().cloned().collect())
}

/// `det(A)^{-1/2}` for a matrix whose eigenvalues all lie in the open right
/// half-plane, on the branch continuous from positive definite matrices.
pub fn det_inv_sqrt_right_half(a: &CMatrix, what: &'static str) -> Result<C64> {
    let mut acc = C64::new(1.0, 0.0);
    for l in eigenvalues(a)? {
        if l.re <= 0.0 {
            return Err(Error::NotPositiveDefinite(what));
        }
        acc /= l.sqrt();
    }
    Ok(acc)
}

pub fn mat_vec(m: &CMatrix, v: &[C64]) -> Vec<C64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

pub fn mat_vec_real(m: &RMatrix, v: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

/// `vᵀ M v` without conjugation.
pub fn bilinear(m: &CMatrix, v: &[C64]) -> C64 {
    let mv = mat_vec(m, v);
    v.iter().zip(mv.iter()).map(|(a, b)| a * b).sum()
}

/// Lower Cholesky factor of a real symmetric positive definite matrix.
pub fn cholesky(m: &RMatrix, what: &'static str) -> Result<RMatrix> {
    let s = (m + m.transpose()) * 0.5;
    s.cholesky().map(|c| c.l()).ok_or(Error::NotPositiveDefinite(what))
}

/// Kronecker power `U^{⊗n}`; `U^{⊗0}` is the 1×1 identity.
pub fn kron_power(u: &CMatrix, n: usize) -> CMatrix {
    let mut acc = CMatrix::identity(1, 1);
    for _ in 0..n {
        acc = u.kronecker(&acc);
    }
    acc
}
