#![allow(dead_code)]

use hagedorn_core::linalg::{CMatrix, RMatrix};
use hagedorn_core::params::from_squeeze;
use hagedorn_core::quadrature::Window;
use hagedorn_core::{MultiIndex, ParameterSet, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn mi(k: &[u32]) -> MultiIndex {
    MultiIndex(k.to_vec())
}

/// Complex symmetric with spectral norm at most `radius`.
pub fn random_squeeze(r: &mut impl Rng, d: usize, radius: f64) -> CMatrix {
    let mut w = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let z = c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
            w[(i, j)] = z;
            w[(j, i)] = z;
        }
    }
    let n = hagedorn_core::linalg::spectral_norm(&w);
    w * c(radius * r.gen_range(0.2..1.0) / n, 0.0)
}

/// `exp(iH)` for a random Hermitian `H`.
pub fn random_unitary(r: &mut impl Rng, d: usize) -> CMatrix {
    let mut h = CMatrix::zeros(d, d);
    for i in 0..d {
        h[(i, i)] = c(r.gen_range(-3.0..3.0), 0.0);
        for j in i + 1..d {
            let z = c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    let eig = h.symmetric_eigen();
    let v = eig.eigenvectors;
    let diag = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| c(0.0, l).exp()));
    &v * diag * v.adjoint()
}

/// A generic valid parameter set: a squeezed state rotated by a unitary.
pub fn random_params(r: &mut impl Rng, d: usize, eps: f64, radius: f64) -> ParameterSet {
    let q: Vec<f64> = (0..d).map(|_| r.gen_range(-1.0..1.0)).collect();
    let p: Vec<f64> = (0..d).map(|_| r.gen_range(-1.0..1.0)).collect();
    let w = random_squeeze(r, d, radius);
    let u = random_unitary(r, d);
    from_squeeze(eps, q, p, &w).unwrap().rotated(&u).unwrap()
}

pub fn hermite_params(d: usize, eps: f64) -> ParameterSet {
    ParameterSet::standard(eps, vec![0.0; d], vec![0.0; d]).unwrap()
}

pub fn params_1d(eps: f64, q: f64, p: f64, qm: C64, pm: C64) -> ParameterSet {
    ParameterSet::new(
        eps,
        vec![q],
        vec![p],
        CMatrix::from_element(1, 1, qm),
        CMatrix::from_element(1, 1, pm),
    )
    .unwrap()
}

/// The window of `|φ_0|²` widened to hold every `φ_k` with `|k| ≤ n`.
pub fn window_for(params: &ParameterSet) -> Window {
    Window::position(params).unwrap()
}

pub fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn real_identity(d: usize) -> RMatrix {
    RMatrix::identity(d, d)
}

/// `(c, max |a − c·b|)` with `c` fitted on the largest entry of `b`.
pub fn unimodular_fit(a: &[C64], b: &[C64]) -> (C64, f64) {
    let (i, _) = b
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .expect("non-empty");
    let c = a[i] / b[i];
    let err = a.iter().zip(b).map(|(x, y)| (x - c * y).norm()).fold(0.0, f64::max);
    (c, err)
}

pub fn apply(m: &CMatrix, v: &[C64]) -> Vec<C64> {
    hagedorn_core::linalg::mat_vec(m, v)
}

/// Real symmetric positive definite `S` with `Q = S`, `P = iS⁻¹`.
pub fn real_symmetric_params(r: &mut impl Rng, d: usize, eps: f64) -> ParameterSet {
    let mut a = RMatrix::zeros(d, d);
    for v in a.iter_mut() {
        *v = r.gen_range(-0.6..0.6);
    }
    let s = &a * a.transpose() + RMatrix::identity(d, d) * 0.7;
    let si = s.clone().try_inverse().unwrap();
    let qm = hagedorn_core::linalg::complexify(&s);
    let pm = hagedorn_core::linalg::complexify(&si) * c(0.0, 1.0);
    let q = (0..d).map(|_| r.gen_range(-1.0..1.0)).collect();
    let p = (0..d).map(|_| r.gen_range(-1.0..1.0)).collect();
    ParameterSet::new(eps, q, p, qm, pm).unwrap()
}

pub fn random_point(r: &mut impl Rng, center: &[f64], spread: f64) -> Vec<f64> {
    center.iter().map(|c| c + r.gen_range(-spread..spread)).collect()
}
