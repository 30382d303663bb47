//! Seeded generators of valid parameter sets and small comparison helpers,
//! shared by the acceptance runner and the integration tests.

use hagedorn_core::linalg::{self, CMatrix};
use hagedorn_core::params::from_squeeze;
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

/// Complex symmetric with spectral norm in `[0.2, 1)·radius`.
pub fn random_squeeze(r: &mut impl Rng, d: usize, radius: f64) -> CMatrix {
    let mut w = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let z = c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
            w[(i, j)] = z;
            w[(j, i)] = z;
        }
    }
    let n = linalg::spectral_norm(&w);
    w * c(radius * r.gen_range(0.2..1.0) / n, 0.0)
}

/// Haar-like unitary: the Q factor of a random complex matrix with the
/// phases of `diag(R)` divided out.
pub fn random_unitary(r: &mut impl Rng, d: usize) -> CMatrix {
    let a = CMatrix::from_fn(d, d, |_, _| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
    let qr = a.qr();
    let (q, rr) = (qr.q(), qr.r());
    let phases = CMatrix::from_fn(d, d, |i, j| if i == j { rr[(i, i)] / rr[(i, i)].norm() } else { c(0.0, 0.0) });
    q * phases
}

/// A squeezed state rotated by a random unitary, centred in `[−1, 1]^{2d}`.
pub fn random_params(r: &mut impl Rng, d: usize, eps: f64, radius: f64) -> ParameterSet {
    let q: Vec<f64> = (0..d).map(|_| r.gen_range(-1.0..1.0)).collect();
    let p: Vec<f64> = (0..d).map(|_| r.gen_range(-1.0..1.0)).collect();
    let w = random_squeeze(r, d, radius);
    let u = random_unitary(r, d);
    from_squeeze(eps, q, p, &w).and_then(|s| s.rotated(&u)).expect("squeezed states are valid")
}

pub fn hermite_params(d: usize, eps: f64) -> ParameterSet {
    ParameterSet::standard(eps, vec![0.0; d], vec![0.0; d]).expect("standard parameters are valid")
}

pub fn params_1d(eps: f64, q: f64, p: f64, qm: C64, pm: C64) -> hagedorn_core::Result<ParameterSet> {
    ParameterSet::new(eps, vec![q], vec![p], CMatrix::from_element(1, 1, qm), CMatrix::from_element(1, 1, pm))
}

pub fn random_point(r: &mut impl Rng, center: &[f64], spread: f64) -> Vec<f64> {
    center.iter().map(|c| c + r.gen_range(-spread..spread)).collect()
}

pub fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// `(c, max |a − c·b|)` with `c` fitted on the largest entry of `b`.
pub fn unimodular_fit(a: &[C64], b: &[C64]) -> (C64, f64) {
    let (i, _) = b
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .expect("non-empty");
    let k = a[i] / b[i];
    let err = a.iter().zip(b).map(|(x, y)| (x - k * y).norm()).fold(0.0, f64::max);
    (k, err)
}

pub fn apply(m: &CMatrix, v: &[C64]) -> Vec<C64> {
    linalg::mat_vec(m, v)
}
