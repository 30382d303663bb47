mod common;

use common::*;
use hagedorn_core::quadrature::{fbi_quadrature, inner_product, wigner_quadrature, QuadratureSpec, Window};
use hagedorn_core::special::*;
use hagedorn_core::C64;
use proptest::prelude::*;

fn fact(n: u32) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `L_k^{(γ)}(x) = Σ_j (−1)^j binom(k+γ, k−j) x^j / j!` with the generalized
/// binomial written as a product.
fn laguerre_sum(k: u32, gamma: f64, x: C64) -> C64 {
    (0..=k)
        .map(|j| {
            let m = k - j;
            let binom: f64 = (0..m).map(|i| (gamma + j as f64 + 1.0 + i as f64) / (i as f64 + 1.0)).product();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            x.powu(j) * (sign * binom / fact(j))
        })
        .sum()
}

/// `h_k(x) = k! Σ_m (−1)^m (2x)^{k−2m} / (m!(k−2m)!)`.
fn hermite_sum(k: u32, x: C64) -> C64 {
    (0..=k / 2)
        .map(|m| {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            (x * 2.0).powu(k - 2 * m) * (sign * fact(k) / (fact(m) * fact(k - 2 * m)))
        })
        .sum()
}

/// The defining sum of the two-argument kernel.
fn kernel_sum(m: u32, n: u32, eta: C64, zeta: C64) -> C64 {
    (0..=m.min(n))
        .map(|nu| {
            let coef = fact(m) * fact(n) / (fact(m - nu) * fact(n - nu) * fact(nu)) * 2f64.powi(nu as i32);
            (eta * 2.0).powu(m - nu) * (zeta * 2.0).powu(n - nu) * coef
        })
        .sum()
}

#[test]
fn hermite_frozen_values() {
    assert_eq!(hermite_poly(0, c(0.7, 0.0)).unwrap(), c(1.0, 0.0));
    assert_eq!(hermite_poly(3, c(0.5, 0.0)).unwrap(), c(-5.0, 0.0));
    assert_eq!(hermite_poly(4, c(1.0, 0.0)).unwrap(), c(-20.0, 0.0));
}

#[test]
fn laguerre_frozen_values() {
    let v = laguerre_poly(2, 1.0, c(0.5, 0.0)).unwrap();
    assert!((v - c(1.625, 0.0)).norm() < 1e-15);
    assert_eq!(laguerre_poly(0, 3.0, c(2.0, 1.0)).unwrap(), c(1.0, 0.0));
    assert_eq!(laguerre_poly(1, 0.5, c(2.0, 1.0)).unwrap(), c(-0.5, -1.0));
}

#[test]
fn non_finite_arguments_are_rejected() {
    assert!(hermite_poly(3, c(f64::NAN, 0.0)).is_err());
    assert!(laguerre_poly(3, 0.0, c(0.0, f64::INFINITY)).is_err());
}

#[test]
fn hermite_functions_are_orthonormal() {
    let window = Window::isotropic(vec![0.0], 1.0);
    let spec = QuadratureSpec::trapezoid(400, 14.0);
    for k in 0..8 {
        for l in 0..8 {
            let ip = inner_product(
                &window,
                &spec,
                |x| Ok(c(hermite_function(k, x[0]), 0.0)),
                |x| Ok(c(hermite_function(l, x[0]), 0.0)),
            )
            .unwrap();
            let want = if k == l { 1.0 } else { 0.0 };
            assert!((ip.value - c(want, 0.0)).norm() < 1e-13, "{k} {l} {:?}", ip.value);
        }
    }
}

#[test]
fn hermite_wigner_reference_value() {
    let w = hermite_wigner(1, 0, 1.0, 0.0).unwrap();
    let want = std::f64::consts::SQRT_2 * (-1.0f64).exp() / std::f64::consts::PI;
    assert!((w - c(want, 0.0)).norm() < 1e-15);
    assert!((w.re - 0.165603931632704).abs() < 1e-14);
    let g = hermite_wigner(0, 0, 0.0, 0.0).unwrap();
    assert!((g.re - 1.0 / std::f64::consts::PI).abs() < 1e-15);
}

#[test]
fn hermite_wigner_matches_quadrature() {
    let lag = Window::isotropic(vec![0.0], 2.0);
    let spec = QuadratureSpec::trapezoid(240, 9.0);
    let points = [(0.0, 0.0), (1.0, 0.0), (0.3, -0.7), (-1.2, 0.4), (0.8, 1.1)];
    for k in 0..4 {
        for l in 0..4 {
            for &(x, xi) in &points {
                let q = wigner_quadrature(
                    1.0,
                    &lag,
                    &spec,
                    &[x],
                    &[xi],
                    |y| Ok(c(hermite_function(k, y[0]), 0.0)),
                    |y| Ok(c(hermite_function(l, y[0]), 0.0)),
                )
                .unwrap();
                let w = hermite_wigner(k, l, x, xi).unwrap();
                assert!((q.value - w).norm() < 1e-12, "({k},{l}) at ({x},{xi}): {:?} vs {w:?}", q.value);
            }
        }
    }
}

#[test]
fn hermite_fbi_matches_quadrature() {
    let window = Window::isotropic(vec![0.0], 1.0);
    let spec = QuadratureSpec::trapezoid(300, 12.0);
    for k in 0..5 {
        for &(x, xi) in &[(0.0, 0.0), (0.5, -1.0), (-1.5, 0.7)] {
            let q = fbi_quadrature(1.0, &window, &spec, &[x], &[xi], |y| Ok(c(hermite_function(k, y[0]), 0.0))).unwrap();
            let t = hermite_fbi(k, x, xi).unwrap();
            assert!((q.value - t).norm() < 1e-13, "k={k}: {:?} vs {t:?}", q.value);
            assert!((hermite_husimi(k, x, xi).unwrap() - t.norm_sqr()).abs() < 1e-16);
        }
    }
}

#[test]
fn hermite_husimi_ground_state_peak() {
    let h = hermite_husimi(0, 0.0, 0.0).unwrap();
    assert!((h - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
}

#[test]
fn kernel_two_matches_defining_sum() {
    let pts = [c(0.3, -0.2), c(-1.1, 0.5), c(0.0, 0.9)];
    for m in 0..6 {
        for n in 0..6 {
            for &eta in &pts {
                for &zeta in &pts {
                    let a = laguerre_kernel_two(m, n, eta, zeta).unwrap();
                    let b = kernel_sum(m, n, eta, zeta);
                    assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0), "({m},{n}) {a:?} vs {b:?}");
                }
            }
        }
    }
}

#[test]
fn kernel_one_is_kernel_two_on_the_antidiagonal() {
    let zeta = c(0.4, -0.9);
    for m in 0..5 {
        for n in 0..5 {
            let a = laguerre_kernel_one(m, n, zeta).unwrap();
            let b = kernel_sum(m, n, zeta, -zeta.conj());
            assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0));
        }
    }
}

proptest! {
    #[test]
    fn hermite_matches_explicit_sum(k in 0u32..20, re in -3.0f64..3.0, im in -1.0f64..1.0) {
        let x = c(re, im);
        let a = hermite_poly(k, x).unwrap();
        let b = hermite_sum(k, x);
        prop_assert!((a - b).norm() <= 1e-10 * b.norm().max(1.0));
    }

    #[test]
    fn hermite_parity(k in 0u32..30, x in -4.0f64..4.0) {
        let a = hermite_poly(k, c(-x, 0.0)).unwrap();
        let b = hermite_poly(k, c(x, 0.0)).unwrap() * if k % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0));
    }

    #[test]
    fn laguerre_matches_explicit_sum(k in 0u32..15, gamma in 0.0f64..6.0, re in 0.0f64..8.0, im in -1.0f64..1.0) {
        let x = c(re, im);
        let a = laguerre_poly(k, gamma, x).unwrap();
        let b = laguerre_sum(k, gamma, x);
        prop_assert!((a - b).norm() <= 1e-9 * b.norm().max(1.0));
    }

    #[test]
    fn hermite_wigner_is_hermitian(k in 0u32..10, l in 0u32..10, x in -3.0f64..3.0, xi in -3.0f64..3.0) {
        let a = hermite_wigner(k, l, x, xi).unwrap();
        let b = hermite_wigner(l, k, x, xi).unwrap();
        prop_assert_eq!(a, b.conj());
        if k == l {
            prop_assert_eq!(a.im, 0.0);
        }
    }

    #[test]
    fn hermite_function_recurrence(k in 1u32..40, x in -6.0f64..6.0) {
        // √(k+1) φ_{k+1} = √2 x φ_k − √k φ_{k−1}
        let lhs = ((k + 1) as f64).sqrt() * hermite_function(k + 1, x);
        let rhs = 2f64.sqrt() * x * hermite_function(k, x) - (k as f64).sqrt() * hermite_function(k - 1, x);
        prop_assert!((lhs - rhs).abs() < 1e-13);
    }
}
