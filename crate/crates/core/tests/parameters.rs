mod common;

use common::*;
use hagedorn_core::linalg::{self, CMatrix};
use hagedorn_core::params::*;
use hagedorn_core::{Error, ParameterSet};
use proptest::prelude::*;

fn m1(z: hagedorn_core::C64) -> CMatrix {
    CMatrix::from_element(1, 1, z)
}

#[test]
fn hermite_parameters_validate_cleanly() {
    let r = validate(1.0, &[0.0], &[0.0], &m1(c(1.0, 0.0)), &m1(c(0.0, 1.0)), DEFAULT_TOL).unwrap();
    assert!(r.passed());
    assert_eq!(r.symmetry_residual, 0.0);
    assert_eq!(r.symplectic_residual, 0.0);
    assert_eq!(r.width_min_eigenvalue, 1.0);
}

#[test]
fn real_pair_fails_with_symplectic_residual_two() {
    let r = validate(1.0, &[0.0], &[0.0], &m1(c(1.0, 0.0)), &m1(c(1.0, 0.0)), DEFAULT_TOL).unwrap();
    assert!(!r.passed());
    assert!((r.symplectic_residual - 2.0).abs() < 1e-15);
    assert!(r.width_min_eigenvalue <= 0.0);
    let e = ParameterSet::new(1.0, vec![0.0], vec![0.0], m1(c(1.0, 0.0)), m1(c(1.0, 0.0)));
    assert!(matches!(e, Err(Error::InvalidParameters(_))));
}

#[test]
fn singular_q_is_reported() {
    let r = validate(1.0, &[0.0], &[0.0], &m1(c(0.0, 0.0)), &m1(c(0.0, 1.0)), DEFAULT_TOL).unwrap();
    assert!(!r.passed());
    assert!(r.q_min_singular <= DEFAULT_TOL);
}

#[test]
fn malformed_input_is_an_error() {
    assert!(validate(0.0, &[0.0], &[0.0], &m1(c(1.0, 0.0)), &m1(c(0.0, 1.0)), DEFAULT_TOL).is_err());
    assert!(validate(1.0, &[0.0], &[0.0, 1.0], &m1(c(1.0, 0.0)), &m1(c(0.0, 1.0)), DEFAULT_TOL).is_err());
    assert!(validate(1.0, &[f64::NAN], &[0.0], &m1(c(1.0, 0.0)), &m1(c(0.0, 1.0)), DEFAULT_TOL).is_err());
}

#[test]
fn width_of_hermite_parameters() {
    let w = width_matrix(&hermite_params(1, 1.0));
    assert_eq!(w.c[(0, 0)], c(0.0, 1.0));
    assert_eq!(w.im_c[(0, 0)], 1.0);
    assert!(w.inverse_gram_residual < 1e-15);
}

#[test]
fn squeeze_one_half() {
    let p = from_squeeze(1.0, vec![0.0], vec![0.0], &m1(c(0.5, 0.0))).unwrap();
    assert!((p.q_matrix()[(0, 0)] - c(3f64.sqrt(), 0.0)).norm() < 1e-15);
    assert!((p.p_matrix()[(0, 0)] - c(0.0, 1.0 / 3f64.sqrt())).norm() < 1e-15);
    let s = to_squeeze(&p).unwrap();
    assert!((s.w[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
    assert!((s.v[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn zero_squeeze_is_hermite() {
    let p = from_squeeze(1.0, vec![0.0; 2], vec![0.0; 2], &CMatrix::zeros(2, 2)).unwrap();
    assert!(linalg::max_abs(&(p.q_matrix() - CMatrix::identity(2, 2))) < 1e-15);
    assert!(linalg::max_abs(&(p.p_matrix() - CMatrix::identity(2, 2) * c(0.0, 1.0))) < 1e-15);
}

#[test]
fn squeeze_out_of_range_is_rejected() {
    assert!(from_squeeze(1.0, vec![0.0], vec![0.0], &m1(c(1.0, 0.0))).is_err());
    let mut w = CMatrix::zeros(2, 2);
    w[(0, 1)] = c(0.1, 0.0);
    assert!(from_squeeze(1.0, vec![0.0; 2], vec![0.0; 2], &w).is_err());
}

#[test]
fn polar_of_rotated_hermite() {
    let p = params_1d(1.0, 0.0, 0.0, c(0.0, 1.0), c(-1.0, 0.0));
    let (n, u) = polar_normalize(&p).unwrap();
    assert!((n.q_matrix()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
    assert!((n.p_matrix()[(0, 0)] - c(0.0, 1.0)).norm() < 1e-15);
    assert!((u[(0, 0)] - c(0.0, -1.0)).norm() < 1e-15);
}

#[test]
fn fourier_dual_of_hermite() {
    let f = fourier_dual(&hermite_params(1, 1.0)).unwrap();
    assert_eq!(f.params.q_matrix()[(0, 0)], c(0.0, 1.0));
    assert_eq!(f.params.p_matrix()[(0, 0)], c(-1.0, 0.0));
    assert_eq!(f.phase, c(1.0, 0.0));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert!((f.branch - c(s, s)).norm() < 1e-15);
}

#[test]
fn zero_translation_has_unit_phase() {
    let mut r = rng(5);
    let p = random_params(&mut r, 2, 0.3, 0.5);
    let (t, phase) = translate_params(&p, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
    assert_eq!(phase, c(1.0, 0.0));
    assert_eq!(t.position(), p.position());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn embedding_is_symplectic(seed in 0u64..10_000, d in 1usize..4) {
        let p = random_params(&mut rng(seed), d, 0.5, 0.8);
        let f = symplectic_embed(&p);
        prop_assert!(symplectic_defect(&f) < 1e-12);
        let fi = symplectic_inverse(&f);
        prop_assert!(linalg::max_abs_real(&(&fi * &f - real_identity(2 * d))) < 1e-12);
    }

    #[test]
    fn width_imaginary_part_is_inverse_gram(seed in 0u64..10_000, d in 1usize..4) {
        let p = random_params(&mut rng(seed), d, 0.5, 0.8);
        prop_assert!(width_matrix(&p).inverse_gram_residual < 1e-10);
        prop_assert!(is_complex_symmetric(p.width(), 1e-12));
    }

    #[test]
    fn squeeze_round_trip(seed in 0u64..10_000, d in 1usize..4) {
        let p = random_params(&mut rng(seed), d, 1.0, 0.9);
        let s = to_squeeze(&p).unwrap();
        prop_assert!(is_complex_symmetric(&s.w, 1e-10));
        prop_assert!(linalg::spectral_norm(&s.w) < 1.0);
        prop_assert!(linalg::max_abs(&(s.v.adjoint() * &s.v - CMatrix::identity(d, d))) < 1e-12);
        let back = from_squeeze(1.0, p.position().to_vec(), p.momentum().to_vec(), &s.w).unwrap();
        prop_assert!(linalg::max_abs(&(back.q_matrix() - p.q_matrix() * &s.v)) < 1e-10);
        prop_assert!(linalg::max_abs(&(back.p_matrix() - p.p_matrix() * &s.v)) < 1e-10);
        let again = to_squeeze(&back).unwrap();
        prop_assert!(linalg::max_abs(&(again.w - &s.w)) < 1e-10);
    }

    #[test]
    fn polar_pair_is_valid_and_real(seed in 0u64..10_000, d in 1usize..4) {
        let p = random_params(&mut rng(seed), d, 1.0, 0.9);
        let (n, u) = polar_normalize(&p).unwrap();
        prop_assert!(linalg::max_abs(&(u.adjoint() * &u - CMatrix::identity(d, d))) < 1e-12);
        prop_assert!(linalg::max_abs_real(&linalg::imag_part(n.q_matrix())) == 0.0);
        prop_assert!(linalg::max_abs(&(n.q_matrix() * u.adjoint() - p.q_matrix())) < 1e-12);
        prop_assert!(n.report(1e-10).passed());
    }

    #[test]
    fn fourier_dual_twice_negates(seed in 0u64..10_000, d in 1usize..3) {
        let p = random_params(&mut rng(seed), d, 0.7, 0.7);
        let f = fourier_dual(&p).unwrap();
        let ff = fourier_dual(&f.params).unwrap();
        prop_assert!(linalg::max_abs(&(ff.params.q_matrix() + p.q_matrix())) < 1e-15);
        prop_assert!((f.branch.norm() - 1.0).abs() < 1e-12);
        for j in 0..d {
            prop_assert_eq!(ff.params.position()[j], -p.position()[j]);
        }
    }

    #[test]
    fn translations_compose(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let p = random_params(&mut r, 2, 0.4, 0.5);
        let (a, b) = ([0.3, -0.1], [0.2, 0.5]);
        let (t1, ph1) = translate_params(&p, &a, &b).unwrap();
        let (t2, ph2) = translate_params(&t1, &b, &a).unwrap();
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let (t3, ph3) = translate_params(&p, &sum, &sum).unwrap();
        for j in 0..2 {
            prop_assert!((t2.position()[j] - t3.position()[j]).abs() < 1e-15);
            prop_assert!((t2.momentum()[j] - t3.momentum()[j]).abs() < 1e-15);
        }
        // T_{b,a}T_{a,b} = e^{(i/2ε)(aᵀa − bᵀb)} T_{a+b,a+b}
        let arg = (a.iter().map(|x| x * x).sum::<f64>() - b.iter().map(|x| x * x).sum::<f64>()) / (2.0 * 0.4);
        let twist = c(0.0, arg).exp();
        prop_assert!((ph1 * ph2 - twist * ph3).norm() < 1e-12);
    }
}
