mod common;

use std::f64::consts::PI;

use common::{c64, point};
use proptest::prelude::*;
use sp4rep::gegenbauer::{
    coeff_a, coeff_a_poch, coeff_d, coeff_d_prime, det_base, det_power_closed, det_power_expansion, gegenbauer_c,
    gegenbauer_homogeneous, legendre_addition_lhs, legendre_addition_rhs,
};
use sp4rep::sp4::in_domain;
use sp4rep::{Error, C64};

#[test]
fn low_degree_closed_forms() {
    let t = C64::new(0.3, -0.2);
    for lambda in [0.5, 1.0, 2.5, -3.0] {
        assert_eq!(gegenbauer_c(0, lambda, t), C64::new(1.0, 0.0));
        assert!((gegenbauer_c(1, lambda, t) - t * (2.0 * lambda)).norm() < 1e-15);
        let c2 = t * t * (2.0 * lambda * (lambda + 1.0)) - lambda;
        assert!((gegenbauer_c(2, lambda, t) - c2).norm() < 1e-14);
    }
}

#[test]
fn a00_is_four_pi() {
    for lambda in [1.5, 2.0, 3.0, 3.5, 4.0, 7.25] {
        assert!((coeff_a(lambda, 0, 0).unwrap() / (4.0 * PI) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn invalid_lambda_is_rejected() {
    assert!(matches!(coeff_a(0.5, 2, 1), Err(Error::InvalidLambda(_))));
    assert!(matches!(coeff_d(0.25, 2, 1), Err(Error::InvalidLambda(_))));
    assert!(coeff_d_prime(-2.0, 3, 1).is_ok());
    assert!(coeff_a(3.0, 2, 2).is_err());
}

#[test]
fn negative_integer_powers_are_finite_sums() {
    let z = [C64::new(0.2, 0.1), C64::new(-0.1, 0.05), C64::new(0.15, -0.2)];
    let zp = [C64::new(-0.1, 0.2), C64::new(0.25, 0.0), C64::new(0.05, 0.1)];
    for lambda in [-1.0, -2.0, -3.0] {
        let v = det_power_expansion(lambda, &z, &zp, 2 * (-lambda) as i32 + 2, 1e-12).unwrap();
        let want = det_power_closed(lambda, &z, &zp);
        assert!((v.value - want).norm() < 1e-12, "lambda = {lambda}");
    }
}

#[test]
fn error_decreases_with_l_max() {
    let z = [C64::new(0.2, 0.1), C64::new(-0.1, 0.05), C64::new(0.15, -0.2)];
    let zp = [C64::new(-0.1, 0.2), C64::new(0.2, 0.0), C64::new(0.05, 0.1)];
    let want = det_power_closed(3.0, &z, &zp);
    let errs: Vec<f64> = [4, 8, 12, 16, 20]
        .iter()
        .map(|&l| (det_power_expansion(3.0, &z, &zp, l, 1.0).unwrap().value - want).norm())
        .collect();
    for w in errs.windows(2) {
        assert!(w[1] < w[0], "{errs:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expansion_matches_closed_form(z in point(0.17), zp in point(0.17), li in 0..3usize) {
        // every component below 0.17 keeps |z| <= 0.3
        prop_assume!(in_domain(&z) && in_domain(&zp));
        let lambda = [2.0, 3.0, 3.5][li];
        let v = det_power_expansion(lambda, &z, &zp, 20, 1e-8).unwrap();
        let want = det_power_closed(lambda, &z, &zp);
        prop_assert!((v.value - want).norm() < 1e-8);
        prop_assert!(v.tail_estimate < 1e-8);
    }

    #[test]
    fn homogeneous_form_matches_recurrence(s in c64(1.0), r in c64(1.0), l in 0..=12i32, lambda in -3.0..5.0f64) {
        prop_assume!(r.norm() > 0.1);
        let lhs = gegenbauer_homogeneous(l, lambda, s, r * r);
        let rhs = r.powi(l) * gegenbauer_c(l, lambda, s / r);
        prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()));
    }

    #[test]
    fn generating_function(t in -0.9..0.9f64, h in -0.3..0.3f64, lambda in 0.5..4.0f64) {
        let lhs = (1.0 - 2.0 * t * h + h * h).powf(-lambda);
        let rhs: f64 = (0..80).map(|l| gegenbauer_c(l, lambda, C64::new(t, 0.0)).re * h.powi(l)).sum();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn legendre_addition(z in point(0.5), zp in point(0.5), l in 0..=6i32) {
        let lhs = legendre_addition_lhs(l, &z, &zp);
        let rhs = legendre_addition_rhs(l, &z, &zp);
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn coefficient_forms_agree(lambda in 0.6..8.0f64, l in 0..=12i32, kk in any::<u32>()) {
        let k = (kk % (l as u32 / 2 + 1)) as i32;
        let a = coeff_a(lambda, l, k).unwrap();
        prop_assert!((a - coeff_a_poch(lambda, l, k)).abs() < 1e-10 * a.abs());
        let d = coeff_d(lambda, l, k).unwrap();
        let dp = coeff_d_prime(lambda, l, k).unwrap();
        let g = statrs::function::gamma::gamma(lambda) * statrs::function::gamma::gamma(lambda - 0.5);
        prop_assert!((d - g * dp).abs() < 1e-9 * d.abs().max(1e-300));
    }

    #[test]
    fn base_is_the_determinant(z in point(0.4), zp in point(0.4)) {
        let zq = sp4rep::CQuat::pure(z);
        let zpq = sp4rep::CQuat::pure(zp).conj_complex();
        let d = (sp4rep::CQuat::ONE + zq * zpq).det();
        prop_assert!((det_base(&z, &zp) - d).norm() < 1e-13);
    }
}
