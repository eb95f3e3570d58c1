mod common;

use common::{point, unitary_quat};
use proptest::prelude::*;
use sp4rep::sp4::{domain_action, in_domain, make_diagonal, random_element};
use sp4rep::{CQuat, Error, Sp4Element, C64};

fn elem_diff(g: &Sp4Element, h: &Sp4Element) -> f64 {
    (g.a - h.a).max_abs().max((g.b - h.b).max_abs())
}

#[test]
fn off_group_blocks_are_rejected() {
    let a = CQuat::from_real(2.0, [0.0; 3]);
    assert!(matches!(Sp4Element::new(a, CQuat::ZERO), Err(Error::NotInGroup { .. })));
}

#[test]
fn diagonal_needs_unit_product() {
    assert!(make_diagonal(C64::new(2.0, 0.0), C64::new(1.0, 0.0)).is_err());
    let g = make_diagonal(C64::from_polar(1.0, 0.3), C64::from_polar(1.0, -1.1)).unwrap();
    assert!(g.check_membership().member);
}

#[test]
fn identity_acts_trivially() {
    let z = [C64::new(0.1, 0.2), C64::new(-0.3, 0.0), C64::new(0.05, -0.1)];
    let w = domain_action(&Sp4Element::IDENTITY, &z).unwrap();
    for i in 0..3 {
        assert!((w[i] - z[i]).norm() < 1e-15);
    }
}

#[test]
fn outside_points_are_rejected() {
    let z = [C64::new(0.9, 0.0), C64::new(0.0, 0.9), C64::new(0.0, 0.0)];
    assert!(!in_domain(&z));
    assert!(matches!(domain_action(&Sp4Element::IDENTITY, &z), Err(Error::NotInDomain { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn random_elements_are_members(seed in any::<u64>(), t in 0.0..1.5f64) {
        let g = random_element(seed, t);
        prop_assert!(g.check_membership().residual < 1e-10);
        let d = g.to_matrix4().determinant();
        prop_assert!((d - C64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn inverse_is_two_sided(seed in any::<u64>(), t in 0.0..1.0f64) {
        let g = random_element(seed, t);
        let gi = g.inverse().unwrap();
        prop_assert!(elem_diff(&(g * gi), &Sp4Element::IDENTITY) < 1e-10);
        prop_assert!(elem_diff(&(gi * g), &Sp4Element::IDENTITY) < 1e-10);
        let m = g.to_matrix4() * gi.to_matrix4();
        prop_assert!((m - nalgebra::Matrix4::<C64>::identity()).iter().all(|x| x.norm() < 1e-10));
    }

    #[test]
    fn compact_factors_compose(a in unitary_quat(), b in unitary_quat()) {
        let g = Sp4Element::compact(a).unwrap() * Sp4Element::compact(b).unwrap();
        prop_assert!((g.a - a * b).max_abs() < 1e-13);
        prop_assert!(g.b.max_abs() < 1e-15);
    }

    #[test]
    fn action_preserves_the_domain(seed in any::<u64>(), t in 0.0..0.5f64, z in point(0.3)) {
        prop_assume!(in_domain(&z));
        let g = random_element(seed, t);
        let w = domain_action(&g.inverse().unwrap(), &z).unwrap();
        prop_assert!(in_domain(&w));
    }

    #[test]
    fn inverse_action_composes(s1 in any::<u64>(), s2 in any::<u64>(), z in point(0.25)) {
        prop_assume!(in_domain(&z));
        let (g, h) = (random_element(s1, 0.3), random_element(s2, 0.3));
        // (gh)^{-1}.z = h^{-1}.(g^{-1}.z), which makes f -> f(g^{-1}.z) a homomorphism
        let gh = domain_action(&(g * h).inverse().unwrap(), &z).unwrap();
        let step = domain_action(&h.inverse().unwrap(), &domain_action(&g.inverse().unwrap(), &z).unwrap()).unwrap();
        for i in 0..3 {
            prop_assert!((gh[i] - step[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn spectrum_is_closed_under_inversion_and_conjugation(seed in any::<u64>(), t in 0.0..1.0f64) {
        let g = random_element(seed, t);
        let (_, tri) = nalgebra::Schur::new(g.to_matrix4()).unpack();
        let lam: Vec<C64> = (0..4).map(|i| tri[(i, i)]).collect();
        let near = |x: C64| lam.iter().map(|y| (y - x).norm()).fold(f64::INFINITY, f64::min);
        for &x in &lam {
            // repeated eigenvalues are only resolved to about sqrt(eps)
            prop_assert!(near(C64::new(1.0, 0.0) / x) < 1e-6);
            prop_assert!(near(x.conj()) < 1e-6);
        }
    }

    #[test]
    fn torus_conjugates_recover_their_pair(k in unitary_quat(), th1 in -3.0..3.0f64, th2 in -3.0..3.0f64) {
        prop_assume!((th1 - th2).abs() > 0.1 && (th1 + th2).abs() > 0.1);
        prop_assume!(th1.abs() > 0.05 && th2.abs() > 0.05 && (th1.abs() - std::f64::consts::PI).abs() > 0.05 && (th2.abs() - std::f64::consts::PI).abs() > 0.05);
        let (mu, nu) = (C64::from_polar(1.0, th1), C64::from_polar(1.0, th2));
        let kk = Sp4Element::compact(k).unwrap();
        let g = kk * make_diagonal(mu, nu).unwrap() * kk.inverse().unwrap();
        let e = g.eigenvalues();
        let want = [mu, nu, nu.conj(), mu.conj()];
        for x in e.all() {
            prop_assert!(want.iter().any(|y| (y - x).norm() < 1e-9));
        }
    }
}
