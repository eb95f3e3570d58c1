mod common;

use common::{cquat, qdiff};
use proptest::prelude::*;
use sp4rep::cquat::{mat2_det, mat2_mul};
use sp4rep::{CQuat, Error, C64};

#[test]
fn basis_products_follow_the_matrix_image() {
    let e = [CQuat::basis(1), CQuat::basis(2), CQuat::basis(3)];
    for x in e {
        assert!(qdiff(x * x, -CQuat::ONE) < 1e-15);
    }
    // cyclic products close on the basis up to sign, and anticommute
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        let p = e[i] * e[j];
        let q = e[j] * e[i];
        assert!(qdiff(p, -q) < 1e-15);
        assert!(p.is_pure(1e-15));
    }
}

#[test]
fn null_quaternion_has_no_inverse() {
    let i = C64::new(0.0, 1.0);
    // w^2 + x^2 = 0 with w = 1, x = i
    let q = CQuat::new(C64::new(1.0, 0.0), [i, C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);
    assert!(q.det().norm() < 1e-15);
    assert!(matches!(q.inverse(), Err(Error::SingularQuaternion { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn product_is_associative(a in cquat(1.0), b in cquat(1.0), c in cquat(1.0)) {
        prop_assert!(qdiff((a * b) * c, a * (b * c)) < 1e-13);
    }

    #[test]
    fn det_is_multiplicative(a in cquat(1.0), b in cquat(1.0)) {
        prop_assert!(((a * b).det() - a.det() * b.det()).norm() < 1e-13);
    }

    #[test]
    fn matrix_image_is_a_homomorphism(a in cquat(1.0), b in cquat(1.0)) {
        let lhs = (a * b).to_matrix();
        let rhs = mat2_mul(&a.to_matrix(), &b.to_matrix());
        for r in 0..2 {
            for c in 0..2 {
                prop_assert!((lhs[r][c] - rhs[r][c]).norm() < 1e-13);
            }
        }
        prop_assert!((mat2_det(&a.to_matrix()) - a.det()).norm() < 1e-13);
        prop_assert!(qdiff(CQuat::from_matrix(&a.to_matrix()), a) < 1e-15);
    }

    #[test]
    fn quaternionic_conjugate_reverses_products(a in cquat(1.0), b in cquat(1.0)) {
        prop_assert!(qdiff((a * b).conj_quat(), b.conj_quat() * a.conj_quat()) < 1e-13);
        prop_assert!(qdiff((a * b).adjoint(), b.adjoint() * a.adjoint()) < 1e-13);
        prop_assert!(qdiff((a * b).conj_complex(), a.conj_complex() * b.conj_complex()) < 1e-13);
        prop_assert!(qdiff(a * a.conj_quat(), CQuat::scalar(a.det())) < 1e-13);
    }

    #[test]
    fn involutions_square_to_identity(a in cquat(1.0)) {
        prop_assert_eq!(a.conj_quat().conj_quat(), a);
        prop_assert_eq!(a.conj_complex().conj_complex(), a);
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn inverse_is_two_sided(a in cquat(1.0)) {
        prop_assume!(a.det().norm() > 1e-2);
        let ai = a.inverse().unwrap();
        prop_assert!(qdiff(a * ai, CQuat::ONE) < 1e-10);
        prop_assert!(qdiff(ai * a, CQuat::ONE) < 1e-10);
    }
}
