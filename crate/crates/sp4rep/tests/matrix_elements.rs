mod common;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use sp4rep::fockbasis::{spin_basis, spin_indices, spin_level, RepLabel, ScalarIndex, SpinIndex, Truncation};
use sp4rep::matrix_elements::{
    apply_scalar_action, apply_spin_action, block_size, matrix_block, scalar_matrix_element, spin_matrix_element, Engine,
    Route, ScalarMatrixElementRequest, SpinMatrixElementRequest,
};
use sp4rep::sp4::{make_diagonal, random_element};
use sp4rep::{Error, HalfInt, Sp4Element, C64};

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.norm()))
}

#[test]
fn identity_is_the_identity_block() {
    let rep = RepLabel::new(4.0, HalfInt::HALF).unwrap();
    for l in 0..=3 {
        let b = matrix_block(&rep, &Sp4Element::IDENTITY, l, l, &Truncation::default()).unwrap();
        assert_eq!(b.nrows(), block_size(&rep, l));
        assert!(max_abs(&(b - DMatrix::identity(block_size(&rep, l), block_size(&rep, l)))) < 1e-13);
    }
}

#[test]
fn identity_element_record() {
    let rep = RepLabel::scalar(4.0).unwrap();
    let i = ScalarIndex::new(2, 1, 0).unwrap();
    let v = scalar_matrix_element(&ScalarMatrixElementRequest {
        rep,
        g: Sp4Element::IDENTITY,
        in_idx: i,
        out_idx: i,
        trunc: Truncation::default(),
    })
    .unwrap();
    assert_eq!(v.route, Route::B0);
    assert!((v.value - C64::new(1.0, 0.0)).norm() < 1e-14);
    assert_eq!(v.tail_estimate, 0.0);
}

#[test]
fn boost_ground_state() {
    let rep = RepLabel::scalar(4.0).unwrap();
    let i = ScalarIndex::new(0, 0, 0).unwrap();
    let v = scalar_matrix_element(&ScalarMatrixElementRequest {
        rep,
        g: Sp4Element::boost(0.1),
        in_idx: i,
        out_idx: i,
        trunc: Truncation::default(),
    })
    .unwrap();
    assert_eq!(v.route, Route::Series);
    assert!(v.tail_estimate < 1e-6);
    // <F_0, U(d(t)) F_0> = cosh(t)^{-2 varsigma}
    assert!((v.value.re - 0.1f64.cosh().powf(-8.0)).abs() < 1e-13, "{v:?}");
    assert!(v.value.im.abs() < 1e-14);
}

#[test]
fn output_degree_beyond_l_max_is_rejected() {
    let rep = RepLabel::scalar(4.0).unwrap();
    let req = ScalarMatrixElementRequest {
        rep,
        g: Sp4Element::boost(0.1),
        in_idx: ScalarIndex::new(0, 0, 0).unwrap(),
        out_idx: ScalarIndex::new(6, 0, 0).unwrap(),
        trunc: Truncation { l_max: 4, ..Default::default() },
    };
    assert!(matches!(scalar_matrix_element(&req), Err(Error::InvalidArgument(_))));
    let spin = RepLabel::new(4.0, HalfInt::HALF).unwrap();
    let bad = ScalarMatrixElementRequest { rep: spin, ..req };
    assert!(scalar_matrix_element(&bad).is_err());
}

#[test]
fn spin_request_matches_block() {
    let rep = RepLabel::new(5.0, HalfInt::HALF).unwrap();
    let g = random_element(21, 0.2);
    let b = matrix_block(&rep, &g, 1, 2, &Truncation::default()).unwrap();
    let ins = spin_level(rep.spin, 1);
    let outs = spin_level(rep.spin, 2);
    for (c, i) in ins.iter().enumerate() {
        for (r, o) in outs.iter().enumerate() {
            let v = spin_matrix_element(&SpinMatrixElementRequest { rep, g, in_idx: *i, out_idx: *o, trunc: Truncation::default() })
                .unwrap();
            assert!((v.value - b[(r, c)]).norm() < 1e-13);
        }
    }
}

/// Truncated expansion of `U(g) F_in` at a point against the pointwise action.
fn oracle_error(rep: &RepLabel, g: &Sp4Element, l_max: i32, z: &[C64; 3]) -> f64 {
    let engine = Engine::new(g, l_max).unwrap();
    let mut worst = 0.0f64;
    for inp in spin_indices(rep.spin, 1) {
        let want = apply_spin_action(rep, g, &[(inp, C64::new(1.0, 0.0))], z).unwrap();
        let mut v = DVector::<C64>::zeros(rep.dim());
        for o in spin_indices(rep.spin, l_max) {
            let e = sp4rep::matrix_elements::spin_element_with(&engine, rep, &inp, &o).unwrap();
            v += spin_basis(rep, &o, z).unwrap() * e.value;
        }
        worst = worst.max((v - want).norm());
    }
    worst
}

#[test]
fn expansion_reproduces_the_action() {
    let z = [C64::new(0.1, 0.05), C64::new(-0.08, 0.1), C64::new(0.05, -0.12)];
    for (s2, vs, seed) in [(0, 4.0, 3u64), (1, 5.0, 4)] {
        let rep = RepLabel::new(vs, HalfInt::from_twice(s2)).unwrap();
        let g = random_element(seed, 0.2);
        let e6 = oracle_error(&rep, &g, 6, &z);
        let e12 = oracle_error(&rep, &g, 12, &z);
        assert!(e12 < e6, "{e6} {e12}");
        assert!(e12 < 1e-5, "{e12}");
    }
}

#[test]
fn scalar_action_agrees_with_spin_action_at_s0() {
    let rep = RepLabel::scalar(4.0).unwrap();
    let g = random_element(8, 0.3);
    let z = [C64::new(0.1, 0.05), C64::new(-0.08, 0.1), C64::new(0.05, -0.12)];
    let i = ScalarIndex::new(2, 0, 1).unwrap();
    let a = apply_scalar_action(&rep, &g, &[(i, C64::new(1.0, 0.0))], &z).unwrap();
    let b = apply_spin_action(&rep, &g, &[(SpinIndex::from_scalar(i), C64::new(1.0, 0.0))], &z).unwrap();
    assert!((a - b[0]).norm() < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn compact_blocks_are_unitary(seed in any::<u64>(), s2 in 0..=1i32, l in 0..=4i32) {
        let rep = RepLabel::new(4.5, HalfInt::from_twice(s2)).unwrap();
        let g = random_element(seed, 0.0);
        let b = matrix_block(&rep, &g, l, l, &Truncation::default()).unwrap();
        let n = b.ncols();
        prop_assert!(max_abs(&(b.adjoint() * &b - DMatrix::identity(n, n))) < 1e-10);
    }

    #[test]
    fn compact_blocks_compose(s1 in any::<u64>(), s2 in any::<u64>(), l in 0..=3i32) {
        // varsigma + s is an integer, so the U(1) factor det^{-varsigma-s} is single valued
        let rep = RepLabel::new(4.5, HalfInt::HALF).unwrap();
        let (g, h) = (random_element(s1, 0.0), random_element(s2, 0.0));
        let t = Truncation::default();
        let lhs = matrix_block(&rep, &(g * h), l, l, &t).unwrap();
        let rhs = matrix_block(&rep, &g, l, l, &t).unwrap() * matrix_block(&rep, &h, l, l, &t).unwrap();
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-11);
    }

    #[test]
    fn compact_elements_keep_degree(seed in any::<u64>(), li in 0..=3i32, lo in 0..=3i32) {
        prop_assume!(li != lo);
        let rep = RepLabel::scalar(4.0).unwrap();
        let b = matrix_block(&rep, &random_element(seed, 0.0), li, lo, &Truncation::default()).unwrap();
        prop_assert!(b.iter().all(|x| *x == C64::new(0.0, 0.0)));
    }

    #[test]
    fn diagonal_elements_are_diagonal(th1 in -3.0..3.0f64, th2 in -3.0..3.0f64, l in 0..=3i32) {
        let rep = RepLabel::scalar(4.0).unwrap();
        let g = make_diagonal(C64::from_polar(1.0, th1), C64::from_polar(1.0, th2)).unwrap();
        let b = matrix_block(&rep, &g, l, l, &Truncation::default()).unwrap();
        for r in 0..b.nrows() {
            for c in 0..b.ncols() {
                if r != c {
                    prop_assert!(b[(r, c)].norm() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn half_integer_exponent_composes_up_to_sign() {
    // varsigma + s = 9/2: compact blocks form a representation of the double cover only
    let rep = RepLabel::new(4.0, HalfInt::HALF).unwrap();
    let t = Truncation::default();
    for (s1, s2) in [(1u64, 2u64), (3, 4), (5, 6), (7678857571762399625, 3380173347772060260)] {
        let (g, h) = (random_element(s1, 0.0), random_element(s2, 0.0));
        let lhs = matrix_block(&rep, &(g * h), 1, 1, &t).unwrap();
        let rhs = matrix_block(&rep, &g, 1, 1, &t).unwrap() * matrix_block(&rep, &h, 1, 1, &t).unwrap();
        let plus = max_abs(&(&lhs - &rhs));
        let minus = max_abs(&(&lhs + &rhs));
        assert!(plus.min(minus) < 1e-11, "{plus} {minus}");
    }
}
