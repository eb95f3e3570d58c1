mod common;

use common::{cquat, su2, unitary_quat};
use proptest::prelude::*;
use sp4rep::wigner::{
    addition_theorem_sum, cg_x2, d_matrix_x2, d_x2, tensor_reduce_check, three_j_exact, three_j_x2,
    three_j_zero_m_exact, wigner_d, ThreeJ,
};
use sp4rep::{CQuat, HalfInt, C64};

fn hi(x2: i32) -> HalfInt {
    HalfInt::from_twice(x2)
}

fn max_abs(m: &nalgebra::DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.norm()))
}

#[test]
fn spin_half_is_the_cofactor_matrix() {
    let z = CQuat::new(C64::new(0.3, 0.1), [C64::new(-0.2, 0.4), C64::new(0.5, 0.0), C64::new(0.1, -0.7)]);
    let i = C64::new(0.0, 1.0);
    let [z1, z2, z3] = z.v;
    let want = [[z.w4 - i * z3, -z2 - i * z1], [z2 - i * z1, z.w4 + i * z3]];
    let d = d_matrix_x2(1, &z);
    for r in 0..2 {
        for c in 0..2 {
            assert!((d[(r, c)] - want[r][c]).norm() < 1e-15);
        }
    }
}

#[test]
fn invalid_projection_is_an_error() {
    assert!(wigner_d(hi(2), hi(4), hi(0), &CQuat::ONE).is_err());
    assert!(wigner_d(hi(2), hi(1), hi(0), &CQuat::ONE).is_err());
    assert_eq!(d_x2(2, 4, 0, &CQuat::ONE), C64::new(0.0, 0.0));
}

#[test]
fn zero_projection_closed_form_is_exact() {
    for l1 in 0..=6 {
        for l2 in 0..=6 {
            for l3 in 0..=6 {
                let spec = ThreeJ::new([l1, l2, l3].map(HalfInt::from_int), [HalfInt::ZERO; 3]);
                assert_eq!(three_j_zero_m_exact(l1, l2, l3), three_j_exact(&spec), "({l1} {l2} {l3})");
            }
        }
    }
}

#[test]
fn three_j_orthogonality() {
    for j1 in 0..=4 {
        for j2 in 0..=4 {
            let j2i: i32 = j2;
            for j3 in (j1 - j2i as i32).abs()..=j1 + j2 {
                for j3p in (j1 - j2i as i32).abs()..=j1 + j2 {
                    if (j1 + j2 + j3) % 2 != 0 || (j1 + j2 + j3p) % 2 != 0 {
                        continue;
                    }
                    for m3 in (-j3..=j3).step_by(2) {
                        let mut s = 0.0;
                        for m1 in (-j1..=j1).step_by(2) {
                            let m2 = -m1 - m3;
                            s += three_j_x2(j1, j2, j3, m1, m2, m3) * three_j_x2(j1, j2, j3p, m1, m2, m3);
                        }
                        let want = if j3 == j3p { 1.0 / f64::from(j3 + 1) } else { 0.0 };
                        assert!((s - want).abs() < 1e-13, "{j1} {j2} {j3} {j3p} {m3}");
                    }
                }
            }
        }
    }
}

#[test]
fn known_values() {
    // (1 1 0; 0 0 0) = -1/sqrt(3), (1/2 1/2 1; 1/2 -1/2 0) = 1/sqrt(6)
    assert!((three_j_x2(2, 2, 0, 0, 0, 0) + 1.0 / 3f64.sqrt()).abs() < 1e-15);
    assert!((three_j_x2(1, 1, 2, 1, -1, 0) - 1.0 / 6f64.sqrt()).abs() < 1e-15);
    // <1/2 1/2 1/2 -1/2 | 0 0> = 1/sqrt(2)
    assert!((cg_x2(1, 1, 1, -1, 0, 0) - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    assert_eq!(three_j_x2(2, 2, 6, 0, 0, 0), 0.0);
}

fn arb_three_j() -> impl Strategy<Value = [i32; 6]> {
    (0..=6i32, 0..=6i32, 0..=12i32, any::<u32>(), any::<u32>()).prop_map(|(j1, j2, j3, a, b)| {
        let m1 = -j1 + 2 * (a % (j1 as u32 + 1)) as i32;
        let m2 = -j2 + 2 * (b % (j2 as u32 + 1)) as i32;
        [j1, j2, j3, m1, m2, -m1 - m2]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn d_is_a_homomorphism(a in cquat(1.0), b in cquat(1.0), j2 in 0..=6i32) {
        let lhs = d_matrix_x2(j2, &(a * b));
        let rhs = d_matrix_x2(j2, &a) * d_matrix_x2(j2, &b);
        let scale = 1.0 + max_abs(&lhs);
        prop_assert!(max_abs(&(lhs - rhs)) / scale < 1e-11);
    }

    #[test]
    fn d_is_unitary_on_the_compact_group(q in unitary_quat(), j2 in 0..=8i32) {
        let d = d_matrix_x2(j2, &q);
        let n = (j2 + 1) as usize;
        prop_assert!(max_abs(&(&d * d.adjoint() - nalgebra::DMatrix::<C64>::identity(n, n))) < 1e-12);
    }

    #[test]
    fn d_is_homogeneous(a in cquat(1.0), c in common::c64(2.0), j2 in 0..=6i32) {
        let lhs = d_matrix_x2(j2, &a.scale(c));
        let rhs = d_matrix_x2(j2, &a) * c.powi(j2);
        let tol = 1e-10 * (1.0 + max_abs(&rhs));
        prop_assert!(max_abs(&(lhs - rhs)) < tol);
    }

    #[test]
    fn three_j_symmetries(k in arb_three_j()) {
        let [j1, j2, j3, m1, m2, m3] = k;
        let v = three_j_x2(j1, j2, j3, m1, m2, m3);
        prop_assert_eq!(v, three_j_x2(j2, j3, j1, m2, m3, m1));
        let odd = if ((j1 + j2 + j3) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((three_j_x2(j2, j1, j3, m2, m1, m3) - odd * v).abs() < 1e-15);
        prop_assert!((three_j_x2(j1, j2, j3, -m1, -m2, -m3) - odd * v).abs() < 1e-15);
    }

    #[test]
    fn tensor_products_reduce(q in su2(), a in 0..=4i32, b in 0..=4i32) {
        // the Clebsch-Gordan reduction needs det q = 1
        prop_assert!(tensor_reduce_check(hi(a), hi(b), &q) < 1e-12);
    }

    #[test]
    fn addition_theorem(z in cquat(0.6), zp in cquat(0.6), j2 in 0..=4i32, a in any::<u32>(), b in any::<u32>()) {
        let m1 = -j2 + 2 * (a % (j2 as u32 + 1)) as i32;
        let m2 = -j2 + 2 * (b % (j2 as u32 + 1)) as i32;
        let lhs = d_x2(j2, m1, m2, &(z + zp));
        let rhs = addition_theorem_sum(hi(j2), hi(m1), hi(m2), &z, &zp).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }
}
