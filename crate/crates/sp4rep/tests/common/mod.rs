#![allow(dead_code)]

use proptest::prelude::*;
use sp4rep::{CQuat, C64};

pub fn c64(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| C64::new(a, b))
}

pub fn cquat(r: f64) -> impl Strategy<Value = CQuat> {
    (c64(r), c64(r), c64(r), c64(r)).prop_map(|(w, x, y, z)| CQuat::new(w, [x, y, z]))
}

/// `e^{i phi}` times a real unit quaternion.
pub fn unitary_quat() -> impl Strategy<Value = CQuat> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.0..std::f64::consts::TAU)
        .prop_filter("nonzero", |(w, x, y, z, _)| w * w + x * x + y * y + z * z > 1e-2)
        .prop_map(|(w, x, y, z, phi)| {
            let n = (w * w + x * x + y * y + z * z).sqrt();
            CQuat::from_real(w / n, [x / n, y / n, z / n]).scale(C64::from_polar(1.0, phi))
        })
}

/// Pure point with every component of modulus below `r`.
pub fn point(r: f64) -> impl Strategy<Value = [C64; 3]> {
    (c64(r), c64(r), c64(r)).prop_map(|(a, b, c)| [a, b, c])
}

pub fn qdiff(a: CQuat, b: CQuat) -> f64 {
    (a - b).max_abs()
}

/// Real unit quaternion.
pub fn su2() -> impl Strategy<Value = CQuat> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(w, x, y, z)| w * w + x * x + y * y + z * z > 1e-2)
        .prop_map(|(w, x, y, z)| {
            let n = (w * w + x * x + y * y + z * z).sqrt();
            CQuat::from_real(w / n, [x / n, y / n, z / n])
        })
}
