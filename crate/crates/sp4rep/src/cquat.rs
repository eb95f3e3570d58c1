//! Complex quaternions `z = (z4, z)` with `z4` the scalar part.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Threshold below which `|det z|` is treated as zero.
pub const EPS_SINGULAR: f64 = 1e-14;

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Complex quaternion with scalar part `w4` and vector part `v = (z1, z2, z3)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CQuat {
    pub w4: C64,
    pub v: [C64; 3],
}

/// 2x2 complex matrix in row-major order.
pub type Mat2 = [[C64; 2]; 2];

pub fn dot3(x: &[C64; 3], y: &[C64; 3]) -> C64 {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

pub fn cross3(x: &[C64; 3], y: &[C64; 3]) -> [C64; 3] {
    [
        x[1] * y[2] - x[2] * y[1],
        x[2] * y[0] - x[0] * y[2],
        x[0] * y[1] - x[1] * y[0],
    ]
}

pub fn conj3(x: &[C64; 3]) -> [C64; 3] {
    [x[0].conj(), x[1].conj(), x[2].conj()]
}

/// Euclidean norm of a complex 3-vector.
pub fn norm3(x: &[C64; 3]) -> f64 {
    (x[0].norm_sqr() + x[1].norm_sqr() + x[2].norm_sqr()).sqrt()
}

impl CQuat {
    pub const ONE: CQuat = CQuat { w4: C64::new(1.0, 0.0), v: [ZERO; 3] };
    pub const ZERO: CQuat = CQuat { w4: ZERO, v: [ZERO; 3] };

    pub const fn new(w4: C64, v: [C64; 3]) -> Self {
        CQuat { w4, v }
    }

    pub fn from_real(w4: f64, v: [f64; 3]) -> Self {
        CQuat { w4: C64::from(w4), v: v.map(C64::from) }
    }

    pub fn scalar(w4: C64) -> Self {
        CQuat { w4, v: [ZERO; 3] }
    }

    pub fn pure(v: [C64; 3]) -> Self {
        CQuat { w4: ZERO, v }
    }

    /// Basis vector `e_i`, `i` in 1..=3.
    pub fn basis(i: usize) -> Self {
        let mut v = [ZERO; 3];
        v[i - 1] = C64::from(1.0);
        CQuat::pure(v)
    }

    pub fn scale(self, c: C64) -> Self {
        CQuat { w4: self.w4 * c, v: self.v.map(|x| x * c) }
    }

    pub fn conj_complex(self) -> Self {
        CQuat { w4: self.w4.conj(), v: conj3(&self.v) }
    }

    /// Quaternionic conjugate `(z4, -z)`.
    pub fn conj_quat(self) -> Self {
        CQuat { w4: self.w4, v: self.v.map(|x| -x) }
    }

    /// Complex conjugate of the quaternionic conjugate.
    pub fn adjoint(self) -> Self {
        self.conj_quat().conj_complex()
    }

    /// `z1^2 + z2^2 + z3^2 + z4^2`, without complex conjugation.
    pub fn det(self) -> C64 {
        self.w4 * self.w4 + dot3(&self.v, &self.v)
    }

    pub fn inverse(self) -> Result<Self> {
        let d = self.det();
        if d.norm() <= EPS_SINGULAR {
            return Err(Error::SingularQuaternion { det_abs: d.norm() });
        }
        Ok(self.conj_quat().scale(d.inv()))
    }

    pub fn is_pure(self, tol: f64) -> bool {
        self.w4.norm() <= tol
    }

    /// Max-norm over the four components.
    pub fn max_abs(self) -> f64 {
        self.v.iter().fold(self.w4.norm(), |m, x| m.max(x.norm()))
    }

    /// Image `[[z4 + i z3, i z1 - z2], [i z1 + z2, z4 - i z3]]`.
    pub fn to_matrix(self) -> Mat2 {
        let [z1, z2, z3] = self.v;
        [[self.w4 + I * z3, I * z1 - z2], [I * z1 + z2, self.w4 - I * z3]]
    }

    /// Inverse of [`CQuat::to_matrix`].
    pub fn from_matrix(m: &Mat2) -> Self {
        let w4 = (m[0][0] + m[1][1]) * 0.5;
        let z3 = (m[0][0] - m[1][1]) * (-I * 0.5);
        let z1 = (m[0][1] + m[1][0]) * (-I * 0.5);
        let z2 = (m[1][0] - m[0][1]) * 0.5;
        CQuat { w4, v: [z1, z2, z3] }
    }
}

impl Mul for CQuat {
    type Output = CQuat;
    fn mul(self, y: CQuat) -> CQuat {
        let x = self;
        let c = cross3(&x.v, &y.v);
        CQuat {
            w4: x.w4 * y.w4 - dot3(&x.v, &y.v),
            v: [
                x.w4 * y.v[0] + y.w4 * x.v[0] + c[0],
                x.w4 * y.v[1] + y.w4 * x.v[1] + c[1],
                x.w4 * y.v[2] + y.w4 * x.v[2] + c[2],
            ],
        }
    }
}

impl Add for CQuat {
    type Output = CQuat;
    fn add(self, y: CQuat) -> CQuat {
        CQuat { w4: self.w4 + y.w4, v: [self.v[0] + y.v[0], self.v[1] + y.v[1], self.v[2] + y.v[2]] }
    }
}

impl Sub for CQuat {
    type Output = CQuat;
    fn sub(self, y: CQuat) -> CQuat {
        self + (-y)
    }
}

impl Neg for CQuat {
    type Output = CQuat;
    fn neg(self) -> CQuat {
        CQuat { w4: -self.w4, v: self.v.map(|x| -x) }
    }
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_det(a: &Mat2) -> C64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}
