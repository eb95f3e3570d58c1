//! Elements `g = [[a, b], [-conj(b), conj(a)]]` of Sp(4,R) with complex-quaternion blocks.

use std::f64::consts::TAU;

use nalgebra::{Matrix4, Schur};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cquat::{CQuat, C64, EPS_SINGULAR};
use crate::error::{Error, Result};

/// Membership tolerance used by constructors and `inverse`.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sp4Element {
    pub a: CQuat,
    pub b: CQuat,
    /// False for elements of the complexified extension built by [`make_diagonal`].
    pub in_real_group: bool,
}

/// Eigenvalue quadruple `{mu, nu, conj(nu), conj(mu)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenQuadruple {
    pub mu: C64,
    pub nu: C64,
    pub degenerate: bool,
}

impl EigenQuadruple {
    pub fn new(mu: C64, nu: C64) -> Self {
        EigenQuadruple { mu, nu, degenerate: false }
    }

    pub fn all(&self) -> [C64; 4] {
        [self.mu, self.nu, self.nu.conj(), self.mu.conj()]
    }
}

/// The four membership residuals, largest first component-wise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub member: bool,
    pub residual: f64,
}

impl Sp4Element {
    pub const IDENTITY: Sp4Element = Sp4Element { a: CQuat::ONE, b: CQuat::ZERO, in_real_group: true };

    /// Builds an element, checking membership.
    pub fn new(a: CQuat, b: CQuat) -> Result<Self> {
        let g = Sp4Element { a, b, in_real_group: true };
        let m = g.check_membership();
        if !m.member {
            return Err(Error::NotInGroup { residual: m.residual });
        }
        Ok(g)
    }

    pub fn from_blocks_unchecked(a: CQuat, b: CQuat, in_real_group: bool) -> Self {
        Sp4Element { a, b, in_real_group }
    }

    /// Block-diagonal element `diag(a, conj(a))`.
    pub fn compact(a: CQuat) -> Result<Self> {
        Sp4Element::new(a, CQuat::ZERO)
    }

    /// `a = cosh t`, `b = sinh t e1`.
    pub fn boost(t: f64) -> Self {
        Sp4Element {
            a: CQuat::from_real(t.cosh(), [0.0; 3]),
            b: CQuat::from_real(0.0, [t.sinh(), 0.0, 0.0]),
            in_real_group: true,
        }
    }

    pub fn check_membership(&self) -> Membership {
        let (a, b) = (self.a, self.b);
        let r1 = (a * a.adjoint() - b * b.adjoint() - CQuat::ONE).max_abs();
        let r2 = (a * b.conj_quat() + b * a.conj_quat()).max_abs();
        let r3 = (a.adjoint() * a - b.conj_quat() * b.conj_complex() - CQuat::ONE).max_abs();
        let r4 = (a.adjoint() * b + b.conj_quat() * a.conj_complex()).max_abs();
        let residual = r1.max(r2).max(r3).max(r4);
        Membership { member: residual <= MEMBERSHIP_TOL, residual }
    }

    pub fn is_block_diagonal(&self, tol: f64) -> bool {
        self.b.max_abs() <= tol
    }

    pub fn inverse(&self) -> Result<Self> {
        let m = self.check_membership();
        if m.member {
            return Ok(Sp4Element { a: self.a.adjoint(), b: self.b.conj_quat(), in_real_group: true });
        }
        if self.is_block_diagonal(0.0) {
            let ai = self.a.inverse()?;
            return Ok(Sp4Element { a: ai, b: CQuat::ZERO, in_real_group: self.in_real_group });
        }
        Err(Error::NotInGroup { residual: m.residual })
    }

    /// 4x4 complex image `[[Z(a), Z(b)], [-Z(conj b), Z(conj a)]]`.
    pub fn to_matrix4(&self) -> Matrix4<C64> {
        let za = self.a.to_matrix();
        let zb = self.b.to_matrix();
        let zbb = self.b.conj_complex().to_matrix();
        let zab = self.a.conj_complex().to_matrix();
        Matrix4::from_fn(|i, j| match (i < 2, j < 2) {
            (true, true) => za[i][j],
            (true, false) => zb[i][j - 2],
            (false, true) => -zbb[i - 2][j],
            (false, false) => zab[i - 2][j - 2],
        })
    }

    /// Eigenvalues of the 4x4 image in canonical order.
    pub fn eigenvalues(&self) -> EigenQuadruple {
        let schur = Schur::new(self.to_matrix4());
        let (_, t) = schur.unpack();
        let lambdas: Vec<C64> = (0..4).map(|i| t[(i, i)]).collect();
        pair_eigenvalues(&lambdas)
    }
}

impl std::ops::Mul for Sp4Element {
    type Output = Sp4Element;
    fn mul(self, h: Sp4Element) -> Sp4Element {
        let (a, b, c, d) = (self.a, self.b, h.a, h.b);
        Sp4Element {
            a: a * c - b * d.conj_complex(),
            b: a * d + b * c.conj_complex(),
            in_real_group: self.in_real_group && h.in_real_group,
        }
    }
}

fn arg_2pi(z: C64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

const PAIR_TOL: f64 = 1e-8;

/// Canonical pairing: `mu` has the largest modulus (ties: smallest argument in `[0, 2pi)`),
/// its conjugate partner is removed, and `nu` is the remaining one with the smallest modulus
/// (ties: largest argument).
pub fn pair_eigenvalues(lambdas: &[C64]) -> EigenQuadruple {
    let mut rest: Vec<C64> = lambdas.to_vec();
    let key_mu = |z: &C64| (-(z.norm() / PAIR_TOL).round(), arg_2pi(*z));
    let imu = (0..rest.len())
        .min_by(|&i, &j| key_mu(&rest[i]).partial_cmp(&key_mu(&rest[j])).unwrap())
        .unwrap();
    let mu = rest.remove(imu);
    let ipartner = (0..rest.len())
        .min_by(|&i, &j| {
            let di = (rest[i] - mu.conj()).norm();
            let dj = (rest[j] - mu.conj()).norm();
            di.partial_cmp(&dj).unwrap()
        })
        .unwrap();
    let partner_err = (rest[ipartner] - mu.conj()).norm();
    rest.remove(ipartner);
    let key_nu = |z: &C64| ((z.norm() / PAIR_TOL).round(), -arg_2pi(*z));
    let inu = (0..rest.len())
        .min_by(|&i, &j| key_nu(&rest[i]).partial_cmp(&key_nu(&rest[j])).unwrap())
        .unwrap();
    let nu = rest[inu];
    let other = rest[1 - inu];
    let nu_err = (other - nu.conj()).norm();
    let mut degenerate = partner_err > 1e-6 || nu_err > 1e-6;
    for i in 0..lambdas.len() {
        for j in i + 1..lambdas.len() {
            let d = (lambdas[i] - lambdas[j]).norm();
            if d < 1e-7 && d > 0.0 {
                degenerate = true;
            }
        }
    }
    EigenQuadruple { mu, nu, degenerate }
}

/// Uniformly distributed unit quaternion (Marsaglia's method).
fn unit_quaternion<R: Rng>(rng: &mut R) -> [f64; 4] {
    let (x1, x2, s1) = loop {
        let x1: f64 = rng.random_range(-1.0..1.0);
        let x2: f64 = rng.random_range(-1.0..1.0);
        let s = x1 * x1 + x2 * x2;
        if s < 1.0 {
            break (x1, x2, s);
        }
    };
    let (x3, x4, s2) = loop {
        let x3: f64 = rng.random_range(-1.0..1.0);
        let x4: f64 = rng.random_range(-1.0..1.0);
        let s = x3 * x3 + x4 * x4;
        if s < 1.0 && s > 0.0 {
            break (x3, x4, s);
        }
    };
    let f = ((1.0 - s1) / s2).sqrt();
    [x1, x2, x3 * f, x4 * f]
}

/// Random element of the compact factor: `e^{i phi}` times a real unit quaternion.
pub fn random_compact<R: Rng>(rng: &mut R) -> Sp4Element {
    let q = unit_quaternion(rng);
    let phi: f64 = rng.random_range(0.0..TAU);
    let a = CQuat::from_real(q[0], [q[1], q[2], q[3]]).scale(C64::from_polar(1.0, phi));
    Sp4Element { a, b: CQuat::ZERO, in_real_group: true }
}

/// `k1 d(t) k2` with `t` uniform in `[0, t_max]`.
pub fn random_element(seed: u64, t_max: f64) -> Sp4Element {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_element_with(&mut rng, t_max)
}

pub fn random_element_with<R: Rng>(rng: &mut R, t_max: f64) -> Sp4Element {
    let k1 = random_compact(rng);
    let k2 = random_compact(rng);
    let t = if t_max > 0.0 { rng.random_range(0.0..=t_max) } else { 0.0 };
    let g = k1 * Sp4Element::boost(t) * k2;
    if t_max == 0.0 {
        Sp4Element { b: CQuat::ZERO, ..g }
    } else {
        g
    }
}

/// `diag(a, conj a)` with `Z(a) = diag(mu, nu)`.
pub fn make_diagonal(mu: C64, nu: C64) -> Result<Sp4Element> {
    let p = (mu * nu).norm();
    if (p * p - 1.0).abs() > 1e-10 {
        return Err(Error::DeterminantNotOne { value: p * p });
    }
    let w4 = (mu + nu) * 0.5;
    let z3 = (mu - nu) / C64::new(0.0, 2.0);
    let a = CQuat::new(w4, [C64::from(0.0), C64::from(0.0), z3]);
    let in_real_group = (mu.norm() - 1.0).abs() < 1e-12 && (nu.norm() - 1.0).abs() < 1e-12;
    Ok(Sp4Element { a, b: CQuat::ZERO, in_real_group })
}

/// Largest eigenvalue of `Z Z^dagger` for pure `z`.
pub fn domain_radius(z: &[C64; 3]) -> f64 {
    let n2: f64 = z.iter().map(|x| x.norm_sqr()).sum();
    let zz = crate::cquat::dot3(z, z).norm();
    n2 + (n2 * n2 - zz * zz).max(0.0).sqrt()
}

pub fn in_domain(z: &[C64; 3]) -> bool {
    domain_radius(z) < 1.0
}

/// `(a z + b)(-conj(b) z + conj(a))^{-1}` with `a, b` the blocks of `g_inv`.
pub fn domain_action(g_inv: &Sp4Element, z: &[C64; 3]) -> Result<[C64; 3]> {
    if !in_domain(z) {
        return Err(Error::NotInDomain { max_eig: domain_radius(z) });
    }
    let zq = CQuat::pure(*z);
    let den = denominator(g_inv, z);
    let d = den.det();
    if d.norm() <= EPS_SINGULAR {
        return Err(Error::SingularDenominator { det_abs: d.norm() });
    }
    let w = (g_inv.a * zq + g_inv.b) * den.inverse()?;
    Ok(w.v)
}

/// `-conj(b) z + conj(a)`.
pub fn denominator(h: &Sp4Element, z: &[C64; 3]) -> CQuat {
    -(h.b.conj_complex() * CQuat::pure(*z)) + h.a.conj_complex()
}
