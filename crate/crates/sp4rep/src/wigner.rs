//! Wigner D-functions holomorphically extended to complex quaternions, 3-j symbols and
//! Clebsch-Gordan coefficients, and the D-function expansion identities.
//!
//! Internally every angular momentum is a doubled integer (`j2 = 2j`). Matrices are laid out
//! with row/column `j - m`, so the first row is `m = j`. With that layout
//! `D^{1/2}(z) = [[z4 - i z3, -z2 - i z1], [z2 - i z1, z4 + i z3]]`, the cofactor matrix of
//! `to_matrix(z)`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cquat::{CQuat, C64};
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::series::{compensated_sum, geometric_tail, SeriesValue};

/// Largest `j` evaluated with exact rational arithmetic.
pub const EXACT_J_MAX: i32 = 20;

/// `n!` as a float; exact for `n <= 22`, correctly rounded table beyond.
pub fn factorial(n: i32) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut v = vec![1.0f64; 171];
        for i in 1..171 {
            v[i] = v[i - 1] * i as f64;
        }
        v
    });
    assert!((0..=170).contains(&n), "factorial argument {n} out of range");
    t[n as usize]
}

/// `e^{i pi x}` for `x = x2 / 2`.
pub fn phase_x2(x2: i32) -> C64 {
    match x2.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// `(-1)^n` for integer `n`.
pub fn sign(n: i32) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn is_projection(j2: i32, m2: i32) -> bool {
    j2 >= 0 && m2.abs() <= j2 && (j2 - m2) % 2 == 0
}

/// Row/column position of `m` in a `D^j` matrix.
pub fn pos(j2: i32, m2: i32) -> usize {
    ((j2 - m2) / 2) as usize
}

/// `sigma^j_m` with doubled arguments; the caller guarantees validity.
pub(crate) fn sig_x2(j2: i32, m2: i32) -> f64 {
    1.0 / (factorial((j2 - m2) / 2) * factorial((j2 + m2) / 2)).sqrt()
}

/// `sigma^j_m = 1/sqrt((j-m)!(j+m)!)`.
pub fn sigma(j: HalfInt, m: HalfInt) -> Result<f64> {
    j.check_projection(m)?;
    Ok(sig_x2(j.twice(), m.twice()))
}

pub fn sigma2(j: HalfInt, m1: HalfInt, m2: HalfInt) -> Result<f64> {
    Ok(sigma(j, m1)? * sigma(j, m2)?)
}

fn light_cone(z: &CQuat) -> [C64; 4] {
    let i = C64::new(0.0, 1.0);
    let [z1, z2, z3] = z.v;
    [z.w4 + i * z3, z.w4 - i * z3, -z2 + i * z1, z2 + i * z1]
}

fn powers(x: C64, n: i32) -> Vec<C64> {
    let mut v = Vec::with_capacity(n as usize + 1);
    let mut p = C64::new(1.0, 0.0);
    for _ in 0..=n {
        v.push(p);
        p *= x;
    }
    v
}

fn d_from_powers(j2: i32, m1: i32, m2: i32, pw: &[Vec<C64>; 4]) -> C64 {
    let (jm1, jp1, jm2, jp2) = ((j2 - m1) / 2, (j2 + m1) / 2, (j2 - m2) / 2, (j2 + m2) / 2);
    let shift = (m2 - m1) / 2;
    let pref = sign((m1 - m2) / 2) * (factorial(jp1) * factorial(jm1) * factorial(jp2) * factorial(jm2)).sqrt();
    let mut s = C64::new(0.0, 0.0);
    let t0 = (-shift).max(0);
    let t1 = jm2.min(jp1);
    for t in t0..=t1 {
        let (e1, e2, e3) = (jm2 - t, jp1 - t, t + shift);
        let den = factorial(e1) * factorial(e2) * factorial(e3) * factorial(t);
        s += pw[0][e1 as usize] * pw[1][e2 as usize] * pw[2][e3 as usize] * pw[3][t as usize] / den;
    }
    s * pref
}

/// `D^j_{m1 m2}(z)` with doubled indices; zero for invalid projections.
pub fn d_x2(j2: i32, m1: i32, m2: i32, z: &CQuat) -> C64 {
    if !is_projection(j2, m1) || !is_projection(j2, m2) {
        return C64::new(0.0, 0.0);
    }
    let lc = light_cone(z);
    let pw = lc.map(|x| powers(x, j2));
    d_from_powers(j2, m1, m2, &pw)
}

/// Holomorphic Wigner function `D^j_{m1 m2}(z)`.
pub fn wigner_d(j: HalfInt, m1: HalfInt, m2: HalfInt, z: &CQuat) -> Result<C64> {
    j.check_projection(m1)?;
    j.check_projection(m2)?;
    Ok(d_x2(j.twice(), m1.twice(), m2.twice(), z))
}

/// Full `(2j+1) x (2j+1)` matrix, rows and columns ordered `m = j, j-1, ..., -j`.
pub fn d_matrix_x2(j2: i32, z: &CQuat) -> DMatrix<C64> {
    let n = (j2 + 1) as usize;
    let lc = light_cone(z);
    let pw = lc.map(|x| powers(x, j2));
    DMatrix::from_fn(n, n, |r, c| d_from_powers(j2, j2 - 2 * r as i32, j2 - 2 * c as i32, &pw))
}

pub fn wigner_matrix(j: HalfInt, z: &CQuat) -> DMatrix<C64> {
    d_matrix_x2(j.twice(), z)
}

/// Arguments of a 3-j symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ThreeJ {
    pub j1: HalfInt,
    pub j2: HalfInt,
    pub j3: HalfInt,
    pub m1: HalfInt,
    pub m2: HalfInt,
    pub m3: HalfInt,
}

impl ThreeJ {
    pub fn new(j: [HalfInt; 3], m: [HalfInt; 3]) -> Self {
        ThreeJ { j1: j[0], j2: j[1], j3: j[2], m1: m[0], m2: m[1], m3: m[2] }
    }

    fn key(&self) -> [i32; 6] {
        [self.j1, self.j2, self.j3, self.m1, self.m2, self.m3].map(HalfInt::twice)
    }

    /// Selection rules: projections valid, `m1+m2+m3 = 0`, triangle, integral perimeter.
    pub fn is_allowed(&self) -> bool {
        allowed(self.key())
    }
}

fn allowed(k: [i32; 6]) -> bool {
    let [j1, j2, j3, m1, m2, m3] = k;
    is_projection(j1, m1)
        && is_projection(j2, m2)
        && is_projection(j3, m3)
        && m1 + m2 + m3 == 0
        && (j1 - j2).abs() <= j3
        && j3 <= j1 + j2
        && (j1 + j2 + j3) % 2 == 0
}

/// Exact value `sign * sqrt(square)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactThreeJ {
    pub negative: bool,
    pub square: BigRational,
}

impl ExactThreeJ {
    pub fn zero() -> Self {
        ExactThreeJ { negative: false, square: BigRational::zero() }
    }

    pub fn to_f64(&self) -> f64 {
        let v = self.square.to_f64().unwrap_or(0.0).sqrt();
        if self.negative {
            -v
        } else {
            v
        }
    }
}

fn big_fact(n: i32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

struct RacahArgs {
    phase: i32,
    pref_num: [i32; 9],
    pref_den: i32,
    t0: i32,
    t1: i32,
    den: [i32; 6],
}

/// Integer data of the Racah formula; factorial arguments are `t + den[i]` with the sign of `t`
/// given by `den` position (first three add `t`, last three subtract it).
fn racah_args(k: [i32; 6]) -> RacahArgs {
    let [j1, j2, j3, m1, m2, m3] = k;
    let a = (j1 + j2 - j3) / 2;
    let b = (j1 - j2 + j3) / 2;
    let c = (-j1 + j2 + j3) / 2;
    let d = (j1 + j2 + j3) / 2 + 1;
    let x1 = (j3 - j2 + m1) / 2;
    let x2 = (j3 - j1 - m2) / 2;
    let y1 = (j1 - m1) / 2;
    let y2 = (j2 + m2) / 2;
    RacahArgs {
        phase: (j1 - j2 - m3) / 2,
        pref_num: [
            a,
            b,
            c,
            (j1 + m1) / 2,
            (j1 - m1) / 2,
            (j2 + m2) / 2,
            (j2 - m2) / 2,
            (j3 + m3) / 2,
            (j3 - m3) / 2,
        ],
        pref_den: d,
        t0: 0.max(-x1).max(-x2),
        t1: a.min(y1).min(y2),
        den: [0, x1, x2, a, y1, y2],
    }
}

/// Racah's single sum evaluated in exact rational arithmetic.
pub fn three_j_exact(spec: &ThreeJ) -> ExactThreeJ {
    let k = spec.key();
    if !allowed(k) {
        return ExactThreeJ::zero();
    }
    let r = racah_args(k);
    let mut pref = BigRational::from_integer(r.pref_num.iter().fold(BigInt::one(), |acc, &n| acc * big_fact(n)));
    pref /= BigRational::from_integer(big_fact(r.pref_den));
    let mut s = BigRational::zero();
    for t in r.t0..=r.t1 {
        let den = big_fact(t)
            * big_fact(r.den[1] + t)
            * big_fact(r.den[2] + t)
            * big_fact(r.den[3] - t)
            * big_fact(r.den[4] - t)
            * big_fact(r.den[5] - t);
        let term = BigRational::new(BigInt::one(), den);
        if t % 2 == 0 {
            s += term;
        } else {
            s -= term;
        }
    }
    let negative = (s.is_negative()) ^ (r.phase.rem_euclid(2) == 1);
    ExactThreeJ { negative: negative && !s.is_zero(), square: &s * &s * pref }
}

fn ln_fact(n: i32) -> f64 {
    statrs::function::gamma::ln_gamma(f64::from(n) + 1.0)
}

/// Racah's sum in log-gamma form with compensated summation, for large `j`.
fn three_j_lgamma(k: [i32; 6]) -> f64 {
    let r = racah_args(k);
    let half_ln_pref = 0.5 * (r.pref_num.iter().map(|&n| ln_fact(n)).sum::<f64>() - ln_fact(r.pref_den));
    let terms = (r.t0..=r.t1).map(|t| {
        let ln_den = ln_fact(t)
            + ln_fact(r.den[1] + t)
            + ln_fact(r.den[2] + t)
            + ln_fact(r.den[3] - t)
            + ln_fact(r.den[4] - t)
            + ln_fact(r.den[5] - t);
        sign(t) * (half_ln_pref - ln_den).exp()
    });
    sign(r.phase) * compensated_sum(terms)
}

fn three_j_cache() -> &'static RwLock<HashMap<[i32; 6], f64>> {
    static CACHE: OnceLock<RwLock<HashMap<[i32; 6], f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// 3-j symbol with doubled arguments, memoized.
pub fn three_j_x2(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> f64 {
    let k = [j1, j2, j3, m1, m2, m3];
    if !allowed(k) {
        return 0.0;
    }
    if let Some(v) = three_j_cache().read().unwrap().get(&k) {
        return *v;
    }
    let v = if j1.max(j2).max(j3) <= 2 * EXACT_J_MAX {
        let spec = ThreeJ::new([j1, j2, j3].map(HalfInt::from_twice), [m1, m2, m3].map(HalfInt::from_twice));
        three_j_exact(&spec).to_f64()
    } else {
        three_j_lgamma(k)
    };
    three_j_cache().write().unwrap().insert(k, v);
    v
}

pub fn three_j(spec: &ThreeJ) -> f64 {
    let [j1, j2, j3, m1, m2, m3] = spec.key();
    three_j_x2(j1, j2, j3, m1, m2, m3)
}

/// Closed form of `(l1 l2 l3; 0 0 0)` for integer `l`, exact.
pub fn three_j_zero_m_exact(l1: i32, l2: i32, l3: i32) -> ExactThreeJ {
    let jj = l1 + l2 + l3;
    if jj % 2 == 1 || l3 < (l1 - l2).abs() || l3 > l1 + l2 || l1 < 0 || l2 < 0 {
        return ExactThreeJ::zero();
    }
    let h = jj / 2;
    let f = BigRational::new(big_fact(h), big_fact(h - l1) * big_fact(h - l2) * big_fact(h - l3));
    let r = BigRational::new(
        big_fact(jj - 2 * l1) * big_fact(jj - 2 * l2) * big_fact(jj - 2 * l3),
        big_fact(jj + 1),
    );
    ExactThreeJ { negative: h % 2 == 1, square: &f * &f * r }
}

/// `<j1 m1 j2 m2 | j m>` with doubled arguments.
pub fn cg_x2(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> f64 {
    let v = three_j_x2(j1, j2, j, m1, m2, -m);
    if v == 0.0 {
        return 0.0;
    }
    sign((j1 - j2 + m) / 2) * f64::from(j + 1).sqrt() * v
}

/// Clebsch-Gordan coefficient `<j m j' m' | j'' m''>`.
pub fn clebsch_gordan(j: HalfInt, m: HalfInt, jp: HalfInt, mp: HalfInt, jpp: HalfInt, mpp: HalfInt) -> f64 {
    cg_x2(j.twice(), m.twice(), jp.twice(), mp.twice(), jpp.twice(), mpp.twice())
}

/// Max residual of the tensor-product reduction of `D^j (x) D^j'` at `z`, both directions.
pub fn tensor_reduce_check(j: HalfInt, jp: HalfInt, z: &CQuat) -> f64 {
    let (a, b) = (j.twice(), jp.twice());
    let da = d_matrix_x2(a, z);
    let db = d_matrix_x2(b, z);
    let dj: Vec<(i32, DMatrix<C64>)> =
        ((a - b).abs()..=a + b).step_by(2).map(|c| (c, d_matrix_x2(c, z))).collect();
    let ms = |j2: i32| (-j2..=j2).step_by(2).collect::<Vec<_>>();
    let mut res = 0.0f64;
    // D^j D^j' = sum_J CG CG D^J
    for &m1 in &ms(a) {
        for &n1 in &ms(b) {
            for &m2 in &ms(a) {
                for &n2 in &ms(b) {
                    let lhs = da[(pos(a, m1), pos(a, m2))] * db[(pos(b, n1), pos(b, n2))];
                    let mut rhs = C64::new(0.0, 0.0);
                    for (c, dc) in &dj {
                        let (p, q) = (m1 + n1, m2 + n2);
                        if p.abs() > *c || q.abs() > *c {
                            continue;
                        }
                        rhs += dc[(pos(*c, p), pos(*c, q))] * (cg_x2(a, m1, b, n1, *c, p) * cg_x2(a, m2, b, n2, *c, q));
                    }
                    res = res.max((lhs - rhs).norm());
                }
            }
        }
    }
    // sum CG CG D^j D^j' = delta D^J
    for (c, dc) in &dj {
        for (c2, _) in &dj {
            for &p in &ms(*c) {
                for &q in &ms(*c2) {
                    let mut s = C64::new(0.0, 0.0);
                    for &m1 in &ms(a) {
                        let n1 = p - m1;
                        if n1.abs() > b {
                            continue;
                        }
                        for &m2 in &ms(a) {
                            let n2 = q - m2;
                            if n2.abs() > b {
                                continue;
                            }
                            s += da[(pos(a, m1), pos(a, m2))]
                                * db[(pos(b, n1), pos(b, n2))]
                                * (cg_x2(a, m1, b, n1, *c, p) * cg_x2(a, m2, b, n2, *c2, q));
                        }
                    }
                    let want = if c == c2 { dc[(pos(*c, p), pos(*c, q))] } else { C64::new(0.0, 0.0) };
                    res = res.max((s - want).norm());
                }
            }
        }
    }
    res
}

/// Right-hand side of the addition theorem for `D^j_{m1 m2}(z + z')`.
pub fn addition_theorem_sum(j: HalfInt, m1: HalfInt, m2: HalfInt, z: &CQuat, zp: &CQuat) -> Result<C64> {
    j.check_projection(m1)?;
    j.check_projection(m2)?;
    let (j2, a, b) = (j.twice(), m1.twice(), m2.twice());
    let mut s = C64::new(0.0, 0.0);
    for jp in 0..=j2 {
        let jr = j2 - jp;
        for ap in (-jp..=jp).step_by(2) {
            for bp in (-jp..=jp).step_by(2) {
                let (ar, br) = (a - ap, b - bp);
                if !is_projection(jr, ar) || !is_projection(jr, br) {
                    continue;
                }
                s += d_x2(jr, ar, br, z) * d_x2(jp, ap, bp, zp)
                    * (sig_x2(jr, ar) * sig_x2(jr, br) * sig_x2(jp, ap) * sig_x2(jp, bp));
            }
        }
    }
    Ok(s / (sig_x2(j2, a) * sig_x2(j2, b)))
}

/// Truncated inverse addition series for `det(z+z')^{-1} D^j_{m1 m2}((z+z')^{-1})`.
///
/// The convergence condition is read as `|det z| < |det z'|` on the complex determinants.
pub fn inverse_addition_sum(
    j: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    z: &CQuat,
    zp: &CQuat,
    j_max: HalfInt,
    tol: f64,
) -> Result<SeriesValue> {
    j.check_projection(m1)?;
    j.check_projection(m2)?;
    if z.det().norm() >= zp.det().norm() {
        return Err(Error::InvalidArgument(format!(
            "inverse addition series needs |det z| < |det z'|, got {} >= {}",
            z.det().norm(),
            zp.det().norm()
        )));
    }
    let yinv = zp.inverse()?;
    let dety_inv = zp.det().inv();
    let (j2, a, b) = (j.twice(), m1.twice(), m2.twice());
    let mut total = C64::new(0.0, 0.0);
    let mut blocks = Vec::new();
    for jp in 0..=j_max.twice() {
        let jj = j2 + jp;
        let mut block = C64::new(0.0, 0.0);
        for ap in (-jp..=jp).step_by(2) {
            for bp in (-jp..=jp).step_by(2) {
                let (aa, bb) = (a + bp, b + ap);
                block += d_x2(jp, ap, bp, z) * d_x2(jj, aa, bb, &yinv)
                    * (sign(jp) * sig_x2(jp, ap) * sig_x2(jp, bp) / (sig_x2(jj, aa) * sig_x2(jj, bb)));
            }
        }
        total += block;
        blocks.push(block.norm());
    }
    let scale = sig_x2(j2, a) * sig_x2(j2, b);
    let tail = geometric_tail(&blocks) * scale * dety_inv.norm();
    if tail > tol {
        return Err(Error::TruncationNotConverged { tail, tol });
    }
    Ok(SeriesValue { value: total * dety_inv * scale, tail_estimate: tail })
}

/// `sum_n D^j_{m1 n}(z) D^j_{n m2}(z')`.
pub fn product_expansion(j: HalfInt, m1: HalfInt, m2: HalfInt, z: &CQuat, zp: &CQuat) -> Result<C64> {
    j.check_projection(m1)?;
    j.check_projection(m2)?;
    Ok(j
        .projections()
        .map(|n| d_x2(j.twice(), m1.twice(), n.twice(), z) * d_x2(j.twice(), n.twice(), m2.twice(), zp))
        .sum())
}

pub mod exact {
    //! Exact polynomial form of the D-functions, used to certify harmonicity.

    use std::collections::BTreeMap;

    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    use super::big_fact;

    /// Gaussian rational `re + i im`.
    #[derive(Debug, Clone, PartialEq)]
    pub struct GaussRat {
        pub re: BigRational,
        pub im: BigRational,
    }

    impl GaussRat {
        pub(crate) fn new(re: i64, im: i64) -> Self {
            GaussRat { re: BigRational::from_integer(re.into()), im: BigRational::from_integer(im.into()) }
        }

        pub fn is_zero(&self) -> bool {
            self.re.is_zero() && self.im.is_zero()
        }

        pub(crate) fn mul(&self, o: &GaussRat) -> GaussRat {
            GaussRat { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
        }

        pub(crate) fn add_assign(&mut self, o: &GaussRat) {
            self.re += &o.re;
            self.im += &o.im;
        }

        pub(crate) fn scale(&self, r: &BigRational) -> GaussRat {
            GaussRat { re: &self.re * r, im: &self.im * r }
        }
    }

    /// Polynomial in `(z1, z2, z3, z4)`, keyed by exponents.
    pub type ExactPoly = BTreeMap<[u32; 4], GaussRat>;

    pub(crate) fn poly_mul(p: &ExactPoly, q: &ExactPoly) -> ExactPoly {
        let mut out = ExactPoly::new();
        for (e1, c1) in p {
            for (e2, c2) in q {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]];
                let c = c1.mul(c2);
                out.entry(e).or_insert_with(|| GaussRat::new(0, 0)).add_assign(&c);
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    pub(crate) fn poly_pow(p: &ExactPoly, n: i32) -> ExactPoly {
        let mut out = ExactPoly::new();
        out.insert([0; 4], GaussRat::new(1, 0));
        for _ in 0..n {
            out = poly_mul(&out, p);
        }
        out
    }

    pub(crate) fn linear(coeffs: [(i64, i64); 4]) -> ExactPoly {
        let mut p = ExactPoly::new();
        for (i, (re, im)) in coeffs.into_iter().enumerate() {
            if re != 0 || im != 0 {
                let mut e = [0; 4];
                e[i] = 1;
                p.insert(e, GaussRat::new(re, im));
            }
        }
        p
    }

    /// `D^j_{m1 m2}` without its constant square-root prefactor, as an exact polynomial.
    pub fn d_polynomial_x2(j2: i32, m1: i32, m2: i32) -> ExactPoly {
        // variables ordered (z1, z2, z3, z4)
        let a = linear([(0, 0), (0, 0), (0, 1), (1, 0)]);
        let b = linear([(0, 0), (0, 0), (0, -1), (1, 0)]);
        let c = linear([(0, 1), (-1, 0), (0, 0), (0, 0)]);
        let d = linear([(0, 1), (1, 0), (0, 0), (0, 0)]);
        let (jp1, jm2) = ((j2 + m1) / 2, (j2 - m2) / 2);
        let shift = (m2 - m1) / 2;
        let mut out = ExactPoly::new();
        for t in (-shift).max(0)..=jm2.min(jp1) {
            let (e1, e2, e3) = (jm2 - t, jp1 - t, t + shift);
            let term = poly_mul(&poly_mul(&poly_pow(&a, e1), &poly_pow(&b, e2)), &poly_mul(&poly_pow(&c, e3), &poly_pow(&d, t)));
            let w = BigRational::new(BigInt::one(), big_fact(e1) * big_fact(e2) * big_fact(e3) * big_fact(t));
            for (e, cf) in term {
                out.entry(e).or_insert_with(|| GaussRat::new(0, 0)).add_assign(&cf.scale(&w));
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Exact four-variable Laplacian.
    pub fn laplacian(p: &ExactPoly) -> ExactPoly {
        let mut out = ExactPoly::new();
        for (e, c) in p {
            for v in 0..4 {
                if e[v] >= 2 {
                    let mut f = *e;
                    f[v] -= 2;
                    let k = BigRational::from_integer(BigInt::from(e[v] * (e[v] - 1)));
                    out.entry(f).or_insert_with(|| GaussRat::new(0, 0)).add_assign(&c.scale(&k));
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// True when the Laplacian of `D^j_{m1 m2}` vanishes identically.
    pub fn is_harmonic_x2(j2: i32, m1: i32, m2: i32) -> bool {
        laplacian(&d_polynomial_x2(j2, m1, m2)).is_empty()
    }
}
