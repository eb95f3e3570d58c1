//! Matrix elements of `U^(varsigma,s)(g)` in the Fock-Bargmann basis.
//!
//! `U(g) f(z) = det(X)^{-varsigma-s} D^s(z b* + a*) f(h.z)` with `h = g^{-1} = (a, b)`,
//! `X = -conj(b) z + conj(a)` and `h.z = (a z + b) X^{-1}`. The non-integer power is taken as
//! `det(conj a)^{-p} (det X / det(conj a))^{-p}`, both principal, which is the branch continuous
//! from `z = 0`.
//!
//! Every element is a finite sum: the image of a degree-`l` basis function expands in
//! homogeneous pieces, and the coefficient of a degree-`l'` basis function only collects terms
//! of total degree `l'`. The engine therefore builds the image as a polynomial up to the output
//! degree and reads the coefficients off; nothing is truncated below that degree.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::cquat::{dot3, CQuat, C64};
use crate::error::{Error, Result};
use crate::fockbasis::{spin_level, RepLabel, ScalarIndex, SpinIndex, Truncation};
use crate::gegenbauer::{coeff_a, coeff_a_poch};
use crate::halfint::HalfInt;
use crate::harmonics::{d_from_y_coeff, d_poly_x2, level_size, y_unchecked, HarmonicPoly};
use crate::sp4::{denominator, domain_action, Sp4Element};
use crate::wigner::{cg_x2, d_matrix_x2, phase_x2, pos, sig_x2, sign};

/// Tolerance on the scalar part of `w` and `u`.
pub const PURITY_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);

/// How an element was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Series,
    B0,
}

impl Route {
    pub fn as_str(&self) -> &'static str {
        match self {
            Route::Series => "series",
            Route::B0 => "b0",
        }
    }
}

/// A matrix element with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementValue {
    pub value: C64,
    pub tail_estimate: f64,
    pub route: Route,
    pub l_max_used: i32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMatrixElementRequest {
    pub rep: RepLabel,
    pub g: Sp4Element,
    pub in_idx: ScalarIndex,
    pub out_idx: ScalarIndex,
    pub trunc: Truncation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMatrixElementRequest {
    pub rep: RepLabel,
    pub g: Sp4Element,
    pub in_idx: SpinIndex,
    pub out_idx: SpinIndex,
    pub trunc: Truncation,
}

/// Whether `g` takes the exact block-diagonal route.
pub fn is_b0(g: &Sp4Element) -> bool {
    g.b.det().norm() < 1e-12 * (1.0 + g.a.det().norm())
}

/// Acting block `h = g^{-1}`.
pub fn acting_block(g: &Sp4Element) -> Result<Sp4Element> {
    g.inverse()
}

/// `det(-conj(b) z + conj(a))^{-p}` on the branch continuous from `z = 0`.
pub fn multiplier(h: &Sp4Element, z: &[C64; 3], p: f64) -> Result<C64> {
    let da = h.a.conj_complex().det();
    if da.norm() <= crate::cquat::EPS_SINGULAR {
        return Err(Error::SingularBlock(format!("|det conj(a)| = {:e}", da.norm())));
    }
    let dx = denominator(h, z).det();
    if dx.norm() <= crate::cquat::EPS_SINGULAR {
        return Err(Error::SingularDenominator { det_abs: dx.norm() });
    }
    Ok(da.powf(-p) * (dx / da).powf(-p))
}

/// Pointwise `(U(g) f)(z)` for `f = sum c_nu F_nu` in the scalar representation.
pub fn apply_scalar_action(rep: &RepLabel, g: &Sp4Element, f: &[(ScalarIndex, C64)], z: &[C64; 3]) -> Result<C64> {
    let h = acting_block(g)?;
    let hz = domain_action(&h, z)?;
    let zz = dot3(&hz, &hz);
    let mut v = ZERO;
    for (idx, c) in f {
        let a = coeff_a(rep.varsigma, idx.l, idx.k)?.sqrt();
        v += *c * zz.powi(idx.k) * y_unchecked(idx.big_l(), idx.m, &hz) * a;
    }
    Ok(multiplier(&h, z, rep.varsigma)? * v)
}

/// `z b* + a*` for the acting block.
pub fn spin_multiplier_quaternion(h: &Sp4Element, z: &[C64; 3]) -> CQuat {
    CQuat::pure(*z) * h.b.adjoint() + h.a.adjoint()
}

/// Pointwise `(U(g) f)(z)` in the spin representation, as a `(2s+1)`-vector.
pub fn apply_spin_action(rep: &RepLabel, g: &Sp4Element, f: &[(SpinIndex, C64)], z: &[C64; 3]) -> Result<DVector<C64>> {
    let h = acting_block(g)?;
    let hz = domain_action(&h, z)?;
    let n = rep.dim();
    let mut v = DVector::<C64>::zeros(n);
    for (idx, c) in f {
        v += crate::fockbasis::spin_basis(rep, idx, &hz)? * *c;
    }
    let ds = d_matrix_x2(rep.spin.twice(), &spin_multiplier_quaternion(&h, z));
    Ok(ds * v * multiplier(&h, z, rep.shifted())?)
}

/// Corrected `Y`-from-`D` weight: `Y_{Lm} = sum_{m2 - m1 = m} A D^{L/2}_{m1 m2}`.
pub(crate) fn a_coef(big_l: i32, m: i32, m1: i32, m2: i32) -> C64 {
    phase_x2(m1)
        * (2f64.powi(-big_l) / sig_x2(2 * big_l, 2 * m)
            * (f64::from(2 * big_l + 1) / (4.0 * PI)).sqrt()
            * sig_x2(big_l, m1)
            * sig_x2(big_l, m2))
}

/// Harmonic coefficients of `det(1 + z conj(w))^{-lambda}` up to degree `l_max`.
fn det_power_poly(lambda: f64, w: &[C64; 3], l_max: i32) -> HarmonicPoly {
    let mut p = HarmonicPoly::zeros(l_max);
    let ww = dot3(w, w);
    for l in 0..=l_max {
        for k in 0..=l / 2 {
            let a = coeff_a_poch(lambda, l, k);
            if a == 0.0 {
                continue;
            }
            let big_l = l - 2 * k;
            for m in -big_l..=big_l {
                p.add_term(l, k, m, (ww.powi(k) * y_unchecked(big_l, m, w)).conj() * a);
            }
        }
    }
    p
}

/// `D^j(q z)` as polynomials in `z`, indexed `[pos(m1)][pos(m2)]`.
fn translated_d_polys(j2: i32, dq: &DMatrix<C64>) -> Vec<Vec<HarmonicPoly>> {
    let ms: Vec<i32> = (-j2..=j2).rev().step_by(2).collect();
    let base: Vec<Vec<HarmonicPoly>> = ms.iter().map(|&n| ms.iter().map(|&m2| d_poly_x2(j2, n, m2, j2)).collect()).collect();
    ms.iter()
        .map(|&m1| {
            ms.iter()
                .map(|&m2| {
                    let mut p = HarmonicPoly::zeros(j2);
                    for &n in &ms {
                        let c = dq[(pos(j2, m1), pos(j2, n))];
                        if c != ZERO {
                            p.add_scaled(&base[pos(j2, n)][pos(j2, m2)], c);
                        }
                    }
                    p
                })
                .collect()
        })
        .collect()
}

fn pure_part(q: &CQuat, what: &str) -> Result<[C64; 3]> {
    let scale = 1.0 + q.max_abs();
    if q.w4.norm() > PURITY_TOL * scale {
        return Err(Error::NotPure { w4_abs: q.w4.norm() }).map_err(|e| match e {
            Error::NotPure { w4_abs } => Error::SingularBlock(format!("{what} is not pure: |w4| = {w4_abs:e}")),
            other => other,
        });
    }
    Ok(q.v)
}

type DCache = RwLock<HashMap<i32, Arc<DMatrix<C64>>>>;
type PolyCache<K> = RwLock<HashMap<K, Arc<HarmonicPoly>>>;

/// Per-element cache of everything the series needs: acting block, `w`, `u`, D-matrices and
/// the intermediate polynomials.
pub struct Engine {
    pub g: Sp4Element,
    pub h: Sp4Element,
    pub l_max: i32,
    b0: bool,
    w: [C64; 3],
    u: [C64; 3],
    det_abar: C64,
    det_b: C64,
    a_bar_inv: CQuat,
    d_cache: [DCache; 4],
    term_a: PolyCache<(u64, i32)>,
    term_b: PolyCache<i32>,
    term_c: PolyCache<(i32, i32)>,
    images: PolyCache<(u64, i32, i32, i32)>,
    spin_mult: RwLock<HashMap<i32, Arc<Vec<Vec<HarmonicPoly>>>>>,
}

impl Engine {
    /// Prepares `g` for elements of output degree up to `l_max`.
    pub fn new(g: &Sp4Element, l_max: i32) -> Result<Self> {
        if l_max < 0 {
            return Err(Error::InvalidArgument(format!("l_max must be non-negative, got {l_max}")));
        }
        let h = acting_block(g)?;
        let a_bar = h.a.conj_complex();
        let det_abar = a_bar.det();
        if det_abar.norm() <= 1e-12 {
            return Err(Error::SingularBlock(format!("|det conj(a)| = {:e}", det_abar.norm())));
        }
        let a_bar_inv = a_bar.inverse()?;
        let b0 = is_b0(g);
        let det_b = h.b.det();
        let (w, u) = if b0 {
            ([ZERO; 3], [ZERO; 3])
        } else {
            let b_bar = h.b.conj_complex();
            if det_b.norm() <= 1e-12 {
                return Err(Error::SingularBlock(format!("b is nonzero but null: |det b| = {:e}", det_b.norm())));
            }
            let w = h.b.conj_quat() * h.a.conj_quat().inverse()?;
            let u = b_bar.inverse()? * a_bar;
            (pure_part(&w, "w")?, pure_part(&u, "u")?)
        };
        Ok(Engine {
            g: *g,
            h,
            l_max,
            b0,
            w,
            u,
            det_abar,
            det_b,
            a_bar_inv,
            d_cache: Default::default(),
            term_a: Default::default(),
            term_b: Default::default(),
            term_c: Default::default(),
            images: Default::default(),
            spin_mult: Default::default(),
        })
    }

    pub fn is_b0(&self) -> bool {
        self.b0
    }

    /// D-matrix cache: 0 = `a`, 1 = `-conj(b)`, 2 = `conj(a)^{-1}`, 3 = `b`.
    fn dmat(&self, which: usize, j2: i32) -> Arc<DMatrix<C64>> {
        if let Some(m) = self.d_cache[which].read().unwrap().get(&j2) {
            return Arc::clone(m);
        }
        let q = match which {
            0 => self.h.a,
            1 => -self.h.b.conj_complex(),
            2 => self.a_bar_inv,
            _ => self.h.b,
        };
        let m = Arc::new(d_matrix_x2(j2, &q));
        self.d_cache[which].write().unwrap().insert(j2, Arc::clone(&m));
        m
    }

    fn cached<K: std::hash::Hash + Eq + Copy>(cache: &PolyCache<K>, key: K, build: impl FnOnce() -> HarmonicPoly) -> Arc<HarmonicPoly> {
        if let Some(p) = cache.read().unwrap().get(&key) {
            return Arc::clone(p);
        }
        let p = Arc::new(build());
        cache.write().unwrap().entry(key).or_insert_with(|| Arc::clone(&p)).clone()
    }

    /// `det(conj a)^{-lambda} det(1 + z conj w)^{-lambda}`, `lambda = varsigma + k - 1`.
    fn term_a(&self, varsigma: f64, k: i32) -> Arc<HarmonicPoly> {
        Self::cached(&self.term_a, (varsigma.to_bits(), k), || {
            let lambda = varsigma + f64::from(k) - 1.0;
            let mut p = det_power_poly(lambda, &self.w, self.l_max);
            p.scale(self.det_abar.powf(-lambda));
            p
        })
    }

    /// `det(b)^k det(1 + z conj u)^k`, a polynomial of degree `2k`.
    fn term_b(&self, k: i32) -> Arc<HarmonicPoly> {
        Self::cached(&self.term_b, k, || {
            let deg = (2 * k).min(self.l_max);
            let mut p = det_power_poly(-f64::from(k), &self.u, deg);
            p.scale(self.det_b.powi(k));
            p
        })
    }

    /// `det(X)^{-1} Y_{Lm}(h.z)` expanded to degree `l_max`.
    fn term_c(&self, big_l: i32, m: i32) -> Arc<HarmonicPoly> {
        Self::cached(&self.term_c, (big_l, m), || self.build_term_c(big_l, m))
    }

    fn build_term_c(&self, big_l: i32, m: i32) -> HarmonicPoly {
        let lm = self.l_max;
        let inv_det = self.det_abar.inv();
        let mut out = HarmonicPoly::zeros(lm);
        let m1s: Vec<(i32, i32, C64)> = (-big_l..=big_l)
            .step_by(2)
            .filter_map(|m1| {
                let m2 = m1 + 2 * m;
                (m2.abs() <= big_l).then(|| (m1, m2, a_coef(big_l, m, m1, m2) * (sig_x2(big_l, m2) / sig_x2(big_l, m1))))
            })
            .collect();
        for l1 in 0..=big_l.min(lm) {
            let l2 = big_l - l1;
            let db = self.dmat(3, l2);
            let q1 = translated_d_polys(l1, &self.dmat(0, l1));
            let ms1: Vec<i32> = (-l1..=l1).step_by(2).collect();
            let ms2: Vec<i32> = (-l2..=l2).step_by(2).collect();
            for l3 in 0..=(lm - l1) {
                let l4 = big_l + l3;
                let d4 = self.dmat(2, l4);
                let q3 = translated_d_polys(l3, &self.dmat(1, l3));
                let ms3: Vec<i32> = (-l3..=l3).step_by(2).collect();
                let s3 = sign(l3);
                for &m11 in &ms1 {
                    for &m12 in &ms1 {
                        let mut r = HarmonicPoly::zeros(l3);
                        let mut any = false;
                        for &m31 in &ms3 {
                            for &m32 in &ms3 {
                                let mut t = ZERO;
                                for &(m1, m2, acf) in &m1s {
                                    let m21 = m1 - m11;
                                    if m21.abs() > l2 {
                                        continue;
                                    }
                                    let m42 = m2 + m31;
                                    if m42.abs() > l4 {
                                        continue;
                                    }
                                    for &m22 in &ms2 {
                                        let m41 = m12 + m22 + m32;
                                        if m41.abs() > l4 {
                                            continue;
                                        }
                                        let cb = db[(pos(l2, m21), pos(l2, m22))] * (sig_x2(l2, m21) * sig_x2(l2, m22));
                                        t += acf * cb * d4[(pos(l4, m41), pos(l4, m42))]
                                            / (sig_x2(l4, m41) * sig_x2(l4, m42));
                                    }
                                }
                                if t == ZERO {
                                    continue;
                                }
                                let w = s3 * sig_x2(l1, m11) * sig_x2(l1, m12) * sig_x2(l3, m31) * sig_x2(l3, m32);
                                r.add_scaled(&q3[pos(l3, m31)][pos(l3, m32)], t * inv_det * w);
                                any = true;
                            }
                        }
                        if any {
                            let prod = q1[pos(l1, m11)][pos(l1, m12)].mul(&r, l1 + l3);
                            out.add_scaled(&prod, C64::new(1.0, 0.0));
                        }
                    }
                }
            }
        }
        out
    }

    /// Image `U(g) F_{l,k,m}` of a scalar basis function at label `varsigma`, up to degree `l_max`.
    pub fn scalar_image(&self, varsigma: f64, idx: &ScalarIndex) -> Result<Arc<HarmonicPoly>> {
        if self.b0 {
            return Err(Error::InvalidArgument("block-diagonal element: use the exact b = 0 route".into()));
        }
        let a_in = coeff_a(varsigma, idx.l, idx.k)?.sqrt();
        let key = (varsigma.to_bits(), idx.l, idx.k, idx.m);
        Ok(Self::cached(&self.images, key, || {
            let bc = self.term_b(idx.k).mul(&self.term_c(idx.big_l(), idx.m), self.l_max);
            let mut p = self.term_a(varsigma, idx.k).mul(&bc, self.l_max);
            p.scale(C64::new(a_in, 0.0));
            p
        }))
    }

    /// `D^s(z b* + a*)` as polynomials, indexed `[pos(n1)][pos(rho)]`.
    fn spin_multiplier_polys(&self, s2: i32) -> Arc<Vec<Vec<HarmonicPoly>>> {
        if let Some(p) = self.spin_mult.read().unwrap().get(&s2) {
            return Arc::clone(p);
        }
        let a_star = self.h.a.adjoint();
        let b_star = self.h.b.adjoint();
        let ms: Vec<i32> = (-s2..=s2).rev().step_by(2).collect();
        let mut out = vec![vec![HarmonicPoly::zeros(s2); ms.len()]; ms.len()];
        for jp in 0..=s2 {
            let jr = s2 - jp;
            let dy = d_matrix_x2(jp, &a_star);
            let dbs = d_matrix_x2(jr, &b_star);
            // D^{jr}(z b*) = D^{jr}(z) D^{jr}(b*)
            let base: Vec<Vec<HarmonicPoly>> = (-jr..=jr)
                .rev()
                .step_by(2)
                .map(|ar| {
                    (-jr..=jr)
                        .rev()
                        .step_by(2)
                        .map(|br| {
                            let mut p = HarmonicPoly::zeros(jr);
                            for n in (-jr..=jr).step_by(2) {
                                p.add_scaled(&d_poly_x2(jr, ar, n, jr), dbs[(pos(jr, n), pos(jr, br))]);
                            }
                            p
                        })
                        .collect()
                })
                .collect();
            for &n1 in &ms {
                for &rho in &ms {
                    for ap in (-jp..=jp).step_by(2) {
                        for bp in (-jp..=jp).step_by(2) {
                            let (ar, br) = (n1 - ap, rho - bp);
                            if ar.abs() > jr || br.abs() > jr {
                                continue;
                            }
                            let w = sig_x2(jr, ar) * sig_x2(jr, br) * sig_x2(jp, ap) * sig_x2(jp, bp)
                                / (sig_x2(s2, n1) * sig_x2(s2, rho));
                            let c = dy[(pos(jp, ap), pos(jp, bp))] * w;
                            out[pos(s2, n1)][pos(s2, rho)].add_scaled(&base[pos(jr, ar)][pos(jr, br)], c);
                        }
                    }
                }
            }
        }
        let out = Arc::new(out);
        self.spin_mult.write().unwrap().insert(s2, Arc::clone(&out));
        out
    }

    /// Components `[pos(n1)]` of `U(g) F_{l,k,J,M}`.
    pub fn spin_image(&self, rep: &RepLabel, idx: &SpinIndex) -> Result<Vec<HarmonicPoly>> {
        let s2 = rep.spin.twice();
        let big_l = idx.big_l();
        let vs = rep.shifted();
        let mult = self.spin_multiplier_polys(s2);
        let n = (s2 + 1) as usize;
        let mut out = vec![HarmonicPoly::zeros(self.l_max); n];
        for rho in (-s2..=s2).step_by(2) {
            let m2 = idx.m.twice() - rho;
            if m2 % 2 != 0 || (m2 / 2).abs() > big_l {
                continue;
            }
            let cg = cg_x2(s2, rho, 2 * big_l, m2, idx.j.twice(), idx.m.twice());
            if cg == 0.0 {
                continue;
            }
            let img = self.scalar_image(vs, &ScalarIndex { l: idx.l, k: idx.k, m: m2 / 2 })?;
            for n1 in (-s2..=s2).step_by(2) {
                let p = mult[pos(s2, n1)][pos(s2, rho)].mul(&img, self.l_max);
                out[pos(s2, n1)].add_scaled(&p, C64::new(cg, 0.0));
            }
        }
        Ok(out)
    }
}

/// Coefficient of `F_{l',k',J',M'}` in a vector polynomial with components `[pos(n1)]`.
fn spin_coefficient(comps: &[HarmonicPoly], s2: i32, varsigma_s: f64, out: &SpinIndex) -> Result<C64> {
    let big_l = out.big_l();
    let mut v = ZERO;
    for n1 in (-s2..=s2).step_by(2) {
        let m2 = out.m.twice() - n1;
        if m2 % 2 != 0 || (m2 / 2).abs() > big_l {
            continue;
        }
        let cg = cg_x2(s2, n1, 2 * big_l, m2, out.j.twice(), out.m.twice());
        if cg != 0.0 {
            v += comps[pos(s2, n1)].get(out.l, out.k, m2 / 2) * cg;
        }
    }
    Ok(v / coeff_a(varsigma_s, out.l, out.k)?.sqrt())
}

fn check_out_degree(l_out: i32, trunc: &Truncation) -> Result<()> {
    if l_out > trunc.l_max {
        return Err(Error::InvalidArgument(format!(
            "output degree {l_out} exceeds l_max = {}; the element needs l_max >= {l_out}",
            trunc.l_max
        )));
    }
    Ok(())
}

/// Coefficient of `(z.z)^{(L-l')/2} Y_{l'm'}` in `D^{L/2}_{n1 n2}((0,z))`.
fn b14(big_l: i32, lp: i32, n1: i32, n2: i32, mp: i32) -> C64 {
    if (n2 - n1) / 2 != mp || (n2 - n1) % 2 != 0 {
        return ZERO;
    }
    d_from_y_coeff(big_l, lp, n1, n2)
}

/// Exact block-diagonal element `<F_{l,k',m'}, U F_{l,k,m}>` for acting block `a`.
fn scalar_b0_acting(varsigma: f64, a: &CQuat, l: i32, k: i32, m: i32, kp: i32, mp: i32) -> Result<C64> {
    if kp < k {
        return Ok(ZERO);
    }
    let big_l = l - 2 * k;
    let lp = l - 2 * kp;
    let a_bar = a.conj_complex();
    let da = d_matrix_x2(big_l, a);
    let dai = d_matrix_x2(big_l, &a_bar.inverse()?);
    let mut s = ZERO;
    for m1 in (-big_l..=big_l).step_by(2) {
        let m2 = m1 + 2 * m;
        if m2.abs() > big_l {
            continue;
        }
        let acf = a_coef(big_l, m, m1, m2);
        for n1 in (-big_l..=big_l).step_by(2) {
            let n2 = n1 + 2 * mp;
            if n2.abs() > big_l {
                continue;
            }
            let c = b14(big_l, lp, n1, n2, mp);
            if c == ZERO {
                continue;
            }
            s += acf * da[(pos(big_l, m1), pos(big_l, n1))] * dai[(pos(big_l, n2), pos(big_l, m2))] * c;
        }
    }
    let ratio = (coeff_a(varsigma, l, k)? / coeff_a(varsigma, l, kp)?).sqrt();
    Ok(s * ratio * a_bar.det().powf(-varsigma - f64::from(k)) * a.det().powi(k))
}

fn require_b0(g: &Sp4Element) -> Result<Sp4Element> {
    if !is_b0(g) {
        return Err(Error::InvalidArgument("the exact route needs a block-diagonal element (b = 0)".into()));
    }
    let h = acting_block(g)?;
    Ok(h)
}

/// Exact scalar element for block-diagonal `g`; zero off the degree diagonal.
pub fn scalar_matrix_element_b0(rep: &RepLabel, g: &Sp4Element, in_idx: &ScalarIndex, out_idx: &ScalarIndex) -> Result<C64> {
    let h = require_b0(g)?;
    if in_idx.l != out_idx.l {
        return Ok(ZERO);
    }
    scalar_b0_acting(rep.varsigma, &h.a, in_idx.l, in_idx.k, in_idx.m, out_idx.k, out_idx.m)
}

/// Exact spin element for block-diagonal `g`.
pub fn spin_matrix_element_b0(rep: &RepLabel, g: &Sp4Element, in_idx: &SpinIndex, out_idx: &SpinIndex) -> Result<C64> {
    let h = require_b0(g)?;
    if in_idx.l != out_idx.l {
        return Ok(ZERO);
    }
    let s2 = rep.spin.twice();
    let vs = rep.shifted();
    let ds = d_matrix_x2(s2, &h.a.adjoint());
    let (big_l, big_lp) = (in_idx.big_l(), out_idx.big_l());
    let mut v = ZERO;
    for rho in (-s2..=s2).step_by(2) {
        let m2 = in_idx.m.twice() - rho;
        if m2 % 2 != 0 || (m2 / 2).abs() > big_l {
            continue;
        }
        let cg_in = cg_x2(s2, rho, 2 * big_l, m2, in_idx.j.twice(), in_idx.m.twice());
        if cg_in == 0.0 {
            continue;
        }
        for rhop in (-s2..=s2).step_by(2) {
            let mp2 = out_idx.m.twice() - rhop;
            if mp2 % 2 != 0 || (mp2 / 2).abs() > big_lp {
                continue;
            }
            let cg_out = cg_x2(s2, rhop, 2 * big_lp, mp2, out_idx.j.twice(), out_idx.m.twice());
            if cg_out == 0.0 {
                continue;
            }
            let u = scalar_b0_acting(vs, &h.a, in_idx.l, in_idx.k, m2 / 2, out_idx.k, mp2 / 2)?;
            v += u * ds[(pos(s2, rhop), pos(s2, rho))] * (cg_in * cg_out);
        }
    }
    Ok(v)
}

/// Scalar element, routed to the exact formula when `b` vanishes.
pub fn scalar_matrix_element(req: &ScalarMatrixElementRequest) -> Result<ElementValue> {
    if req.rep.spin != HalfInt::ZERO {
        return Err(Error::InvalidArgument("scalar elements need s = 0".into()));
    }
    req.trunc.validate()?;
    if is_b0(&req.g) {
        let v = scalar_matrix_element_b0(&req.rep, &req.g, &req.in_idx, &req.out_idx)?;
        return Ok(ElementValue { value: v, tail_estimate: 0.0, route: Route::B0, l_max_used: req.out_idx.l });
    }
    check_out_degree(req.out_idx.l, &req.trunc)?;
    let engine = Engine::new(&req.g, req.out_idx.l)?;
    scalar_element_with(&engine, &req.rep, &req.in_idx, &req.out_idx)
}

/// Scalar element using a prepared engine.
pub fn scalar_element_with(engine: &Engine, rep: &RepLabel, in_idx: &ScalarIndex, out_idx: &ScalarIndex) -> Result<ElementValue> {
    if engine.is_b0() {
        let v = scalar_matrix_element_b0(rep, &engine.g, in_idx, out_idx)?;
        return Ok(ElementValue { value: v, tail_estimate: 0.0, route: Route::B0, l_max_used: out_idx.l });
    }
    if out_idx.l > engine.l_max {
        return Err(Error::InvalidArgument(format!("output degree {} exceeds engine l_max = {}", out_idx.l, engine.l_max)));
    }
    let img = engine.scalar_image(rep.varsigma, in_idx)?;
    let v = img.get(out_idx.l, out_idx.k, out_idx.m) / coeff_a(rep.varsigma, out_idx.l, out_idx.k)?.sqrt();
    Ok(ElementValue { value: v, tail_estimate: 0.0, route: Route::Series, l_max_used: engine.l_max })
}

/// Spin element, routed to the exact formula when `b` vanishes.
pub fn spin_matrix_element(req: &SpinMatrixElementRequest) -> Result<ElementValue> {
    req.trunc.validate()?;
    if is_b0(&req.g) {
        let v = spin_matrix_element_b0(&req.rep, &req.g, &req.in_idx, &req.out_idx)?;
        return Ok(ElementValue { value: v, tail_estimate: 0.0, route: Route::B0, l_max_used: req.out_idx.l });
    }
    check_out_degree(req.out_idx.l, &req.trunc)?;
    let engine = Engine::new(&req.g, req.out_idx.l)?;
    spin_element_with(&engine, &req.rep, &req.in_idx, &req.out_idx)
}

/// Spin element using a prepared engine.
pub fn spin_element_with(engine: &Engine, rep: &RepLabel, in_idx: &SpinIndex, out_idx: &SpinIndex) -> Result<ElementValue> {
    if engine.is_b0() {
        let v = spin_matrix_element_b0(rep, &engine.g, in_idx, out_idx)?;
        return Ok(ElementValue { value: v, tail_estimate: 0.0, route: Route::B0, l_max_used: out_idx.l });
    }
    if out_idx.l > engine.l_max {
        return Err(Error::InvalidArgument(format!("output degree {} exceeds engine l_max = {}", out_idx.l, engine.l_max)));
    }
    let comps = engine.spin_image(rep, in_idx)?;
    let v = spin_coefficient(&comps, rep.spin.twice(), rep.shifted(), out_idx)?;
    Ok(ElementValue { value: v, tail_estimate: 0.0, route: Route::Series, l_max_used: engine.l_max })
}

/// All elements from degree `l_in` to degree `l_out`; rows follow [`spin_level`] at `l_out`,
/// columns at `l_in`. Scalar representations use the same layout with `J = l - 2k`, `M = m`.
pub fn matrix_block(rep: &RepLabel, g: &Sp4Element, l_in: i32, l_out: i32, trunc: &Truncation) -> Result<DMatrix<C64>> {
    trunc.validate()?;
    if l_in < 0 || l_out < 0 {
        return Err(Error::InvalidArgument("degrees must be non-negative".into()));
    }
    let engine = if is_b0(g) { None } else {
        check_out_degree(l_out, trunc)?;
        Some(Engine::new(g, l_out)?)
    };
    matrix_block_with(rep, g, engine.as_ref(), l_in, l_out)
}

/// [`matrix_block`] with an optional prepared engine (required when `b != 0`).
pub fn matrix_block_with(rep: &RepLabel, g: &Sp4Element, engine: Option<&Engine>, l_in: i32, l_out: i32) -> Result<DMatrix<C64>> {
    let ins = spin_level(rep.spin, l_in);
    let outs = spin_level(rep.spin, l_out);
    let cols: Vec<Vec<C64>> = ins
        .par_iter()
        .map(|i| -> Result<Vec<C64>> {
            match engine {
                Some(e) if !e.is_b0() => {
                    let comps = e.spin_image(rep, i)?;
                    outs.iter().map(|o| spin_coefficient(&comps, rep.spin.twice(), rep.shifted(), o)).collect()
                }
                _ => outs.iter().map(|o| spin_matrix_element_b0(rep, g, i, o)).collect(),
            }
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(outs.len(), ins.len(), |r, c| cols[c][r]))
}

/// Number of rows of a block at degree `l`.
pub fn block_size(rep: &RepLabel, l: i32) -> usize {
    level_size(l) * rep.dim()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sp4::random_element;

    fn zpt() -> [C64; 3] {
        [C64::new(0.1, -0.05), C64::new(-0.08, 0.12), C64::new(0.06, 0.03)]
    }

    #[test]
    fn identity_is_b0_identity() {
        let rep = RepLabel::scalar(4.0).unwrap();
        let i = ScalarIndex::new(2, 0, 1).unwrap();
        let j = ScalarIndex::new(2, 1, 0).unwrap();
        let e = Sp4Element::IDENTITY;
        assert!((scalar_matrix_element_b0(&rep, &e, &i, &i).unwrap() - 1.0).norm() < 1e-13);
        assert!(scalar_matrix_element_b0(&rep, &e, &i, &j).unwrap().norm() < 1e-13);
    }

    #[test]
    fn series_image_matches_oracle() {
        let rep = RepLabel::scalar(4.0).unwrap();
        let g = random_element(3, 0.2);
        let engine = Engine::new(&g, 8).unwrap();
        let z = zpt();
        for idx in [ScalarIndex::new(0, 0, 0).unwrap(), ScalarIndex::new(2, 1, 0).unwrap(), ScalarIndex::new(1, 0, -1).unwrap()] {
            let img = engine.scalar_image(4.0, &idx).unwrap();
            let want = apply_scalar_action(&rep, &g, &[(idx, C64::new(1.0, 0.0))], &z).unwrap();
            assert!((img.eval(&z) - want).norm() < 1e-5, "{idx:?}");
        }
    }

    #[test]
    fn spin_multiplier_polys_match_direct() {
        let g = random_element(5, 0.3);
        let engine = Engine::new(&g, 4).unwrap();
        let z = zpt();
        for s2 in 0..3 {
            let m = engine.spin_multiplier_polys(s2);
            let d = d_matrix_x2(s2, &spin_multiplier_quaternion(&engine.h, &z));
            for r in 0..=s2 as usize {
                for c in 0..=s2 as usize {
                    assert!((m[r][c].eval(&z) - d[(r, c)]).norm() < 1e-13);
                }
            }
        }
    }
}
