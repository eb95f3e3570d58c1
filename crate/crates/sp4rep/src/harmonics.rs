//! Solid spherical harmonics of three complex variables, their product linearization,
//! conversions to and from D-functions, and polynomials in the basis
//! `P_{l,k,m}(z) = (z.z)^k Y_{l-2k,m}(z)`.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use crate::cquat::{dot3, CQuat, C64};
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::wigner::{d_x2, factorial, is_projection, phase_x2, sig_x2, sign, three_j_x2};

/// Label `(l, m)` of a solid harmonic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SolidHarmonicIndex {
    pub l: i32,
    pub m: i32,
}

impl SolidHarmonicIndex {
    pub fn new(l: i32, m: i32) -> Result<Self> {
        if l < 0 || m.abs() > l {
            return Err(Error::IndexOutOfRange(format!("solid harmonic needs |m| <= l, got l = {l}, m = {m}")));
        }
        Ok(SolidHarmonicIndex { l, m })
    }
}

/// `(x)_n` rising factorial.
fn rising(x: f64, n: i32) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * (x + f64::from(i)))
}

/// Unchecked evaluation of `Y_{lm}(z)`.
pub(crate) fn y_unchecked(l: i32, m: i32, z: &[C64; 3]) -> C64 {
    let i = C64::new(0.0, 1.0);
    let am = m.abs();
    let (w, ph) = if m >= 0 { (z[0] + i * z[1], sign(m)) } else { (z[0] - i * z[1], 1.0) };
    let zz = dot3(z, z);
    let norm = ((2 * l + 1) as f64 * factorial(l - am) / (4.0 * PI * factorial(l + am))).sqrt();
    let mut s = C64::new(0.0, 0.0);
    let mut k = l;
    // k runs down from l in steps of two so zz powers grow
    let mut zzp = C64::new(1.0, 0.0);
    while k >= am {
        let g = rising(f64::from(k - l + 1) / 2.0, l);
        s += z[2].powi(k - am) * zzp * (g / (factorial(k - am) * factorial(l - k)));
        zzp *= zz;
        k -= 2;
    }
    s * w.powi(am) * (ph * norm * 2f64.powi(l))
}

/// `Y_{lm}(z)`, a homogeneous harmonic polynomial of degree `l`.
pub fn solid_harmonic(l: i32, m: i32, z: &[C64; 3]) -> Result<C64> {
    SolidHarmonicIndex::new(l, m)?;
    Ok(y_unchecked(l, m, z))
}

/// Coefficient of `(z.z)^{(l1+l2-l3)/2} Y_{l3, m1+m2}` in `Y_{l1 m1} Y_{l2 m2}`.
pub fn linearization_coeff(l1: i32, m1: i32, l2: i32, m2: i32, l3: i32) -> f64 {
    let m3 = m1 + m2;
    if (l1 + l2 - l3) % 2 != 0 || m3.abs() > l3 {
        return 0.0;
    }
    let t0 = three_j_x2(2 * l1, 2 * l2, 2 * l3, 0, 0, 0);
    if t0 == 0.0 {
        return 0.0;
    }
    sign(m3)
        * (f64::from((2 * l1 + 1) * (2 * l2 + 1) * (2 * l3 + 1)) / (4.0 * PI)).sqrt()
        * three_j_x2(2 * l1, 2 * l2, 2 * l3, 2 * m1, 2 * m2, -2 * m3)
        * t0
}

/// Linearized product `Y_{l1 m1}(z) Y_{l2 m2}(z)` summed over `l3`.
pub fn product_expand(l1: i32, m1: i32, l2: i32, m2: i32, z: &[C64; 3]) -> Result<C64> {
    SolidHarmonicIndex::new(l1, m1)?;
    SolidHarmonicIndex::new(l2, m2)?;
    let zz = dot3(z, z);
    let m3 = m1 + m2;
    let mut s = C64::new(0.0, 0.0);
    for l3 in ((l1 - l2).abs()..=l1 + l2).step_by(2) {
        if m3.abs() > l3 {
            continue;
        }
        s += zz.powi((l1 + l2 - l3) / 2) * y_unchecked(l3, m3, z) * linearization_coeff(l1, m1, l2, m2, l3);
    }
    Ok(s)
}

/// `Y_{lm}` from the anti-diagonal `m2 - m1 = m` of `D^{l/2}(z)`; the scalar part of `z` drops out.
pub fn y_from_d(l: i32, m: i32, z: &CQuat) -> Result<C64> {
    SolidHarmonicIndex::new(l, m)?;
    let mut s = C64::new(0.0, 0.0);
    for m1 in (-l..=l).step_by(2) {
        let m2 = m1 + 2 * m;
        if m2.abs() > l {
            continue;
        }
        s += phase_x2(m1) * d_x2(l, m1, m2, z) * (sig_x2(l, m1) * sig_x2(l, m2));
    }
    let pref = 2f64.powi(-l) * (f64::from(2 * l + 1) / (4.0 * PI)).sqrt() / sig_x2(2 * l, 2 * m);
    Ok(s * pref)
}

/// Coefficient of `(z.z)^{(l-l')/2} Y_{l' m'}` in `D^{l/2}_{m1 m2}((0, z))`, `m' = m2 - m1`.
pub(crate) fn d_from_y_coeff(l: i32, lp: i32, m1: i32, m2: i32) -> C64 {
    let mp = (m2 - m1) / 2;
    if lp < 0 || lp > l || (l - lp) % 2 != 0 || mp.abs() > lp {
        return C64::new(0.0, 0.0);
    }
    let t = three_j_x2(l, l, 2 * lp, m1, -m2, 2 * mp);
    if t == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let r = (4.0 * PI).sqrt()
        * 2f64.powi(lp)
        * f64::from(2 * lp + 1).sqrt()
        * (factorial(l - lp) / factorial(l + lp + 1)).sqrt()
        * factorial((l + lp) / 2)
        / factorial((l - lp) / 2)
        * t;
    phase_x2(2 * lp + m2) * r
}

/// `D^{l/2}_{m1 m2}((0, z))` expanded in solid harmonics.
pub fn d_from_y(l: i32, m1: HalfInt, m2: HalfInt, z: &[C64; 3]) -> Result<C64> {
    let j = HalfInt::from_twice(l);
    j.check_projection(m1)?;
    j.check_projection(m2)?;
    let (a, b) = (m1.twice(), m2.twice());
    let zz = dot3(z, z);
    let mp = (b - a) / 2;
    let mut s = C64::new(0.0, 0.0);
    for lp in (l % 2..=l).step_by(2) {
        if mp.abs() > lp {
            continue;
        }
        s += d_from_y_coeff(l, lp, a, b) * zz.powi((l - lp) / 2) * y_unchecked(lp, mp, z);
    }
    Ok(s)
}

/// Number of basis polynomials `P_{l,k,m}` of degree exactly `l`.
pub fn level_size(l: i32) -> usize {
    ((l + 1) * (l + 2) / 2) as usize
}

/// Position of `P_{l,k,m}` in the lexicographic `(l, k, m)` order.
pub fn basis_offset(l: i32, k: i32, m: i32) -> usize {
    let lv = (l * (l + 1) * (l + 2) / 6) as usize;
    let kk = (k * (2 * l + 1) - 2 * k * (k - 1)) as usize;
    lv + kk + (m + l - 2 * k) as usize
}

/// Number of basis polynomials of degree at most `l_max`.
pub fn basis_len(l_max: i32) -> usize {
    basis_offset(l_max + 1, 0, -(l_max + 1))
}

/// All `(l, k, m)` of degree at most `l_max`, in storage order.
pub fn basis_indices(l_max: i32) -> Vec<(i32, i32, i32)> {
    let mut v = Vec::with_capacity(basis_len(l_max));
    for l in 0..=l_max {
        for k in 0..=l / 2 {
            let big_l = l - 2 * k;
            for m in -big_l..=big_l {
                v.push((l, k, m));
            }
        }
    }
    v
}

fn cached_indices(l_max: i32) -> Arc<Vec<(i32, i32, i32)>> {
    static CACHE: OnceLock<RwLock<Option<Arc<Vec<(i32, i32, i32)>>>>> = OnceLock::new();
    let cell = CACHE.get_or_init(|| RwLock::new(None));
    if let Some(v) = cell.read().unwrap().as_ref() {
        if v.len() >= basis_len(l_max) {
            return Arc::clone(v);
        }
    }
    let v = Arc::new(basis_indices(l_max.max(16)));
    let mut w = cell.write().unwrap();
    match w.as_ref() {
        Some(old) if old.len() >= v.len() => Arc::clone(old),
        _ => {
            *w = Some(Arc::clone(&v));
            v
        }
    }
}

struct LinTable {
    lmax: i32,
    entries: Vec<Vec<(i32, f64)>>,
}

impl LinTable {
    fn build(lmax: i32) -> Self {
        let w = (2 * lmax + 1) as usize;
        let n = (lmax as usize + 1) * w * (lmax as usize + 1) * w;
        let mut entries = vec![Vec::new(); n];
        for l1 in 0..=lmax {
            for m1 in -l1..=l1 {
                for l2 in 0..=lmax {
                    for m2 in -l2..=l2 {
                        let mut v = Vec::new();
                        for l3 in ((l1 - l2).abs()..=l1 + l2).step_by(2) {
                            let c = linearization_coeff(l1, m1, l2, m2, l3);
                            if c != 0.0 {
                                v.push((l3, c));
                            }
                        }
                        entries[Self::slot(lmax, l1, m1, l2, m2)] = v;
                    }
                }
            }
        }
        LinTable { lmax, entries }
    }

    fn slot(lmax: i32, l1: i32, m1: i32, l2: i32, m2: i32) -> usize {
        let w = 2 * lmax + 1;
        ((((l1 * w + (m1 + lmax)) * (lmax + 1)) + l2) * w + (m2 + lmax)) as usize
    }

    fn get(&self, l1: i32, m1: i32, l2: i32, m2: i32) -> &[(i32, f64)] {
        &self.entries[Self::slot(self.lmax, l1, m1, l2, m2)]
    }
}

fn lin_table(lmax: i32) -> Arc<LinTable> {
    static CACHE: OnceLock<RwLock<Option<Arc<LinTable>>>> = OnceLock::new();
    let cell = CACHE.get_or_init(|| RwLock::new(None));
    if let Some(t) = cell.read().unwrap().as_ref() {
        if t.lmax >= lmax {
            return Arc::clone(t);
        }
    }
    let mut w = cell.write().unwrap();
    if let Some(t) = w.as_ref() {
        if t.lmax >= lmax {
            return Arc::clone(t);
        }
    }
    let t = Arc::new(LinTable::build(lmax.max(8)));
    *w = Some(Arc::clone(&t));
    t
}

/// Polynomial `sum c_{lkm} P_{l,k,m}(z)` truncated at degree `l_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicPoly {
    l_max: i32,
    coeffs: Vec<C64>,
}

impl HarmonicPoly {
    pub fn zeros(l_max: i32) -> Self {
        HarmonicPoly { l_max, coeffs: vec![C64::new(0.0, 0.0); basis_len(l_max)] }
    }

    pub fn constant(l_max: i32, c: C64) -> Self {
        let mut p = Self::zeros(l_max);
        // P_{000} = Y_00 = (4 pi)^{-1/2}
        p.coeffs[0] = c * (4.0 * PI).sqrt();
        p
    }

    pub fn l_max(&self) -> i32 {
        self.l_max
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn get(&self, l: i32, k: i32, m: i32) -> C64 {
        if l > self.l_max {
            return C64::new(0.0, 0.0);
        }
        self.coeffs[basis_offset(l, k, m)]
    }

    pub fn add_term(&mut self, l: i32, k: i32, m: i32, c: C64) {
        if l <= self.l_max {
            self.coeffs[basis_offset(l, k, m)] += c;
        }
    }

    pub fn add_scaled(&mut self, other: &HarmonicPoly, c: C64) {
        let n = self.coeffs.len().min(other.coeffs.len());
        for (a, b) in self.coeffs[..n].iter_mut().zip(&other.coeffs[..n]) {
            *a += b * c;
        }
    }

    pub fn scale(&mut self, c: C64) {
        for a in &mut self.coeffs {
            *a *= c;
        }
    }

    /// Nonzero terms as `((l, k, m), c)`.
    pub fn terms(&self) -> impl Iterator<Item = ((i32, i32, i32), C64)> + '_ {
        let idx = cached_indices(self.l_max);
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != C64::new(0.0, 0.0))
            .map(move |(i, c)| (idx[i], *c))
    }

    /// Largest degree carrying a nonzero coefficient, if any.
    pub fn degree(&self) -> Option<i32> {
        self.terms().map(|((l, _, _), _)| l).max()
    }

    /// Product truncated at `l_max`, linearized with the harmonic product rule.
    pub fn mul(&self, other: &HarmonicPoly, l_max: i32) -> HarmonicPoly {
        let table = lin_table(self.l_max.max(other.l_max).max(l_max));
        let mut out = HarmonicPoly::zeros(l_max);
        let bt: Vec<_> = other.terms().collect();
        for ((l1, k1, m1), c1) in self.terms() {
            let big_l1 = l1 - 2 * k1;
            for &((l2, k2, m2), c2) in &bt {
                if l1 + l2 > l_max {
                    continue;
                }
                let big_l2 = l2 - 2 * k2;
                let c12 = c1 * c2;
                for &(l3, c) in table.get(big_l1, m1, big_l2, m2) {
                    let kk = k1 + k2 + (big_l1 + big_l2 - l3) / 2;
                    out.coeffs[basis_offset(l1 + l2, kk, m1 + m2)] += c12 * c;
                }
            }
        }
        out
    }

    pub fn eval(&self, z: &[C64; 3]) -> C64 {
        let zz = dot3(z, z);
        let mut ys: Vec<Vec<C64>> = Vec::with_capacity(self.l_max as usize + 1);
        for big_l in 0..=self.l_max {
            ys.push((-big_l..=big_l).map(|m| y_unchecked(big_l, m, z)).collect());
        }
        let mut zzp = vec![C64::new(1.0, 0.0)];
        for k in 1..=(self.l_max / 2 + 1) as usize {
            zzp.push(zzp[k - 1] * zz);
        }
        self.terms()
            .map(|((l, k, m), c)| {
                let big_l = l - 2 * k;
                c * zzp[k as usize] * ys[big_l as usize][(m + big_l) as usize]
            })
            .sum()
    }
}

/// `D^{j}_{m1 m2}((0, z))` as a polynomial, doubled indices.
pub fn d_poly_x2(j2: i32, m1: i32, m2: i32, l_max: i32) -> HarmonicPoly {
    let mut p = HarmonicPoly::zeros(l_max.max(j2));
    if !is_projection(j2, m1) || !is_projection(j2, m2) {
        return p;
    }
    let mp = (m2 - m1) / 2;
    for lp in (j2 % 2..=j2).step_by(2) {
        if mp.abs() > lp {
            continue;
        }
        let c = d_from_y_coeff(j2, lp, m1, m2);
        if c != C64::new(0.0, 0.0) {
            p.add_term(j2, (j2 - lp) / 2, mp, c);
        }
    }
    p
}

pub mod exact {
    //! Exact form of the solid harmonics, used to certify harmonicity in three variables.

    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::One;

    use crate::wigner::exact::{laplacian, linear, poly_mul, poly_pow, ExactPoly, GaussRat};

    fn fact(n: i32) -> BigInt {
        (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
    }

    /// `Y_{lm}` without its square-root normalization and sign, with `z4` absent.
    pub fn solid_harmonic_polynomial(l: i32, m: i32) -> ExactPoly {
        let am = m.abs();
        let im = if m >= 0 { 1 } else { -1 };
        let w = linear([(1, 0), (0, im), (0, 0), (0, 0)]);
        let z3 = linear([(0, 0), (0, 0), (1, 0), (0, 0)]);
        let mut zz = ExactPoly::new();
        for v in 0..3 {
            let mut e = [0; 4];
            e[v] = 2;
            zz.insert(e, GaussRat::new(1, 0));
        }
        let mut out = ExactPoly::new();
        let mut k = l;
        while k >= am {
            // rising factorial ((k-l+1)/2)_l over 2^l, kept as an exact rational
            let num = (0..l).fold(BigInt::one(), |acc, i| acc * BigInt::from(k - l + 1 + 2 * i));
            let c = BigRational::new(num, fact(k - am) * fact(l - k));
            let term = poly_mul(&poly_pow(&z3, k - am), &poly_pow(&zz, (l - k) / 2));
            for (e, cf) in term {
                out.entry(e).or_insert_with(|| GaussRat::new(0, 0)).add_assign(&cf.scale(&c));
            }
            k -= 2;
        }
        out.retain(|_, c| !c.is_zero());
        poly_mul(&out, &poly_pow(&w, am))
    }

    /// True when the three-variable Laplacian of `Y_{lm}` vanishes identically.
    pub fn is_harmonic(l: i32, m: i32) -> bool {
        let p = solid_harmonic_polynomial(l, m);
        !p.is_empty() && laplacian(&p).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn low_order_values() {
        let z = [c(0.2, 0.1), c(-0.3, 0.4), c(0.5, -0.2)];
        let y00 = solid_harmonic(0, 0, &z).unwrap();
        assert!((y00 - 1.0 / (4.0 * PI).sqrt()).norm() < 1e-15);
        let y10 = solid_harmonic(1, 0, &z).unwrap();
        assert!((y10 - z[2] * (3.0 / (4.0 * PI)).sqrt()).norm() < 1e-15);
        assert!(solid_harmonic(1, 2, &z).is_err());
    }

    #[test]
    fn basis_offsets_are_dense() {
        for (i, (l, k, m)) in basis_indices(7).into_iter().enumerate() {
            assert_eq!(basis_offset(l, k, m), i);
        }
        assert_eq!(basis_len(7), basis_indices(7).len());
    }

    #[test]
    fn d_poly_matches_direct() {
        let z = [c(0.2, 0.1), c(-0.3, 0.4), c(0.5, -0.2)];
        for j2 in 0..5 {
            for m1 in (-j2..=j2).step_by(2) {
                for m2 in (-j2..=j2).step_by(2) {
                    let p = d_poly_x2(j2, m1, m2, 6);
                    let want = d_x2(j2, m1, m2, &CQuat::pure(z));
                    assert!((p.eval(&z) - want).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn exact_harmonics_are_harmonic() {
        for l in 0..5 {
            for m in -l..=l {
                assert!(exact::is_harmonic(l, m), "{l} {m}");
            }
        }
        // z3^2 alone is not harmonic, so the checker can fail
        let mut p = crate::wigner::exact::ExactPoly::new();
        p.insert([0, 0, 2, 0], crate::wigner::exact::GaussRat::new(1, 0));
        assert!(!crate::wigner::exact::laplacian(&p).is_empty());
    }

    #[test]
    fn constant_poly() {
        let p = HarmonicPoly::constant(3, c(2.0, 0.0));
        assert!((p.eval(&[c(0.1, 0.0); 3]) - 2.0).norm() < 1e-15);
    }
}
