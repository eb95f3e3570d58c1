//! Gegenbauer polynomials and the expansion of `det(1 + z conj(z'))^{-lambda}` in products of
//! solid harmonics.

use std::f64::consts::PI;

use statrs::function::gamma::{gamma, ln_gamma};

use crate::cquat::{conj3, dot3, C64};
use crate::error::{Error, Result};
use crate::harmonics::y_unchecked;
use crate::series::{geometric_tail, SeriesValue};
use crate::sp4::{domain_radius, in_domain};
use crate::wigner::factorial;

/// Smallest admissible `|det(1 + z conj(z'))|` for the expansion.
pub const BASE_GUARD: f64 = 0.05;

/// `C_l^lambda(t)` by the three-term recurrence.
pub fn gegenbauer_c(l: i32, lambda: f64, t: C64) -> C64 {
    let mut c0 = C64::new(1.0, 0.0);
    if l == 0 {
        return c0;
    }
    let mut c1 = t * (2.0 * lambda);
    for n in 2..=l {
        let nf = f64::from(n);
        let c2 = (t * c1 * (2.0 * (nf + lambda - 1.0)) - c0 * (nf + 2.0 * lambda - 2.0)) / nf;
        c0 = c1;
        c1 = c2;
    }
    c1
}

/// `r^l C_l^lambda(s / r)` with `r^2 = r2`, from the explicit power series (no square root).
pub fn gegenbauer_homogeneous(l: i32, lambda: f64, s: C64, r2: C64) -> C64 {
    (0..=l / 2)
        .map(|j| {
            let c = pochhammer(lambda, l - j) * 2f64.powi(l - 2 * j) / (factorial(j) * factorial(l - 2 * j));
            s.powi(l - 2 * j) * r2.powi(j) * (if j % 2 == 0 { c } else { -c })
        })
        .sum()
}

/// Rising factorial `(x)_k = x (x+1) ... (x+k-1)`.
pub fn pochhammer(x: f64, k: i32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (x + f64::from(i)))
}

/// `Gamma(n + 1/2)` from factorials.
fn gamma_half(n: i32) -> f64 {
    factorial(2 * n) * PI.sqrt() / (4f64.powi(n) * factorial(n))
}

/// `a_{lambda,l,k}` in its Gamma-function form, defined for `lambda > 1/2`.
pub fn coeff_a(lambda: f64, l: i32, k: i32) -> Result<f64> {
    if lambda <= 0.5 || !lambda.is_finite() {
        return Err(Error::InvalidLambda(lambda));
    }
    check_lk(l, k)?;
    let kf = f64::from(k);
    let ln = (2.0 * lambda - 1.0) * 2f64.ln() + PI.ln() + ln_gamma(kf + lambda - 0.5) + ln_gamma(lambda + f64::from(l - k))
        - ln_gamma(2.0 * lambda - 1.0)
        - factorial(k).ln()
        - gamma_half(l - k + 1).ln();
    Ok(ln.exp())
}

/// `a_{lambda,l,k} = 2 pi^{3/2} (lambda - 1/2)_k (lambda)_{l-k} / (k! Gamma(l - k + 3/2))`,
/// valid for every real `lambda`.
pub fn coeff_a_poch(lambda: f64, l: i32, k: i32) -> f64 {
    2.0 * PI.powf(1.5) * pochhammer(lambda - 0.5, k) * pochhammer(lambda, l - k) / (factorial(k) * gamma_half(l - k + 1))
}

/// `d_k` of the Gegenbauer-to-Legendre reduction, Gamma form (`lambda > 1/2`).
pub fn coeff_d(lambda: f64, l: i32, k: i32) -> Result<f64> {
    if lambda <= 0.5 {
        return Err(Error::InvalidLambda(lambda));
    }
    check_lk(l, k)?;
    let kf = f64::from(k);
    Ok(f64::from(2 * (l - 2 * k) + 1) / 2.0 * gamma(kf + lambda - 0.5) * gamma(lambda + f64::from(l - k))
        / (factorial(k) * gamma_half(l - k + 1)))
}

/// Pochhammer form `d'_k`; defined for any `lambda`, including negative integers.
pub fn coeff_d_prime(lambda: f64, l: i32, k: i32) -> Result<f64> {
    check_lk(l, k)?;
    Ok(f64::from(2 * (l - 2 * k) + 1) / 2.0 * pochhammer(lambda - 0.5, k) * pochhammer(lambda, l - k)
        / (factorial(k) * gamma_half(l - k + 1)))
}

fn check_lk(l: i32, k: i32) -> Result<()> {
    if l < 0 || k < 0 || 2 * k > l {
        return Err(Error::IndexOutOfRange(format!("need 0 <= k <= l/2, got l = {l}, k = {k}")));
    }
    Ok(())
}

/// `1 - 2 z.conj(z') + (z.z) conj(z'.z')`, which equals `det(1 + z conj(z'))`.
pub fn det_base(z: &[C64; 3], zp: &[C64; 3]) -> C64 {
    let zpb = conj3(zp);
    C64::new(1.0, 0.0) - dot3(z, &zpb) * 2.0 + dot3(z, z) * dot3(&zpb, &zpb)
}

/// `det(1 + z conj(z'))^{-lambda}` on the principal branch.
pub fn det_power_closed(lambda: f64, z: &[C64; 3], zp: &[C64; 3]) -> C64 {
    det_base(z, zp).powf(-lambda)
}

/// `(z.z)^{l/2} conj(z'.z')^{l/2} C_l^{1/2}(t)` with the principal root of the product.
pub fn legendre_addition_lhs(l: i32, z: &[C64; 3], zp: &[C64; 3]) -> C64 {
    let zpb = conj3(zp);
    let r2 = dot3(z, z) * dot3(&zpb, &zpb);
    let s = dot3(z, &zpb);
    let r = r2.sqrt();
    if r.norm() < 1e-150 {
        return gegenbauer_homogeneous(l, 0.5, s, r2);
    }
    r.powi(l) * gegenbauer_c(l, 0.5, s / r)
}

/// `4 pi / (2l+1) sum_m Y_{lm}(z) conj(Y_{lm}(z'))`.
pub fn legendre_addition_rhs(l: i32, z: &[C64; 3], zp: &[C64; 3]) -> C64 {
    let s: C64 = (-l..=l).map(|m| y_unchecked(l, m, z) * y_unchecked(l, m, zp).conj()).sum();
    s * (4.0 * PI / f64::from(2 * l + 1))
}

/// Truncated harmonic expansion of `det(1 + z conj(z'))^{-lambda}` up to degree `l_max`.
pub fn det_power_expansion(lambda: f64, z: &[C64; 3], zp: &[C64; 3], l_max: i32, tol: f64) -> Result<SeriesValue> {
    for p in [z, zp] {
        if !in_domain(p) {
            return Err(Error::NotInDomain { max_eig: domain_radius(p) });
        }
    }
    let base = det_base(z, zp);
    if base.norm() < BASE_GUARD {
        return Err(Error::InvalidArgument(format!(
            "|det(1 + z conj z')| = {} is below the convergence guard {BASE_GUARD}",
            base.norm()
        )));
    }
    let (zz, zpzp) = (dot3(z, z), dot3(zp, zp).conj());
    let mut total = C64::new(0.0, 0.0);
    let mut blocks = Vec::with_capacity(l_max as usize + 1);
    for l in 0..=l_max {
        let mut block = C64::new(0.0, 0.0);
        for k in 0..=l / 2 {
            let a = coeff_a_poch(lambda, l, k);
            if a == 0.0 {
                continue;
            }
            let big_l = l - 2 * k;
            let ym: C64 = (-big_l..=big_l).map(|m| y_unchecked(big_l, m, z) * y_unchecked(big_l, m, zp).conj()).sum();
            block += ym * (zz * zpzp).powi(k) * a;
        }
        total += block;
        blocks.push(block.norm());
    }
    let tail = geometric_tail(&blocks);
    if tail > tol {
        return Err(Error::TruncationNotConverged { tail, tol });
    }
    Ok(SeriesValue { value: total, tail_estimate: tail })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_gegenbauer() {
        let t = C64::new(0.3, -0.2);
        assert_eq!(gegenbauer_c(0, 2.5, t), C64::new(1.0, 0.0));
        assert!((gegenbauer_c(1, 2.5, t) - t * 5.0).norm() < 1e-15);
    }

    #[test]
    fn negative_integer_lambda_is_finite() {
        let (u, t) = (C64::new(0.4, 0.1), C64::new(-0.3, 0.2));
        let s: C64 = (0..=2).map(|l| u.powi(l) * gegenbauer_c(l, -1.0, t)).sum();
        let want = C64::new(1.0, 0.0) + u * u - u * t * 2.0;
        assert!((s - want).norm() < 1e-15);
        assert!(gegenbauer_c(3, -1.0, t).norm() < 1e-15);
    }

    #[test]
    fn coefficient_forms_agree() {
        assert!((coeff_a(2.0, 0, 0).unwrap() - 4.0 * PI).abs() < 1e-12);
        for &lambda in &[1.0, 2.0, 3.5, 4.25] {
            for l in 0..8 {
                for k in 0..=l / 2 {
                    let g = coeff_a(lambda, l, k).unwrap();
                    let p = coeff_a_poch(lambda, l, k);
                    assert!((g - p).abs() < 1e-12 * p.abs(), "{lambda} {l} {k}");
                }
            }
        }
        assert!(coeff_a(0.5, 0, 0).is_err());
    }

    #[test]
    fn homogeneous_form_matches_recurrence() {
        let (s, r) = (C64::new(0.2, 0.1), C64::new(0.4, -0.3));
        for l in 0..7 {
            let a = gegenbauer_homogeneous(l, 1.5, s, r * r);
            let b = r.powi(l) * gegenbauer_c(l, 1.5, s / r);
            assert!((a - b).norm() < 1e-14);
        }
    }
}
