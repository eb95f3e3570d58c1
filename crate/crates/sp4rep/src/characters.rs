//! Diagonal matrix elements on `g_d = diag(a, conj a)` with `Z(a) = diag(mu, nu)` and the
//! Abel-regularized characters built from them.
//!
//! The closed forms are written for the acting block `h = g_d^{-1}`, whose eigen-pair is
//! `(1/mu, 1/nu)`; [`diag_element_scalar`] and [`diag_element_spin`] take the eigen-pair of
//! `g_d` itself and return elements of `U(g_d)`.

use rayon::prelude::*;

use crate::cquat::C64;
use crate::error::{Error, Result};
use crate::fockbasis::{spin_level, RepLabel, ScalarIndex, SpinIndex, Truncation};
use crate::matrix_elements::a_coef;
use crate::series::geometric_tail;
use crate::sp4::EigenQuadruple;
use crate::wigner::{cg_x2, factorial, phase_x2, three_j_x2};

const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Character request; `trunc.l_max` bounds the partial sums and `trunc.abel_t` weights level `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacterRequest {
    pub rep: RepLabel,
    pub eig: EigenQuadruple,
    pub trunc: Truncation,
}

impl CharacterRequest {
    pub fn new(rep: RepLabel, eig: EigenQuadruple, trunc: Truncation) -> Result<Self> {
        let p = (eig.mu * eig.nu).norm();
        if (p - 1.0).abs() > 1e-10 {
            return Err(Error::DeterminantNotOne { value: p * p });
        }
        trunc.validate()?;
        Ok(CharacterRequest { rep, eig, trunc })
    }
}

/// How the regularized partial sums behave at the end of the computed range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Converged,
    Oscillating,
    Diverging,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Converged => "converged",
            Verdict::Oscillating => "oscillating",
            Verdict::Diverging => "diverging",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterResult {
    /// `S_L` for `L = 0..=l_max`.
    pub partial_sums: Vec<C64>,
    /// Unweighted level traces `sum_{k,J,M} diag(l,k,J,M)`.
    pub level_traces: Vec<C64>,
    pub tail_estimate: f64,
    pub verdict: Verdict,
}

/// `mu^p` for integer `p`.
fn ipow(x: C64, p: i32) -> C64 {
    x.powi(p)
}

/// Diagonal scalar element written for an acting block with eigen-pair `(mu, nu)`.
///
/// `(conj nu conj mu)^{-varsigma}` times the finite `m1` sum over the `D^{L/2}` range with
/// `m2 - m1 = m`.
pub fn diagonal_formula(varsigma: f64, mu: C64, nu: C64, l: i32, k: i32, m: i32) -> C64 {
    let big_l = l - 2 * k;
    let (mub, nub) = (mu.conj(), nu.conj());
    let mut s = ZERO;
    for m1 in (-big_l..=big_l).step_by(2) {
        let m2 = m1 + 2 * m;
        if m2.abs() > big_l {
            continue;
        }
        // all four exponents are integers since m1, m2 and l share parity
        let f = ipow(mu, (l - m1) / 2) * ipow(nu, (l + m1) / 2) * ipow(nub, (m2 - l) / 2) * ipow(mub, (-l - m2) / 2);
        let t = three_j_x2(big_l, big_l, 2 * big_l, m1, -m2, 2 * m);
        if t == 0.0 {
            continue;
        }
        let c = (4.0 * std::f64::consts::PI).sqrt() * 2f64.powi(big_l) * factorial(big_l) / factorial(2 * big_l).sqrt() * t;
        s += a_coef(big_l, m, m1, m2) * f * phase_x2(2 * big_l + m2) * c;
    }
    (nub * mub).powf(-varsigma) * s
}

/// `<F_{lkm}, U^(varsigma,0)(g_d) F_{lkm}>`; `rep.spin` is ignored.
pub fn diag_element_scalar(rep: &RepLabel, eig: &EigenQuadruple, idx: &ScalarIndex) -> C64 {
    diagonal_formula(rep.varsigma, ONE / eig.mu, ONE / eig.nu, idx.l, idx.k, idx.m)
}

/// `<F_{lkJM}, U^(varsigma,s)(g_d) F_{lkJM}>` from scalar diagonal elements at `varsigma + s`
/// recoupled with the spin factor `conj(mu)^{s-n} conj(nu)^{s+n}` of the acting block.
pub fn diag_element_spin(rep: &RepLabel, eig: &EigenQuadruple, idx: &SpinIndex) -> C64 {
    let s2 = rep.spin.twice();
    let (mu, nu) = (ONE / eig.mu, ONE / eig.nu);
    let big_l = idx.big_l();
    let vs = rep.shifted();
    let mut v = ZERO;
    for n in (-s2..=s2).step_by(2) {
        let m2 = idx.m.twice() - n;
        if m2 % 2 != 0 || (m2 / 2).abs() > big_l {
            continue;
        }
        let cg = cg_x2(s2, n, 2 * big_l, m2, idx.j.twice(), idx.m.twice());
        if cg == 0.0 {
            continue;
        }
        let u = diagonal_formula(vs, mu, nu, idx.l, idx.k, m2 / 2);
        let spin = ipow(mu.conj(), (s2 - n) / 2) * ipow(nu.conj(), (s2 + n) / 2);
        v += u * spin * (cg * cg);
    }
    v
}

/// `sum_{k,J,M} diag(l,k,J,M)` at one degree.
pub fn level_trace(rep: &RepLabel, eig: &EigenQuadruple, l: i32) -> C64 {
    spin_level(rep.spin, l).iter().map(|i| diag_element_spin(rep, eig, i)).sum()
}

/// Abel-regularized partial sums `S_L = sum_{l <= L} t^l sum_{k,J,M} diag(l,k,J,M)`.
///
/// With `abel_t = 1` these are the plain truncated traces. Nothing is thrown when the sums fail to
/// settle; the verdict says so.
pub fn character(req: &CharacterRequest) -> CharacterResult {
    let (rep, eig, t) = (req.rep, req.eig, req.trunc.abel_t);
    let level_traces: Vec<C64> = (0..=req.trunc.l_max).into_par_iter().map(|l| level_trace(&rep, &eig, l)).collect();
    let mut partial_sums = Vec::with_capacity(level_traces.len());
    let mut acc = ZERO;
    let mut weighted = Vec::with_capacity(level_traces.len());
    for (l, tr) in level_traces.iter().enumerate() {
        let w = *tr * t.powi(l as i32);
        acc += w;
        weighted.push(w.norm());
        partial_sums.push(acc);
    }
    let tail_estimate = geometric_tail(&weighted);
    let verdict = verdict(&weighted, tail_estimate, req.trunc.series_tol);
    CharacterResult { partial_sums, level_traces, tail_estimate, verdict }
}

fn verdict(weighted: &[f64], tail: f64, tol: f64) -> Verdict {
    if tail <= tol {
        return Verdict::Converged;
    }
    let n = weighted.len();
    if n >= 4 && weighted[n - 1] > weighted[n - 3] && weighted[n - 2] > weighted[n - 4] {
        return Verdict::Diverging;
    }
    Verdict::Oscillating
}
