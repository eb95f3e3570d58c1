//! The orthonormal Fock-Bargmann basis, the reproducing kernel and Monte Carlo checks of the
//! inner product.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cquat::{conj3, dot3, CQuat, Mat2, C64};
use crate::error::{Error, Result};
use crate::gegenbauer::coeff_a;
use crate::halfint::HalfInt;
use crate::harmonics::y_unchecked;
use crate::series::geometric_tail;
use crate::sp4::{domain_radius, in_domain};
use crate::wigner::{cg_x2, d_matrix_x2};

/// Minimum number of accepted samples for a Monte Carlo estimate.
pub const MC_MIN_SAMPLES: usize = 10_000;
const MC_BATCH: usize = 4096;

/// Discrete-series label `(varsigma, s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepLabel {
    pub varsigma: f64,
    pub spin: HalfInt,
}

impl RepLabel {
    /// Requires `varsigma > s + 2`; the boundary regime `s + 1 < varsigma <= s + 2` is rejected.
    pub fn new(varsigma: f64, spin: HalfInt) -> Result<Self> {
        if spin.twice() < 0 || !(varsigma > spin.value() + 2.0) {
            return Err(Error::OutOfRegime { varsigma, spin: spin.value() });
        }
        Ok(RepLabel { varsigma, spin })
    }

    pub fn scalar(varsigma: f64) -> Result<Self> {
        RepLabel::new(varsigma, HalfInt::ZERO)
    }

    /// `varsigma + s`, the exponent of the scalar factor in the spin case.
    pub fn shifted(&self) -> f64 {
        self.varsigma + self.spin.value()
    }

    pub fn dim(&self) -> usize {
        (self.spin.twice() + 1) as usize
    }
}

/// Scalar basis label `(l, k, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScalarIndex {
    pub l: i32,
    pub k: i32,
    pub m: i32,
}

impl ScalarIndex {
    pub fn new(l: i32, k: i32, m: i32) -> Result<Self> {
        if l < 0 || k < 0 || 2 * k > l {
            return Err(Error::IndexOutOfRange(format!("index constraint 0 <= k <= l/2 violated: l = {l}, k = {k}")));
        }
        if m.abs() > l - 2 * k {
            return Err(Error::IndexOutOfRange(format!(
                "index constraint 2k - l <= m <= l - 2k violated: l = {l}, k = {k}, m = {m}"
            )));
        }
        Ok(ScalarIndex { l, k, m })
    }

    /// Degree of the harmonic factor, `l - 2k`.
    pub fn big_l(&self) -> i32 {
        self.l - 2 * self.k
    }
}

/// Spin basis label `(l, k, J, M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinIndex {
    pub l: i32,
    pub k: i32,
    pub j: HalfInt,
    pub m: HalfInt,
}

impl SpinIndex {
    pub fn new(s: HalfInt, l: i32, k: i32, j: HalfInt, m: HalfInt) -> Result<Self> {
        if l < 0 || k < 0 || 2 * k > l {
            return Err(Error::IndexOutOfRange(format!("index constraint 0 <= k <= l/2 violated: l = {l}, k = {k}")));
        }
        let big_l2 = 2 * (l - 2 * k);
        let (j2, s2) = (j.twice(), s.twice());
        if j2 < (big_l2 - s2).abs() || j2 > big_l2 + s2 || (j2 - big_l2 - s2) % 2 != 0 {
            return Err(Error::IndexOutOfRange(format!(
                "index constraint |l - 2k - s| <= J <= l - 2k + s violated: l = {l}, k = {k}, J = {j}, s = {s}"
            )));
        }
        j.check_projection(m)?;
        Ok(SpinIndex { l, k, j, m })
    }

    pub fn big_l(&self) -> i32 {
        self.l - 2 * self.k
    }

    pub fn from_scalar(i: ScalarIndex) -> Self {
        SpinIndex { l: i.l, k: i.k, j: HalfInt::from_int(i.big_l()), m: HalfInt::from_int(i.m) }
    }
}

/// Truncation and sampling controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub l_max: i32,
    pub series_tol: f64,
    pub abel_t: f64,
    pub mc_samples: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { l_max: 14, series_tol: 1e-8, abel_t: 0.9, mc_samples: 100_000 }
    }
}

impl Truncation {
    pub fn validate(&self) -> Result<()> {
        if self.l_max < 0 {
            return Err(Error::InvalidArgument(format!("l_max must be non-negative, got {}", self.l_max)));
        }
        if !(self.abel_t > 0.0 && self.abel_t <= 1.0) {
            return Err(Error::InvalidArgument(format!("abel_t must lie in (0, 1], got {}", self.abel_t)));
        }
        Ok(())
    }
}

/// Scalar labels of degree at most `l_max`, lexicographic in `(l, k, m)`.
pub fn scalar_indices(l_max: i32) -> Vec<ScalarIndex> {
    let mut v = Vec::new();
    for l in 0..=l_max {
        for k in 0..=l / 2 {
            for m in -(l - 2 * k)..=(l - 2 * k) {
                v.push(ScalarIndex { l, k, m });
            }
        }
    }
    v
}

/// Spin labels of degree exactly `l`, lexicographic in `(k, J, M)`.
pub fn spin_level(s: HalfInt, l: i32) -> Vec<SpinIndex> {
    let mut v = Vec::new();
    for k in 0..=l / 2 {
        let big_l2 = 2 * (l - 2 * k);
        let s2 = s.twice();
        for j2 in ((big_l2 - s2).abs()..=big_l2 + s2).step_by(2) {
            for m2 in (-j2..=j2).step_by(2) {
                v.push(SpinIndex { l, k, j: HalfInt::from_twice(j2), m: HalfInt::from_twice(m2) });
            }
        }
    }
    v
}

/// Spin labels of degree at most `l_max`, lexicographic in `(l, k, J, M)`.
pub fn spin_indices(s: HalfInt, l_max: i32) -> Vec<SpinIndex> {
    (0..=l_max).flat_map(|l| spin_level(s, l)).collect()
}

/// Number of basis functions of degree `l`: `(2s+1)(l+1)(l+2)/2`.
pub fn level_dimension(s: HalfInt, l: i32) -> usize {
    ((s.twice() + 1) * (l + 1) * (l + 2) / 2) as usize
}

/// `N(varsigma, s) = (8/pi^3)(varsigma+s-3/2)(varsigma-s-1)(varsigma-s-2)`.
pub fn norm_const(rep: &RepLabel) -> f64 {
    let (v, s) = (rep.varsigma, rep.spin.value());
    8.0 / PI.powi(3) * (v + s - 1.5) * (v - s - 1.0) * (v - s - 2.0)
}

/// Unit vector `e_{s rho}` with its one at position `s - rho`.
pub fn basis_vector_e(s: HalfInt, rho: HalfInt) -> Result<DVector<C64>> {
    s.check_projection(rho)?;
    let mut v = DVector::zeros((s.twice() + 1) as usize);
    v[((s.twice() - rho.twice()) / 2) as usize] = C64::new(1.0, 0.0);
    Ok(v)
}

fn check_domain(z: &[C64; 3]) -> Result<()> {
    if !in_domain(z) {
        return Err(Error::NotInDomain { max_eig: domain_radius(z) });
    }
    Ok(())
}

/// `F_{l,k,m}(z) = sqrt(a_{varsigma,l,k}) (z.z)^k Y_{l-2k,m}(z)`.
pub fn scalar_basis(rep: &RepLabel, idx: &ScalarIndex, z: &[C64; 3]) -> Result<C64> {
    check_domain(z)?;
    let a = coeff_a(rep.varsigma, idx.l, idx.k)?;
    Ok(dot3(z, z).powi(idx.k) * y_unchecked(idx.big_l(), idx.m, z) * a.sqrt())
}

/// Coupled vector harmonic times `sqrt(a_{varsigma+s,l,k}) (z.z)^k`.
pub fn spin_basis(rep: &RepLabel, idx: &SpinIndex, z: &[C64; 3]) -> Result<DVector<C64>> {
    check_domain(z)?;
    let s2 = rep.spin.twice();
    let big_l = idx.big_l();
    let a = coeff_a(rep.shifted(), idx.l, idx.k)?;
    let pref = dot3(z, z).powi(idx.k) * a.sqrt();
    let mut v = DVector::zeros((s2 + 1) as usize);
    for rho2 in (-s2..=s2).step_by(2) {
        let m2 = idx.m.twice() - rho2;
        if m2 % 2 != 0 || (m2 / 2).abs() > big_l {
            continue;
        }
        let cg = cg_x2(s2, rho2, 2 * big_l, m2, idx.j.twice(), idx.m.twice());
        if cg != 0.0 {
            v[((s2 - rho2) / 2) as usize] += pref * y_unchecked(big_l, m2 / 2, z) * cg;
        }
    }
    Ok(v)
}

/// `D^s` of the complex quaternion whose matrix image is `a`.
pub fn d_s_matrix(s: HalfInt, a: &Mat2) -> DMatrix<C64> {
    d_matrix_x2(s.twice(), &CQuat::from_matrix(a))
}

/// `1 + z conj(z')` as a complex quaternion.
pub fn kernel_quaternion(z: &[C64; 3], zp: &[C64; 3]) -> CQuat {
    CQuat::ONE + CQuat::pure(*z) * CQuat::pure(conj3(zp))
}

/// `K(z, z') = det(1 + z conj z')^{-varsigma-s} D^s(1 + z conj z')`.
pub fn kernel(rep: &RepLabel, z: &[C64; 3], zp: &[C64; 3]) -> Result<DMatrix<C64>> {
    check_domain(z)?;
    check_domain(zp)?;
    let q = kernel_quaternion(z, zp);
    let f = q.det().powf(-rep.shifted());
    Ok(d_matrix_x2(rep.spin.twice(), &q) * f)
}

/// Residual of the truncated basis expansion of the kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelCheck {
    pub residual: f64,
    pub tail_estimate: f64,
}

/// Compares `sum_nu F_nu(z) F_nu(z')^dagger` over degrees up to `l_max` with the closed form.
pub fn kernel_expansion_check(rep: &RepLabel, z: &[C64; 3], zp: &[C64; 3], trunc: &Truncation) -> Result<KernelCheck> {
    trunc.validate()?;
    let closed = kernel(rep, z, zp)?;
    let n = rep.dim();
    let mut sum = DMatrix::<C64>::zeros(n, n);
    let mut blocks = Vec::new();
    for l in 0..=trunc.l_max {
        let mut block = DMatrix::<C64>::zeros(n, n);
        for idx in spin_level(rep.spin, l) {
            let f = spin_basis(rep, &idx, z)?;
            let g = spin_basis(rep, &idx, zp)?;
            block += &f * g.adjoint();
        }
        blocks.push(block.iter().fold(0.0f64, |m, x| m.max(x.norm())));
        sum += block;
    }
    let tail = geometric_tail(&blocks);
    if tail > trunc.series_tol {
        return Err(Error::TruncationNotConverged { tail, tol: trunc.series_tol });
    }
    let residual = (sum - closed).iter().fold(0.0f64, |m, x| m.max(x.norm()));
    Ok(KernelCheck { residual, tail_estimate: tail })
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: C64,
    /// Standard error of the complex estimate, `sqrt(se_re^2 + se_im^2)`.
    pub stderr: f64,
    pub stderr_re: f64,
    pub stderr_im: f64,
}

impl McEstimate {
    /// Largest deviation from `want` in units of the per-component standard errors.
    pub fn z_score(&self, want: C64) -> f64 {
        let z = |d: f64, se: f64| if d == 0.0 { 0.0 } else { d.abs() / se };
        let d = self.value - want;
        z(d.re, self.stderr_re).max(z(d.im, self.stderr_im))
    }
}

/// Gram matrix estimate, acceptance statistics included.
#[derive(Debug, Clone, PartialEq)]
pub struct McGram {
    pub value: DMatrix<C64>,
    pub stderr: DMatrix<f64>,
    /// Per-entry estimates with component standard errors.
    pub entries: DMatrix<McEstimate>,
    pub accepted: usize,
    pub drawn: usize,
}

impl McGram {
    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.drawn as f64
    }
}

/// `det(1 + z conj z) = 1 - 2|z|^2 + |z.z|^2`, positive on the domain.
pub fn domain_weight_base(z: &[C64; 3]) -> f64 {
    let n2: f64 = z.iter().map(|x| x.norm_sqr()).sum();
    1.0 - 2.0 * n2 + dot3(z, z).norm_sqr()
}

struct BatchSums {
    sum: Vec<C64>,
    sum_sq: Vec<[f64; 2]>,
    accepted: usize,
    drawn: usize,
}

/// Box-sampled integral over the domain of `N(varsigma,0) det(1+z conj z)^{varsigma-3} f(z)` for
/// several integrands at once; `eval` writes the integrand values into its output slice.
fn mc_integrate<F>(rep: &RepLabel, n_out: usize, samples: usize, seed: u64, eval: F) -> Result<(Vec<McEstimate>, usize, usize)>
where
    F: Fn(&[C64; 3], &mut [C64]) + Sync,
{
    if samples < MC_MIN_SAMPLES {
        return Err(Error::InsufficientSamples { got: samples, need: MC_MIN_SAMPLES });
    }
    let norm = norm_const(rep);
    let power = rep.varsigma - 3.0;
    let n_batches = samples.div_ceil(MC_BATCH);
    let batches: Vec<BatchSums> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let want = if b + 1 == n_batches { samples - b * MC_BATCH } else { MC_BATCH };
            let mut out = BatchSums { sum: vec![C64::new(0.0, 0.0); n_out], sum_sq: vec![[0.0; 2]; n_out], accepted: 0, drawn: 0 };
            let mut vals = vec![C64::new(0.0, 0.0); n_out];
            while out.accepted < want {
                let mut z = [C64::new(0.0, 0.0); 3];
                for c in &mut z {
                    *c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                }
                out.drawn += 1;
                if !in_domain(&z) {
                    continue;
                }
                out.accepted += 1;
                let w = 64.0 * norm * domain_weight_base(&z).max(0.0).powf(power);
                eval(&z, &mut vals);
                for i in 0..n_out {
                    let x = vals[i] * w;
                    out.sum[i] += x;
                    out.sum_sq[i][0] += x.re * x.re;
                    out.sum_sq[i][1] += x.im * x.im;
                }
            }
            out
        })
        .collect();
    let mut sum = vec![C64::new(0.0, 0.0); n_out];
    let mut sum_sq = vec![[0.0; 2]; n_out];
    let (mut accepted, mut drawn) = (0, 0);
    for b in &batches {
        for i in 0..n_out {
            sum[i] += b.sum[i];
            sum_sq[i][0] += b.sum_sq[i][0];
            sum_sq[i][1] += b.sum_sq[i][1];
        }
        accepted += b.accepted;
        drawn += b.drawn;
    }
    let nd = drawn as f64;
    let est = (0..n_out)
        .map(|i| {
            let mean = sum[i] / nd;
            let se = |sq: f64, m: f64| ((sq / nd - m * m).max(0.0) / (nd - 1.0)).sqrt();
            let (se_re, se_im) = (se(sum_sq[i][0], mean.re), se(sum_sq[i][1], mean.im));
            McEstimate { value: mean, stderr: se_re.hypot(se_im), stderr_re: se_re, stderr_im: se_im }
        })
        .collect();
    Ok((est, accepted, drawn))
}

fn require_scalar(rep: &RepLabel) -> Result<()> {
    if rep.spin != HalfInt::ZERO {
        return Err(Error::InvalidArgument("Monte Carlo inner products are implemented for s = 0 only".into()));
    }
    Ok(())
}

/// Monte Carlo Gram matrix `(F_i, F_j)` of scalar basis functions.
pub fn mc_gram(rep: &RepLabel, indices: &[ScalarIndex], samples: usize, seed: u64) -> Result<McGram> {
    require_scalar(rep)?;
    let n = indices.len();
    let coeffs: Vec<f64> = indices.iter().map(|i| coeff_a(rep.varsigma, i.l, i.k).map(f64::sqrt)).collect::<Result<_>>()?;
    let (est, accepted, drawn) = mc_integrate(rep, n * n, samples, seed, |z, out| {
        let zz = dot3(z, z);
        let f: Vec<C64> = indices
            .iter()
            .zip(&coeffs)
            .map(|(i, c)| zz.powi(i.k) * y_unchecked(i.big_l(), i.m, z) * *c)
            .collect();
        for a in 0..n {
            for b in 0..n {
                out[a * n + b] = f[a].conj() * f[b];
            }
        }
    })?;
    Ok(McGram {
        value: DMatrix::from_fn(n, n, |a, b| est[a * n + b].value),
        stderr: DMatrix::from_fn(n, n, |a, b| est[a * n + b].stderr),
        entries: DMatrix::from_fn(n, n, |a, b| est[a * n + b]),
        accepted,
        drawn,
    })
}

/// Monte Carlo inner product `(F_idx1, F_idx2)` for `s = 0`.
pub fn mc_inner_product(rep: &RepLabel, idx1: &ScalarIndex, idx2: &ScalarIndex, trunc: &Truncation, seed: u64) -> Result<McEstimate> {
    let g = mc_gram(rep, &[*idx1, *idx2], trunc.mc_samples, seed)?;
    Ok(g.entries[(0, 1)])
}

/// Monte Carlo estimate of `int K(z0, w) F_idx(w) dmu(w)`, which should reproduce `F_idx(z0)`.
pub fn mc_reproducing(rep: &RepLabel, idx: &ScalarIndex, z0: &[C64; 3], trunc: &Truncation, seed: u64) -> Result<McEstimate> {
    require_scalar(rep)?;
    check_domain(z0)?;
    let c = coeff_a(rep.varsigma, idx.l, idx.k)?.sqrt();
    let (est, _, _) = mc_integrate(rep, 1, trunc.mc_samples, seed, |w, out| {
        let k = kernel_quaternion(z0, w).det().powf(-rep.varsigma);
        out[0] = k * dot3(w, w).powi(idx.k) * y_unchecked(idx.big_l(), idx.m, w) * c;
    })?;
    Ok(est[0])
}
