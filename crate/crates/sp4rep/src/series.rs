//! Truncated-series results.

use crate::cquat::C64;

/// A truncated sum together with an estimate of the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: C64,
    pub tail_estimate: f64,
}

impl SeriesValue {
    pub fn exact(value: C64) -> Self {
        SeriesValue { value, tail_estimate: 0.0 }
    }
}

/// Tail bound from the last three block magnitudes, assuming geometric decay.
///
/// Returns infinity when the observed ratio is not below one.
pub fn geometric_tail(blocks: &[f64]) -> f64 {
    let n = blocks.len();
    if n < 3 {
        return blocks.last().copied().unwrap_or(0.0);
    }
    let (x0, x1, x2) = (blocks[n - 3], blocks[n - 2], blocks[n - 1]);
    if x0 == 0.0 && x1 == 0.0 && x2 == 0.0 {
        return 0.0;
    }
    if x0 == 0.0 && x1 == 0.0 {
        return f64::INFINITY;
    }
    // parity often kills every other block, so also use the two-step ratio
    let mut r = 0.0f64;
    if x0 > 0.0 {
        r = r.max(x1 / x0).max((x2 / x0).sqrt());
    }
    if x1 > 0.0 {
        r = r.max(x2 / x1);
    }
    if r >= 1.0 {
        f64::INFINITY
    } else {
        x1.max(x2) * r / (1.0 - r)
    }
}

/// Neumaier compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}
