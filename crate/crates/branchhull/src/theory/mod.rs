//! Closed-form probability bounds behind the recovery guarantees, and the
//! one-sided noise transform used by the noisy analysis.

mod covering;
mod lemmas;

pub use covering::{hemisphere_coverage, mc_sphere_covering, min_norm_point, CoverageRate, Distribution, MinNormPoint};
pub use lemmas::{lemma5_conditions, lemma6_count, ramp, Lemma6Report};

use nalgebra::DVector;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `x / 2^e` for a big integer `x`, truncated to 53 bits of mantissa.
/// Exact whenever `x` fits in 53 bits (all the dyadic test values do).
fn ratio_pow2(x: &BigUint, e: u64) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(53);
    let top = (x >> shift).to_u64().expect("top bits fit in u64") as f64;
    top * 2f64.powi(shift as i32 - e as i32)
}

/// Probability that `m` hemispheres drawn from a negation-symmetric
/// distribution on the unit sphere of `R^n` cover the whole sphere:
///
/// ```text
/// 1 - 2^-(m-1) * sum_{k=0}^{n-1} C(m-1, k)
/// ```
///
/// equivalently the probability of at least `n` heads in `m - 1` fair coin
/// tosses. Binomials are evaluated with exact big integers.
pub fn wendel_probability(n: usize, m: usize) -> f64 {
    assert!(n >= 1 && m >= 1, "wendel_probability requires n, m >= 1");
    1.0 - binomial_cdf_below(n, m - 1)
}

/// Exact tail `P(Bin(m, 1/2) >= n)` as a float.
pub fn binomial_tail(n: usize, m: usize) -> f64 {
    1.0 - binomial_cdf_below(n, m)
}

/// `P(Bin(m, 1/2) < n) = 2^-m * sum_{k=0}^{n-1} C(m, k)`.
fn binomial_cdf_below(n: usize, m: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if n > m {
        return 1.0;
    }
    let mut coeff = BigUint::one();
    let mut sum = BigUint::zero();
    for k in 0..n {
        if k > 0 {
            coeff = coeff * BigUint::from(m - k + 1) / BigUint::from(k);
        }
        sum += &coeff;
    }
    ratio_pow2(&sum, m as u64)
}

/// Hoeffding lower bound `1 - exp(-(m - 2n)^2 / (2m))` on the probability of
/// at least `n` heads among `m` fair tosses; requires `2n <= m`.
pub fn hoeffding_tail_bound(n: usize, m: usize) -> Result<f64> {
    if 2 * n > m {
        return Err(Error::InvalidArgument(format!(
            "hoeffding bound needs n <= m/2, got n={n}, m={m}"
        )));
    }
    if m == 0 {
        return Ok(0.0); // zero tosses: the bound is vacuous
    }
    let d = (m - 2 * n) as f64;
    Ok(1.0 - (-d * d / (2.0 * m as f64)).exp())
}

/// Explicit lower bound on the probability that the noiseless program
/// recovers the balanced target:
/// `1 - exp(-[L - (2N + 2K - 3)]^2 / (2(L - 1)))` when `L > 2N + 2K - 3`,
/// and 0 otherwise.
pub fn theorem1_probability(k: usize, n: usize, l: usize) -> f64 {
    let threshold = 2 * n as i64 + 2 * k as i64 - 3;
    if (l as i64) <= threshold {
        return 0.0;
    }
    let d = l as f64 - threshold as f64;
    1.0 - (-d * d / (2.0 * (l as f64 - 1.0))).exp()
}

/// The three closed-form quantities for one `(K, N, L)` triple.
///
/// The sphere-covering bookkeeping uses `n = N + K - 2` heads among
/// `m = L - 1` tosses: `wendel_exact` is the exact coverage probability of
/// the `L` hemispheres, `hoeffding_bound` its exponential lower bound (0 when
/// `L - 1 < 2(N + K - 2)`, where the bound is vacuous), and `theorem1_bound`
/// the same exponential written in terms of `L`, `K`, `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryBound {
    pub k: usize,
    pub n: usize,
    pub l: usize,
    pub theorem1_bound: f64,
    pub wendel_exact: f64,
    pub hoeffding_bound: f64,
}

impl TheoryBound {
    pub fn for_dimensions(k: usize, n: usize, l: usize) -> Self {
        let heads = n + k;
        let wendel_exact = if heads <= 2 {
            1.0 // zero heads required: coverage is certain
        } else {
            wendel_probability(heads - 2, l)
        };
        let hoeffding_bound = if heads >= 2 && l >= 1 {
            hoeffding_tail_bound(heads - 2, l - 1).unwrap_or(0.0)
        } else {
            0.0
        };
        TheoryBound {
            k,
            n,
            l,
            theorem1_bound: theorem1_probability(k, n, l),
            wendel_exact,
            hoeffding_bound,
        }
    }
}

/// One-sided reformulation of sign-preserving noise: the scale `s >= 1` and
/// shifted noise `eta in [-1, 0]^L` with `s * y_hat * (1 + eta) = y_hat * (1 + xi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedNoise {
    pub s_shift: f64,
    pub eta: DVector<f64>,
}

/// Converts noise with `xi_l >= -1` into the equivalent one-sided pair
/// `(s, eta)`: `s = max(1 + max_l xi_l, 1)` and `eta_l = (1 - s + xi_l) / s`,
/// clamped to `[-1, 0]` to absorb ulp-level spill at the maximal entry.
pub fn shift_noise(xi: &DVector<f64>) -> Result<ShiftedNoise> {
    if let Some(index) = (0..xi.len()).find(|&i| xi[i] < -1.0) {
        return Err(Error::NoiseOutOfRange {
            index,
            value: xi[index],
        });
    }
    let s_bar = 1.0 + xi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s_shift = s_bar.max(1.0);
    let eta = xi.map(|x| ((1.0 - s_shift + x) / s_shift).clamp(-1.0, 0.0));
    Ok(ShiftedNoise { s_shift, eta })
}
