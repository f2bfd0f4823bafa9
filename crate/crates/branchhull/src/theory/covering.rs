//! Sphere-covering decisions by Gordan duality: hemispheres
//! `{d : <a_i, d> >= 0}` cover the unit sphere exactly when the origin lies
//! in the convex hull of the centers, which is decided by computing the
//! minimum-norm point of the hull with an away-step conditional gradient
//! method and Wolfe's duality-gap certificate.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, SeededStream};

const GAP_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-7;
const MAX_ITERS: usize = 100_000;

/// Output of the minimum-norm point computation over `conv{a_i}`.
#[derive(Debug, Clone)]
pub struct MinNormPoint {
    pub point: DVector<f64>,
    /// Wolfe duality gap `<x, x> - min_i <a_i, x>` at termination.
    pub gap: f64,
    pub iterations: usize,
}

/// Minimum-norm point of the convex hull of `points` by away-step
/// conditional gradient with exact line search.
///
/// Terminates when the duality gap falls below `gap_tol` or the squared norm
/// is unambiguously zero; errors with [`Error::Indeterminate`] at the
/// iteration cap.
pub fn min_norm_point(points: &[DVector<f64>], gap_tol: f64) -> Result<MinNormPoint> {
    assert!(!points.is_empty(), "need at least one point");
    let m = points.len();
    let mut weights = vec![0.0; m];
    weights[0] = 1.0;
    let mut x = points[0].clone();

    for iter in 0..MAX_ITERS {
        if x.norm_squared() <= 1e-18 {
            return Ok(MinNormPoint {
                point: x,
                gap: 0.0,
                iterations: iter,
            });
        }
        // Linear minimization oracle over the vertex set.
        let mut fw = 0;
        let mut fw_score = f64::INFINITY;
        let mut away = 0;
        let mut away_score = f64::NEG_INFINITY;
        for (i, a) in points.iter().enumerate() {
            let s = a.dot(&x);
            if s < fw_score {
                fw_score = s;
                fw = i;
            }
            if weights[i] > 0.0 && s > away_score {
                away_score = s;
                away = i;
            }
        }
        let gap = x.norm_squared() - fw_score;
        if gap <= gap_tol {
            return Ok(MinNormPoint {
                point: x,
                gap,
                iterations: iter,
            });
        }

        // Pick the steeper of the toward and away directions.
        let toward_progress = x.norm_squared() - fw_score;
        let away_progress = away_score - x.norm_squared();
        if toward_progress >= away_progress {
            let d = &points[fw] - &x;
            let denom = d.norm_squared();
            let gamma = if denom > 0.0 {
                (-x.dot(&d) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            for w in weights.iter_mut() {
                *w *= 1.0 - gamma;
            }
            weights[fw] += gamma;
            x += gamma * d;
        } else {
            let d = &x - &points[away];
            let denom = d.norm_squared();
            let w_away = weights[away];
            let gamma_max = if w_away < 1.0 { w_away / (1.0 - w_away) } else { f64::INFINITY };
            let gamma = if denom > 0.0 {
                (-x.dot(&d) / denom).clamp(0.0, gamma_max)
            } else {
                0.0
            };
            let scale = 1.0 + gamma;
            for w in weights.iter_mut() {
                *w *= scale;
            }
            weights[away] -= gamma;
            if weights[away] < 1e-18 {
                weights[away] = 0.0;
            }
            x += gamma * d;
        }
        // Periodically resynchronize x with the weights to cancel drift.
        if iter % 256 == 255 {
            x = convex_combination(points, &weights);
        }
    }
    let gap = x.norm_squared()
        - points
            .iter()
            .map(|a| a.dot(&x))
            .fold(f64::INFINITY, f64::min);
    Err(Error::Indeterminate { gap })
}

fn convex_combination(points: &[DVector<f64>], weights: &[f64]) -> DVector<f64> {
    let mut x = DVector::zeros(points[0].len());
    let total: f64 = weights.iter().sum();
    for (a, &w) in points.iter().zip(weights) {
        if w > 0.0 {
            x.axpy(w / total, a, 1.0);
        }
    }
    x
}

/// Whether the hemispheres centered at the given unit vectors cover the
/// whole sphere. Errors with [`Error::Indeterminate`] when the certificate
/// cannot be produced; Monte Carlo callers discard such samples.
pub fn hemisphere_coverage(vectors: &[DVector<f64>]) -> Result<bool> {
    assert!(!vectors.is_empty(), "need at least one vector");
    for v in vectors {
        debug_assert!((v.norm() - 1.0).abs() <= 1e-9, "vectors must be unit norm");
    }
    let mnp = min_norm_point(vectors, GAP_TOL)?;
    Ok(mnp.point.norm() <= NORM_TOL)
}

/// Law of the hemisphere centers in the Monte Carlo validator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    /// Uniform on the unit sphere (normalized Gaussian).
    Uniform,
    /// Normalized `(c_tail / c_1, b_tail / b_1)` with every component
    /// standard normal: the law of the covering argument, symmetric to
    /// negation. The first `ceil(n/2)` coordinates form the first block.
    NormalizedRatio,
}

fn draw_vector(n: usize, dist: Distribution, stream: &mut SeededStream) -> DVector<f64> {
    loop {
        let v = match dist {
            Distribution::Uniform => DVector::from_fn(n, |_, _| stream.normal()),
            Distribution::NormalizedRatio => {
                let first = n.div_ceil(2);
                let mut v = DVector::zeros(n);
                let c1 = stream.normal();
                for i in 0..first {
                    v[i] = stream.normal() / c1;
                }
                let b1 = stream.normal();
                for i in first..n {
                    v[i] = stream.normal() / b1;
                }
                v
            }
        };
        let norm = v.norm();
        if norm > 0.0 && norm.is_finite() {
            return v / norm;
        }
    }
}

/// Empirical coverage rate with a 95% binomial confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageRate {
    pub rate: f64,
    pub ci_halfwidth: f64,
    pub trials: usize,
    pub discarded: usize,
}

/// Repeats [`hemisphere_coverage`] on `trials` fresh draws of `m` vectors on
/// the sphere of `R^n`. Trial `t` uses the sub-seed
/// `derive_seed("bh-mc|seed=<seed>|trial=<t>")`, so the result does not
/// depend on the parallel schedule. Errors if more than 1% of trials are
/// indeterminate.
pub fn mc_sphere_covering(
    n: usize,
    m: usize,
    trials: usize,
    seed: u64,
    dist: Distribution,
) -> Result<CoverageRate> {
    assert!(trials >= 100, "need at least 100 trials");
    let outcomes: Vec<Option<bool>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut stream = SeededStream::new(derive_seed(&format!("bh-mc|seed={seed}|trial={t}")));
            let vectors: Vec<DVector<f64>> =
                (0..m).map(|_| draw_vector(n, dist, &mut stream)).collect();
            hemisphere_coverage(&vectors).ok()
        })
        .collect();
    let discarded = outcomes.iter().filter(|o| o.is_none()).count();
    if discarded * 100 > trials {
        return Err(Error::IndeterminateRate { discarded, trials });
    }
    let valid = trials - discarded;
    let covered = outcomes.iter().filter(|o| **o == Some(true)).count();
    let rate = covered as f64 / valid as f64;
    let ci_halfwidth = 1.959964 * (rate * (1.0 - rate) / valid as f64).sqrt();
    Ok(CoverageRate {
        rate,
        ci_halfwidth,
        trials: valid,
        discarded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn antipodal_pair_covers_the_circle() {
        let v = vec![dvector![1.0, 0.0], dvector![-1.0, 0.0]];
        assert!(hemisphere_coverage(&v).unwrap());
    }

    #[test]
    fn orthogonal_pair_does_not_cover() {
        let v = vec![dvector![1.0, 0.0], dvector![0.0, 1.0]];
        assert!(!hemisphere_coverage(&v).unwrap());
        // its min-norm point is (1/2, 1/2)
        let mnp = min_norm_point(&v, 1e-12).unwrap();
        assert!((mnp.point[0] - 0.5).abs() < 1e-6);
        assert!((mnp.point[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn simplex_containing_origin_is_detected() {
        let third = 2.0 * std::f64::consts::PI / 3.0;
        let v: Vec<_> = (0..3)
            .map(|i| dvector![(third * i as f64).cos(), (third * i as f64).sin()])
            .collect();
        assert!(hemisphere_coverage(&v).unwrap());
    }

    #[test]
    fn scalar_case_rate_is_half() {
        let r = mc_sphere_covering(1, 2, 2000, 11, Distribution::Uniform).unwrap();
        assert!((r.rate - 0.5).abs() < 0.05, "rate {}", r.rate);
    }

    #[test]
    fn gap_certificate_is_tight_on_termination() {
        let mut stream = SeededStream::new(51);
        for _ in 0..50 {
            let pts: Vec<DVector<f64>> = (0..5)
                .map(|_| {
                    let v = DVector::from_fn(3, |_, _| stream.normal());
                    let n = v.norm();
                    v / n
                })
                .collect();
            let mnp = min_norm_point(&pts, 1e-10).unwrap();
            assert!(mnp.gap <= 1e-10 || mnp.point.norm_squared() <= 1e-18);
        }
    }
}
