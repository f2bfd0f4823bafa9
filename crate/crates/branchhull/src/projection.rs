//! Exact Euclidean projection onto the per-measurement feasible sets: the
//! convex hull of one hyperbola branch, `{(u, v): uv >= c, u >= 0}` with
//! `c > 0`, and the sign halfplane.
//!
//! For a point outside the hull the projection lands on the boundary curve
//! `uv = c`, and its `u`-coordinate is a positive root of the quartic
//!
//! ```text
//! g(u) = u^4 - a u^3 + b c u - c^2
//! ```
//!
//! obtained from the stationarity of `(u - a)^2 + (c/u - b)^2`. Since
//! `g(0+) = -c^2 < 0` and `g(+inf) = +inf`, a bracketed positive root always
//! exists; candidates come from sign changes on a 64-point log grid, each
//! refined by safeguarded Newton, and ties are broken by the objective value.

use crate::error::{Error, Result};
use crate::instance::sign;

/// One per-measurement constraint in normalized `(u, v)` coordinates,
/// `u = sigma * p`, `v = sigma * tau * q` for `(p, q) = (b_l.h, c_l.m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullConstraint {
    /// Hull level `|y_l|`; positive unless `degenerate`.
    pub level: f64,
    /// Sign `s_l` of the first factor.
    pub sigma: i8,
    /// Sign of the measurement `y_l`.
    pub tau: i8,
    /// True when `y_l = 0`: only the halfplane constraint remains.
    pub degenerate: bool,
}

impl HullConstraint {
    /// Builds the constraint for measurement `y` with sign `s`.
    ///
    /// `s = 0` is accepted only for `y = 0` (a vacuous row); with `y != 0`
    /// the branch of the hyperbola is undefined.
    pub fn from_measurement(row: usize, y: f64, s: i8) -> Result<Self> {
        if y != 0.0 && s == 0 {
            return Err(Error::UndefinedBranch(row));
        }
        Ok(HullConstraint {
            level: y.abs(),
            sigma: s,
            tau: sign(y),
            degenerate: y == 0.0,
        })
    }

    /// Constraint satisfaction within `tol` at `(p, q)`.
    pub fn satisfied(&self, p: f64, q: f64, tol: f64) -> bool {
        (self.tau as f64) * p * q >= self.level - tol && (self.sigma as f64) * p >= -tol
    }
}

/// Squared distance objective for the hull projection.
fn hull_objective(a: f64, b: f64, u: f64, c: f64) -> f64 {
    let v = c / u;
    (u - a) * (u - a) + (v - b) * (v - b)
}

fn quartic(a: f64, b: f64, c: f64, u: f64) -> f64 {
    ((u - a) * u * u + b * c) * u - c * c
}

fn quartic_deriv(a: f64, b: f64, c: f64, u: f64) -> f64 {
    (4.0 * u - 3.0 * a) * u * u + b * c
}

/// Safeguarded Newton within a bracket `[lo, hi]` with `g(lo) < 0 < g(hi)`.
fn refine_root(a: f64, b: f64, c: f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut u = 0.5 * (lo + hi);
    for _ in 0..200 {
        let g = quartic(a, b, c, u);
        if g == 0.0 {
            return u;
        }
        if g < 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let dg = quartic_deriv(a, b, c, u);
        let mut next = if dg != 0.0 { u - g / dg } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi); // bisection fallback
        }
        if (next - u).abs() <= 1e-15 * u.abs() {
            return next;
        }
        u = next;
    }
    u
}

/// Euclidean projection of `(a, b)` onto `{(u, v): uv >= c, u >= 0}`, `c > 0`.
pub fn project_hull(a: f64, b: f64, c: f64) -> Result<(f64, f64)> {
    if !(c > 0.0) {
        return Err(Error::NonPositiveLevel(c));
    }
    if a > 0.0 && b > 0.0 && a * b >= c {
        return Ok((a, b));
    }

    // Bracket the boundary roots: g < 0 near 0, g > 0 for large u.
    let sqrt_c = c.sqrt();
    let mut lo = (1e-3 * sqrt_c).max(1e-300);
    while quartic(a, b, c, lo) >= 0.0 && lo > 1e-300 {
        lo /= 8.0;
    }
    let mut hi = a.max(sqrt_c).max(c / b.max(f64::EPSILON));
    while quartic(a, b, c, hi) <= 0.0 && hi < 1e300 {
        hi *= 8.0;
    }

    // Scan a coarse log grid for every sign change; the projection is unique
    // but the quartic can have up to three positive roots.
    const GRID: usize = 64;
    let log_lo = lo.ln();
    let step = (hi.ln() - log_lo) / (GRID - 1) as f64;
    let mut best: Option<(f64, f64)> = None;
    let mut prev_u = lo;
    let mut prev_g = quartic(a, b, c, lo);
    for i in 1..GRID {
        let u = (log_lo + step * i as f64).exp();
        let g = quartic(a, b, c, u);
        if prev_g < 0.0 && g >= 0.0 {
            let root = refine_root(a, b, c, prev_u, u);
            let obj = hull_objective(a, b, root, c);
            if best.map_or(true, |(_, f)| obj < f) {
                best = Some((root, obj));
            }
        }
        prev_u = u;
        prev_g = g;
    }
    let (u, _) = best.unwrap_or_else(|| {
        // No sign change on the grid can only mean the bracket collapsed to
        // the floor; fall back to the outermost bracket.
        let root = refine_root(a, b, c, lo, hi);
        (root, hull_objective(a, b, root, c))
    });
    Ok((u, c / u))
}

/// Projection onto the halfplane `{(p, q): sigma * p >= 0}`.
pub fn project_halfplane(a: f64, b: f64, sigma: i8) -> (f64, f64) {
    if (sigma as f64) * a >= 0.0 {
        (a, b)
    } else {
        (0.0, b)
    }
}

/// Projection of `(p, q)` onto the denormalized constraint set
/// `{sign(y) p q >= |y|, s p >= 0}`.
pub fn project_constraint(p: f64, q: f64, k: &HullConstraint) -> (f64, f64) {
    if k.degenerate {
        return project_halfplane(p, q, k.sigma);
    }
    let sig = k.sigma as f64;
    let tau = k.tau as f64;
    // (u, v) = (sigma p, sigma tau q) is an isometry, so projection commutes.
    let (u, v) = project_hull(sig * p, sig * tau * q, k.level)
        .expect("non-degenerate constraints have a positive level");
    (sig * u, sig * tau * v)
}
