//! Shared helpers for the integration suites: an independent projection
//! oracle (dense log grid plus golden-section refinement over the boundary
//! curve) and a deterministic test stream.

#![allow(dead_code)]

use branchhull::rng::SeededStream;

/// Distance-squared from `(a, b)` to the point `(u, c/u)` on the boundary.
pub fn curve_objective(a: f64, b: f64, c: f64, u: f64) -> f64 {
    (u - a) * (u - a) + (c / u - b) * (c / u - b)
}

fn golden(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..120 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let u = 0.5 * (lo + hi);
    (u, f(u))
}

/// Independent oracle for the hull projection of an outside point: scans
/// `u` on a dense log grid over `(1e-4, 1e2)` and refines every local
/// minimum by golden section. Returns `(u, objective)`.
pub fn projection_oracle(a: f64, b: f64, c: f64) -> (f64, f64) {
    const POINTS: usize = 8192;
    let lo_ln = 1e-4f64.ln();
    let hi_ln = 1e2f64.ln();
    let f = |u: f64| curve_objective(a, b, c, u);
    let us: Vec<f64> = (0..POINTS)
        .map(|i| (lo_ln + (hi_ln - lo_ln) * i as f64 / (POINTS - 1) as f64).exp())
        .collect();
    let fs: Vec<f64> = us.iter().map(|&u| f(u)).collect();
    let mut best = (us[0], fs[0]);
    for i in 0..POINTS {
        let left_ok = i == 0 || fs[i] <= fs[i - 1];
        let right_ok = i + 1 == POINTS || fs[i] <= fs[i + 1];
        if !(left_ok && right_ok) {
            continue;
        }
        let lo_u = us[i.saturating_sub(1)];
        let hi_u = us[(i + 1).min(POINTS - 1)];
        let (u, fu) = golden(f, lo_u, hi_u);
        if fu < best.1 {
            best = (u, fu);
        }
    }
    best
}

/// Draws `(a, b, c)` triples compatible with the oracle's grid range.
pub fn random_projection_input(stream: &mut SeededStream) -> (f64, f64, f64) {
    let a = stream.uniform_in(-8.0, 8.0);
    let b = stream.uniform_in(-8.0, 8.0);
    let c = stream.uniform_in(0.05, 8.0);
    (a, b, c)
}

/// A random point of `{(u, v): uv >= c, u > 0}`.
pub fn random_feasible_point(c: f64, stream: &mut SeededStream) -> (f64, f64) {
    let u = stream.uniform_in(-2.0f64, 2.0).exp();
    let v = c / u + stream.uniform_in(0.0, 5.0);
    (u, v)
}
