//! Independent brute-force reference for tiny instances (`K + N <= 4`).
//!
//! The objective `||h||^2 + ||m||^2` restricted to a ray `r * d` with `d` on
//! the unit sphere is `r^2`, and for fixed `d` the smallest feasible radius
//! has the closed form `r(d)^2 = max_l |y_l| / (sign(y_l) (b_l.d_h)(c_l.d_m))`
//! (infinite when some product has the wrong sign or a halfplane fails). The
//! oracle therefore grids the *direction* sphere, evaluates that exact radial
//! minimum, and shrinks the grid around the best cells. It shares no code
//! with the splitting solver.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::instance::ProblemInstance;
use crate::solver::{build_constraints, SolverResult, Status};
use crate::projection::HullConstraint;

/// Resolution of the direction search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleGrid {
    /// Points per angular axis in the global pass (0 picks a default by
    /// dimension: 720 for one angle, 72 for two, 40 for three).
    pub base_per_axis: usize,
    /// Simplex-descent budget per restart scale, in tens of iterations.
    pub refine_rounds: usize,
    /// How many separated grid minima are polished.
    pub candidates: usize,
}

impl Default for OracleGrid {
    fn default() -> Self {
        OracleGrid {
            base_per_axis: 0,
            refine_rounds: 60,
            candidates: 12,
        }
    }
}

/// Hyperspherical angles to a unit vector: `d - 1` angles for dimension `d`.
fn direction(angles: &[f64]) -> DVector<f64> {
    let d = angles.len() + 1;
    let mut v = DVector::zeros(d);
    let mut sin_prod = 1.0;
    for (i, &a) in angles.iter().enumerate() {
        v[i] = sin_prod * a.cos();
        sin_prod *= a.sin();
    }
    v[d - 1] = sin_prod;
    v
}

/// Exact squared radial minimum along `dir`, or infinity when the ray never
/// enters the feasible set.
fn radial_objective(
    instance: &ProblemInstance,
    constraints: &[HullConstraint],
    dir: &DVector<f64>,
) -> f64 {
    let k = instance.k();
    let b = instance.b();
    let c = instance.c();
    let mut worst = 0.0f64;
    for (l, con) in constraints.iter().enumerate() {
        let mut p = 0.0;
        for j in 0..k {
            p += b[(l, j)] * dir[j];
        }
        let mut q = 0.0;
        for j in 0..instance.n() {
            q += c[(l, j)] * dir[k + j];
        }
        if (con.sigma as f64) * p < 0.0 {
            return f64::INFINITY;
        }
        if con.degenerate {
            continue;
        }
        let t = (con.tau as f64) * p * q;
        if t <= 0.0 {
            return f64::INFINITY;
        }
        worst = worst.max(con.level / t);
    }
    worst
}

/// Nelder-Mead on the angle space. The radial objective is a pointwise max
/// of smooth ratios, so its minimum usually sits in a curved kink valley
/// that axis-aligned lattices track poorly; the adaptive simplex follows it.
/// Infeasible directions evaluate to infinity and behave as ordinary worst
/// vertices.
fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, start: &[f64], scale: f64, iters: usize) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..n {
        let mut x = start.to_vec();
        x[i] += scale;
        let fx = f(&x);
        simplex.push((x, fx));
    }
    for _ in 0..iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let reflect: Vec<f64> = (0..n).map(|j| 2.0 * centroid[j] - worst.0[j]).collect();
        let fr = f(&reflect);
        if fr < simplex[0].1 {
            let expand: Vec<f64> = (0..n).map(|j| 3.0 * centroid[j] - 2.0 * worst.0[j]).collect();
            let fe = f(&expand);
            simplex[n] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflect, fr);
        } else {
            let contract: Vec<f64> = (0..n)
                .map(|j| 0.5 * (centroid[j] + worst.0[j]))
                .collect();
            let fc = f(&contract);
            if fc < worst.1 {
                simplex[n] = (contract, fc);
            } else {
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    for j in 0..n {
                        v.0[j] = 0.5 * (v.0[j] + best[j]);
                    }
                    v.1 = f(&v.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

fn lattice(centers: &[f64], halfwidths: &[f64], per_axis: usize) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = centers
        .iter()
        .zip(halfwidths)
        .map(|(&c, &w)| {
            (0..per_axis)
                .map(|i| c - w + 2.0 * w * i as f64 / (per_axis - 1) as f64)
                .collect()
        })
        .collect();
    let mut out = vec![vec![]];
    for axis in &axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for &v in axis {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Brute-force minimization for `K + N <= 4`; used to certify the splitting
/// solver in tests. Only `h_star`, `m_star`, `objective` and `status` of the
/// result are meaningful.
pub fn solve_bh_oracle(instance: &ProblemInstance, grid: &OracleGrid) -> Result<SolverResult> {
    let d = instance.k() + instance.n();
    if d > 4 {
        return Err(Error::OracleDimension(d));
    }
    let constraints = build_constraints(instance)?;
    let n_angles = d - 1;
    let base = if grid.base_per_axis > 0 {
        grid.base_per_axis
    } else {
        match n_angles {
            1 => 720,
            2 => 72,
            _ => 40,
        }
    };

    // Global pass over the full sphere: the last angle spans [0, 2pi), the
    // others [0, pi]. The feasible direction cone can be narrower than any
    // fixed spacing, so the resolution doubles until the scan sees it.
    let mut centers = vec![std::f64::consts::FRAC_PI_2; n_angles];
    let mut widths = vec![std::f64::consts::FRAC_PI_2; n_angles];
    *centers.last_mut().unwrap() = std::f64::consts::PI;
    *widths.last_mut().unwrap() = std::f64::consts::PI;

    let mut scored: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut per_axis = base;
    for _ in 0..4 {
        for angles in lattice(&centers, &widths, per_axis) {
            let obj = radial_objective(instance, &constraints, &direction(&angles));
            if !obj.is_finite() {
                continue;
            }
            // bounded best list; 256 entries are plenty for basin seeding
            let pos = scored.partition_point(|(v, _)| *v < obj);
            if pos < 256 {
                scored.insert(pos, (obj, angles));
                scored.truncate(256);
            }
        }
        if !scored.is_empty() {
            break;
        }
        per_axis *= 2;
    }
    if scored.is_empty() {
        return Err(Error::InvalidArgument(
            "oracle found no feasible direction on the base grid".into(),
        ));
    }

    // Keep the best cells separated by at least two grid steps.
    let base_step = std::f64::consts::PI / (per_axis - 1) as f64;
    let mut seeds: Vec<Vec<f64>> = Vec::new();
    for (obj, angles) in &scored {
        if !obj.is_finite() || seeds.len() >= grid.candidates {
            break;
        }
        let separated = seeds.iter().all(|s| {
            s.iter()
                .zip(angles)
                .any(|(a, b)| (a - b).abs() > 2.0 * base_step)
        });
        if seeds.is_empty() || separated {
            seeds.push(angles.clone());
        }
    }

    // Chained simplex descents with shrinking restart scales from every
    // candidate basin; the restarts break the stagnation Nelder-Mead is
    // prone to on pointwise-max objectives.
    let objective = |angles: &[f64]| radial_objective(instance, &constraints, &direction(angles));
    let mut best_angles = seeds[0].clone();
    let mut best_obj = f64::INFINITY;
    for seed in seeds {
        let mut point = seed;
        let mut value = objective(&point);
        for scale in [2.0 * base_step, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8] {
            let (p, v) = nelder_mead(&objective, &point, scale, grid.refine_rounds * 10);
            if v < value {
                point = p;
                value = v;
            }
        }
        if value < best_obj {
            best_obj = value;
            best_angles = point;
        }
    }

    let dir = direction(&best_angles);
    let r = best_obj.sqrt();
    let point = &dir * r;
    Ok(SolverResult {
        h_star: point.as_slice()[..instance.k()].to_vec(),
        m_star: point.as_slice()[instance.k()..].to_vec(),
        e_star: None,
        status: Status::Converged,
        iters: 0,
        primal_residual: 0.0,
        dual_residual: 0.0,
        objective: best_obj,
        rho_final: 0.0,
        dual_p: Vec::new(),
        dual_q: Vec::new(),
        objective_trace: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{dmatrix, dvector};

    fn scalar_instance(y: f64) -> ProblemInstance {
        ProblemInstance::new(dmatrix![1.0], dmatrix![1.0], dvector![y], vec![1]).unwrap()
    }

    #[test]
    fn symmetric_scalar_cases() {
        let res = solve_bh_oracle(&scalar_instance(1.0), &OracleGrid::default()).unwrap();
        assert_relative_eq!(res.objective, 2.0, max_relative = 1e-9);
        assert_relative_eq!(res.h_star[0], 1.0, max_relative = 1e-6);

        // hm >= 4 symmetric: optimum (2, 2), objective 8
        let res = solve_bh_oracle(&scalar_instance(4.0), &OracleGrid::default()).unwrap();
        assert_relative_eq!(res.objective, 8.0, max_relative = 1e-9);
        assert_relative_eq!(res.h_star[0], 2.0, max_relative = 1e-6);
        assert_relative_eq!(res.m_star[0], 2.0, max_relative = 1e-6);
    }

    #[test]
    fn dimension_guard() {
        let (inst, _) = crate::instance::generate_instance(
            3,
            2,
            10,
            crate::instance::NoiseModel::None,
            crate::instance::Target::Gaussian,
            1,
        )
        .unwrap();
        assert!(matches!(
            solve_bh_oracle(&inst, &OracleGrid::default()),
            Err(Error::OracleDimension(5))
        ));
    }
}
