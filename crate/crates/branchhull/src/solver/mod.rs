//! Operator-splitting solver for the convex recovery programs: a quadratic
//! objective in `(h, m)`, per-row hull constraints handled by the 2-D
//! projections, and linear couplings `p = B h`, `q = C m` (plus the slack in
//! the robust variant).

mod bh;
mod oracle;
mod rbh;

pub use bh::solve_bh;
pub use oracle::{solve_bh_oracle, OracleGrid};
pub use rbh::{solve_rbh, RbhOptions};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::instance::ProblemInstance;
use crate::projection::HullConstraint;

/// Tuning knobs of the splitting iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Splitting penalty; must be positive.
    pub rho: f64,
    pub max_iters: usize,
    /// Primal stopping tolerance (used as both the absolute and relative
    /// coefficient of the standard residual scaling).
    pub tol_primal: f64,
    /// Dual stopping tolerance, same convention.
    pub tol_dual: f64,
    /// Over-relaxation factor in `[1.0, 1.9]`.
    pub over_relaxation: f64,
    /// Residual balancing: double or halve `rho` when one residual exceeds
    /// ten times the other, at most 30 times per solve.
    pub adaptive_rho: bool,
    /// Test hook: when set, the scaled duals start at `N(0, 1)` draws from
    /// this seed instead of zero. Used to probe uniqueness of the minimizer.
    pub dual_init_seed: Option<u64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            rho: 1.0,
            max_iters: 50_000,
            tol_primal: 1e-9,
            tol_dual: 1e-9,
            over_relaxation: 1.6,
            adaptive_rho: true,
            dual_init_seed: None,
        }
    }
}

/// Terminal state of one solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    /// Residual tolerances met and the iterate is feasible within
    /// `10 * tol_primal`.
    #[serde(rename = "converged")]
    Converged,
    #[serde(rename = "max-iters")]
    MaxIters,
    /// Residuals grew for 1000 consecutive iterations; the constraints are
    /// inconsistent (possible only for hand-built data).
    #[serde(rename = "infeasible-detected")]
    InfeasibleDetected,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::Converged => "converged",
            Status::MaxIters => "max-iters",
            Status::InfeasibleDetected => "infeasible-detected",
        };
        f.write_str(s)
    }
}

/// Solver output: the recovered pair, diagnostics, and (for the robust
/// program) the slack vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverResult {
    pub h_star: Vec<f64>,
    pub m_star: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_star: Option<Vec<f64>>,
    pub status: Status,
    pub iters: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// `||h*||^2 + ||m*||^2`, recomputed from the returned vectors (the
    /// robust program's slack penalty is not included).
    pub objective: f64,
    /// Final penalty and scaled duals, kept for optimality diagnostics.
    #[serde(skip)]
    pub rho_final: f64,
    #[serde(skip)]
    pub dual_p: Vec<f64>,
    #[serde(skip)]
    pub dual_q: Vec<f64>,
    /// Full objective after each outer iteration, recorded on request by the
    /// robust solver (includes the slack penalty).
    #[serde(skip)]
    pub objective_trace: Option<Vec<f64>>,
}

impl SolverResult {
    pub fn h(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.h_star)
    }

    pub fn m(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.m_star)
    }
}

/// Per-row constraint sets of an instance.
pub(crate) fn build_constraints(
    instance: &ProblemInstance,
) -> crate::error::Result<Vec<HullConstraint>> {
    (0..instance.l())
        .map(|l| HullConstraint::from_measurement(l, instance.y()[l], instance.s()[l]))
        .collect()
}

/// Optimality diagnostics at a solver result: the largest constraint
/// violation and the norm of the objective gradient plus the duals' pullback
/// `(2h + rho B' lam_p, 2m + rho C' lam_q)`.
pub fn kkt_residuals(instance: &ProblemInstance, result: &SolverResult) -> (f64, f64) {
    let h = result.h();
    let m = result.m();
    let p = instance.b() * &h;
    let mut q = instance.c() * &m;
    if let Some(e) = &result.e_star {
        for i in 0..q.len() {
            q[i] += e[i];
        }
    }
    let mut feasibility: f64 = 0.0;
    for i in 0..instance.l() {
        let yi = instance.y()[i];
        let hull = yi.abs() - crate::instance::sign(yi) as f64 * p[i] * q[i];
        let half = -(instance.s()[i] as f64) * p[i];
        feasibility = feasibility.max(hull).max(half);
    }
    feasibility = feasibility.max(0.0);

    let lam_p = DVector::from_column_slice(&result.dual_p);
    let lam_q = DVector::from_column_slice(&result.dual_q);
    let grad_h = 2.0 * &h + result.rho_final * instance.b().transpose() * lam_p;
    let grad_m = 2.0 * &m + result.rho_final * instance.c().transpose() * lam_q;
    let stationarity = (grad_h.norm_squared() + grad_m.norm_squared()).sqrt();
    (feasibility, stationarity)
}
