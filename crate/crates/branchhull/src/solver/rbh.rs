//! The robust variant: an l1-penalized slack `e` shifts the second factor,
//! `sign(y_l)(c_l.m + e_l)(b_l.h) >= |y_l|`, absorbing outliers.
//!
//! The splitting couples `p = B h` and `q = C m + e`. The `(m, e)` block is
//! nonseparable, so it is solved by a bounded number of alternations between
//! the linear solve in `m` and entrywise soft-thresholding in `e`; everything
//! else reuses the base iteration.

use nalgebra::DVector;

use crate::error::Result;
use crate::instance::ProblemInstance;
use crate::projection::project_constraint;
use crate::solver::bh::{couplings_feasible, threshold, QuadraticBlock, SplitState};
use crate::solver::{build_constraints, SolverOptions, SolverResult, Status};

/// Options of the robust solve.
#[derive(Debug, Clone, PartialEq)]
pub struct RbhOptions {
    /// Weight of the slack penalty `lambda ||e||_1`.
    pub lambda: f64,
    pub inner: SolverOptions,
    /// Cap on `(m, e)` alternations per outer iteration; the block also
    /// stops once its change drops below 1e-10.
    pub inner_alternations: usize,
    /// Record the full objective (including the slack penalty) after every
    /// outer iteration.
    pub track_objective: bool,
}

impl Default for RbhOptions {
    fn default() -> Self {
        RbhOptions {
            lambda: 1.0,
            inner: SolverOptions::default(),
            inner_alternations: 20,
            track_objective: false,
        }
    }
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

const INNER_TOL: f64 = 1e-10;

/// Solves the robust program; the slack is attached to the result as
/// `e_star` and the reported `objective` stays `||h||^2 + ||m||^2`.
pub fn solve_rbh(instance: &ProblemInstance, opts: &RbhOptions) -> Result<SolverResult> {
    assert!(opts.lambda > 0.0, "lambda must be positive");
    let constraints = build_constraints(instance)?;
    let (k, n, l) = (instance.k(), instance.n(), instance.l());
    let b = instance.b();
    let c = instance.c();
    let inner = &opts.inner;

    let mut block_h = QuadraticBlock::new(b, inner.rho);
    let mut block_m = QuadraticBlock::new(c, inner.rho);
    let mut st = SplitState::new(&constraints, inner);

    let mut h = DVector::<f64>::zeros(k);
    let mut m = DVector::<f64>::zeros(n);
    let mut e = DVector::<f64>::zeros(l);
    let mut v_p = DVector::<f64>::zeros(l);
    let mut v_q = DVector::<f64>::zeros(l);
    let mut t_block = DVector::<f64>::zeros(l);
    let mut cm = DVector::<f64>::zeros(l);
    let mut dp = DVector::<f64>::zeros(l);
    let mut dq = DVector::<f64>::zeros(l);
    let mut rhs_h = DVector::<f64>::zeros(k);
    let mut rhs_m = DVector::<f64>::zeros(n);
    let mut pull_h = DVector::<f64>::zeros(k);
    let mut pull_m = DVector::<f64>::zeros(n);
    let alpha = inner.over_relaxation;

    let mut trace = opts.track_objective.then(Vec::new);
    let mut status = Status::MaxIters;
    let mut iters = inner.max_iters;
    let mut r_pri = f64::INFINITY;
    let mut r_dual = f64::INFINITY;

    for iter in 1..=inner.max_iters {
        // h block, as in the base program
        dp.copy_from(&st.p);
        dp -= &st.lam_p;
        rhs_h.gemv_tr(st.rho, b, &dp, 0.0);
        block_h.solve(&mut rhs_h);
        h.copy_from(&rhs_h);

        // joint (m, e) block on target t = q - lam_q:
        //   m <- argmin ||m||^2 + rho/2 ||C m + e - t||^2
        //   e <- soft(t - C m, lambda / rho)
        t_block.copy_from(&st.q);
        t_block -= &st.lam_q;
        for _ in 0..opts.inner_alternations.max(1) {
            dq.copy_from(&t_block);
            dq -= &e;
            rhs_m.gemv_tr(st.rho, c, &dq, 0.0);
            block_m.solve(&mut rhs_m);
            let m_change = (0..n).fold(0.0f64, |acc, i| acc.max((rhs_m[i] - m[i]).abs()));
            m.copy_from(&rhs_m);
            cm.gemv(1.0, c, &m, 0.0);
            let thresh = opts.lambda / st.rho;
            let mut e_change = 0.0f64;
            for i in 0..l {
                let next = soft_threshold(t_block[i] - cm[i], thresh);
                e_change = e_change.max((next - e[i]).abs());
                e[i] = next;
            }
            if m_change.max(e_change) <= INNER_TOL {
                break;
            }
        }

        v_p.gemv(1.0, b, &h, 0.0);
        v_q.copy_from(&cm);
        v_q += &e;

        let mut pri_sq = 0.0;
        for i in 0..l {
            let rp = alpha * v_p[i] + (1.0 - alpha) * st.p[i];
            let rq = alpha * v_q[i] + (1.0 - alpha) * st.q[i];
            let (pi, qi) = project_constraint(rp + st.lam_p[i], rq + st.lam_q[i], &constraints[i]);
            st.lam_p[i] += rp - pi;
            st.lam_q[i] += rq - qi;
            dp[i] = pi - st.p[i];
            dq[i] = qi - st.q[i];
            st.p[i] = pi;
            st.q[i] = qi;
            pri_sq += (v_p[i] - pi) * (v_p[i] - pi) + (v_q[i] - qi) * (v_q[i] - qi);
        }
        r_pri = pri_sq.sqrt();

        // The e coupling enters with the identity, so the dual residual and
        // scale carry a raw row-space term alongside the pullbacks.
        rhs_h.gemv_tr(st.rho, b, &dp, 0.0);
        rhs_m.gemv_tr(st.rho, c, &dq, 0.0);
        r_dual =
            (rhs_h.norm_squared() + rhs_m.norm_squared() + (st.rho * dq.norm()).powi(2)).sqrt();

        if let Some(tr) = trace.as_mut() {
            tr.push(h.norm_squared() + m.norm_squared() + opts.lambda * e.abs().sum());
        }

        let ax_norm = (v_p.norm_squared() + v_q.norm_squared()).sqrt();
        let z_norm = (st.p.norm_squared() + st.q.norm_squared()).sqrt();
        let eps_pri = threshold(2 * l, inner.tol_primal, ax_norm.max(z_norm));
        pull_h.gemv_tr(st.rho, b, &st.lam_p, 0.0);
        pull_m.gemv_tr(st.rho, c, &st.lam_q, 0.0);
        let dual_scale = (pull_h.norm_squared()
            + pull_m.norm_squared()
            + (st.rho * st.lam_q.norm()).powi(2))
        .sqrt();
        let eps_dual = threshold(k + n + l, inner.tol_dual, dual_scale);

        if r_pri <= eps_pri
            && r_dual <= eps_dual
            && couplings_feasible(&constraints, &v_p, &v_q, 10.0 * inner.tol_primal)
        {
            status = Status::Converged;
            iters = iter;
            break;
        }
        if st.diverging(r_pri, r_dual) {
            status = Status::InfeasibleDetected;
            iters = iter;
            break;
        }
        if inner.adaptive_rho && st.maybe_rescale(r_pri, r_dual, iter) {
            block_h.refactor(st.rho);
            block_m.refactor(st.rho);
        }
    }

    let objective = h.norm_squared() + m.norm_squared();
    Ok(SolverResult {
        h_star: h.as_slice().to_vec(),
        m_star: m.as_slice().to_vec(),
        e_star: Some(e.as_slice().to_vec()),
        status,
        iters,
        primal_residual: r_pri,
        dual_residual: r_dual,
        objective,
        rho_final: st.rho,
        dual_p: st.lam_p.as_slice().to_vec(),
        dual_q: st.lam_q.as_slice().to_vec(),
        objective_trace: trace,
    })
}
