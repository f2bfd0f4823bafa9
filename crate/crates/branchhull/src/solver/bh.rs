//! Splitting iteration for the base program: minimize `||h||^2 + ||m||^2`
//! over the per-row hull and halfplane constraints.
//!
//! With couplings `p = B h`, `q = C m` the scaled iteration is
//!
//! 1. `(2I + rho B'B) h = rho B'(p - lam_p)` and the analogue for `m`,
//!    through Cholesky factorizations computed once per penalty value;
//! 2. row-wise projection of `(v_p + lam_p, v_q + lam_q)` onto the
//!    constraint sets, where `v = alpha Ax + (1 - alpha) z_old` is the
//!    over-relaxed coupling;
//! 3. scaled dual ascent.
//!
//! `Converged` additionally requires the iterate itself to be feasible
//! within `10 * tol_primal`, so the reported status certifies the point and
//! not only the splitting residuals.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::Result;
use crate::instance::ProblemInstance;
use crate::projection::{project_constraint, HullConstraint};
use crate::rng::SeededStream;
use crate::solver::{build_constraints, SolverOptions, SolverResult, Status};

const RHO_UPDATE_CAP: usize = 30;
const RHO_CHECK_PERIOD: usize = 25;
const RHO_RATIO: f64 = 10.0;
const DIVERGENCE_RUN: usize = 1000;

pub(crate) struct QuadraticBlock {
    gram: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl QuadraticBlock {
    /// Factorization of `2I + rho A'A`.
    pub(crate) fn new(a: &DMatrix<f64>, rho: f64) -> Self {
        let gram = a.transpose() * a;
        let chol = Self::factor(&gram, rho);
        QuadraticBlock { gram, chol }
    }

    fn factor(gram: &DMatrix<f64>, rho: f64) -> Cholesky<f64, Dyn> {
        let k = gram.nrows();
        let mut m = gram * rho;
        for i in 0..k {
            m[(i, i)] += 2.0;
        }
        Cholesky::new(m).expect("2I + rho A'A is positive definite")
    }

    pub(crate) fn refactor(&mut self, rho: f64) {
        self.chol = Self::factor(&self.gram, rho);
    }

    /// Solves `(2I + rho A'A) x = rhs` in place.
    pub(crate) fn solve(&self, rhs: &mut DVector<f64>) {
        self.chol.solve_mut(rhs);
    }
}

/// Dual and splitting state shared by the base and robust loops.
pub(crate) struct SplitState {
    pub rho: f64,
    pub p: DVector<f64>,
    pub q: DVector<f64>,
    pub lam_p: DVector<f64>,
    pub lam_q: DVector<f64>,
    rho_updates: usize,
    grow_run: usize,
    prev_combined: f64,
}

impl SplitState {
    pub(crate) fn new(constraints: &[HullConstraint], opts: &SolverOptions) -> Self {
        let l = constraints.len();
        let mut p = DVector::zeros(l);
        let mut q = DVector::zeros(l);
        for (i, k) in constraints.iter().enumerate() {
            let (pi, qi) = project_constraint(0.0, 0.0, k);
            p[i] = pi;
            q[i] = qi;
        }
        let (lam_p, lam_q) = match opts.dual_init_seed {
            None => (DVector::zeros(l), DVector::zeros(l)),
            Some(seed) => {
                let mut stream = SeededStream::new(seed);
                (
                    DVector::from_fn(l, |_, _| stream.normal()),
                    DVector::from_fn(l, |_, _| stream.normal()),
                )
            }
        };
        SplitState {
            rho: opts.rho,
            p,
            q,
            lam_p,
            lam_q,
            rho_updates: 0,
            grow_run: 0,
            prev_combined: f64::INFINITY,
        }
    }

    /// Residual-balancing penalty update; returns true when `rho` changed.
    pub(crate) fn maybe_rescale(&mut self, r_pri: f64, r_dual: f64, iter: usize) -> bool {
        if self.rho_updates >= RHO_UPDATE_CAP || iter % RHO_CHECK_PERIOD != 0 {
            return false;
        }
        let factor = if r_pri > RHO_RATIO * r_dual {
            2.0
        } else if r_dual > RHO_RATIO * r_pri {
            0.5
        } else {
            return false;
        };
        self.rho *= factor;
        self.lam_p /= factor;
        self.lam_q /= factor;
        self.rho_updates += 1;
        true
    }

    /// Tracks residual growth; returns true after 1000 consecutive
    /// increases, signalling inconsistent constraints.
    pub(crate) fn diverging(&mut self, r_pri: f64, r_dual: f64) -> bool {
        let combined = r_pri + r_dual;
        if combined > self.prev_combined {
            self.grow_run += 1;
        } else {
            self.grow_run = 0;
        }
        self.prev_combined = combined;
        self.grow_run >= DIVERGENCE_RUN
    }
}

/// Standard residual thresholds: `sqrt(dim) * tol + tol * scale`.
pub(crate) fn threshold(dim: usize, tol: f64, scale: f64) -> f64 {
    (dim as f64).sqrt() * tol + tol * scale
}

/// Row-wise feasibility of the couplings within `tol`.
pub(crate) fn couplings_feasible(
    constraints: &[HullConstraint],
    v_p: &DVector<f64>,
    v_q: &DVector<f64>,
    tol: f64,
) -> bool {
    constraints
        .iter()
        .enumerate()
        .all(|(i, k)| k.satisfied(v_p[i], v_q[i], tol))
}

/// Solves the base program on `instance`. Non-convergence is reported
/// through [`Status`]; the only error is hand-built data carrying a zero
/// sign against a nonzero measurement.
pub fn solve_bh(instance: &ProblemInstance, opts: &SolverOptions) -> Result<SolverResult> {
    let constraints = build_constraints(instance)?;
    let (k, n, l) = (instance.k(), instance.n(), instance.l());
    let b = instance.b();
    let c = instance.c();

    let mut block_h = QuadraticBlock::new(b, opts.rho);
    let mut block_m = QuadraticBlock::new(c, opts.rho);
    let mut st = SplitState::new(&constraints, opts);

    let mut h = DVector::<f64>::zeros(k);
    let mut m = DVector::<f64>::zeros(n);
    let mut v_p = DVector::<f64>::zeros(l);
    let mut v_q = DVector::<f64>::zeros(l);
    let mut dp = DVector::<f64>::zeros(l); // p - p_old, then q - q_old
    let mut dq = DVector::<f64>::zeros(l);
    let mut rhs_h = DVector::<f64>::zeros(k);
    let mut rhs_m = DVector::<f64>::zeros(n);
    let mut pullback_h = DVector::<f64>::zeros(k);
    let mut pullback_m = DVector::<f64>::zeros(n);
    let alpha = opts.over_relaxation;

    let mut status = Status::MaxIters;
    let mut iters = opts.max_iters;
    let mut r_pri = f64::INFINITY;
    let mut r_dual = f64::INFINITY;

    for iter in 1..=opts.max_iters {
        // h-update: (2I + rho B'B) h = rho B'(p - lam_p); same for m.
        dp.copy_from(&st.p);
        dp -= &st.lam_p;
        rhs_h.gemv_tr(st.rho, b, &dp, 0.0);
        block_h.solve(&mut rhs_h);
        h.copy_from(&rhs_h);

        dq.copy_from(&st.q);
        dq -= &st.lam_q;
        rhs_m.gemv_tr(st.rho, c, &dq, 0.0);
        block_m.solve(&mut rhs_m);
        m.copy_from(&rhs_m);

        v_p.gemv(1.0, b, &h, 0.0);
        v_q.gemv(1.0, c, &m, 0.0);

        // projection block on over-relaxed couplings, then dual ascent
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

        rhs_h.gemv_tr(st.rho, b, &dp, 0.0);
        rhs_m.gemv_tr(st.rho, c, &dq, 0.0);
        r_dual = (rhs_h.norm_squared() + rhs_m.norm_squared()).sqrt();

        let ax_norm = (v_p.norm_squared() + v_q.norm_squared()).sqrt();
        let z_norm = (st.p.norm_squared() + st.q.norm_squared()).sqrt();
        let eps_pri = threshold(2 * l, opts.tol_primal, ax_norm.max(z_norm));
        pullback_h.gemv_tr(st.rho, b, &st.lam_p, 0.0);
        pullback_m.gemv_tr(st.rho, c, &st.lam_q, 0.0);
        let dual_scale = (pullback_h.norm_squared() + pullback_m.norm_squared()).sqrt();
        let eps_dual = threshold(k + n, opts.tol_dual, dual_scale);

        if r_pri <= eps_pri
            && r_dual <= eps_dual
            && couplings_feasible(&constraints, &v_p, &v_q, 10.0 * opts.tol_primal)
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
        if opts.adaptive_rho && st.maybe_rescale(r_pri, r_dual, iter) {
            block_h.refactor(st.rho);
            block_m.refactor(st.rho);
        }
    }

    let objective = h.norm_squared() + m.norm_squared();
    Ok(SolverResult {
        h_star: h.as_slice().to_vec(),
        m_star: m.as_slice().to_vec(),
        e_star: None,
        status,
        iters,
        primal_residual: r_pri,
        dual_residual: r_dual,
        objective,
        rho_final: st.rho,
        dual_p: st.lam_p.as_slice().to_vec(),
        dual_q: st.lam_q.as_slice().to_vec(),
        objective_trace: None,
    })
}
