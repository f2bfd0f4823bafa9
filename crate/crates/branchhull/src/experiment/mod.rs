//! The two synthetic studies: the noiseless phase diagram over
//! `(K + N, L)` and the noise sweep over the sampling ratio, with CSV
//! output and plot-script emission.

mod csv_out;
mod plot;

pub use csv_out::{emit_csv, emit_csv_to};
pub use plot::{emit_plot_script, emit_plot_script_to, PlotKind};

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::{generate_instance, recovery_error, NoiseModel, Target};
use crate::rng::derive_seed;
use crate::solver::{solve_bh, SolverOptions, Status};

/// Sweep definition: dimension pairs, measurement counts, noise half-widths,
/// trial count, and the base seed everything else derives from.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub dims: Vec<(usize, usize)>,
    pub ls: Vec<usize>,
    pub alphas: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
    /// Absolute recovery-error threshold classifying a trial as a success.
    pub success_threshold: f64,
}

impl ExperimentGrid {
    /// Desk-scale noiseless grid: `K = N` in `{5, 10, 15, 20}`,
    /// `L` in `{10, 20, ..., 120}`, 10 trials.
    pub fn desk_phase(base_seed: u64) -> Self {
        ExperimentGrid {
            dims: [5, 10, 15, 20].iter().map(|&d| (d, d)).collect(),
            ls: (1..=12).map(|i| 10 * i).collect(),
            alphas: vec![0.0],
            trials: 10,
            base_seed,
            success_threshold: 1e-5,
        }
    }

    /// Full noiseless grid of the original study: `K = N` in
    /// `{10, 20, ..., 150}`, `L` in `{10, 70, ..., 850}`.
    pub fn paper_phase(base_seed: u64) -> Self {
        ExperimentGrid {
            dims: (1..=15).map(|i| (10 * i, 10 * i)).collect(),
            ls: (0..=14).map(|i| 10 + 60 * i).collect(),
            alphas: vec![0.0],
            trials: 10,
            base_seed,
            success_threshold: 1e-5,
        }
    }

    /// Noise sweep at `K = N = 20` over `L` in `{10, 20, ..., 200}` and
    /// `alpha` in `{0, 0.1, ..., 1}`.
    pub fn paper_noise(base_seed: u64) -> Self {
        ExperimentGrid {
            dims: vec![(20, 20)],
            ls: (1..=20).map(|i| 10 * i).collect(),
            alphas: (0..=10).map(|i| i as f64 / 10.0).collect(),
            trials: 10,
            base_seed,
            success_threshold: 1e-5,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.dims.iter().any(|&(k, n)| k < 1 || n < 1) || self.ls.iter().any(|&l| l < 1) {
            return Err(Error::InvalidDimension(
                "grid dimensions must be at least 1".into(),
            ));
        }
        if !(self.success_threshold > 0.0) {
            return Err(Error::InvalidArgument(
                "success threshold must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Stable per-trial seed: SHA-256 of the label
/// `bh-cell|base=<seed>|K=<k>|N=<n>|L=<l>|alpha=<alpha:.16e>|trial=<t>`,
/// first 8 bytes little-endian. Any single trial can be re-run in isolation
/// from these coordinates alone.
pub fn cell_seed(base_seed: u64, k: usize, n: usize, l: usize, alpha: f64, trial: usize) -> u64 {
    derive_seed(&format!(
        "bh-cell|base={base_seed}|K={k}|N={n}|L={l}|alpha={alpha:.16e}|trial={trial}"
    ))
}

/// One generate-solve-classify run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub k: usize,
    pub n: usize,
    pub l: usize,
    pub alpha: f64,
    pub trial: usize,
    pub seed: u64,
    pub success: bool,
    pub abs_error: f64,
    pub rel_error: f64,
    pub theorem2_bound: f64,
    pub iters: usize,
    pub wallclock_s: f64,
    pub status: Status,
}

impl TrialRecord {
    /// Equality of everything that is a pure function of the grid (the
    /// wallclock column is timing noise).
    pub fn same_modulo_wallclock(&self, other: &TrialRecord) -> bool {
        self.k == other.k
            && self.n == other.n
            && self.l == other.l
            && self.alpha == other.alpha
            && self.trial == other.trial
            && self.seed == other.seed
            && self.success == other.success
            && self.abs_error == other.abs_error
            && self.rel_error == other.rel_error
            && self.theorem2_bound == other.theorem2_bound
            && self.iters == other.iters
            && self.status == other.status
    }
}

/// Rows in deterministic `(dims, L, alpha, trial)` order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub records: Vec<TrialRecord>,
}

/// Aggregated success rate of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellRate {
    pub k: usize,
    pub n: usize,
    pub l: usize,
    pub alpha: f64,
    pub trials: usize,
    pub successes: usize,
}

impl CellRate {
    pub fn rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// Aggregated error statistics of one noise-sweep cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseCell {
    pub k: usize,
    pub n: usize,
    pub l: usize,
    pub alpha: f64,
    pub trials: usize,
    pub max_rel_error: f64,
    pub mean_rel_error: f64,
    /// Fraction of trials with `abs_error <= theorem2_bound`.
    pub within_bound: f64,
}

impl ResultTable {
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Success rates per `(K, N, L, alpha)` cell, in first-seen order.
    pub fn success_rates(&self) -> Vec<CellRate> {
        let mut cells: Vec<CellRate> = Vec::new();
        for r in &self.records {
            let found = cells.iter_mut().find(|c| {
                c.k == r.k && c.n == r.n && c.l == r.l && c.alpha == r.alpha
            });
            match found {
                Some(c) => {
                    c.trials += 1;
                    c.successes += r.success as usize;
                }
                None => cells.push(CellRate {
                    k: r.k,
                    n: r.n,
                    l: r.l,
                    alpha: r.alpha,
                    trials: 1,
                    successes: r.success as usize,
                }),
            }
        }
        cells
    }

    /// Per-cell error aggregates for the noise sweep.
    pub fn noise_cells(&self) -> Vec<NoiseCell> {
        let mut cells: Vec<NoiseCell> = Vec::new();
        for r in &self.records {
            let found = cells.iter_mut().find(|c| {
                c.k == r.k && c.n == r.n && c.l == r.l && c.alpha == r.alpha
            });
            match found {
                Some(c) => {
                    c.trials += 1;
                    c.max_rel_error = c.max_rel_error.max(r.rel_error);
                    c.mean_rel_error += r.rel_error;
                    c.within_bound += (r.abs_error <= r.theorem2_bound) as usize as f64;
                }
                None => cells.push(NoiseCell {
                    k: r.k,
                    n: r.n,
                    l: r.l,
                    alpha: r.alpha,
                    trials: 1,
                    max_rel_error: r.rel_error,
                    mean_rel_error: r.rel_error,
                    within_bound: (r.abs_error <= r.theorem2_bound) as usize as f64,
                }),
            }
        }
        for c in &mut cells {
            c.mean_rel_error /= c.trials as f64;
            c.within_bound /= c.trials as f64;
        }
        cells
    }
}

/// Thread pool honoring the `BH_THREADS` cap.
fn pool() -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = std::env::var("BH_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t >= 1)
    {
        builder = builder.num_threads(t);
    }
    builder.build().expect("thread pool construction")
}

fn run_trial(
    k: usize,
    n: usize,
    l: usize,
    alpha: f64,
    trial: usize,
    grid: &ExperimentGrid,
    noise: NoiseModel,
    target: Target,
) -> TrialRecord {
    let seed = cell_seed(grid.base_seed, k, n, l, alpha, trial);
    let start = Instant::now();
    // Grid validation makes generation and constraint construction
    // infallible here.
    let (instance, truth) =
        generate_instance(k, n, l, noise, target, seed).expect("validated grid cell");
    let result = solve_bh(&instance, &SolverOptions::default()).expect("generated instances have well-defined branches");
    let wallclock_s = start.elapsed().as_secs_f64();
    let err = recovery_error(&result.h(), &result.m(), &truth);
    let success = result.status == Status::Converged && err.absolute < grid.success_threshold;
    TrialRecord {
        k,
        n,
        l,
        alpha,
        trial,
        seed,
        success,
        abs_error: err.absolute,
        rel_error: err.relative,
        theorem2_bound: err.theorem_bound,
        iters: result.iters,
        wallclock_s,
        status: result.status,
    }
}

fn run_grid(grid: &ExperimentGrid, target: Target) -> Result<ResultTable> {
    grid.validate()?;
    let mut jobs = Vec::new();
    for &(k, n) in &grid.dims {
        for &l in &grid.ls {
            for &alpha in &grid.alphas {
                for trial in 0..grid.trials {
                    jobs.push((k, n, l, alpha, trial));
                }
            }
        }
    }
    let records = pool().install(|| {
        jobs.par_iter()
            .map(|&(k, n, l, alpha, trial)| {
                let noise = if alpha == 0.0 {
                    NoiseModel::None
                } else {
                    NoiseModel::UniformSymmetric { alpha }
                };
                run_trial(k, n, l, alpha, trial, grid, noise, target)
            })
            .collect()
    });
    Ok(ResultTable { records })
}

/// Noiseless recovery sweep against the standard-basis target. Requires
/// `alphas == [0]`. Solver failures are recorded per row, never raised.
pub fn phase_diagram(grid: &ExperimentGrid) -> Result<ResultTable> {
    if grid.alphas != [0.0] {
        return Err(Error::InvalidArgument(
            "phase diagram runs noiseless; alphas must be exactly [0]".into(),
        ));
    }
    run_grid(grid, Target::StandardBasis)
}

/// Noise sweep against Gaussian targets with `xi` uniform on
/// `[-alpha, alpha]`; requires every `alpha` in `[0, 1]`.
pub fn noise_sweep(grid: &ExperimentGrid) -> Result<ResultTable> {
    if grid.alphas.is_empty() || grid.alphas.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(Error::InvalidArgument(
            "noise sweep needs alphas within [0, 1]".into(),
        ));
    }
    run_grid(grid, Target::Gaussian)
}
