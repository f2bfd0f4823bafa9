use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use branchhull::experiment::{
    emit_csv, emit_plot_script, noise_sweep, phase_diagram, ExperimentGrid, PlotKind,
};
use branchhull::instance::{generate_instance, NoiseModel, Target};
use branchhull::json::{read_instance_path, write_instance_path, InstanceDocument};
use branchhull::projection::project_hull;
use branchhull::solver::{solve_bh, solve_rbh, RbhOptions, SolverOptions};
use branchhull::theory::{
    binomial_tail, hoeffding_tail_bound, lemma6_count, mc_sphere_covering, wendel_probability,
    Distribution,
};

/// Bilinear recovery from entrywise products: instance generation, the
/// convex solvers, probability-bound checks, and the synthetic studies.
#[derive(Parser)]
#[command(name = "bh", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded instance and write it as JSON.
    Gen(GenArgs),
    /// Solve an instance file with the splitting solver.
    Solve(SolveArgs),
    /// Solve the slack-penalized robust program.
    SolveRbh(SolveRbhArgs),
    /// Project a point onto one hull constraint (debugging aid).
    Project(ProjectArgs),
    /// Closed-form bounds and their Monte Carlo validation.
    #[command(subcommand)]
    Lemma(LemmaCommand),
    /// Noiseless phase diagram over (K+N, L).
    Phase(PhaseArgs),
    /// Recovery error under uniform multiplicative noise.
    Noise(NoiseArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long = "K")]
    k: usize,
    #[arg(long = "N")]
    n: usize,
    #[arg(long = "L")]
    l: usize,
    /// Noise kind: none, uniform or one-sided.
    #[arg(long, default_value = "none")]
    noise: String,
    /// Noise half-width.
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Target kind: standard-basis or gaussian.
    #[arg(long, default_value = "gaussian")]
    target: String,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Omit the ground-truth block from the file.
    #[arg(long)]
    no_truth: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Sets both the primal and dual stopping tolerances.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct SolveRbhArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    inner_alternations: Option<usize>,
}

#[derive(Args)]
struct ProjectArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    #[arg(long)]
    c: f64,
}

#[derive(Subcommand)]
enum LemmaCommand {
    /// Exact sphere-covering probability, optionally validated by Monte
    /// Carlo over uniform hemisphere centers.
    Wendel {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exponential tail bound against the exact binomial tail.
    Hoeffding {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Sampled minimum of the joint indicator count on Gaussian subspaces.
    Count {
        #[arg(long = "K")]
        k: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long = "L")]
        l: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct PhaseArgs {
    /// Comma-separated values of K = N.
    #[arg(long, value_delimiter = ',', default_value = "5,10,15,20")]
    dims: Vec<usize>,
    #[arg(long = "Lmin", default_value_t = 10)]
    lmin: usize,
    #[arg(long = "Lmax", default_value_t = 120)]
    lmax: usize,
    #[arg(long = "Lstep", default_value_t = 10)]
    lstep: usize,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-5)]
    threshold: f64,
    /// Run the original full-scale grid (hours, not minutes).
    #[arg(long)]
    paper_grid: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct NoiseArgs {
    #[arg(long = "K", default_value_t = 20)]
    k: usize,
    #[arg(long = "N", default_value_t = 20)]
    n: usize,
    #[arg(long = "Lmin", default_value_t = 10)]
    lmin: usize,
    #[arg(long = "Lmax", default_value_t = 200)]
    lmax: usize,
    #[arg(long = "Lstep", default_value_t = 10)]
    lstep: usize,
    /// Comma-separated noise half-widths in [0, 1].
    #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")]
    alphas: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    plot: Option<PathBuf>,
}

fn solver_options(rho: Option<f64>, max_iters: Option<usize>, tol: Option<f64>) -> SolverOptions {
    let mut opts = SolverOptions::default();
    if let Some(r) = rho {
        opts.rho = r;
    }
    if let Some(m) = max_iters {
        opts.max_iters = m;
    }
    if let Some(t) = tol {
        opts.tol_primal = t;
        opts.tol_dual = t;
    }
    opts
}

fn parse_noise(kind: &str, alpha: f64) -> anyhow::Result<NoiseModel> {
    match kind {
        "none" => Ok(NoiseModel::None),
        "uniform" | "uniform-symmetric" => Ok(NoiseModel::UniformSymmetric { alpha }),
        "one-sided" | "one-sided-uniform" => Ok(NoiseModel::OneSidedUniform { alpha }),
        other => bail!("unknown noise kind {other:?} (use none, uniform or one-sided)"),
    }
}

fn parse_target(kind: &str) -> anyhow::Result<Target> {
    match kind {
        "standard-basis" => Ok(Target::StandardBasis),
        "gaussian" => Ok(Target::Gaussian),
        other => bail!("unknown target {other:?} (use standard-basis or gaussian)"),
    }
}

fn range(lmin: usize, lmax: usize, lstep: usize) -> anyhow::Result<Vec<usize>> {
    if lstep == 0 || lmin == 0 || lmax < lmin {
        bail!("invalid L range {lmin}..={lmax} step {lstep}");
    }
    Ok((lmin..=lmax).step_by(lstep).collect())
}

fn main() -> anyhow::Result<()> {
    // BH_THREADS caps every parallel section, including the Monte Carlo
    // validators that run on the global pool.
    if let Some(t) = std::env::var("BH_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t >= 1)
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .ok();
    }

    match Cli::parse().command {
        Command::Gen(args) => {
            let noise = parse_noise(&args.noise, args.alpha)?;
            let target = parse_target(&args.target)?;
            let (instance, truth) = generate_instance(args.k, args.n, args.l, noise, target, args.seed)?;
            let doc = InstanceDocument {
                instance,
                truth: (!args.no_truth).then_some(truth),
                seed: args.seed,
                noise,
            };
            write_instance_path(&args.out, &doc)?;
            eprintln!("wrote {}", args.out.display());
        }
        Command::Solve(args) => {
            let doc = read_instance_path(&args.instance)
                .with_context(|| format!("reading {}", args.instance.display()))?;
            let opts = solver_options(args.rho, args.max_iters, args.tol);
            let result = solve_bh(&doc.instance, &opts)?;
            println!("{}", serde_json::to_string_pretty(&result)?);
        }
        Command::SolveRbh(args) => {
            let doc = read_instance_path(&args.instance)
                .with_context(|| format!("reading {}", args.instance.display()))?;
            let mut opts = RbhOptions {
                lambda: args.lambda,
                inner: solver_options(args.rho, args.max_iters, args.tol),
                ..RbhOptions::default()
            };
            if let Some(ia) = args.inner_alternations {
                opts.inner_alternations = ia;
            }
            let result = solve_rbh(&doc.instance, &opts)?;
            println!("{}", serde_json::to_string_pretty(&result)?);
        }
        Command::Project(args) => {
            let (u, v) = project_hull(args.a, args.b, args.c)?;
            let objective = (u - args.a).powi(2) + (v - args.b).powi(2);
            let residual = u.powi(4) - args.a * u.powi(3) + args.b * args.c * u - args.c * args.c;
            println!(
                "{}",
                serde_json::json!({"u": u, "v": v, "objective": objective, "residual": residual})
            );
        }
        Command::Lemma(cmd) => run_lemma(cmd)?,
        Command::Phase(args) => {
            let grid = if args.paper_grid {
                ExperimentGrid {
                    trials: args.trials,
                    ..ExperimentGrid::paper_phase(args.seed)
                }
            } else {
                ExperimentGrid {
                    dims: args.dims.iter().map(|&d| (d, d)).collect(),
                    ls: range(args.lmin, args.lmax, args.lstep)?,
                    alphas: vec![0.0],
                    trials: args.trials,
                    base_seed: args.seed,
                    success_threshold: args.threshold,
                }
            };
            let table = phase_diagram(&grid)?;
            emit_csv(&table, &args.out)?;
            eprintln!("wrote {}", args.out.display());
            if let Some(plot) = args.plot {
                emit_plot_script(&table, PlotKind::Phase, &plot)?;
                eprintln!("wrote {}", plot.display());
            }
            for cell in table.success_rates() {
                println!(
                    "K={} N={} L={} success_rate={:.2}",
                    cell.k,
                    cell.n,
                    cell.l,
                    cell.rate()
                );
            }
        }
        Command::Noise(args) => {
            let grid = ExperimentGrid {
                dims: vec![(args.k, args.n)],
                ls: range(args.lmin, args.lmax, args.lstep)?,
                alphas: args.alphas,
                trials: args.trials,
                base_seed: args.seed,
                success_threshold: 1e-5,
            };
            let table = noise_sweep(&grid)?;
            emit_csv(&table, &args.out)?;
            eprintln!("wrote {}", args.out.display());
            if let Some(plot) = args.plot {
                emit_plot_script(&table, PlotKind::Noise, &plot)?;
                eprintln!("wrote {}", plot.display());
            }
            for cell in table.noise_cells() {
                println!(
                    "alpha={:.2} L={} max_rel={:.3e} within_bound={:.2}",
                    cell.alpha, cell.l, cell.max_rel_error, cell.within_bound
                );
            }
        }
    }
    Ok(())
}

fn run_lemma(cmd: LemmaCommand) -> anyhow::Result<()> {
    match cmd {
        LemmaCommand::Wendel { n, m, trials, seed } => {
            let closed_form = wendel_probability(n, m);
            let (empirical, ci) = match trials {
                None => (serde_json::Value::Null, serde_json::Value::Null),
                Some(t) => {
                    let r = mc_sphere_covering(n, m, t, seed, Distribution::Uniform)?;
                    (r.rate.into(), r.ci_halfwidth.into())
                }
            };
            println!(
                "{}",
                serde_json::json!({
                    "inputs": {"n": n, "m": m, "trials": trials, "seed": seed},
                    "closed_form": closed_form,
                    "empirical": empirical,
                    "ci": ci,
                })
            );
        }
        LemmaCommand::Hoeffding { n, m } => {
            let bound = hoeffding_tail_bound(n, m)?;
            println!(
                "{}",
                serde_json::json!({
                    "inputs": {"n": n, "m": m},
                    "closed_form": bound,
                    "empirical": binomial_tail(n, m),
                    "ci": serde_json::Value::Null,
                })
            );
        }
        LemmaCommand::Count { k, n, l, samples, seed } => {
            let (instance, _) = generate_instance(k, n, l, NoiseModel::None, Target::Gaussian, seed)?;
            let report = lemma6_count(instance.b(), instance.c(), samples, seed);
            println!(
                "{}",
                serde_json::json!({
                    "inputs": {"K": k, "N": n, "L": l, "samples": samples, "seed": seed},
                    "closed_form": 0.2 * l as f64,
                    "empirical": {
                        "min_sampled_count": report.min_sampled_count,
                        "relaxed_min": report.relaxed_min,
                    },
                    "ci": serde_json::Value::Null,
                })
            );
        }
    }
    Ok(())
}
