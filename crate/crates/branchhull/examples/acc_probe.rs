// quick probe via the experiment API
use branchhull::experiment::{noise_sweep, phase_diagram, ExperimentGrid};
use std::time::Instant;

fn main() {
    // transition zone cells
    for (d, l) in [(20usize, 44usize), (20, 50), (20, 60), (20, 70), (20, 90), (15, 40), (5, 14)] {
        let grid = ExperimentGrid {
            dims: vec![(d, d)],
            ls: vec![l],
            alphas: vec![0.0],
            trials: 10,
            base_seed: 1,
            success_threshold: 1e-5,
        };
        let t0 = Instant::now();
        let table = phase_diagram(&grid).unwrap();
        let dt = t0.elapsed().as_secs_f64();
        let rate: f64 = table.records.iter().filter(|r| r.success).count() as f64 / 10.0;
        let max_iters = table.records.iter().map(|r| r.iters).max().unwrap();
        println!("phase K=N={d} L={l} (ratio {:.2}): rate {rate:.1} max_iters {max_iters} wall {dt:.2}s",
            l as f64 / (2.0 * d as f64));
    }
    // noise cells
    let t0 = Instant::now();
    let grid = ExperimentGrid {
        dims: vec![(20, 20)],
        ls: vec![100],
        alphas: vec![0.1, 0.25, 0.5, 1.0],
        trials: 10,
        base_seed: 7,
        success_threshold: 1e-5,
    };
    let table = noise_sweep(&grid).unwrap();
    let dt = t0.elapsed().as_secs_f64();
    for c in table.noise_cells() {
        println!(
            "noise alpha={:.2} L={}: max_rel {:.3e} within_bound {:.2}",
            c.alpha, c.l, c.max_rel_error, c.within_bound
        );
    }
    let max_iters = table.records.iter().map(|r| r.iters).max().unwrap();
    let statuses: Vec<String> = table.records.iter().map(|r| r.status.to_string()).collect();
    let n_conv = statuses.iter().filter(|s| *s == "converged").count();
    println!("noise sweep: {n_conv}/{} converged, max_iters {max_iters}, wall {dt:.2}s", statuses.len());

    // zero-noise gaussian target at ratio 2.5
    let grid = ExperimentGrid {
        dims: vec![(20, 20)],
        ls: vec![100],
        alphas: vec![0.0],
        trials: 10,
        base_seed: 7,
        success_threshold: 1e-5,
    };
    let t0 = Instant::now();
    let table = noise_sweep(&grid).unwrap();
    let dt = t0.elapsed().as_secs_f64();
    for c in table.noise_cells() {
        println!("noiseless gaussian L={}: max_rel {:.3e} wall {dt:.2}s", c.l, c.max_rel_error);
    }
}
