// probe the robust solver's objective trace and outlier behavior
use branchhull::instance::{generate_instance, NoiseModel, Target};
use branchhull::solver::{solve_rbh, RbhOptions};
use nalgebra::DVector;

fn main() {
    // where do the increases happen relative to convergence?
    for seed in [1u64, 2, 3, 4, 5, 6, 7, 8] {
        let (inst, _) =
            generate_instance(3, 3, 30, NoiseModel::UniformSymmetric { alpha: 0.3 }, Target::Gaussian, seed).unwrap();
        let opts = RbhOptions {
            lambda: 1.0,
            track_objective: true,
            ..RbhOptions::default()
        };
        let res = solve_rbh(&inst, &opts).unwrap();
        let trace = res.objective_trace.as_ref().unwrap();
        let last_increase = trace
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1] - w[0] > 1e-8)
            .map(|(i, _)| i + 1)
            .next_back();
        let peak_iter = trace
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap();
        println!(
            "seed {seed}: iters {} last_increase@{:?} peak@{peak_iter} final {:.6}",
            res.iters, last_increase, trace.last().unwrap()
        );
    }

    // sign-flip outlier with a finer lambda grid
    for seed in [11u64, 12, 13, 14, 15, 16, 17, 18, 19, 20] {
        let (inst0, truth) =
            generate_instance(2, 2, 24, NoiseModel::None, Target::StandardBasis, seed).unwrap();
        let mut y = inst0.y().clone();
        y[3] = -y[3];
        let inst = branchhull::instance::ProblemInstance::new(
            inst0.b().clone(),
            inst0.c().clone(),
            y,
            inst0.s().to_vec(),
        )
        .unwrap();
        let bal = truth.balanced();
        let mut best = (f64::INFINITY, 0.0);
        for lambda in [0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 1.0] {
            let res = solve_rbh(
                &inst,
                &RbhOptions {
                    lambda,
                    ..RbhOptions::default()
                },
            )
            .unwrap();
            let err = ((res.h() - &bal.h_bal).norm_squared()
                + (res.m() - &bal.m_bal).norm_squared())
            .sqrt();
            if err < best.0 {
                best = (err, lambda);
            }
        }
        let _ = DVector::<f64>::zeros(1);
        println!("seed {seed}: best err {:.4} at lambda {}", best.0, best.1);
    }
}
