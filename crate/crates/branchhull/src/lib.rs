//! Convex recovery of two vectors from their entrywise product.
//!
//! Given measurements `y = (B h) o (C m) o (1 + xi)` together with the signs
//! `s = sign(B h)` and the subspace matrices `B` and `C`, the pair `(h, m)`
//! is determined only up to the scaling `(c h, m / c)`. This crate solves the
//! convex program
//!
//! ```text
//! minimize ||h||^2 + ||m||^2
//! s.t.     sign(y_l) * (b_l . h) * (c_l . m) >= |y_l|
//!          s_l * (b_l . h) >= 0               for l = 1..L
//! ```
//!
//! which replaces each nonconvex hyperbola branch `{w x = y_l}` by its convex
//! hull and picks the equal-norm representative of the scaling class. An
//! l1-penalized slack variant absorbs outliers, a brute-force oracle
//! certifies small instances, closed-form probability bounds and Monte Carlo
//! validators quantify when recovery succeeds, and an experiment harness
//! reproduces the phase-transition and noise studies.
//!
//! ```
//! use branchhull::instance::{generate_instance, recovery_error, NoiseModel, Target};
//! use branchhull::solver::{solve_bh, SolverOptions, Status};
//!
//! let (instance, truth) =
//!     generate_instance(2, 2, 20, NoiseModel::None, Target::StandardBasis, 7).unwrap();
//! let result = solve_bh(&instance, &SolverOptions::default()).unwrap();
//! assert_eq!(result.status, Status::Converged);
//! let err = recovery_error(&result.h(), &result.m(), &truth);
//! assert!(err.absolute < 1e-5);
//! ```

pub mod error;
pub mod experiment;
pub mod instance;
pub mod json;
pub mod projection;
pub mod rng;
pub mod solver;
pub mod theory;

pub use error::{Error, Result};
