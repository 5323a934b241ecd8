//! Frank-Wolfe methods for self-concordant objectives.
//!
//! The crate provides the self-concordant oracle contract ([`ScOracle`]),
//! feasible sets with linear minimization oracles, the simplex local oracle,
//! four step-size policies, two solver drivers, the benchmark problems and a
//! performance-profile harness.
//!
//! ```
//! use scfw::problems::{synth, PortfolioProblem};
//! use scfw::{fw_solve, RunConfig, StepPolicy};
//!
//! let problem = PortfolioProblem::new(synth::portfolio_matrix(50, 10, 7)).unwrap();
//! let set = problem.feasible_set();
//! let trace = fw_solve(&problem, &set, &RunConfig::new(StepPolicy::V1).max_iter(200)).unwrap();
//! assert!(trace.last().f <= trace.records[0].f);
//! ```

// `!(x > 0.0)` is the intended way to reject NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod linalg;
pub mod lloo;
pub mod problems;
pub mod profile;
pub mod rng;
pub mod sc;
pub mod sets;
pub mod solver;
pub mod step;
pub mod suite;
pub mod trace_io;

pub use error::{Error, Result};
pub use exec::Execution;
pub use lloo::{lloo, LlooResult};
pub use sc::{bregman, dist_like, gap_and_target, local_norm, omega, omega_star, GapResult, ScOracle};
pub use sets::{FeasibleSet, L1Ball, NonnegL1Ball, SetKind, Simplex};
pub use solver::{
    certificate_lower_bound, estimate_sigma, fw_solve, lloo_fw_solve, IterRecord, LlooConfig,
    RadiusSchedule, RunConfig, RunTrace, Termination,
};
pub use step::{BacktrackParams, BacktrackState, StepPolicy, StepResult};
pub use problems::{LogisticProblem, PoissonProblem, PortfolioProblem};
