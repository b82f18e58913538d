//! Front Descent: gradient-based reconstruction of Pareto fronts for smooth
//! unconstrained multi-objective problems.
//!
//! The solver keeps a set of mutually nondominated points. Each iteration
//! refines points along common descent directions (steepest, Newton-type or
//! Barzilai-Borwein) and spreads the set with partial descent steps that only
//! need to beat every current point in some objective.
//!
//! ```
//! use front_descent::{driver::{run, FdConfig}, suite::{initial_points, make_problem}};
//!
//! let problem = make_problem("JOS_1", 4)?;
//! let start = initial_points(problem.as_ref(), 4)?;
//! let result = run(problem.as_ref(), start, &FdConfig { max_iterations: 5, ..FdConfig::default() })?;
//! assert!(result.front.is_stable());
//! # Ok::<(), front_descent::FdError>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod direction;
pub mod dominance;
pub mod driver;
pub mod error;
pub mod harness;
pub mod hypervolume;
pub mod io;
pub mod linesearch;
pub mod metrics;
pub mod problem;
pub mod simplex;
pub mod suite;

pub use dominance::{FrontEntry, FrontSet, Provenance};
pub use driver::{run, FdConfig, RunResult, StopReason, Variant};
pub use error::{FdError, Result};
pub use problem::{Evaluator, FnProblem, Problem};
