//! Frank-Wolfe methods for convex objectives that are (L0,L1)-smooth.
//!
//! Four solvers share one iteration loop: the classic shortest-step method,
//! its adaptive variant that halves and doubles `L`, the (L0,L1) step rule
//! with known constants, and the adaptive (L0,L1) rule. Every run returns a
//! [`Trace`] with one record per iterate.
//!
//! ```
//! use std::sync::Arc;
//! use genfw::{objectives::PowerNorm, sets::L2Ball, Problem, SolverConfig, SolverKind};
//!
//! let obj = PowerNorm::new(3, 2).unwrap();
//! let set = L2Ball::new(genfw::Vector::from_vec(vec![1.0, 1.0, 1.0]), 0.5).unwrap();
//! let problem = Problem::new(Arc::new(obj), Arc::new(set)).unwrap();
//! let config = SolverConfig::default().with_problem_constants(&problem).unwrap();
//! let trace = genfw::solvers::run(SolverKind::L0l1, &problem, &config).unwrap();
//! assert!(trace.last().f_value < 3.0);
//! ```

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod datagen;
pub mod diagnostics;
pub mod domain;
pub mod error;
pub mod harness;
pub mod io;
pub mod objectives;
pub mod problem;
pub mod sets;
pub mod solvers;

pub use domain::{IterateRecord, Regime, SmoothnessParams, TerminationReason, Trace, Vector};
pub use error::{Error, Result};
pub use objectives::Objective;
pub use problem::Problem;
pub use sets::FeasibleSet;
pub use solvers::{SolverConfig, SolverKind};
