//! Exact cost minimization for series-parallel reliability systems with
//! multiple component choices.
//!
//! The pipeline is:
//!
//! 1. [`model::normalize`] shifts lower bounds to zero and sorts each subsystem
//!    by descending cost;
//! 2. [`greedy::greedy_feasible`] finds a reliable point whose cost `c0` cuts
//!    the linear relaxation;
//! 3. [`testset::build_test_set`] writes down the closed-form test set of that
//!    relaxation;
//! 4. [`solver::walk_back`] searches upward from the relaxation optimum along
//!    reversed moves until the cheapest reliable point is certified.
//!
//! [`oracle`] holds brute-force checks for small instances and [`io`] the
//! file formats, the generator and the benchmark suites.
//!
//! ```
//! use rap_core::{io::parse_instance, solver::{solve, SolveOptions}};
//!
//! let inst = parse_instance(
//!     r#"{"n": 1, "k": [2], "r": [[0.9, 0.8]], "c": [[5, 3]], "u": [[2, 2]], "R0": 0.97}"#,
//! ).unwrap();
//! let report = solve(&inst, &SolveOptions::default()).unwrap();
//! assert_eq!(report.opt_cost, 8);
//! assert_eq!(report.optimum, vec![vec![1, 1]]);
//! ```

pub mod error;
pub mod greedy;
pub mod io;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod testset;

pub use error::{RapError, Result};
pub use model::{normalize, Configuration, Instance, NormalizedInstance, SeriesParallel, Shape, SlackVector};
pub use solver::{solve, SolveOptions, SolveReport, Strategy};
