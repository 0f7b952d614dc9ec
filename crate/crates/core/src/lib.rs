//! Exact 2-approximation for the k-prize-collecting Steiner tree problem.
//!
//! The solver runs a primal-dual growth phase parameterised by a uniform
//! penalty increase `λ` and a tie-breaking list, searches for a threshold
//! pair whose two runs straddle `k` spanned vertices, and then picks exactly
//! `k` vertices from the union of the two trees. All arithmetic is exact.

pub mod error;
pub mod exec;
pub mod growth;
pub mod instance;
pub mod laminar;
pub mod numeric;
pub mod oracle;
pub mod picking;
pub mod pruning;
pub mod report;
pub mod solver;
pub mod threshold;

pub use error::{Error, Result};
pub use growth::{gp_run, Event, GrowthOutput};
pub use instance::{generate_random, parse_instance, serialize_instance, Instance, Tree};
pub use numeric::{ExtendedRational, Rational};
pub use oracle::{exact_solve, ExactResult};
pub use report::{check_result, parse_result, write_solution, WriteOptions};
pub use solver::{solve, Solution, SolveOptions};
