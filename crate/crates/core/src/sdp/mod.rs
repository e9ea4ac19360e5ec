//! Small dense SDP solver and its consumers.

pub mod discrimination;
pub mod npa;
pub mod solver;

pub use discrimination::{discrimination, helstrom_value, Discrimination};
pub use npa::{npa1, npa1_full, npa1_value, Npa1, Npa1Method};
pub use solver::{
    solve, solve_with, Constraint, Entry, Progress, SdpProblem, SdpSolution, Sense, SolveStatus,
    SolverOptions, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
