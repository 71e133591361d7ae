//! Quantum Annealing Learning Search.
//!
//! Each iteration perturbs the incumbent permutation, projects the
//! tabu-penalized problem onto the sampler graph, samples it, and compares
//! the mapped-back candidate with the incumbent.

mod params;
mod permutation;
mod search;
mod tabu;
mod trace;

pub use params::QalsParams;
pub use permutation::{
    inverse_of, map_back, perturb_permutation, project_weights, Coefficients, PermutationState,
};
pub use search::{run_qals, QalsFailure, QalsOutcome, Termination};
pub use tabu::{perturb_candidate, tabu_update, Penalized, TabuMatrix};
pub use trace::{IterationRecord, Outcome, QalsTrace};
