//! QUBO modelling and the Quantum Annealing Learning Search (QALS) solver.
//!
//! The crate covers QUBO and Ising energy evaluation, sampler hardware
//! graphs, interchangeable sampler backends (exhaustive, simulated
//! annealing, uniform random, and an external process speaking a line
//! protocol), the QALS loop itself, and number partitioning and TSP
//! translators with their classical baselines.
//!
//! Data-parallel routines accept an [`Execution`]; with the default
//! `parallel` feature they run on rayon, and both paths give identical
//! results.

pub mod classical;
pub mod error;
pub mod exec;
pub mod problems;
pub mod qals;
pub mod qubo;
pub mod sampler;
pub mod topology;
pub mod weights;

pub use error::{Error, Result, TransportError};
pub use exec::Execution;
pub use qubo::{
    brute_force_qubo, evaluate_ising, qubo_to_ising, BinarySolution, BruteForce, IsingWeights,
    QuboProblem, SpinSolution,
};
pub use topology::{embed_naive, EmbeddedProblem, Topology};
pub use weights::WeightAssignment;

/// The generator used throughout: a 64-bit Mersenne Twister.
pub type Mt64 = rand_mt::Mt64;

pub fn seeded_rng(seed: u64) -> Mt64 {
    Mt64::new(seed)
}
