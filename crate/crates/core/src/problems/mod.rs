//! Problem translators and classical baselines.

mod npp;
mod refine;
mod tsp;

pub use npp::{
    ckk_solve, greedy_partition, kk_heuristic, kk_partition, npp_diff, npp_to_qubo, CkkResult,
    NppInstance,
};
pub use refine::refine_tsp_solution;
pub use tsp::{
    tsp_brute_force, tsp_cost, tsp_to_qubo, Tour, TspBruteForce, TspInstance, DEFAULT_TSP_CAP,
};
