//! Classical baselines for general QUBO: one-flip tabu search, and a race
//! of tabu search against simulated annealing.
//!
//! The race is a local stand-in for the commercial hybrid service and is
//! not equivalent to it.

use rand::Rng;
use rand_mt::Mt64;

use crate::error::Result;
use crate::exec::Execution;
use crate::qubo::{BinarySolution, QuboProblem, SymmetricDense};
use crate::sampler::{SaSchedule, Sampler, SimulatedAnnealing};
use crate::weights::WeightAssignment;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TabuSearchParams {
    pub iterations: usize,
    /// Iterations a flipped variable stays frozen; `None` uses
    /// `max(n / 4, 1)` capped at 20.
    pub tenure: Option<usize>,
}

impl Default for TabuSearchParams {
    fn default() -> Self {
        Self {
            iterations: 10_000,
            tenure: None,
        }
    }
}

/// Best single flip each step, skipping frozen variables unless the flip
/// beats the best value seen. Starts from a uniform random assignment.
pub fn tabu_search<R: Rng + ?Sized>(
    q: &QuboProblem,
    params: &TabuSearchParams,
    rng: &mut R,
) -> (BinarySolution, f64) {
    let n = q.n();
    let dense = SymmetricDense::from_qubo(q);
    let tenure = params.tenure.unwrap_or((n / 4).clamp(1, 20));
    let mut x: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
    let mut field = vec![0.0; n];
    for (k, f) in field.iter_mut().enumerate() {
        let row = &dense.sym[k * n..(k + 1) * n];
        *f = row.iter().zip(&x).map(|(c, &b)| c * b as f64).sum();
    }
    let mut energy = q.evaluate_bits(&x);
    let mut best = (x.clone(), energy);
    let mut frozen_until = vec![0usize; n];

    for it in 1..=params.iterations {
        let mut choice: Option<(usize, f64)> = None;
        for v in 0..n {
            let delta = if x[v] == 0 { 1.0 } else { -1.0 } * (dense.diag[v] + field[v]);
            let allowed = frozen_until[v] < it || energy + delta < best.1;
            if allowed && choice.is_none_or(|(_, d)| delta < d) {
                choice = Some((v, delta));
            }
        }
        let Some((v, delta)) = choice else {
            continue;
        };
        let sign = if x[v] == 0 { 1.0 } else { -1.0 };
        x[v] ^= 1;
        energy += delta;
        for (f, &c) in field.iter_mut().zip(&dense.sym[v * n..(v + 1) * n]) {
            *f += sign * c;
        }
        frozen_until[v] = it + tenure;
        if energy < best.1 {
            best = (x.clone(), energy);
        }
    }
    let value = q.evaluate_bits(&best.0);
    (BinarySolution::new(best.0).expect("bits are binary"), value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RaceWinner {
    Tabu,
    Annealing,
}

#[derive(Debug, Clone)]
pub struct RaceResult {
    pub solution: BinarySolution,
    pub value: f64,
    pub winner: RaceWinner,
}

/// Runs tabu search and simulated annealing on the full problem (no
/// topology restriction) side by side and keeps the better result; ties
/// go to tabu search.
pub fn race(
    q: &QuboProblem,
    tabu: &TabuSearchParams,
    schedule: &SaSchedule,
    reads: usize,
    seed: u64,
    execution: Execution,
) -> Result<RaceResult> {
    let weights =
        WeightAssignment::from_node_entries((0..q.n()).map(|i| (i, i, 0.0)).chain(q.nonzeros()))?;
    let (t, a) = execution.join(
        || tabu_search(q, tabu, &mut Mt64::new(seed)),
        || -> Result<_> {
            let mut sa = SimulatedAnnealing::new(schedule.clone(), seed ^ 0x9e37_79b9_7f4a_7c15)?
                .execution(execution);
            sa.sample(&weights, reads)
        },
    );
    let a = a?;
    let annealed = BinarySolution::new(a.bits)?;
    let annealed_value = q.evaluate(&annealed)?;
    Ok(if annealed_value < t.1 {
        RaceResult {
            solution: annealed,
            value: annealed_value,
            winner: RaceWinner::Annealing,
        }
    } else {
        RaceResult {
            solution: t.0,
            value: t.1,
            winner: RaceWinner::Tabu,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::brute_force_qubo;
    use rand::SeedableRng;

    fn random_qubo(n: usize, rng: &mut Mt64) -> QuboProblem {
        let mut q = QuboProblem::new(n).unwrap();
        for i in 0..n {
            for j in i..n {
                q.add(i, j, rng.random_range(-5.0..5.0)).unwrap();
            }
        }
        q
    }

    #[test]
    fn tabu_finds_small_optima() {
        let mut rng = Mt64::seed_from_u64(3);
        for _ in 0..20 {
            let q = random_qubo(10, &mut rng);
            let (_, opt) = brute_force_qubo(&q).unwrap();
            let (x, v) = tabu_search(&q, &TabuSearchParams::default(), &mut rng);
            assert_eq!(q.evaluate(&x).unwrap(), v);
            assert!((v - opt).abs() < 1e-9, "{v} vs {opt}");
        }
    }

    #[test]
    fn race_is_deterministic_across_modes() {
        let mut rng = Mt64::seed_from_u64(4);
        let q = random_qubo(12, &mut rng);
        let schedule = SaSchedule::geometric(200);
        let params = TabuSearchParams {
            iterations: 500,
            tenure: None,
        };
        let a = race(&q, &params, &schedule, 5, 11, Execution::Sequential).unwrap();
        let b = race(&q, &params, &schedule, 5, 11, Execution::Parallel).unwrap();
        assert_eq!(a.solution, b.solution);
        assert_eq!(a.winner, b.winner);
        assert_eq!(q.evaluate(&a.solution).unwrap(), a.value);
    }
}
