use rand::Rng;
use rand_mt::Mt64;

use super::{check_reads, SampleResult, Sampler};
use crate::error::{invalid, Result};
use crate::exec::Execution;
use crate::topology::Topology;
use crate::weights::WeightAssignment;

/// Temperature ladder, one temperature per sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum SaSchedule {
    /// Geometric ladder from `hot_factor * max|weight|` down to `cold`.
    Geometric {
        sweeps: usize,
        hot_factor: f64,
        cold: f64,
    },
    /// Explicit non-increasing temperatures.
    Ladder(Vec<f64>),
}

impl Default for SaSchedule {
    fn default() -> Self {
        SaSchedule::Geometric {
            sweeps: 1000,
            hot_factor: 10.0,
            cold: 0.1,
        }
    }
}

impl SaSchedule {
    pub fn geometric(sweeps: usize) -> Self {
        match Self::default() {
            SaSchedule::Geometric {
                hot_factor, cold, ..
            } => SaSchedule::Geometric {
                sweeps,
                hot_factor,
                cold,
            },
            ladder => ladder,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SaSchedule::Geometric {
                sweeps,
                hot_factor,
                cold,
            } => {
                if *sweeps == 0 {
                    return Err(invalid("annealing schedule needs at least one sweep"));
                }
                if !(*hot_factor > 0.0 && *cold > 0.0) {
                    return Err(invalid("annealing temperatures must be positive"));
                }
            }
            SaSchedule::Ladder(temps) => {
                if temps.is_empty() {
                    return Err(invalid("annealing schedule needs at least one sweep"));
                }
                if !temps.iter().all(|t| *t > 0.0) {
                    return Err(invalid("annealing temperatures must be positive"));
                }
                if temps.windows(2).any(|w| w[1] > w[0]) {
                    return Err(invalid("temperature ladder must be non-increasing"));
                }
            }
        }
        Ok(())
    }

    pub fn temperatures(&self, max_abs_weight: f64) -> Vec<f64> {
        match self {
            SaSchedule::Ladder(temps) => temps.clone(),
            SaSchedule::Geometric {
                sweeps,
                hot_factor,
                cold,
            } => {
                let hot = hot_factor * max_abs_weight;
                if hot <= 0.0 {
                    return Vec::new();
                }
                let cold = cold.min(hot);
                if *sweeps == 1 {
                    return vec![cold];
                }
                let ratio = cold / hot;
                (0..*sweeps)
                    .map(|s| hot * ratio.powf(s as f64 / (*sweeps - 1) as f64))
                    .collect()
            }
        }
    }
}

/// Single-spin-flip Metropolis annealing over the QUBO-form energy.
///
/// Each read starts from a uniform random assignment and runs one sweep per
/// ladder temperature. Per-read seeds are drawn from the sampler's own
/// Mersenne Twister before the reads run, so results are identical under
/// either execution mode.
#[derive(Debug, Clone)]
pub struct SimulatedAnnealing {
    schedule: SaSchedule,
    rng: Mt64,
    topology: Option<Topology>,
    execution: Execution,
}

impl SimulatedAnnealing {
    pub fn new(schedule: SaSchedule, seed: u64) -> Result<Self> {
        schedule.validate()?;
        Ok(Self {
            schedule,
            rng: Mt64::new(seed),
            topology: None,
            execution: Execution::default(),
        })
    }

    /// Rejects submissions with couplers outside `topology`.
    pub fn with_topology(mut self, topology: Topology) -> Self {
        self.topology = Some(topology);
        self
    }

    pub fn execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    fn check_topology(&self, weights: &WeightAssignment) -> Result<()> {
        let Some(t) = &self.topology else {
            return Ok(());
        };
        for &node in weights.nodes() {
            if t.nodes().binary_search(&node).is_err() {
                return Err(invalid(format!(
                    "node {node} is not active in the topology"
                )));
            }
        }
        for &(a, b, _) in weights.couplers() {
            let (u, v) = (weights.nodes()[a], weights.nodes()[b]);
            if !t.has_edge(u, v) {
                return Err(invalid(format!("no coupler between {u} and {v}")));
            }
        }
        Ok(())
    }
}

fn anneal_once(
    weights: &WeightAssignment,
    adjacency: &[Vec<(usize, f64)>],
    temps: &[f64],
    seed: u64,
) -> Vec<u8> {
    let n = weights.len();
    let linear = weights.linear();
    let mut rng = Mt64::new(seed);
    let mut bits: Vec<u8> = (0..n).map(|_| (rng.next_u64() & 1) as u8).collect();
    let mut field = vec![0.0; n];
    for (a, neigh) in adjacency.iter().enumerate() {
        for &(b, w) in neigh {
            if bits[b] == 1 {
                field[a] += w;
            }
        }
    }
    for &t in temps {
        for a in 0..n {
            let up = bits[a] == 0;
            let delta = if up {
                linear[a] + field[a]
            } else {
                -(linear[a] + field[a])
            };
            if delta <= 0.0 || rng.random::<f64>() < (-delta / t).exp() {
                bits[a] ^= 1;
                let sign = if up { 1.0 } else { -1.0 };
                for &(b, w) in &adjacency[a] {
                    field[b] += sign * w;
                }
            }
        }
    }
    bits
}

impl Sampler for SimulatedAnnealing {
    fn sample(&mut self, weights: &WeightAssignment, reads: usize) -> Result<SampleResult> {
        check_reads(reads)?;
        self.check_topology(weights)?;
        let seeds: Vec<u64> = (0..reads).map(|_| self.rng.next_u64()).collect();
        let temps = self.schedule.temperatures(weights.max_abs());
        let adjacency = weights.adjacency();
        let draws = self.execution.map_indexed(reads, |r| {
            let bits = anneal_once(weights, &adjacency, &temps, seeds[r]);
            let energy = weights.energy(&bits);
            (energy, bits)
        });
        let (_, bits) = draws
            .into_iter()
            .reduce(|best, cand| if cand.0 < best.0 { cand } else { best })
            .expect("reads >= 1");
        Ok(SampleResult::from_bits(weights, bits))
    }

    fn name(&self) -> &str {
        "sa"
    }
}
