//! Sampler backends.
//!
//! A sampler receives node/coupler weights in 0/1 form plus a read count
//! `k` and returns the lowest-energy assignment among its `k` draws. The
//! returned energy is always recomputed locally from the weights, whatever
//! the backend reported.

mod anneal;
mod bridge;
mod exhaustive;
mod random;
pub mod wire;

pub use anneal::{SaSchedule, SimulatedAnnealing};
pub use bridge::{BridgeSampler, DEFAULT_BRIDGE_TIMEOUT};
pub use exhaustive::ExhaustiveSampler;
pub use random::UniformRandomSampler;

use crate::error::{invalid, Error, Result};
use crate::weights::WeightAssignment;

/// Best measured assignment, one bit per node in ascending node order.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleResult {
    pub nodes: Vec<usize>,
    pub bits: Vec<u8>,
    pub energy: f64,
}

impl SampleResult {
    pub(crate) fn from_bits(weights: &WeightAssignment, bits: Vec<u8>) -> Self {
        let energy = weights.energy(&bits);
        Self {
            nodes: weights.nodes().to_vec(),
            bits,
            energy,
        }
    }

    pub fn get(&self, node: usize) -> Option<u8> {
        self.nodes.binary_search(&node).ok().map(|i| self.bits[i])
    }
}

pub trait Sampler {
    /// Runs `reads` independent draws and returns the best one.
    fn sample(&mut self, weights: &WeightAssignment, reads: usize) -> Result<SampleResult>;

    fn name(&self) -> &str;
}

impl<S: Sampler + ?Sized> Sampler for Box<S> {
    fn sample(&mut self, weights: &WeightAssignment, reads: usize) -> Result<SampleResult> {
        (**self).sample(weights, reads)
    }

    fn name(&self) -> &str {
        (**self).name()
    }
}

impl<S: Sampler + ?Sized> Sampler for &mut S {
    fn sample(&mut self, weights: &WeightAssignment, reads: usize) -> Result<SampleResult> {
        (**self).sample(weights, reads)
    }

    fn name(&self) -> &str {
        (**self).name()
    }
}

pub(crate) fn check_reads(reads: usize) -> Result<()> {
    if reads == 0 {
        return Err(invalid("sampler needs at least one read"));
    }
    Ok(())
}

/// Random integers from a single all-zero-weight submission on `n` nodes.
///
/// Every assignment of a zero problem is a ground state, so the returned
/// bit string is split into `⌊n/k⌋` big-endian groups of `k` bits, each an
/// integer in `[0, 2^k - 1]`. Trailing bits that do not fill a group are
/// discarded.
pub fn random_bits<S: Sampler + ?Sized>(backend: &mut S, n: usize, k: usize) -> Result<Vec<u64>> {
    if k == 0 || k > n || k > 64 {
        return Err(invalid(format!(
            "random_bits needs n >= k >= 1 and k <= 64, got n = {n}, k = {k}"
        )));
    }
    let weights = WeightAssignment::zeros((0..n).collect());
    let sample = backend.sample(&weights, 1)?;
    if sample.bits.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: sample.bits.len(),
        });
    }
    Ok(sample
        .bits
        .chunks_exact(k)
        .map(|group| group.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
        .collect())
}
