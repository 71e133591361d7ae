use super::{check_reads, SampleResult, Sampler};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::qubo::{minimize_masks, SymmetricDense, DEFAULT_EXHAUSTIVE_CAP};
use crate::weights::WeightAssignment;

/// Returns the global minimum of the submitted weights regardless of the
/// read count. Ties resolve to the lexicographically smallest bit string
/// in ascending node order.
#[derive(Debug, Clone)]
pub struct ExhaustiveSampler {
    cap: usize,
    execution: Execution,
}

impl Default for ExhaustiveSampler {
    fn default() -> Self {
        Self {
            cap: DEFAULT_EXHAUSTIVE_CAP,
            execution: Execution::default(),
        }
    }
}

impl ExhaustiveSampler {
    pub fn with_cap(cap: usize) -> Self {
        Self {
            cap,
            ..Self::default()
        }
    }

    pub fn execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

impl Sampler for ExhaustiveSampler {
    fn sample(&mut self, weights: &WeightAssignment, reads: usize) -> Result<SampleResult> {
        check_reads(reads)?;
        let n = weights.len();
        if n > self.cap.min(62) {
            return Err(Error::TooLarge {
                n,
                cap: self.cap.min(62),
            });
        }
        if n == 0 {
            return Ok(SampleResult::from_bits(weights, Vec::new()));
        }
        let mut dense = SymmetricDense::zeros(n);
        for (a, &w) in weights.linear().iter().enumerate() {
            dense.add(a, a, w);
        }
        for &(a, b, w) in weights.couplers() {
            dense.add(a, b, w);
        }
        let (_, mask) = minimize_masks(&dense, self.execution);
        let bits = (0..n).map(|i| ((mask >> (n - 1 - i)) & 1) as u8).collect();
        Ok(SampleResult::from_bits(weights, bits))
    }

    fn name(&self) -> &str {
        "exhaustive"
    }
}
