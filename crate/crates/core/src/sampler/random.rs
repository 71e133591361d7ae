use rand_mt::Mt64;

use super::{check_reads, SampleResult, Sampler};
use crate::error::Result;
use crate::weights::WeightAssignment;

/// Draws uniform random assignments and keeps the best of `k`.
#[derive(Debug, Clone)]
pub struct UniformRandomSampler {
    rng: Mt64,
}

impl UniformRandomSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: Mt64::new(seed),
        }
    }
}

impl Sampler for UniformRandomSampler {
    fn sample(&mut self, weights: &WeightAssignment, reads: usize) -> Result<SampleResult> {
        check_reads(reads)?;
        let n = weights.len();
        let mut best: Option<(f64, Vec<u8>)> = None;
        for _ in 0..reads {
            let mut bits = Vec::with_capacity(n);
            while bits.len() < n {
                let word = self.rng.next_u64();
                let take = (n - bits.len()).min(64);
                bits.extend((0..take).map(|i| ((word >> i) & 1) as u8));
            }
            let e = weights.energy(&bits);
            if best.as_ref().is_none_or(|(be, _)| e < *be) {
                best = Some((e, bits));
            }
        }
        let (_, bits) = best.expect("reads >= 1");
        Ok(SampleResult::from_bits(weights, bits))
    }

    fn name(&self) -> &str {
        "random"
    }
}
