use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// What happened to the iteration's candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// The candidate equalled the incumbent.
    Repeat,
    /// Strictly better than the incumbent; replaced it.
    Improved,
    /// Not better, but accepted by the probabilistic rule.
    AcceptedWorse,
    Rejected,
}

/// One loop iteration.
///
/// `f_star` is the best value found so far and never increases;
/// `f_current` is the incumbent after this iteration, which may be worse
/// when a suboptimal candidate was accepted. `f_prime` is absent when the
/// candidate equalled the incumbent and was not evaluated. `p` and
/// `lambda` are the values in force while the iteration ran.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub i: usize,
    pub p: f64,
    pub lambda: f64,
    pub f_prime: Option<f64>,
    pub f_star: f64,
    pub f_current: f64,
    pub accepted: bool,
    pub outcome: Outcome,
    pub e: usize,
    pub d: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QalsTrace {
    /// Values of the two initialization candidates.
    pub init: Option<(f64, f64)>,
    pub records: Vec<IterationRecord>,
}

impl QalsTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// One JSON object per iteration.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r).map_err(std::io::Error::from)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}
