//! Problem instances as stored on disk.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use qals_core::problems::{NppInstance, TspInstance};
use qals_core::Mt64;

use crate::error::{config, runtime, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Npp,
    Tsp,
}

impl Kind {
    pub fn default_range(self) -> f64 {
        match self {
            Kind::Npp => 100.0,
            Kind::Tsp => 10.0,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Instance {
    Npp(NppInstance),
    Tsp(TspInstance),
}

impl Instance {
    /// NPP numbers are uniform in `1..=range`; TSP distances are uniform
    /// reals in `[0, range]`.
    pub fn generate(kind: Kind, size: usize, range: f64, seed: u64) -> CliResult<Self> {
        let mut rng = Mt64::new(seed);
        match kind {
            Kind::Npp => {
                if range < 1.0 || range.fract() != 0.0 {
                    return Err(config(format!(
                        "npp range must be a positive integer, got {range}"
                    )));
                }
                NppInstance::random(size, range as u64, &mut rng)
                    .map(Instance::Npp)
                    .map_err(config)
            }
            Kind::Tsp => {
                if !(range >= 0.0 && range.is_finite()) {
                    return Err(config(format!(
                        "tsp range must be finite and non-negative, got {range}"
                    )));
                }
                TspInstance::random(size, range, &mut rng)
                    .map(Instance::Tsp)
                    .map_err(config)
            }
        }
    }

    pub fn load(kind: Kind, path: &Path) -> CliResult<Self> {
        let file = File::open(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
        let reader = BufReader::new(file);
        let parsed = match kind {
            Kind::Npp => NppInstance::read_from(reader).map(Instance::Npp),
            Kind::Tsp => TspInstance::read_from(reader).map(Instance::Tsp),
        };
        parsed.map_err(|e| config(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        let file = File::create(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
        let mut out = BufWriter::new(file);
        match self {
            Instance::Npp(i) => i.write_to(&mut out),
            Instance::Tsp(i) => i.write_to(&mut out),
        }
        .and_then(|_| out.flush().map_err(Into::into))
        .map_err(|e| runtime(format!("{}: {e}", path.display())))
    }

    pub fn kind(&self) -> Kind {
        match self {
            Instance::Npp(_) => Kind::Npp,
            Instance::Tsp(_) => Kind::Tsp,
        }
    }

    /// Numbers to partition, or cities.
    pub fn size(&self) -> usize {
        match self {
            Instance::Npp(i) => i.len(),
            Instance::Tsp(i) => i.n(),
        }
    }
}
