//! Run configuration files.
//!
//! ```toml
//! [problem]
//! kind = "npp"          # or "tsp"
//! size = 16             # generate from size, range and seed ...
//! range = 100
//! seed = 1
//! # file = "numbers.txt"  # ... or load an instance file instead
//!
//! [run]
//! repetitions = 10
//! seed = 100            # run r of every solver uses seed + r
//! report = "report.jsonl"
//! csv = "report.csv"
//! trace = "trace.jsonl"
//!
//! [[solver]]
//! name = "qals"
//! backend = "sa"        # exhaustive | sa | random | bridge:<command>
//! topology = "chimera:2"
//! i_max = 2000
//! params = { p_delta = 0.1 }
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;

use qals_core::qals::QalsParams;
use qals_core::Topology;

use crate::error::{config, CliResult};
use crate::instance::Kind;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    #[serde(rename = "solver")]
    pub solvers: Vec<SolverSpec>,
    #[serde(default)]
    pub run: RunSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub kind: Kind,
    pub file: Option<PathBuf>,
    pub size: Option<usize>,
    pub range: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_report")]
    pub report: PathBuf,
    pub csv: Option<PathBuf>,
    pub trace: Option<PathBuf>,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            repetitions: 1,
            seed: 0,
            report: default_report(),
            csv: None,
            trace: None,
        }
    }
}

fn one() -> usize {
    1
}

fn default_report() -> PathBuf {
    PathBuf::from("report.jsonl")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverName {
    Qals,
    Sa,
    Exhaustive,
    Ckk,
    Greedy,
    Kk,
    BruteForce,
    Race,
}

impl SolverName {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverName::Qals => "qals",
            SolverName::Sa => "sa",
            SolverName::Exhaustive => "exhaustive",
            SolverName::Ckk => "ckk",
            SolverName::Greedy => "greedy",
            SolverName::Kk => "kk",
            SolverName::BruteForce => "brute-force",
            SolverName::Race => "race",
        }
    }

    fn supports(self, kind: Kind) -> bool {
        !matches!(
            (self, kind),
            (
                SolverName::Ckk | SolverName::Greedy | SolverName::Kk,
                Kind::Tsp
            )
        )
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub name: SolverName,
    /// Row name in reports; defaults to the solver name.
    pub label: Option<String>,
    /// Sampler behind QALS.
    pub backend: Option<String>,
    /// Hardware graph for QALS: complete, cycle, chimera:<m> or
    /// file:<path>.
    pub topology: Option<String>,
    pub i_max: Option<usize>,
    /// Overrides for the per-problem QALS defaults.
    pub params: Option<toml::Table>,
    /// Annealing sweeps per read.
    pub sweeps: Option<usize>,
    /// Reads for direct annealing and the race.
    pub reads: Option<usize>,
    pub node_budget: Option<u64>,
    pub tabu_iterations: Option<usize>,
    /// Per-request timeout of a bridge backend, in seconds.
    pub timeout_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    Exhaustive,
    Sa,
    Random,
    Bridge(String),
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exhaustive" => Ok(Backend::Exhaustive),
            "sa" => Ok(Backend::Sa),
            "random" => Ok(Backend::Random),
            _ => match s.strip_prefix("bridge:") {
                Some(cmd) if !cmd.trim().is_empty() => Ok(Backend::Bridge(cmd.trim().to_string())),
                _ => Err(format!(
                    "unknown backend {s:?}; expected exhaustive, sa, random or bridge:<command>"
                )),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub enum TopologySpec {
    Complete,
    Cycle,
    Chimera(usize),
    File(Topology),
}

impl TopologySpec {
    fn parse(s: &str, base: &Path) -> CliResult<Self> {
        if s == "complete" {
            return Ok(TopologySpec::Complete);
        }
        if s == "cycle" {
            return Ok(TopologySpec::Cycle);
        }
        if let Some(m) = s.strip_prefix("chimera:") {
            let m: usize = m
                .parse()
                .ok()
                .filter(|&m| m > 0)
                .ok_or_else(|| config(format!("bad chimera size in {s:?}")))?;
            return Ok(TopologySpec::Chimera(m));
        }
        if let Some(p) = s.strip_prefix("file:") {
            let path = base.join(p);
            let file = std::fs::File::open(&path)
                .map_err(|e| config(format!("{}: {e}", path.display())))?;
            let t = Topology::read_from(std::io::BufReader::new(file))
                .map_err(|e| config(format!("{}: {e}", path.display())))?;
            return Ok(TopologySpec::File(t));
        }
        Err(config(format!(
            "unknown topology {s:?}; expected complete, cycle, chimera:<m> or file:<path>"
        )))
    }

    /// Graph for a QUBO with `n` variables.
    pub fn build(&self, n: usize) -> Topology {
        match self {
            TopologySpec::Complete => Topology::complete(n),
            TopologySpec::Cycle => Topology::cycle(n),
            TopologySpec::Chimera(m) => Topology::chimera(*m),
            TopologySpec::File(t) => t.clone(),
        }
    }
}

/// A solver entry after validation.
#[derive(Debug, Clone)]
pub struct Solver {
    pub name: SolverName,
    pub label: String,
    pub backend: Backend,
    pub topology: TopologySpec,
    pub params: Option<QalsParams>,
    pub sweeps: usize,
    pub reads: usize,
    pub node_budget: Option<u64>,
    pub tabu_iterations: usize,
    pub timeout: Option<Duration>,
}

/// Everything `solve` needs, with paths made absolute.
#[derive(Debug, Clone)]
pub struct Plan {
    pub kind: Kind,
    pub instance_file: Option<PathBuf>,
    pub size: Option<usize>,
    pub range: Option<f64>,
    pub instance_seed: Option<u64>,
    pub solvers: Vec<Solver>,
    pub repetitions: usize,
    pub seed: u64,
    pub report: PathBuf,
    pub csv: Option<PathBuf>,
    pub trace: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| config(format!("{}: {e}", path.display())))
    }

    pub fn plan(&self, base: &Path, backend_override: Option<&Backend>) -> CliResult<Plan> {
        let p = &self.problem;
        let generated = p.file.is_none();
        if generated {
            if p.size.is_none() || p.seed.is_none() {
                return Err(config("problem needs either file or both size and seed"));
            }
        } else if p.size.is_some() || p.seed.is_some() || p.range.is_some() {
            return Err(config("problem file excludes size, range and seed"));
        }
        if self.solvers.is_empty() {
            return Err(config("at least one [[solver]] is required"));
        }
        if self.run.repetitions == 0 {
            return Err(config("repetitions must be at least 1"));
        }
        let mut labels = std::collections::HashSet::new();
        let solvers = self
            .solvers
            .iter()
            .map(|s| {
                let solver = validate_solver(s, p.kind, base, backend_override)?;
                if !labels.insert(solver.label.clone()) {
                    return Err(config(format!("duplicate solver label {:?}", solver.label)));
                }
                Ok(solver)
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok(Plan {
            kind: p.kind,
            instance_file: p.file.as_ref().map(|f| base.join(f)),
            size: p.size,
            range: generated.then(|| p.range.unwrap_or(p.kind.default_range())),
            instance_seed: p.seed,
            solvers,
            repetitions: self.run.repetitions,
            seed: self.run.seed,
            report: base.join(&self.run.report),
            csv: self.run.csv.as_ref().map(|c| base.join(c)),
            trace: self.run.trace.as_ref().map(|t| base.join(t)),
        })
    }
}

fn validate_solver(
    s: &SolverSpec,
    kind: Kind,
    base: &Path,
    backend_override: Option<&Backend>,
) -> CliResult<Solver> {
    let label = s
        .label
        .clone()
        .unwrap_or_else(|| s.name.as_str().to_string());
    let err = |msg: String| config(format!("solver {label:?}: {msg}"));
    if !s.name.supports(kind) {
        return Err(err(format!("does not apply to {kind:?} instances")));
    }
    let is_qals = s.name == SolverName::Qals;
    let only_qals = [
        ("backend", s.backend.is_some()),
        ("topology", s.topology.is_some()),
        ("i_max", s.i_max.is_some()),
        ("params", s.params.is_some()),
        ("timeout_s", s.timeout_s.is_some()),
    ];
    for (field, present) in only_qals {
        if present && !is_qals {
            return Err(err(format!("{field} only applies to qals")));
        }
    }
    if s.node_budget.is_some() && s.name != SolverName::Ckk {
        return Err(err("node_budget only applies to ckk".into()));
    }
    if s.tabu_iterations.is_some() && s.name != SolverName::Race {
        return Err(err("tabu_iterations only applies to race".into()));
    }

    let params = if is_qals {
        let i_max = s.i_max.ok_or_else(|| err("qals needs i_max".into()))?;
        let defaults = match kind {
            Kind::Npp => QalsParams::npp_defaults(i_max),
            Kind::Tsp => QalsParams::tsp_defaults(i_max),
        };
        let mut table = toml::Table::try_from(&defaults).map_err(|e| err(e.to_string()))?;
        if let Some(overrides) = &s.params {
            if overrides.contains_key("i_max") {
                return Err(err("set i_max on the solver, not in params".into()));
            }
            table.extend(overrides.clone());
        }
        let params: QalsParams = table.try_into().map_err(|e| err(format!("params: {e}")))?;
        params.validate().map_err(|e| err(e.to_string()))?;
        Some(params)
    } else {
        None
    };

    let backend = match (backend_override, &s.backend) {
        (Some(b), _) if is_qals => b.clone(),
        (_, Some(b)) => b.parse().map_err(err)?,
        _ => Backend::Sa,
    };
    let topology = match &s.topology {
        Some(t) => TopologySpec::parse(t, base)?,
        None => TopologySpec::Complete,
    };
    let timeout = match s.timeout_s {
        Some(t) if t > 0.0 && t.is_finite() => Some(Duration::from_secs_f64(t)),
        Some(t) => return Err(err(format!("timeout_s must be positive, got {t}"))),
        None => None,
    };
    let positive = |v: Option<usize>, default: usize, field: &str| match v {
        Some(0) => Err(err(format!("{field} must be at least 1"))),
        Some(v) => Ok(v),
        None => Ok(default),
    };
    Ok(Solver {
        name: s.name,
        label: label.clone(),
        backend,
        topology,
        params,
        sweeps: positive(s.sweeps, 1000, "sweeps")?,
        reads: positive(s.reads, 10, "reads")?,
        node_budget: s.node_budget,
        tabu_iterations: positive(s.tabu_iterations, 10_000, "tabu_iterations")?,
        timeout,
    })
}
