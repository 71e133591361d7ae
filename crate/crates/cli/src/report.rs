//! Run records, aggregates, and their JSON-lines and CSV forms.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{config, runtime, CliResult};
use crate::instance::Kind;

pub const SCHEMA: u32 = 1;

/// One solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub schema: u32,
    pub label: String,
    pub solver: String,
    pub kind: Kind,
    /// Instance file, relative to the report's directory.
    pub instance: String,
    pub dimension: usize,
    pub range: Option<f64>,
    pub run: usize,
    pub seed: u64,
    pub ok: bool,
    pub error: Option<String>,
    /// NPP set difference, recomputed from `solution` in integers.
    pub difference: Option<u64>,
    /// TSP tour length; absent when the tour uses a missing edge.
    pub cost: Option<f64>,
    /// QUBO value of the solution, when the solver worked on the QUBO.
    pub energy: Option<f64>,
    /// NPP: the partition as a bit string. TSP: the tour's city order.
    pub solution: Option<String>,
    pub valid: Option<bool>,
    pub iterations: Option<usize>,
    pub wall_time_s: f64,
}

impl Record {
    /// The value a row is ranked by, if the run produced a usable one.
    pub fn objective(&self) -> Option<f64> {
        if !self.ok || self.valid == Some(false) {
            return None;
        }
        self.difference.map(|d| d as f64).or(self.cost)
    }
}

/// Statistics of one (kind, dimension, range, label) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Aggregate {
    pub schema: u32,
    pub label: String,
    pub solver: String,
    pub kind: Kind,
    pub dimension: usize,
    pub range: Option<f64>,
    pub runs: usize,
    pub failed: usize,
    pub invalid: usize,
    /// Mean objective over scored runs.
    pub mu: Option<f64>,
    /// Sample standard deviation; zero for a single scored run.
    pub sigma: Option<f64>,
    pub avg_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Line {
    Record(Record),
    Aggregate(Aggregate),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub records: Vec<Record>,
    pub aggregates: Vec<Aggregate>,
}

type GroupKey = (Kind, usize, Option<u64>, String);

fn key(r: &Record) -> GroupKey {
    (
        r.kind,
        r.dimension,
        r.range.map(f64::to_bits),
        r.label.clone(),
    )
}

/// Groups in order of first appearance.
pub fn aggregate(records: &[Record]) -> Vec<Aggregate> {
    let mut order: Vec<GroupKey> = Vec::new();
    let mut groups: Vec<Vec<&Record>> = Vec::new();
    for r in records {
        let k = key(r);
        match order.iter().position(|o| *o == k) {
            Some(i) => groups[i].push(r),
            None => {
                order.push(k);
                groups.push(vec![r]);
            }
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let first = g[0];
            let values: Vec<f64> = g.iter().filter_map(|r| r.objective()).collect();
            let (mu, sigma) = mean_and_sample_sd(&values);
            Aggregate {
                schema: SCHEMA,
                label: first.label.clone(),
                solver: first.solver.clone(),
                kind: first.kind,
                dimension: first.dimension,
                range: first.range,
                runs: g.len(),
                failed: g.iter().filter(|r| !r.ok).count(),
                invalid: g.iter().filter(|r| r.ok && r.valid == Some(false)).count(),
                mu,
                sigma,
                avg_time_s: g.iter().map(|r| r.wall_time_s).sum::<f64>() / g.len() as f64,
            }
        })
        .collect()
}

pub fn mean_and_sample_sd(values: &[f64]) -> (Option<f64>, Option<f64>) {
    let n = values.len();
    if n == 0 {
        return (None, None);
    }
    let mu = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (Some(mu), Some(0.0));
    }
    let ss: f64 = values.iter().map(|v| (v - mu).powi(2)).sum();
    (Some(mu), Some((ss / (n - 1) as f64).sqrt()))
}

impl Report {
    pub fn from_records(records: Vec<Record>) -> Self {
        let aggregates = aggregate(&records);
        Self {
            records,
            aggregates,
        }
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let file = File::open(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
        let mut report = Report::default();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| config(format!("{}: {e}", path.display())))?;
            if line.trim().is_empty() {
                continue;
            }
            let at = || format!("{}:{}", path.display(), idx + 1);
            let parsed: Line =
                serde_json::from_str(&line).map_err(|e| config(format!("{}: {e}", at())))?;
            let schema = match &parsed {
                Line::Record(r) => r.schema,
                Line::Aggregate(a) => a.schema,
            };
            if schema != SCHEMA {
                return Err(config(format!(
                    "{}: schema {schema}, expected {SCHEMA}",
                    at()
                )));
            }
            match parsed {
                Line::Record(r) => report.records.push(r),
                Line::Aggregate(a) => report.aggregates.push(a),
            }
        }
        Ok(report)
    }

    pub fn write_jsonl(&self, path: &Path) -> CliResult<()> {
        let io = |e: std::io::Error| runtime(format!("{}: {e}", path.display()));
        let mut out = BufWriter::new(File::create(path).map_err(io)?);
        let lines = self
            .records
            .iter()
            .cloned()
            .map(Line::Record)
            .chain(self.aggregates.iter().cloned().map(Line::Aggregate));
        for line in lines {
            serde_json::to_writer(&mut out, &line).map_err(|e| runtime(e.to_string()))?;
            out.write_all(b"\n").map_err(io)?;
        }
        out.flush().map_err(io)
    }
}

pub fn write_csv(aggregates: &[Aggregate], path: &Path) -> CliResult<()> {
    let mut w =
        csv::Writer::from_path(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    for a in aggregates {
        w.serialize(a)
            .map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    }
    w.flush()
        .map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"))
}

/// Plain-text comparison table, one row per aggregate.
pub fn render_table(aggregates: &[Aggregate]) -> String {
    let header = [
        "kind",
        "dim",
        "range",
        "solver",
        "runs",
        "failed",
        "mu",
        "sigma",
        "avg time (s)",
    ];
    let rows: Vec<[String; 9]> = aggregates
        .iter()
        .map(|a| {
            [
                format!("{:?}", a.kind).to_lowercase(),
                a.dimension.to_string(),
                a.range.map_or_else(|| "-".into(), |r| r.to_string()),
                a.label.clone(),
                a.runs.to_string(),
                (a.failed + a.invalid).to_string(),
                fmt_opt(a.mu),
                fmt_opt(a.sigma),
                format!("{:.4}", a.avg_time_s),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut push_row = |cells: &[String]| {
        let line: Vec<String> = cells
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    };
    push_row(&header.map(String::from));
    for row in &rows {
        push_row(row);
    }
    out
}
