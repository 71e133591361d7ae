//! Re-checks stored reports against their instances.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use qals_core::problems::{tsp_cost, Tour};
use qals_core::BinarySolution;

use crate::error::CliResult;
use crate::instance::Instance;
use crate::report::{aggregate, Aggregate, Record, Report};

/// Problems found in one report; empty when everything checks out.
pub fn verify_report(path: &Path) -> CliResult<Vec<String>> {
    let report = Report::read(path)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut instances: HashMap<PathBuf, Instance> = HashMap::new();
    let mut problems = Vec::new();
    for r in &report.records {
        let file = dir.join(&r.instance);
        if !instances.contains_key(&file) {
            instances.insert(file.clone(), Instance::load(r.kind, &file)?);
        }
        if let Err(msg) = check_record(r, &instances[&file]) {
            problems.push(format!("{} run {} ({}): {msg}", r.label, r.run, r.instance));
        }
    }
    let recomputed = aggregate(&report.records);
    if recomputed.len() != report.aggregates.len() {
        problems.push(format!(
            "{} stored aggregates, {} recomputed",
            report.aggregates.len(),
            recomputed.len()
        ));
    }
    for (stored, fresh) in report.aggregates.iter().zip(&recomputed) {
        if !aggregates_match(stored, fresh) {
            problems.push(format!(
                "aggregate {:?} differs from its records",
                stored.label
            ));
        }
    }
    Ok(problems)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

fn close_opt(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => close(a, b),
        (None, None) => true,
        _ => false,
    }
}

fn aggregates_match(a: &Aggregate, b: &Aggregate) -> bool {
    a.label == b.label
        && a.solver == b.solver
        && a.kind == b.kind
        && a.dimension == b.dimension
        && a.range == b.range
        && (a.runs, a.failed, a.invalid) == (b.runs, b.failed, b.invalid)
        && close_opt(a.mu, b.mu)
        && close_opt(a.sigma, b.sigma)
        && close(a.avg_time_s, b.avg_time_s)
}

fn check_record(r: &Record, inst: &Instance) -> Result<(), String> {
    if r.kind != inst.kind() || r.dimension != inst.size() {
        return Err("record does not match its instance".into());
    }
    if !r.ok {
        return match (&r.solution, r.difference, r.cost) {
            (None, None, None) => Ok(()),
            _ => Err("failed run carries a result".into()),
        };
    }
    let solution = r.solution.as_deref().ok_or("missing solution")?;
    match inst {
        Instance::Npp(npp) => {
            let bits = BinarySolution::parse(solution).map_err(|e| e.to_string())?;
            let diff = npp.diff(&bits).map_err(|e| e.to_string())?;
            if r.difference != Some(diff) {
                return Err(format!(
                    "difference {:?}, partition gives {diff}",
                    r.difference
                ));
            }
            if let Some(energy) = r.energy {
                let q = npp.to_qubo().map_err(|e| e.to_string())?;
                let f = q.evaluate(&bits).map_err(|e| e.to_string())?;
                if f != energy {
                    return Err(format!("energy {energy}, partition gives {f}"));
                }
            }
            if r.valid != Some(true) {
                return Err("npp rows are always valid".into());
            }
        }
        Instance::Tsp(tsp) => {
            let tour = Tour::parse(solution).map_err(|e| e.to_string())?;
            if tour.len() != tsp.n() {
                return Err(format!("tour visits {} of {} cities", tour.len(), tsp.n()));
            }
            match (tsp_cost(tsp, &tour), r.cost) {
                (Ok(c), Some(stored)) if close(c, stored) && r.valid == Some(true) => {}
                (Err(_), None) if r.valid == Some(false) => {}
                (c, stored) => {
                    return Err(format!("cost {stored:?}, tour gives {:?}", c.ok()));
                }
            }
        }
    }
    Ok(())
}
