//! Executes the solver runs of a plan.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use qals_core::classical::{race, TabuSearchParams};
use qals_core::problems::{
    ckk_solve, greedy_partition, kk_partition, refine_tsp_solution, tsp_brute_force, tsp_cost,
    tsp_to_qubo, NppInstance, Tour, TspInstance,
};
use qals_core::qals::{run_qals, IterationRecord, QalsTrace};
use qals_core::sampler::{
    BridgeSampler, ExhaustiveSampler, SaSchedule, Sampler, SimulatedAnnealing, UniformRandomSampler,
};
use qals_core::{
    BinarySolution, BruteForce, Execution, Mt64, QuboProblem, Topology, WeightAssignment,
};

use crate::config::{Backend, Plan, Solver, SolverName};
use crate::error::{runtime, CliResult};
use crate::instance::Instance;
use crate::report::{Record, Report, SCHEMA};

pub struct Outcome {
    pub report: Report,
    pub failures: usize,
}

/// Loads or generates the instance, runs every solver `repetitions`
/// times and writes the report, CSV and trace files the plan names.
pub fn solve(plan: &Plan) -> CliResult<Outcome> {
    let report_dir = plan
        .report
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let outputs = [Some(&plan.report), plan.csv.as_ref(), plan.trace.as_ref()];
    for dir in outputs.into_iter().flatten().filter_map(|p| p.parent()) {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| runtime(format!("{}: {e}", dir.display())))?;
        }
    }

    let (instance, instance_path) = match &plan.instance_file {
        Some(path) => (Instance::load(plan.kind, path)?, path.clone()),
        None => {
            let size = plan.size.expect("validated");
            let seed = plan.instance_seed.expect("validated");
            let inst = Instance::generate(plan.kind, size, plan.range.expect("validated"), seed)?;
            let stem = plan
                .report
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "report".into());
            let path = report_dir.join(format!("{stem}.instance.txt"));
            inst.save(&path)?;
            (inst, path)
        }
    };
    let instance_ref = relative_to(&instance_path, &report_dir);

    let jobs: Vec<(usize, usize)> = (0..plan.solvers.len())
        .flat_map(|s| (0..plan.repetitions).map(move |r| (s, r)))
        .collect();
    let ctx = Context {
        instance: &instance,
        instance_ref: &instance_ref,
        range: plan.range,
    };
    let results = Execution::default().map_indexed(jobs.len(), |j| {
        let (s, run) = jobs[j];
        ctx.run(&plan.solvers[s], run, plan.seed.wrapping_add(run as u64))
    });

    let mut records = Vec::with_capacity(results.len());
    let mut traces = Vec::new();
    for (record, trace) in results {
        if let Some(t) = trace {
            traces.push((record.label.clone(), record.run, t));
        }
        records.push(record);
    }
    let failures = records.iter().filter(|r| !r.ok).count();
    let report = Report::from_records(records);
    report.write_jsonl(&plan.report)?;
    if let Some(csv) = &plan.csv {
        crate::report::write_csv(&report.aggregates, csv)?;
    }
    if let Some(path) = &plan.trace {
        write_traces(path, &traces)?;
    }
    Ok(Outcome { report, failures })
}

fn relative_to(path: &Path, dir: &Path) -> String {
    path.strip_prefix(dir)
        .unwrap_or(path)
        .to_string_lossy()
        .into_owned()
}

#[derive(Serialize)]
struct TraceHeader<'a> {
    label: &'a str,
    run: usize,
    init: Option<(f64, f64)>,
    iterations: usize,
}

#[derive(Serialize)]
struct TraceLine<'a> {
    label: &'a str,
    run: usize,
    #[serde(flatten)]
    record: &'a IterationRecord,
}

/// Per QALS run: a header line, then one line per iteration.
fn write_traces(path: &Path, traces: &[(String, usize, QalsTrace)]) -> CliResult<()> {
    let io = |e: std::io::Error| runtime(format!("{}: {e}", path.display()));
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    for (label, run, trace) in traces {
        let header = TraceHeader {
            label,
            run: *run,
            init: trace.init,
            iterations: trace.len(),
        };
        serde_json::to_writer(&mut out, &header).map_err(|e| runtime(e.to_string()))?;
        out.write_all(b"\n").map_err(io)?;
        for record in &trace.records {
            let line = TraceLine {
                label,
                run: *run,
                record,
            };
            serde_json::to_writer(&mut out, &line).map_err(|e| runtime(e.to_string()))?;
            out.write_all(b"\n").map_err(io)?;
        }
    }
    out.flush().map_err(io)
}

struct Context<'a> {
    instance: &'a Instance,
    instance_ref: &'a str,
    range: Option<f64>,
}

/// What a solver produced, before it is turned into a record.
#[derive(Default)]
struct Found {
    bits: Option<BinarySolution>,
    tour: Option<Tour>,
    energy: Option<f64>,
    iterations: Option<usize>,
    trace: Option<QalsTrace>,
}

impl Context<'_> {
    fn run(&self, solver: &Solver, run: usize, seed: u64) -> (Record, Option<QalsTrace>) {
        let start = Instant::now();
        let result = match self.instance {
            Instance::Npp(inst) => solve_npp(solver, inst, seed),
            Instance::Tsp(inst) => solve_tsp(solver, inst, seed),
        };
        let wall_time_s = start.elapsed().as_secs_f64();
        let mut record = Record {
            schema: SCHEMA,
            label: solver.label.clone(),
            solver: solver.name.as_str().to_string(),
            kind: self.instance.kind(),
            instance: self.instance_ref.to_string(),
            dimension: self.instance.size(),
            range: self.range,
            run,
            seed,
            ok: true,
            error: None,
            difference: None,
            cost: None,
            energy: None,
            solution: None,
            valid: None,
            iterations: None,
            wall_time_s,
        };
        let found = match result {
            Ok(found) => found,
            Err((message, trace)) => {
                record.ok = false;
                record.error = Some(message);
                return (record, trace);
            }
        };
        record.energy = found.energy;
        record.iterations = found.iterations;
        match self.instance {
            Instance::Npp(inst) => {
                let bits = found.bits.expect("npp solvers return a partition");
                record.difference = Some(inst.diff(&bits).expect("length checked by the solver"));
                record.solution = Some(bits.to_string());
                record.valid = Some(true);
            }
            Instance::Tsp(inst) => {
                let tour = found.tour.expect("tsp solvers return a tour");
                record.cost = tsp_cost(inst, &tour).ok();
                record.valid = Some(record.cost.is_some());
                record.solution = Some(tour.to_string());
            }
        }
        (record, found.trace)
    }
}

type SolveResult = Result<Found, (String, Option<QalsTrace>)>;

fn fail(e: impl std::fmt::Display) -> (String, Option<QalsTrace>) {
    (e.to_string(), None)
}

fn full_weights(q: &QuboProblem) -> Result<WeightAssignment, qals_core::Error> {
    WeightAssignment::from_node_entries((0..q.n()).map(|i| (i, i, 0.0)).chain(q.nonzeros()))
}

fn schedule(solver: &Solver) -> SaSchedule {
    SaSchedule::geometric(solver.sweeps)
}

/// The sampler behind a QALS run; annealing is restricted to `topology`.
fn backend(
    solver: &Solver,
    seed: u64,
    topology: &Topology,
) -> Result<Box<dyn Sampler>, qals_core::Error> {
    Ok(match &solver.backend {
        Backend::Exhaustive => Box::new(ExhaustiveSampler::default()),
        Backend::Sa => Box::new(
            SimulatedAnnealing::new(schedule(solver), seed)?.with_topology(topology.clone()),
        ),
        Backend::Random => Box::new(UniformRandomSampler::new(seed)),
        Backend::Bridge(cmd) => {
            let b = BridgeSampler::from_command_line(cmd)?;
            Box::new(match solver.timeout {
                Some(t) => b.with_timeout(t),
                None => b,
            })
        }
    })
}

/// Minimizes `q` with a QUBO-level solver; `None` for solvers that work on
/// the problem directly.
fn solve_qubo(solver: &Solver, q: &QuboProblem, seed: u64, rng: &mut Mt64) -> Option<SolveResult> {
    let found = |bits: BinarySolution, energy: f64| Found {
        bits: Some(bits),
        energy: Some(energy),
        ..Found::default()
    };
    Some(match solver.name {
        SolverName::Qals => {
            let params = solver.params.as_ref().expect("validated");
            let topology = solver.topology.build(q.n());
            let mut sampler = match backend(solver, seed, &topology) {
                Ok(s) => s,
                Err(e) => return Some(Err(fail(e))),
            };
            match run_qals(q, &topology, &mut sampler, params, rng) {
                Ok(out) => Ok(Found {
                    iterations: Some(out.trace.len()),
                    trace: Some(out.trace),
                    ..found(out.solution, out.value)
                }),
                Err(f) => Err((f.error.to_string(), Some(f.trace))),
            }
        }
        SolverName::Sa => (|| {
            let weights = full_weights(q).map_err(fail)?;
            let mut sa = SimulatedAnnealing::new(schedule(solver), seed).map_err(fail)?;
            let r = sa.sample(&weights, solver.reads).map_err(fail)?;
            let bits = BinarySolution::new(r.bits).map_err(fail)?;
            let energy = q.evaluate(&bits).map_err(fail)?;
            Ok(found(bits, energy))
        })(),
        SolverName::Exhaustive => BruteForce::default()
            .solve(q)
            .map(|(bits, e)| found(bits, e))
            .map_err(fail),
        SolverName::Race => {
            let tabu = TabuSearchParams {
                iterations: solver.tabu_iterations,
                tenure: None,
            };
            race(
                q,
                &tabu,
                &schedule(solver),
                solver.reads,
                seed,
                Execution::default(),
            )
            .map(|r| found(r.solution, r.value))
            .map_err(fail)
        }
        _ => return None,
    })
}

fn solve_npp(solver: &Solver, inst: &NppInstance, seed: u64) -> SolveResult {
    let partition = |bits: BinarySolution| Found {
        bits: Some(bits),
        ..Found::default()
    };
    match solver.name {
        SolverName::Ckk => Ok(partition(ckk_solve(inst, solver.node_budget).solution)),
        SolverName::Kk => Ok(partition(kk_partition(inst).0)),
        SolverName::Greedy => Ok(partition(greedy_partition(inst))),
        SolverName::BruteForce => {
            let q = inst.to_qubo().map_err(fail)?;
            BruteForce::default()
                .solve(&q)
                .map(|(bits, e)| Found {
                    energy: Some(e),
                    ..partition(bits)
                })
                .map_err(fail)
        }
        _ => {
            let q = inst.to_qubo().map_err(fail)?;
            let mut rng = Mt64::new(seed);
            solve_qubo(solver, &q, seed, &mut rng).expect("qubo solver")
        }
    }
}

fn solve_tsp(solver: &Solver, inst: &TspInstance, seed: u64) -> SolveResult {
    if solver.name == SolverName::BruteForce {
        let (tour, _) = tsp_brute_force(inst).map_err(fail)?;
        return Ok(Found {
            tour: Some(tour),
            ..Found::default()
        });
    }
    let q = tsp_to_qubo(inst).map_err(fail)?;
    let mut rng = Mt64::new(seed);
    let mut found = solve_qubo(solver, &q, seed, &mut rng).expect("validated for tsp")?;
    let bits = found.bits.take().expect("qubo solvers return bits");
    found.tour = Some(refine_tsp_solution(&bits, inst, &mut rng).map_err(fail)?);
    Ok(found)
}
