use rand::Rng;

use super::params::QalsParams;
use super::permutation::{map_back, project_selected, PermutationState};
use super::tabu::{perturb_candidate, Penalized, TabuMatrix};
use super::trace::{IterationRecord, Outcome, QalsTrace};
use crate::error::Error;
use crate::qubo::{BinarySolution, QuboProblem};
use crate::sampler::Sampler;
use crate::topology::{Selection, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    IterationLimit,
    Converged,
}

#[derive(Debug, Clone)]
pub struct QalsOutcome {
    /// Best solution seen during the run.
    pub solution: BinarySolution,
    pub value: f64,
    pub trace: QalsTrace,
    pub termination: Termination,
}

/// A failed run keeps the trace recorded up to the failure.
#[derive(Debug, thiserror::Error)]
#[error("{error}")]
pub struct QalsFailure {
    #[source]
    pub error: Error,
    pub trace: QalsTrace,
}

impl QalsFailure {
    fn new(error: Error, trace: QalsTrace) -> Self {
        Self { error, trace }
    }
}

struct Context<'a, S: ?Sized> {
    q: &'a QuboProblem,
    selection: Selection,
    backend: &'a mut S,
    reads: usize,
}

impl<S: Sampler + ?Sized> Context<'_, S> {
    /// Perturbs `from`, projects `Q + λS` under the new permutation,
    /// samples it and maps the result back to variable order.
    fn draw<R: Rng + ?Sized>(
        &mut self,
        from: &PermutationState,
        p: f64,
        tabu: &TabuMatrix,
        lambda: f64,
        rng: &mut R,
    ) -> Result<(BinarySolution, PermutationState), Error> {
        let state = from.perturb(p, rng);
        let qprime = Penalized {
            q: self.q,
            tabu,
            lambda,
        };
        let embedded = project_selected(&qprime, &self.selection, &state)?;
        let sample = self.backend.sample(&embedded.weights, self.reads)?;
        let z = map_back(&sample, &self.selection.nodes, &state)?;
        Ok((z, state))
    }
}

/// Runs QALS on `q` restricted to the couplers of `t`.
///
/// Random draws happen in a fixed order per iteration: position selection
/// and shuffle of the permutation, then (after sampling) one Bernoulli for
/// candidate perturbation and, if it fires, one per bit, then one uniform
/// draw whenever a differing candidate is not strictly better. The backend
/// owns its own generator.
pub fn run_qals<S, R>(
    q: &QuboProblem,
    t: &Topology,
    backend: &mut S,
    params: &QalsParams,
    rng: &mut R,
) -> Result<QalsOutcome, QalsFailure>
where
    S: Sampler + ?Sized,
    R: Rng + ?Sized,
{
    let mut trace = QalsTrace::default();
    if let Err(e) = params.validate() {
        return Err(QalsFailure::new(e, trace));
    }
    let n = q.n();
    let selection = match t.select(n) {
        Ok(s) => s,
        Err(e) => return Err(QalsFailure::new(e, trace)),
    };
    let mut ctx = Context {
        q,
        selection,
        backend,
        reads: params.k,
    };
    let evaluate = |z: &BinarySolution| q.evaluate_bits(z.bits());

    let lambda0 = params.lambda0;
    let mut lambda = lambda0;
    let mut p = 1.0;
    let mut tabu = TabuMatrix::zeros(n, params.tabu_spin_form);
    let identity = PermutationState::identity(n);

    let init = (|| {
        let (z1, m1) = ctx.draw(&identity, p, &tabu, lambda, rng)?;
        let (z2, m2) = ctx.draw(&identity, p, &tabu, lambda, rng)?;
        Ok::<_, Error>((z1, m1, z2, m2))
    })();
    let (z1, m1, z2, m2) = match init {
        Ok(v) => v,
        Err(e) => return Err(QalsFailure::new(e, trace)),
    };
    let (f1, f2) = (evaluate(&z1), evaluate(&z2));
    trace.init = Some((f1, f2));
    let (mut z_star, mut f_star, mut m_star, worse) = if f1 < f2 {
        (z1, f1, m1, z2)
    } else {
        (z2, f2, m2, z1)
    };
    if f1 != f2 {
        tabu.update(&worse);
    }
    let mut best = (z_star.clone(), f_star);

    let (mut e, mut d, mut i) = (0usize, 0usize, 0usize);
    let termination = loop {
        if i == params.i_max {
            break Termination::IterationLimit;
        }
        if e + d >= params.n_max && d < params.d_min {
            break Termination::Converged;
        }
        if i % params.period == 0 {
            p -= params.eta * (p - params.p_delta);
        }
        let lambda_used = lambda;
        let (mut z, state) = match ctx.draw(&m_star, p, &tabu, lambda, rng) {
            Ok(v) => v,
            Err(err) => return Err(QalsFailure::new(err, trace)),
        };
        if rng.random_bool(params.q) {
            z = perturb_candidate(&z, p, rng);
        }

        let (f_prime, outcome) = if z != z_star {
            let f = evaluate(&z);
            let outcome = if f < f_star {
                let previous = std::mem::replace(&mut z_star, z);
                f_star = f;
                m_star = state;
                e = 0;
                d = 0;
                tabu.update(&previous);
                if f < best.1 {
                    best = (z_star.clone(), f);
                }
                Outcome::Improved
            } else {
                d += 1;
                let chance = (p - params.p_delta)
                    .powf((f - f_star) / params.energy_scale)
                    .clamp(0.0, 1.0);
                if rng.random::<f64>() < chance {
                    z_star = z;
                    f_star = f;
                    m_star = state;
                    e = 0;
                    Outcome::AcceptedWorse
                } else {
                    Outcome::Rejected
                }
            };
            lambda = lambda0.min(lambda0 / (2 + i - e) as f64);
            (Some(f), outcome)
        } else {
            e += 1;
            (None, Outcome::Repeat)
        };

        trace.records.push(IterationRecord {
            i,
            p,
            lambda: lambda_used,
            f_prime,
            f_star: best.1,
            f_current: f_star,
            accepted: matches!(outcome, Outcome::Improved | Outcome::AcceptedWorse),
            outcome,
            e,
            d,
        });
        i += 1;
    };

    let (solution, value) = best;
    Ok(QalsOutcome {
        solution,
        value,
        trace,
        termination,
    })
}
