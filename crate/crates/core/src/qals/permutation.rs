//! Permutation-vector encodings and the projection onto sampler weights.
//!
//! A permutation matrix `P` is stored as the vector `perm` with
//! `P[i][perm[i]] = 1`, together with its inverse. The permuted matrix
//! `M = Pᵀ Q P` then has `M[a][b] = Q[inverse[a]][inverse[b]]`, so any
//! entry of `M` is an O(1) lookup and `M` is never built.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::qubo::{BinarySolution, QuboProblem};
use crate::sampler::SampleResult;
use crate::topology::{EmbeddedProblem, Selection, Topology};
use crate::weights::WeightAssignment;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationState {
    perm: Vec<usize>,
    inverse: Vec<usize>,
}

impl PermutationState {
    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            inverse: (0..n).collect(),
        }
    }

    pub fn from_perm(perm: Vec<usize>) -> Result<Self> {
        let inverse = inverse_of(&perm)?;
        Ok(Self { perm, inverse })
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// Selects each position independently with probability `p` and
    /// shuffles the values at the selected positions among themselves
    /// (Fisher–Yates). Unselected positions keep their value.
    ///
    /// Draw order: one Bernoulli draw per position in index order, then the
    /// shuffle of the selected values.
    pub fn perturb<R: Rng + ?Sized>(&self, p: f64, rng: &mut R) -> Self {
        let p = p.clamp(0.0, 1.0);
        let selected: Vec<usize> = (0..self.perm.len())
            .filter(|_| rng.random_bool(p))
            .collect();
        let mut values: Vec<usize> = selected.iter().map(|&i| self.perm[i]).collect();
        values.shuffle(rng);
        let mut perm = self.perm.clone();
        for (&pos, v) in selected.iter().zip(values) {
            perm[pos] = v;
        }
        let mut inverse = vec![0; perm.len()];
        for (i, &v) in perm.iter().enumerate() {
            inverse[v] = i;
        }
        Self { perm, inverse }
    }
}

pub fn perturb_permutation<R: Rng + ?Sized>(
    state: &PermutationState,
    p: f64,
    rng: &mut R,
) -> PermutationState {
    state.perturb(p, rng)
}

/// `inverse[perm[i]] = i`; fails if `perm` is not a bijection on `0..n`.
pub fn inverse_of(perm: &[usize]) -> Result<Vec<usize>> {
    let n = perm.len();
    let mut inverse = vec![usize::MAX; n];
    for (i, &v) in perm.iter().enumerate() {
        if v >= n || inverse[v] != usize::MAX {
            return Err(invalid(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        inverse[v] = i;
    }
    Ok(inverse)
}

/// Canonical QUBO coefficients addressed by variable index.
pub trait Coefficients {
    fn n(&self) -> usize;

    /// Coefficient of `x_i x_j` (linear coefficient when `i == j`),
    /// symmetric in its arguments.
    fn coeff(&self, i: usize, j: usize) -> f64;
}

impl Coefficients for QuboProblem {
    fn n(&self) -> usize {
        QuboProblem::n(self)
    }

    fn coeff(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

/// Weights for the first `n` topology nodes under permutation `state`:
/// node `a` carries variable `inverse[a]`, so its weight is
/// `Q'[inverse[a]][inverse[a]]` and the coupler `(a, b)` gets
/// `Q'[inverse[a]][inverse[b]]`. Pairs without a coupler are dropped.
pub fn project_weights<C: Coefficients + ?Sized>(
    qprime: &C,
    t: &Topology,
    state: &PermutationState,
) -> Result<EmbeddedProblem> {
    let selection = t.select(qprime.n())?;
    project_selected(qprime, &selection, state)
}

pub(crate) fn project_selected<C: Coefficients + ?Sized>(
    qprime: &C,
    selection: &Selection,
    state: &PermutationState,
) -> Result<EmbeddedProblem> {
    let n = qprime.n();
    if state.len() != n || selection.nodes.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: state.len().min(selection.nodes.len()),
        });
    }
    let inv = &state.inverse;
    let linear = inv.iter().map(|&i| qprime.coeff(i, i)).collect();
    let couplers = selection
        .edges
        .iter()
        .map(|&(a, b)| (a, b, qprime.coeff(inv[a], inv[b])))
        .collect();
    Ok(EmbeddedProblem {
        weights: WeightAssignment::from_local(selection.nodes.clone(), linear, couplers),
        node_index: inv.clone(),
    })
}

/// Re-expresses a sample on the selected nodes in original variable order.
///
/// Node `a` carried variable `inverse[a]`, hence `x[i] = z[perm[i]]`: the
/// sample read through the same index map the projection used, which is
/// what keeps `f_Q'(x)` equal to the sampled energy.
pub fn map_back(
    assignment: &SampleResult,
    nodes: &[usize],
    state: &PermutationState,
) -> Result<BinarySolution> {
    if nodes.len() != state.len() {
        return Err(Error::DimensionMismatch {
            expected: state.len(),
            actual: nodes.len(),
        });
    }
    let x = state
        .perm
        .iter()
        .map(|&a| assignment.get(nodes[a]).ok_or(Error::MissingNode(nodes[a])))
        .collect::<Result<Vec<u8>>>()?;
    BinarySolution::new(x)
}
