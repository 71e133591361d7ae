//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use qals_core::qals::QalsTrace;
use qals_core::{QuboProblem, Topology};

pub fn random_qubo<R: Rng>(n: usize, rng: &mut R) -> QuboProblem {
    let mut q = QuboProblem::new(n).unwrap();
    for i in 0..n {
        for j in i..n {
            q.add(i, j, rng.random_range(-10.0..10.0)).unwrap();
        }
    }
    q
}

pub fn random_bits<R: Rng>(n: usize, rng: &mut R) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2)).collect()
}

pub fn random_perm<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Random graph on `count` sparse node ids with edge probability `density`.
pub fn random_topology<R: Rng>(count: usize, density: f64, rng: &mut R) -> Topology {
    let mut nodes = Vec::with_capacity(count);
    let mut id = 0;
    while nodes.len() < count {
        id += rng.random_range(1..4);
        nodes.push(id);
    }
    let mut edges = Vec::new();
    for a in 0..count {
        for b in a + 1..count {
            if rng.random_bool(density) {
                edges.push((nodes[a], nodes[b]));
            }
        }
    }
    Topology::new(nodes, edges).unwrap()
}

/// Symmetric dense matrix `M` with `xᵀ M x = xᵀ Q x` (off-diagonal
/// coefficients split evenly between the two triangles).
pub fn dense_symmetric(q: &QuboProblem) -> Vec<Vec<f64>> {
    let n = q.n();
    let mut m = vec![vec![0.0; n]; n];
    for (i, j, v) in q.nonzeros() {
        if i == j {
            m[i][i] = v;
        } else {
            m[i][j] = v / 2.0;
            m[j][i] = v / 2.0;
        }
    }
    m
}

/// Dense permutation matrix with `P[i][perm[i]] = 1`.
pub fn perm_matrix(perm: &[usize]) -> Vec<Vec<f64>> {
    let n = perm.len();
    let mut p = vec![vec![0.0; n]; n];
    for (i, &v) in perm.iter().enumerate() {
        p[i][v] = 1.0;
    }
    p
}

pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (n, m, k) = (a.len(), b[0].len(), b.len());
    let mut c = vec![vec![0.0; m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l] != 0.0 {
                for j in 0..m {
                    c[i][j] += a[i][l] * b[l][j];
                }
            }
        }
    }
    c
}

pub fn transpose(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (n, m) = (a.len(), a[0].len());
    (0..m).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

/// Naive double loop over `i ≤ j`.
pub fn naive_energy(q: &QuboProblem, x: &[u8]) -> f64 {
    let mut s = 0.0;
    for i in 0..q.n() {
        for j in i..q.n() {
            s += q.get(i, j) * f64::from(x[i]) * f64::from(x[j]);
        }
    }
    s
}

pub fn all_assignments(n: usize) -> impl Iterator<Item = Vec<u8>> {
    (0u64..1 << n).map(move |m| (0..n).map(|i| ((m >> i) & 1) as u8).collect())
}

/// Minimum partition difference over all `2^n` subsets.
pub fn brute_partition(nums: &[u64]) -> u64 {
    let total: i128 = nums.iter().map(|&s| i128::from(s)).sum();
    (0u64..1 << nums.len())
        .map(|m| {
            let one: i128 = (0..nums.len())
                .filter(|i| (m >> i) & 1 == 1)
                .map(|i| i128::from(nums[i]))
                .sum();
            (total - 2 * one).unsigned_abs() as u64
        })
        .min()
        .unwrap()
}

/// Replays a trace against the loop's bookkeeping rules and returns the
/// first violation found.
pub fn check_trace(
    trace: &QalsTrace,
    p_delta: f64,
    eta: f64,
    period: usize,
    lambda0: f64,
    returned_value: f64,
) -> Result<(), String> {
    use qals_core::qals::Outcome;
    let (f1, f2) = trace.init.ok_or("missing init")?;
    let mut best = f1.min(f2);
    let mut current = best;
    let (mut p, mut lambda, mut e, mut d) = (1.0f64, lambda0, 0usize, 0usize);
    for (idx, r) in trace.records.iter().enumerate() {
        if r.i != idx {
            return Err(format!("record {idx} has i = {}", r.i));
        }
        let expected_p = if r.i % period == 0 {
            p - eta * (p - p_delta)
        } else {
            p
        };
        if r.p != expected_p {
            return Err(format!("p at {idx}: {} != {expected_p}", r.p));
        }
        if r.p > p || r.p < p_delta - 1e-12 {
            return Err(format!("p out of law at {idx}"));
        }
        if r.p != p && r.i % period != 0 {
            return Err(format!("p changed off-period at {idx}"));
        }
        p = r.p;
        if r.lambda != lambda || r.lambda > lambda0 {
            return Err(format!("lambda at {idx}: {} != {lambda}", r.lambda));
        }
        match r.outcome {
            Outcome::Repeat => {
                if r.f_prime.is_some() {
                    return Err(format!("repeat with a value at {idx}"));
                }
                e += 1;
            }
            Outcome::Improved => {
                let f = r.f_prime.ok_or("improved without value")?;
                if f >= current {
                    return Err(format!("improvement not strict at {idx}"));
                }
                current = f;
                best = best.min(f);
                e = 0;
                d = 0;
            }
            Outcome::AcceptedWorse => {
                let f = r.f_prime.ok_or("accepted without value")?;
                if f < current {
                    return Err(format!("better candidate marked worse at {idx}"));
                }
                current = f;
                e = 0;
                d += 1;
            }
            Outcome::Rejected => {
                let f = r.f_prime.ok_or("rejected without value")?;
                if f < current {
                    return Err(format!("better candidate rejected at {idx}"));
                }
                d += 1;
            }
        }
        if r.f_prime.is_some() {
            lambda = lambda0.min(lambda0 / (2 + r.i - e) as f64);
        }
        let accepted = matches!(r.outcome, Outcome::Improved | Outcome::AcceptedWorse);
        if r.accepted != accepted || r.e != e || r.d != d {
            return Err(format!("counters or flag differ at {idx}"));
        }
        if r.f_current != current || r.f_star != best {
            return Err(format!("objective bookkeeping differs at {idx}"));
        }
        if idx > 0 && r.f_star > trace.records[idx - 1].f_star {
            return Err(format!("f_star increased at {idx}"));
        }
    }
    if best != returned_value {
        return Err(format!("returned {returned_value}, trace best {best}"));
    }
    Ok(())
}
