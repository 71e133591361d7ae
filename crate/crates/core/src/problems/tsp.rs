//! Travelling salesman: QUBO translation, tour cost and exhaustive baseline.
//!
//! Variable `t * n + i` is set when city `i` is visited at position `t`.

use std::fmt;
use std::io::{BufRead, Write};

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::qubo::{BinarySolution, QuboProblem};

pub const DEFAULT_TSP_CAP: usize = 12;

/// Distance matrix with optional entries; `None` marks a missing edge.
#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance {
    n: usize,
    distances: Vec<Option<f64>>,
}

impl TspInstance {
    pub fn new(rows: Vec<Vec<Option<f64>>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(invalid("a tour needs at least one city"));
        }
        let mut distances = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            for (j, w) in row.into_iter().enumerate() {
                match w {
                    Some(w) if !w.is_finite() || w < 0.0 => {
                        return Err(invalid(format!(
                            "distance ({i}, {j}) = {w} is not a non-negative real"
                        )));
                    }
                    Some(w) if i == j && w != 0.0 => {
                        return Err(invalid(format!("distance ({i}, {i}) must be zero")));
                    }
                    _ => {}
                }
                distances.push(if i == j { Some(0.0) } else { w });
            }
        }
        Ok(Self { n, distances })
    }

    /// Dense matrix where infinite entries are missing edges.
    pub fn from_dense<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| {
                    r.as_ref()
                        .iter()
                        .map(|&w| (w != f64::INFINITY).then_some(w))
                        .collect()
                })
                .collect(),
        )
    }

    /// Complete symmetric instance with distances uniform in `[0, max]`.
    pub fn random<R: Rng + ?Sized>(n: usize, max: f64, rng: &mut R) -> Result<Self> {
        if !(max >= 0.0 && max.is_finite()) {
            return Err(invalid("distance bound must be a non-negative real"));
        }
        let mut rows = vec![vec![Some(0.0); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let w = rng.random_range(0.0..=max);
                rows[i][j] = Some(w);
                rows[j][i] = Some(w);
            }
        }
        Self::new(rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn distance(&self, i: usize, j: usize) -> Option<f64> {
        self.distances[i * self.n + j]
    }

    /// Largest present off-diagonal distance, 0 when there is none.
    pub fn max_distance(&self) -> f64 {
        self.distances.iter().flatten().fold(0.0, |m, &w| m.max(w))
    }

    /// Penalty weight `n · max W`, or 1 when every distance is zero.
    pub fn penalty(&self) -> f64 {
        let w = self.max_distance();
        if w > 0.0 {
            self.n as f64 * w
        } else {
            1.0
        }
    }

    /// First line `n`, then `n` rows; `inf` marks a missing edge.
    pub fn read_from<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader
            .lines()
            .enumerate()
            .map(|(i, l)| l.map(|l| (i + 1, l)))
            .filter(|r| {
                r.as_ref().map_or(true, |(_, l)| {
                    let t = l.trim();
                    !t.is_empty() && !t.starts_with('#')
                })
            });
        let parse_err = |line, message: String| Error::Parse { line, message };
        let (line, first) = lines
            .next()
            .ok_or_else(|| parse_err(0, "empty file".into()))??;
        let n: usize = first
            .trim()
            .parse()
            .map_err(|_| parse_err(line, format!("bad city count {first:?}")))?;
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let (line, text) = lines
                .next()
                .ok_or_else(|| parse_err(line, "missing matrix rows".into()))??;
            let row = text
                .split_whitespace()
                .map(|tok| {
                    if tok.eq_ignore_ascii_case("inf") {
                        Ok(None)
                    } else {
                        tok.parse::<f64>()
                            .map(Some)
                            .map_err(|_| parse_err(line, format!("bad distance {tok:?}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != n {
                return Err(parse_err(
                    line,
                    format!("expected {n} entries, got {}", row.len()),
                ));
            }
            rows.push(row);
        }
        Self::new(rows)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| match self.distance(i, j) {
                    Some(w) => format!("{w:?}"),
                    None => "inf".to_string(),
                })
                .collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// City visited at each position of a closed cycle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tour(Vec<usize>);

impl Tour {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &c in &order {
            if c >= n || std::mem::replace(&mut seen[c], true) {
                return Err(invalid(format!("{order:?} is not a permutation of 0..{n}")));
            }
        }
        Ok(Self(order))
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// One-hot encoding: bit `t * n + order[t]` is set.
    pub fn to_solution(&self) -> BinarySolution {
        let n = self.0.len();
        let mut bits = vec![0u8; n * n];
        for (t, &c) in self.0.iter().enumerate() {
            bits[t * n + c] = 1;
        }
        BinarySolution::new(bits).expect("bits are binary")
    }

    /// Decodes `x` when it has exactly one city per position and one
    /// position per city.
    pub fn from_solution(x: &BinarySolution, n: usize) -> Option<Self> {
        if x.len() != n * n {
            return None;
        }
        let order = x
            .bits()
            .chunks(n)
            .map(|row| {
                let mut ones = row.iter().enumerate().filter(|(_, &b)| b == 1);
                match (ones.next(), ones.next()) {
                    (Some((c, _)), None) => Some(c),
                    _ => None,
                }
            })
            .collect::<Option<Vec<usize>>>()?;
        Self::new(order).ok()
    }

    /// Space-separated city indices.
    pub fn parse(text: &str) -> Result<Self> {
        let order = text
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| invalid(format!("bad city index {t:?}")))
            })
            .collect::<Result<Vec<usize>>>()?;
        Self::new(order)
    }
}

impl fmt::Display for Tour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Penalty form with `A = inst.penalty()` and `B = 1`.
///
/// Adding `2 A n` to the energy of a valid tour assignment gives the tour
/// length. Each one-hot constraint contributes `-A` on the diagonal and
/// `2 A` per conflicting pair; missing edges cost `A` wherever the cost
/// term would have used their distance.
pub fn tsp_to_qubo(inst: &TspInstance) -> Result<QuboProblem> {
    let n = inst.n();
    if n < 2 {
        return Err(invalid("the QUBO form needs at least two cities"));
    }
    let a = inst.penalty();
    let var = |t: usize, c: usize| t * n + c;
    let mut q = QuboProblem::new(n * n)?;
    for t in 0..n {
        for c in 0..n {
            q.add(var(t, c), var(t, c), -2.0 * a)?;
            for other in c + 1..n {
                // two cities at one position
                q.add(var(t, c), var(t, other), 2.0 * a)?;
                // one city at two positions
                q.add(var(c, t), var(other, t), 2.0 * a)?;
            }
        }
    }
    for t in 0..n {
        let next = (t + 1) % n;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let w = inst.distance(i, j).unwrap_or(a);
                if w != 0.0 {
                    q.add(var(t, i), var(next, j), w)?;
                }
            }
        }
    }
    Ok(q)
}

/// Length of the closed cycle.
pub fn tsp_cost(inst: &TspInstance, tour: &Tour) -> Result<f64> {
    let n = inst.n();
    if tour.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: tour.len(),
        });
    }
    let o = tour.order();
    (0..n)
        .map(|t| {
            let (u, v) = (o[t], o[(t + 1) % n]);
            inst.distance(u, v).ok_or(Error::MissingEdge(u, v))
        })
        .sum()
}

/// Exhaustive search over tours that start at city 0.
#[derive(Debug, Clone, Copy)]
pub struct TspBruteForce {
    pub cap: usize,
    pub execution: Execution,
}

impl Default for TspBruteForce {
    fn default() -> Self {
        Self {
            cap: DEFAULT_TSP_CAP,
            execution: Execution::default(),
        }
    }
}

pub fn tsp_brute_force(inst: &TspInstance) -> Result<(Tour, f64)> {
    TspBruteForce::default().solve(inst)
}

impl TspBruteForce {
    pub fn execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    /// Optimal tour; among equal costs the lexicographically smallest
    /// order wins.
    pub fn solve(&self, inst: &TspInstance) -> Result<(Tour, f64)> {
        let n = inst.n();
        if n > self.cap {
            return Err(Error::TooLarge { n, cap: self.cap });
        }
        if n <= 2 {
            let tour = Tour::new((0..n).collect())?;
            let cost = tsp_cost(inst, &tour)?;
            return Ok((tour, cost));
        }
        // one chunk per second city, reduced in order
        let chunks = self.execution.map_indexed(n - 1, |k| {
            let second = k + 1;
            let mut rest: Vec<usize> = (1..n).filter(|&c| c != second).collect();
            let mut order = vec![0; n];
            order[1] = second;
            let mut best: Option<(f64, Vec<usize>)> = None;
            loop {
                order[2..].copy_from_slice(&rest);
                if let Some(cost) = cycle_cost(inst, &order) {
                    if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                        best = Some((cost, order.clone()));
                    }
                }
                if !next_permutation(&mut rest) {
                    break best;
                }
            }
        });
        let (cost, order) = chunks
            .into_iter()
            .flatten()
            .reduce(|acc, c| if c.0 < acc.0 { c } else { acc })
            .ok_or_else(|| invalid("the graph has no Hamiltonian cycle"))?;
        Ok((Tour::new(order)?, cost))
    }
}

fn cycle_cost(inst: &TspInstance, order: &[usize]) -> Option<f64> {
    let n = order.len();
    (0..n).try_fold(0.0, |acc, t| {
        Some(acc + inst.distance(order[t], order[(t + 1) % n])?)
    })
}

/// Advances to the next lexicographic permutation; false after the last.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len())
        .rev()
        .find(|&j| v[j] > v[i - 1])
        .expect("pivot exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_mt::Mt64;

    #[test]
    fn next_permutation_enumerates_in_order() {
        let mut v = vec![0, 1, 2, 3];
        let mut seen = vec![v.clone()];
        while next_permutation(&mut v) {
            assert!(seen.last().unwrap() < &v);
            seen.push(v.clone());
        }
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn unit_triangle() {
        let inst =
            TspInstance::from_dense(&[[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]).unwrap();
        let tour = Tour::new(vec![2, 0, 1]).unwrap();
        assert_eq!(tsp_cost(&inst, &tour).unwrap(), 3.0);
        assert_eq!(
            tsp_brute_force(&inst).unwrap(),
            (Tour::new(vec![0, 1, 2]).unwrap(), 3.0)
        );
    }

    #[test]
    fn cost_matches_pairwise_sum_and_rotation() {
        let mut rng = Mt64::seed_from_u64(1);
        for _ in 0..50 {
            let n = rng.random_range(2..9);
            let inst = TspInstance::random(n, 10.0, &mut rng).unwrap();
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let mut oracle = 0.0;
            for t in 0..n {
                oracle += inst.distance(order[t], order[(t + 1) % n]).unwrap();
            }
            let cost = tsp_cost(&inst, &Tour::new(order.clone()).unwrap()).unwrap();
            assert!((cost - oracle).abs() < 1e-12);
            order.rotate_left(1);
            let rotated = tsp_cost(&inst, &Tour::new(order).unwrap()).unwrap();
            assert!((cost - rotated).abs() < 1e-9);
        }
    }

    #[test]
    fn missing_edge_on_route() {
        let inf = f64::INFINITY;
        let inst =
            TspInstance::from_dense(&[[0.0, 1.0, inf], [1.0, 0.0, 1.0], [inf, 1.0, 0.0]]).unwrap();
        let err = tsp_cost(&inst, &Tour::new(vec![0, 1, 2]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::MissingEdge(2, 0)));
        assert!(tsp_brute_force(&inst).is_err());
    }

    #[test]
    fn brute_force_beats_random_tours_and_reversal() {
        let mut rng = Mt64::seed_from_u64(2);
        let inst = TspInstance::random(8, 10.0, &mut rng).unwrap();
        let (best, cost) = tsp_brute_force(&inst).unwrap();
        assert_eq!(best.order()[0], 0);
        for _ in 0..1000 {
            let mut o: Vec<usize> = (0..8).collect();
            o.shuffle(&mut rng);
            assert!(cost <= tsp_cost(&inst, &Tour::new(o).unwrap()).unwrap() + 1e-12);
        }
        let mut rev = best.order().to_vec();
        rev.reverse();
        let rc = tsp_cost(&inst, &Tour::new(rev).unwrap()).unwrap();
        assert!((rc - cost).abs() < 1e-9);
        let seq = TspBruteForce::default()
            .execution(Execution::Sequential)
            .solve(&inst)
            .unwrap();
        assert_eq!(seq, (best, cost));
    }

    #[test]
    fn brute_force_cap() {
        let inst = TspInstance::random(13, 1.0, &mut Mt64::new(0)).unwrap();
        assert!(matches!(
            tsp_brute_force(&inst),
            Err(Error::TooLarge { n: 13, cap: 12 })
        ));
    }

    #[test]
    fn two_cities_cost_twice_the_edge() {
        let inst = TspInstance::from_dense(&[[0.0, 2.5], [2.5, 0.0]]).unwrap();
        let q = tsp_to_qubo(&inst).unwrap();
        let a = inst.penalty();
        for order in [vec![0, 1], vec![1, 0]] {
            let tour = Tour::new(order).unwrap();
            let e = q.evaluate(&tour.to_solution()).unwrap();
            assert!((e + 2.0 * a * 2.0 - 5.0).abs() < 1e-9);
        }
    }

    #[test]
    fn qubo_needs_two_cities() {
        let inst = TspInstance::from_dense(&[[0.0]]).unwrap();
        assert!(tsp_to_qubo(&inst).is_err());
    }

    #[test]
    fn solution_round_trip() {
        let tour = Tour::new(vec![1, 0, 2]).unwrap();
        let x = tour.to_solution();
        assert_eq!(x.bits(), &[0, 1, 0, 1, 0, 0, 0, 0, 1]);
        assert_eq!(Tour::from_solution(&x, 3), Some(tour.clone()));
        assert_eq!(Tour::parse(&tour.to_string()).unwrap(), tour);
        assert!(Tour::from_solution(&BinarySolution::zeros(9), 3).is_none());
        assert!(Tour::new(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn instance_validation_and_files() {
        assert!(TspInstance::from_dense(&[[0.0, -1.0], [1.0, 0.0]]).is_err());
        assert!(TspInstance::from_dense(&[[1.0, 1.0], [1.0, 0.0]]).is_err());
        let inst = TspInstance::from_dense(&[
            [0.0, 1.5, f64::INFINITY],
            [1.5, 0.0, 0.25],
            [f64::INFINITY, 0.25, 0.0],
        ])
        .unwrap();
        let mut buf = Vec::new();
        inst.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("inf"));
        assert_eq!(TspInstance::read_from(text.as_bytes()).unwrap(), inst);
        let err = TspInstance::read_from("2\n0 1\n1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn random_instances_are_symmetric_and_bounded() {
        let inst = TspInstance::random(5, 10.0, &mut Mt64::new(3)).unwrap();
        for i in 0..5 {
            assert_eq!(inst.distance(i, i), Some(0.0));
            for j in 0..5 {
                let w = inst.distance(i, j).unwrap();
                assert!((0.0..=10.0).contains(&w));
                assert_eq!(Some(w), inst.distance(j, i));
            }
        }
    }
}
