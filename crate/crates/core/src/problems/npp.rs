//! Number partitioning: QUBO translation and classical baselines.

use std::collections::BinaryHeap;
use std::io::{BufRead, Write};

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::qubo::{BinarySolution, QuboProblem};

/// A multiset of positive integers to split into two subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NppInstance {
    numbers: Vec<u64>,
    sum: u64,
}

impl NppInstance {
    pub fn new(numbers: Vec<u64>) -> Result<Self> {
        if numbers.is_empty() {
            return Err(invalid("empty partition instance"));
        }
        if numbers.contains(&0) {
            return Err(invalid("partition numbers must be positive"));
        }
        let sum = numbers
            .iter()
            .try_fold(0u64, |acc, &s| acc.checked_add(s))
            .ok_or_else(|| invalid("sum of numbers overflows"))?;
        Ok(Self { numbers, sum })
    }

    /// `n` numbers drawn uniformly from `1..=range`.
    pub fn random<R: Rng + ?Sized>(n: usize, range: u64, rng: &mut R) -> Result<Self> {
        if range == 0 {
            return Err(invalid("range must be at least 1"));
        }
        Self::new((0..n).map(|_| rng.random_range(1..=range)).collect())
    }

    pub fn numbers(&self) -> &[u64] {
        &self.numbers
    }

    pub fn sum(&self) -> u64 {
        self.sum
    }

    pub fn len(&self) -> usize {
        self.numbers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numbers.is_empty()
    }

    /// One integer per line; blank lines and `#` comments are skipped.
    pub fn read_from<R: BufRead>(reader: R) -> Result<Self> {
        let mut numbers = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            numbers.push(t.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("expected a positive integer, got {t:?}"),
            })?);
        }
        Self::new(numbers)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        for s in &self.numbers {
            writeln!(out, "{s}")?;
        }
        Ok(())
    }

    /// `|sum(subset 1) - sum(subset 0)|` in exact integer arithmetic.
    pub fn diff(&self, x: &BinarySolution) -> Result<u64> {
        if x.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: x.len(),
            });
        }
        let ones: u128 = self
            .numbers
            .iter()
            .zip(x.bits())
            .filter(|(_, &b)| b == 1)
            .map(|(&s, _)| s as u128)
            .sum();
        Ok((self.sum as i128 - 2 * ones as i128).unsigned_abs() as u64)
    }

    /// Minimizing `xᵀQx` minimizes the squared difference:
    /// `diff(x)² = c² + 4 xᵀQx`.
    pub fn to_qubo(&self) -> Result<QuboProblem> {
        let n = self.len();
        let c = self.sum as f64;
        let mut q = QuboProblem::new(n)?;
        for (i, &si) in self.numbers.iter().enumerate() {
            let si = si as f64;
            q.set(i, i, si * (si - c))?;
            for (j, &sj) in self.numbers.iter().enumerate().skip(i + 1) {
                q.set(i, j, 2.0 * si * sj as f64)?;
            }
        }
        Ok(q)
    }
}

pub fn npp_to_qubo(inst: &NppInstance) -> Result<QuboProblem> {
    inst.to_qubo()
}

pub fn npp_diff(inst: &NppInstance, x: &BinarySolution) -> Result<u64> {
    inst.diff(x)
}

/// Largest first, each number joining the subset with the smaller running
/// sum; on equal sums it joins subset 1.
pub fn greedy_partition(inst: &NppInstance) -> BinarySolution {
    let mut order: Vec<usize> = (0..inst.len()).collect();
    order.sort_by(|&a, &b| inst.numbers[b].cmp(&inst.numbers[a]).then(a.cmp(&b)));
    let mut bits = vec![0u8; inst.len()];
    let (mut one, mut zero) = (0u64, 0u64);
    for i in order {
        if one <= zero {
            bits[i] = 1;
            one += inst.numbers[i];
        } else {
            zero += inst.numbers[i];
        }
    }
    BinarySolution::new(bits).expect("bits are binary")
}

/// Karmarkar-Karp differencing: replace the two largest numbers by their
/// difference until one remains.
pub fn kk_heuristic(inst: &NppInstance) -> u64 {
    let mut heap: BinaryHeap<u64> = inst.numbers.iter().copied().collect();
    while heap.len() > 1 {
        let a = heap.pop().unwrap();
        let b = heap.pop().unwrap();
        heap.push(a - b);
    }
    heap.pop().unwrap_or(0)
}

/// Karmarkar-Karp with the partition recovered: each differencing step
/// puts its two operands on opposite sides. Returns the partition and its
/// difference, which equals [`kk_heuristic`].
pub fn kk_partition(inst: &NppInstance) -> (BinarySolution, u64) {
    let n = inst.len();
    let mut heap: BinaryHeap<(u64, usize)> = inst.numbers.iter().copied().zip(0..n).collect();
    // node n + k differences the operands in pairs[k]
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(n.saturating_sub(1));
    while heap.len() > 1 {
        let (a, ta) = heap.pop().unwrap();
        let (b, tb) = heap.pop().unwrap();
        pairs.push((ta, tb));
        heap.push((a - b, n + pairs.len() - 1));
    }
    let (difference, root) = heap.pop().expect("instances are non-empty");
    let mut bits = vec![0u8; n];
    let mut stack = vec![(root, true)];
    while let Some((t, side)) = stack.pop() {
        if t < n {
            bits[t] = side as u8;
        } else {
            let (a, b) = pairs[t - n];
            stack.push((a, side));
            stack.push((b, !side));
        }
    }
    (
        BinarySolution::new(bits).expect("bits are binary"),
        difference,
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CkkResult {
    pub solution: BinarySolution,
    pub difference: u64,
    /// The node budget ran out before the search completed.
    pub truncated: bool,
    pub nodes: u64,
}

#[derive(Debug, Clone, Copy)]
enum Tree {
    Leaf(usize),
    /// Operands end up in different subsets.
    Diff(usize, usize),
    /// Operands end up in the same subset.
    Sum(usize, usize),
}

struct Ckk {
    /// Ascending `(value, tree)` pairs; the largest is last.
    work: Vec<(u64, usize)>,
    arena: Vec<Tree>,
    total: u64,
    floor: u64,
    best: u64,
    best_bits: Vec<u8>,
    budget: Option<u64>,
    nodes: u64,
    truncated: bool,
}

impl Ckk {
    fn done(&self) -> bool {
        self.best <= self.floor || self.truncated
    }

    fn search(&mut self) {
        self.nodes += 1;
        let (largest, largest_tree) = *self.work.last().expect("non-empty");
        let rest = self.total - largest;
        if largest >= rest {
            // the rest all join one subset against the largest
            let residual = largest - rest;
            if residual < self.best {
                self.best = residual;
                self.record(largest_tree);
            }
            return;
        }
        if self.budget.is_some_and(|b| self.nodes >= b) && self.best != u64::MAX {
            self.truncated = true;
            return;
        }
        let (a, ta) = self.work.pop().unwrap();
        let (b, tb) = self.work.pop().unwrap();
        let only_difference = self.work.len() + 2 <= 4;

        self.arena.push(Tree::Diff(ta, tb));
        let node = (a - b, self.arena.len() - 1);
        let pos = self.work.partition_point(|&(v, _)| v < node.0);
        self.work.insert(pos, node);
        self.total -= 2 * b;
        self.search();
        self.total += 2 * b;
        self.work.remove(pos);
        self.arena.pop();

        if !only_difference && !self.done() {
            self.arena.push(Tree::Sum(ta, tb));
            self.work.push((a + b, self.arena.len() - 1));
            self.search();
            self.work.pop();
            self.arena.pop();
        }
        self.work.push((b, tb));
        self.work.push((a, ta));
    }

    /// Signs the current trees: the largest on side 1, everything else on
    /// side 0, then pushes signs down to the leaves.
    fn record(&mut self, largest_tree: usize) {
        let mut stack: Vec<(usize, bool)> = self
            .work
            .iter()
            .map(|&(_, t)| (t, t == largest_tree))
            .collect();
        while let Some((t, side)) = stack.pop() {
            match self.arena[t] {
                Tree::Leaf(i) => self.best_bits[i] = side as u8,
                Tree::Diff(a, b) => {
                    stack.push((a, side));
                    stack.push((b, !side));
                }
                Tree::Sum(a, b) => {
                    stack.push((a, side));
                    stack.push((b, side));
                }
            }
        }
    }
}

/// Complete Karmarkar-Karp: depth-first over difference (first) and sum
/// (second) decisions on the two largest numbers.
///
/// Stops as soon as the difference reaches the parity floor `c mod 2`.
/// With a `node_budget`, once a partition is known no node past the budget
/// is expanded (children that are already leaves are still scored), and the
/// best partition found so far comes back with `truncated` set.
pub fn ckk_solve(inst: &NppInstance, node_budget: Option<u64>) -> CkkResult {
    let n = inst.len();
    let mut work: Vec<(u64, usize)> = inst.numbers.iter().copied().zip(0..n).collect();
    work.sort_unstable();
    let mut ckk = Ckk {
        work,
        arena: (0..n).map(Tree::Leaf).collect(),
        total: inst.sum,
        floor: inst.sum % 2,
        best: u64::MAX,
        best_bits: vec![0; n],
        budget: node_budget,
        nodes: 0,
        truncated: false,
    };
    ckk.search();
    let solution = BinarySolution::new(ckk.best_bits).expect("bits are binary");
    CkkResult {
        solution,
        difference: ckk.best,
        truncated: ckk.truncated,
        nodes: ckk.nodes,
    }
}
