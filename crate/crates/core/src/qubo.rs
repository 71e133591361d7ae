//! QUBO and Ising value types, energy evaluation and the exhaustive oracle.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;

/// Default upper bound on the variable count accepted by [`BruteForce`].
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 24;

/// Dense QUBO matrix in canonical upper-triangular form.
///
/// Entry `(i, i)` is the linear coefficient of `x_i`; entry `(i, j)` with
/// `i < j` is the coefficient of `x_i x_j`. Entries below the diagonal are
/// always zero: anything written there is folded onto its mirror.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboProblem {
    n: usize,
    coeffs: Vec<f64>,
}

impl QuboProblem {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("QUBO needs at least one variable"));
        }
        Ok(Self {
            n,
            coeffs: vec![0.0; n * n],
        })
    }

    /// Builds a canonical problem from a square matrix, folding `m[j][i]`
    /// into `m[i][j]` for `i < j`.
    pub fn from_dense<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let mut q = Self::new(rows.len())?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != q.n {
                return Err(Error::DimensionMismatch {
                    expected: q.n,
                    actual: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                q.add(i, j, v)?;
            }
        }
        Ok(q)
    }

    pub fn from_entries<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut q = Self::new(n)?;
        for (i, j, v) in entries {
            q.add(i, j, v)?;
        }
        Ok(q)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds `value` to the coefficient of `x_i x_j`; order of `i` and `j`
    /// does not matter.
    pub fn add(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(invalid(format!(
                "index ({i}, {j}) out of range for n = {}",
                self.n
            )));
        }
        if !value.is_finite() {
            return Err(invalid(format!("non-finite coefficient at ({i}, {j})")));
        }
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.coeffs[a * self.n + b] += value;
        Ok(())
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        if b >= self.n {
            return Err(invalid(format!(
                "index ({i}, {j}) out of range for n = {}",
                self.n
            )));
        }
        self.coeffs[a * self.n + b] = 0.0;
        self.add(a, b, value)
    }

    /// Canonical coefficient of `x_i x_j`, symmetric in its arguments.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.coeffs[a * self.n + b]
    }

    /// Upper-triangular nonzero entries in row-major order.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| {
            (i..n).filter_map(move |j| {
                let v = self.coeffs[i * n + j];
                (v != 0.0).then_some((i, j, v))
            })
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `x^T Q x`.
    pub fn evaluate(&self, x: &BinarySolution) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        Ok(self.evaluate_bits(x.bits()))
    }

    pub(crate) fn evaluate_bits(&self, bits: &[u8]) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        for i in 0..n {
            if bits[i] == 0 {
                continue;
            }
            let row = &self.coeffs[i * n..(i + 1) * n];
            total += row[i];
            for j in i + 1..n {
                if bits[j] != 0 {
                    total += row[j];
                }
            }
        }
        total
    }

    /// Reads the textual format: first line `n`, then `i j value` per
    /// nonzero entry with `i <= j`. Lines starting with `#` are comments.
    pub fn read_from<R: BufRead>(reader: R) -> Result<Self> {
        let mut problem: Option<QuboProblem> = None;
        let mut seen = std::collections::HashSet::new();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            match problem.as_mut() {
                None => {
                    let n: usize = text
                        .parse()
                        .map_err(|_| parse_err(format!("expected variable count, got {text:?}")))?;
                    problem = Some(QuboProblem::new(n).map_err(|e| parse_err(e.to_string()))?);
                }
                Some(q) => {
                    let fields: Vec<&str> = text.split_whitespace().collect();
                    if fields.len() != 3 {
                        return Err(parse_err(format!("expected `i j value`, got {text:?}")));
                    }
                    let i: usize = fields[0]
                        .parse()
                        .map_err(|_| parse_err(format!("bad row index {:?}", fields[0])))?;
                    let j: usize = fields[1]
                        .parse()
                        .map_err(|_| parse_err(format!("bad column index {:?}", fields[1])))?;
                    let v: f64 = fields[2]
                        .parse()
                        .map_err(|_| parse_err(format!("bad value {:?}", fields[2])))?;
                    if i > j {
                        return Err(parse_err(format!("entry ({i}, {j}) is below the diagonal")));
                    }
                    if !seen.insert((i, j)) {
                        return Err(parse_err(format!("duplicate entry ({i}, {j})")));
                    }
                    q.add(i, j, v).map_err(|e| parse_err(e.to_string()))?;
                }
            }
        }
        problem.ok_or(Error::Parse {
            line: 0,
            message: "empty QUBO file".into(),
        })
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.n)?;
        for (i, j, v) in self.nonzeros() {
            writeln!(out, "{i} {j} {v}")?;
        }
        Ok(())
    }
}

/// Assignment `x ∈ {0,1}^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinarySolution(Vec<u8>);

impl BinarySolution {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(invalid(format!("bit {pos} is {}, not 0 or 1", bits[pos])));
        }
        Ok(Self(bits))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        Self(bits.into_iter().map(u8::from).collect())
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] ^= 1;
    }

    pub fn hamming(&self, other: &Self) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    pub fn to_spins(&self) -> SpinSolution {
        SpinSolution(self.0.iter().map(|&b| 2 * b as i8 - 1).collect())
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(text: &str) -> Result<Self> {
        text.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(invalid(format!(
                    "unexpected character {other:?} in bit string"
                ))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Self)
    }
}

impl fmt::Display for BinarySolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Spin configuration `z ∈ {-1,+1}^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinSolution(Vec<i8>);

impl SpinSolution {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(pos) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(invalid(format!(
                "spin {pos} is {}, not -1 or +1",
                spins[pos]
            )));
        }
        Ok(Self(spins))
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_binary(&self) -> BinarySolution {
        BinarySolution(self.0.iter().map(|&s| ((s + 1) / 2) as u8).collect())
    }
}

/// Ising fields `θ_i` and couplings `θ_ij`, keyed by node index.
/// Coupling keys are stored with the smaller node first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IsingWeights {
    pub linear: BTreeMap<usize, f64>,
    pub quadratic: BTreeMap<(usize, usize), f64>,
}

impl IsingWeights {
    pub fn add_linear(&mut self, node: usize, value: f64) {
        *self.linear.entry(node).or_insert(0.0) += value;
    }

    pub fn add_quadratic(&mut self, u: usize, v: usize, value: f64) -> Result<()> {
        if u == v {
            return Err(invalid(format!("coupling ({u}, {v}) is a self-loop")));
        }
        let key = (u.min(v), u.max(v));
        *self.quadratic.entry(key).or_insert(0.0) += value;
        Ok(())
    }

    pub fn energy(&self, z: &SpinSolution) -> Result<f64> {
        evaluate_ising(self, z)
    }
}

/// `Σ θ_i z_i + Σ θ_ij z_i z_j`, with node `i` read from `z[i]`.
pub fn evaluate_ising(w: &IsingWeights, z: &SpinSolution) -> Result<f64> {
    let spin = |node: usize| -> Result<f64> {
        z.0.get(node)
            .map(|&s| s as f64)
            .ok_or(Error::MissingNode(node))
    };
    let mut total = 0.0;
    for (&i, &theta) in &w.linear {
        total += theta * spin(i)?;
    }
    for (&(i, j), &theta) in &w.quadratic {
        total += theta * spin(i)? * spin(j)?;
    }
    Ok(total)
}

/// Rewrites `q` in spin variables through `x = (z + 1) / 2`.
///
/// Returns weights and a constant offset with
/// `x^T Q x = E(w, z) + offset` for every assignment. With
/// `include_zero_couplers` every variable pair gets a coupling entry, which
/// is what a sampler on a complete graph expects.
pub fn qubo_to_ising(q: &QuboProblem, include_zero_couplers: bool) -> (IsingWeights, f64) {
    let n = q.n();
    let mut w = IsingWeights::default();
    let mut offset = 0.0;
    for i in 0..n {
        w.linear.insert(i, 0.0);
    }
    if include_zero_couplers {
        for i in 0..n {
            for j in i + 1..n {
                w.quadratic.insert((i, j), 0.0);
            }
        }
    }
    for (i, j, v) in q.nonzeros() {
        if i == j {
            w.add_linear(i, v / 2.0);
            offset += v / 2.0;
        } else {
            let quarter = v / 4.0;
            *w.quadratic.entry((i, j)).or_insert(0.0) += quarter;
            w.add_linear(i, quarter);
            w.add_linear(j, quarter);
            offset += quarter;
        }
    }
    (w, offset)
}

/// Exhaustive minimizer over all `2^n` assignments.
#[derive(Debug, Clone, Copy)]
pub struct BruteForce {
    pub cap: usize,
    pub execution: Execution,
}

impl Default for BruteForce {
    fn default() -> Self {
        Self {
            cap: DEFAULT_EXHAUSTIVE_CAP,
            execution: Execution::default(),
        }
    }
}

/// Exhaustive search with the default cap. Among equal minima the
/// lexicographically smallest bit string wins.
pub fn brute_force_qubo(q: &QuboProblem) -> Result<(BinarySolution, f64)> {
    BruteForce::default().solve(q)
}

impl BruteForce {
    pub fn with_cap(cap: usize) -> Self {
        Self {
            cap,
            ..Self::default()
        }
    }

    pub fn execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn solve(&self, q: &QuboProblem) -> Result<(BinarySolution, f64)> {
        let n = q.n();
        if n > self.cap || n > 62 {
            return Err(Error::TooLarge {
                n,
                cap: self.cap.min(62),
            });
        }
        let dense = SymmetricDense::from_qubo(q);
        let (_, mask) = minimize_masks(&dense, self.execution);
        let x = mask_to_solution(mask, n);
        let value = q.evaluate(&x)?;
        Ok((x, value))
    }
}

/// Diagonal plus symmetric off-diagonal (zero diagonal) couplings; the
/// layout used by the incremental enumerator.
pub(crate) struct SymmetricDense {
    pub n: usize,
    pub diag: Vec<f64>,
    pub sym: Vec<f64>,
}

impl SymmetricDense {
    pub fn from_qubo(q: &QuboProblem) -> Self {
        let n = q.n();
        let mut dense = Self::zeros(n);
        for (i, j, v) in q.nonzeros() {
            dense.add(i, j, v);
        }
        dense
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            diag: vec![0.0; n],
            sym: vec![0.0; n * n],
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        if i == j {
            self.diag[i] += v;
        } else {
            self.sym[i * self.n + j] += v;
            self.sym[j * self.n + i] += v;
        }
    }
}

/// Bit `n - 1 - i` of the mask holds `x_i`, so numeric order on masks is
/// lexicographic order on bit strings.
pub(crate) fn mask_to_solution(mask: u64, n: usize) -> BinarySolution {
    BinarySolution((0..n).map(|i| ((mask >> (n - 1 - i)) & 1) as u8).collect())
}

/// Returns `(energy, mask)` of the lexicographically smallest minimizer.
///
/// The leading variables are fixed per chunk and the rest enumerated in
/// Gray-code order with O(n) incremental updates. The chunk count depends
/// only on `n`, so the reduction is identical for either execution mode.
pub(crate) fn minimize_masks(dense: &SymmetricDense, execution: Execution) -> (f64, u64) {
    let n = dense.n;
    let high = n.min(8);
    let low = n - high;
    let chunks = 1usize << high;

    let results = execution.map_indexed(chunks, |chunk| {
        let mut bits = vec![0u8; n];
        for (i, bit) in bits.iter_mut().enumerate().take(high) {
            *bit = ((chunk >> (high - 1 - i)) & 1) as u8;
        }
        // field[k] = Σ_{j≠k} sym[k][j] x_j
        let mut field = vec![0.0; n];
        let mut energy = 0.0;
        for i in 0..high {
            if bits[i] == 1 {
                for (k, f) in field.iter_mut().enumerate() {
                    *f += dense.sym[k * n + i];
                }
            }
        }
        for i in 0..high {
            if bits[i] == 1 {
                energy += dense.diag[i];
                for j in i + 1..high {
                    if bits[j] == 1 {
                        energy += dense.sym[i * n + j];
                    }
                }
            }
        }
        let base = (chunk as u64) << low;
        let mut best = (energy, base);
        let mut low_mask = 0u64;
        for step in 1u64..(1u64 << low) {
            let b = step.trailing_zeros() as usize;
            let var = n - 1 - b;
            let sign = if bits[var] == 0 { 1.0 } else { -1.0 };
            energy += sign * (dense.diag[var] + field[var]);
            bits[var] ^= 1;
            let row = &dense.sym[var * n..(var + 1) * n];
            for (f, &c) in field.iter_mut().zip(row) {
                *f += sign * c;
            }
            low_mask ^= 1 << b;
            let mask = base | low_mask;
            if energy < best.0 || (energy == best.0 && mask < best.1) {
                best = (energy, mask);
            }
        }
        best
    });

    results
        .into_iter()
        .fold((f64::INFINITY, u64::MAX), |acc, cand| {
            if cand.0 < acc.0 || (cand.0 == acc.0 && cand.1 < acc.1) {
                cand
            } else {
                acc
            }
        })
}
