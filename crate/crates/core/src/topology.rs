//! Sampler hardware graphs and the naive one-qubit-per-variable embedding.
//!
//! A [`Topology`] lists the active nodes of a sampler (ids need not be
//! contiguous, so broken qubits are simply absent) and the couplers between
//! them. Problems of size `n` always occupy the first `n` active nodes in
//! ascending order; only couplers with both endpoints among those nodes are
//! usable.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use crate::error::{invalid, Error, Result};
use crate::qubo::{BinarySolution, QuboProblem};
use crate::weights::WeightAssignment;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    nodes: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl Topology {
    /// Validates and normalizes a graph: nodes sorted, edges stored as
    /// `(min, max)` and sorted. Duplicate nodes or edges, self-loops and
    /// dangling endpoints are errors.
    pub fn new(mut nodes: Vec<usize>, edges: Vec<(usize, usize)>) -> Result<Self> {
        nodes.sort_unstable();
        if let Some(w) = nodes.windows(2).find(|w| w[0] == w[1]) {
            return Err(invalid(format!("duplicate node {}", w[0])));
        }
        let mut seen = BTreeSet::new();
        for &(u, v) in &edges {
            if u == v {
                return Err(invalid(format!("self-loop on node {u}")));
            }
            for x in [u, v] {
                if nodes.binary_search(&x).is_err() {
                    return Err(invalid(format!(
                        "edge ({u}, {v}) references unknown node {x}"
                    )));
                }
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(invalid(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Self {
            nodes,
            edges: seen.into_iter().collect(),
        })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| u == node || v == node)
            .count()
    }

    /// The first `n` active nodes and the couplers among them.
    pub fn select(&self, n: usize) -> Result<Selection> {
        if n > self.nodes.len() {
            return Err(Error::InsufficientNodes {
                required: n,
                available: self.nodes.len(),
            });
        }
        let nodes = self.nodes[..n].to_vec();
        let edges = match nodes.last() {
            None => Vec::new(),
            Some(&last) => self
                .edges
                .iter()
                .filter(|&&(_, v)| v <= last)
                .map(|&(u, v)| {
                    (
                        nodes.binary_search(&u).unwrap(),
                        nodes.binary_search(&v).unwrap(),
                    )
                })
                .collect(),
        };
        Ok(Selection { nodes, edges })
    }

    /// K_n on nodes `0..n`.
    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Self {
            nodes: (0..n).collect(),
            edges,
        }
    }

    /// Cycle on nodes `0..n`; a path for `n = 2` and edgeless below.
    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
        if n > 2 {
            edges.push((0, n - 1));
        }
        edges.sort_unstable();
        Self {
            nodes: (0..n).collect(),
            edges,
        }
    }

    /// Chimera `C_m` with shores of four qubits.
    ///
    /// Node `((row * m + col) * 2 + side) * 4 + k`. Each cell is a complete
    /// bipartite K_{4,4} between its two sides; side-0 qubits couple to the
    /// same qubit of the cell below, side-1 qubits to the cell on the right.
    pub fn chimera(m: usize) -> Self {
        const SHORE: usize = 4;
        let id = |row: usize, col: usize, side: usize, k: usize| {
            ((row * m + col) * 2 + side) * SHORE + k
        };
        let mut edges = Vec::with_capacity(16 * m * m + 8 * m * m.saturating_sub(1));
        for row in 0..m {
            for col in 0..m {
                for k in 0..SHORE {
                    for l in 0..SHORE {
                        edges.push((id(row, col, 0, k), id(row, col, 1, l)));
                    }
                    if row + 1 < m {
                        edges.push((id(row, col, 0, k), id(row + 1, col, 0, k)));
                    }
                    if col + 1 < m {
                        edges.push((id(row, col, 1, k), id(row, col + 1, 1, k)));
                    }
                }
            }
        }
        edges.sort_unstable();
        Self {
            nodes: (0..2 * SHORE * m * m).collect(),
            edges,
        }
    }

    /// Reads a topology file.
    ///
    /// Full form: node count, one node id per line, a line `E`, then one
    /// `u v` line per edge. Compact form (no `E` line): node count `n`
    /// followed directly by edges over nodes `0..n`.
    pub fn read_from<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let text = line.trim();
            if !text.is_empty() && !text.starts_with('#') {
                lines.push((idx + 1, text.to_string()));
            }
        }
        let mut iter = lines.into_iter();
        let (first_line, header) = iter.next().ok_or(Error::Parse {
            line: 0,
            message: "empty topology file".into(),
        })?;
        let count: usize = header.parse().map_err(|_| Error::Parse {
            line: first_line,
            message: format!("expected node count, got {header:?}"),
        })?;
        let rest: Vec<(usize, String)> = iter.collect();
        let full_form = rest.iter().any(|(_, t)| t == "E");

        let mut nodes = Vec::with_capacity(count);
        let mut node_set = BTreeSet::new();
        let mut edge_lines = rest.as_slice();
        if full_form {
            let marker = rest.iter().position(|(_, t)| t == "E").unwrap();
            for (line, text) in &rest[..marker] {
                let id: usize = text.parse().map_err(|_| Error::Parse {
                    line: *line,
                    message: format!("expected node id, got {text:?}"),
                })?;
                if !node_set.insert(id) {
                    return Err(Error::Parse {
                        line: *line,
                        message: format!("duplicate node {id}"),
                    });
                }
                nodes.push(id);
            }
            if nodes.len() != count {
                let line = rest[marker].0;
                return Err(Error::Parse {
                    line,
                    message: format!("header declares {count} nodes, found {}", nodes.len()),
                });
            }
            edge_lines = &rest[marker + 1..];
        } else {
            nodes.extend(0..count);
            node_set.extend(0..count);
        }

        let mut edges = Vec::with_capacity(edge_lines.len());
        let mut seen = BTreeSet::new();
        for (line, text) in edge_lines {
            let err = |message: String| Error::Parse {
                line: *line,
                message,
            };
            let fields: Vec<&str> = text.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(err(format!("expected `u v`, got {text:?}")));
            }
            let u: usize = fields[0]
                .parse()
                .map_err(|_| err(format!("bad node id {:?}", fields[0])))?;
            let v: usize = fields[1]
                .parse()
                .map_err(|_| err(format!("bad node id {:?}", fields[1])))?;
            if u == v {
                return Err(err(format!("self-loop on node {u}")));
            }
            for x in [u, v] {
                if !node_set.contains(&x) {
                    return Err(err(format!("edge endpoint {x} is not a listed node")));
                }
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(err(format!("duplicate edge ({u}, {v})")));
            }
            edges.push((u, v));
        }
        Self::new(nodes, edges)
    }

    /// Writes the full form with nodes and edges in ascending order.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.nodes.len())?;
        for v in &self.nodes {
            writeln!(out, "{v}")?;
        }
        writeln!(out, "E")?;
        for (u, v) in &self.edges {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }
}

/// The nodes a problem of a given size occupies and the couplers among
/// them, with edges in local positions `(a, b)`, `a < b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    pub nodes: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

/// Weights placed on topology nodes plus the variable each node carries.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedProblem {
    pub weights: WeightAssignment,
    /// `node_index[a]` is the QUBO variable carried by `weights.nodes()[a]`.
    pub node_index: Vec<usize>,
}

impl EmbeddedProblem {
    /// Reads a per-node sample back into variable order.
    pub fn map_back(&self, nodes: &[usize], bits: &[u8]) -> Result<BinarySolution> {
        let mut x = vec![0u8; self.node_index.len()];
        for (a, &node) in self.weights.nodes().iter().enumerate() {
            let pos = nodes
                .binary_search(&node)
                .map_err(|_| Error::MissingNode(node))?;
            x[self.node_index[a]] = bits[pos];
        }
        BinarySolution::new(x)
    }
}

/// Places variable `i` on the `i`-th active node and copies every QUBO
/// coefficient whose variable pair is joined by a coupler. Pairs without a
/// coupler are dropped.
pub fn embed_naive(q: &QuboProblem, t: &Topology) -> Result<EmbeddedProblem> {
    let selection = t.select(q.n())?;
    let linear = (0..q.n()).map(|i| q.get(i, i)).collect();
    let couplers = selection
        .edges
        .iter()
        .map(|&(a, b)| (a, b, q.get(a, b)))
        .collect();
    Ok(EmbeddedProblem {
        weights: WeightAssignment::from_local(selection.nodes, linear, couplers),
        node_index: (0..q.n()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_mt::Mt64;

    fn random_graph(rng: &mut Mt64, n: usize, p: f64) -> Topology {
        let mut nodes: Vec<usize> = Vec::new();
        let mut next = 0;
        while nodes.len() < n {
            next += rng.random_range(1..4);
            nodes.push(next);
        }
        let mut edges = Vec::new();
        for (i, &u) in nodes.iter().enumerate() {
            for &v in &nodes[i + 1..] {
                if rng.random_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        Topology::new(nodes, edges).unwrap()
    }

    #[test]
    fn compact_path_file() {
        let t = Topology::read_from("3\n0 1\n1 2\n".as_bytes()).unwrap();
        assert_eq!(t.nodes(), &[0, 1, 2]);
        assert_eq!(t.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn isolated_nodes() {
        let t = Topology::read_from("5\n".as_bytes()).unwrap();
        assert_eq!(t.node_count(), 5);
        assert_eq!(t.edge_count(), 0);
        let t = Topology::read_from("2\n10\n40\nE\n".as_bytes()).unwrap();
        assert_eq!(t.nodes(), &[10, 40]);
    }

    #[test]
    fn loader_errors_carry_line_numbers() {
        let cases = [
            ("3\n0 1\n1 x\n", 3),
            ("3\n0 1\n1 7\n", 3),
            ("3\n0 1\n1 0\n", 3),
            ("3\n0 0\n", 2),
            ("2\n4\n5\nE\n4 6\n", 5),
            ("3\n4\n5\nE\n", 4),
            ("2\n4\n4\nE\n", 3),
            ("x\n", 1),
        ];
        for (text, line) in cases {
            match Topology::read_from(text.as_bytes()) {
                Err(Error::Parse { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn save_load_round_trip() {
        let mut rng = Mt64::seed_from_u64(50);
        let t = random_graph(&mut rng, 50, 0.1);
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        assert_eq!(Topology::read_from(&buf[..]).unwrap(), t);
    }

    #[test]
    fn complete_graphs() {
        let k1 = Topology::complete(1);
        assert_eq!((k1.node_count(), k1.edge_count()), (1, 0));
        assert_eq!(Topology::complete(4).edge_count(), 6);
        let k10 = Topology::complete(10);
        assert!(k10.nodes().iter().all(|&v| k10.degree(v) == 9));
    }

    #[test]
    fn chimera_counts() {
        let c1 = Topology::chimera(1);
        assert_eq!((c1.node_count(), c1.edge_count()), (8, 16));
        for m in 1..=4 {
            let c = Topology::chimera(m);
            assert_eq!(c.node_count(), 8 * m * m);
            assert_eq!(c.edge_count(), 16 * m * m + 8 * m * (m - 1));
            assert!(c.nodes().iter().all(|&v| c.degree(v) <= 6));
            assert!(Topology::new(c.nodes().to_vec(), c.edges().to_vec()).is_ok());
        }
    }

    #[test]
    fn chimera_two_by_cell_pairs() {
        // Independent count: every cell contributes K_{4,4}, every pair of
        // grid-adjacent cells 4 couplers.
        let m = 2;
        let cells = m * m;
        let adjacent_pairs = 2 * m * (m - 1);
        assert_eq!(
            Topology::chimera(m).edge_count(),
            cells * 16 + adjacent_pairs * 4
        );
        assert_eq!(Topology::chimera(m).edge_count(), 80);
    }

    #[test]
    fn cycle_graph() {
        let c = Topology::cycle(12);
        assert_eq!(c.edge_count(), 12);
        assert!(c.nodes().iter().all(|&v| c.degree(v) == 2));
    }

    #[test]
    fn embedding_on_complete_topology_preserves_energy() {
        let mut rng = Mt64::seed_from_u64(3);
        for n in 1..=8 {
            let mut q = QuboProblem::new(n).unwrap();
            for i in 0..n {
                for j in i..n {
                    q.add(i, j, rng.random_range(-5.0..5.0)).unwrap();
                }
            }
            let emb = embed_naive(&q, &Topology::complete(n)).unwrap();
            for mask in 0u64..(1 << n) {
                let bits: Vec<u8> = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
                let x = BinarySolution::new(bits.clone()).unwrap();
                let want = q.evaluate(&x).unwrap();
                let got = emb.weights.energy(&bits);
                assert!((want - got).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn edgeless_topology_keeps_only_diagonal() {
        let q = QuboProblem::from_dense(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let t = Topology::new(vec![0, 1], vec![]).unwrap();
        let emb = embed_naive(&q, &t).unwrap();
        assert_eq!(emb.weights.linear(), &[1.0, 4.0]);
        assert!(emb.weights.couplers().is_empty());
    }

    #[test]
    fn missing_coupler_drops_pair() {
        let q = QuboProblem::from_entries(3, [(0, 2, 7.0), (0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let t = Topology::read_from("3\n0 1\n1 2\n".as_bytes()).unwrap();
        let emb = embed_naive(&q, &t).unwrap();
        assert_eq!(emb.weights.coupler_weight(0, 2), None);
        assert_eq!(emb.weights.coupler_weight(0, 1), Some(1.0));
    }

    #[test]
    fn embedding_needs_enough_nodes() {
        let q = QuboProblem::new(4).unwrap();
        assert!(matches!(
            embed_naive(&q, &Topology::complete(3)),
            Err(Error::InsufficientNodes {
                required: 4,
                available: 3
            })
        ));
    }

    #[test]
    fn embedding_never_touches_non_edges() {
        let mut rng = Mt64::seed_from_u64(21);
        for _ in 0..30 {
            let t = random_graph(&mut rng, 20, 0.3);
            let n = rng.random_range(1..=20);
            let mut q = QuboProblem::new(n).unwrap();
            for i in 0..n {
                for j in i..n {
                    q.add(i, j, rng.random_range(-1.0..1.0)).unwrap();
                }
            }
            let emb = embed_naive(&q, &t).unwrap();
            let selected = &t.nodes()[..n];
            assert_eq!(emb.weights.nodes(), selected);
            for &(a, b, _) in emb.weights.couplers() {
                assert!(t.has_edge(emb.weights.nodes()[a], emb.weights.nodes()[b]));
            }
        }
    }
}
