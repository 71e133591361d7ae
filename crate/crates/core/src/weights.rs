//! Sparse sampler weights over topology nodes, in 0/1 (QUBO) form.

use crate::error::{invalid, Result};

/// Node and coupler weights submitted to a sampler.
///
/// Nodes are kept in ascending id order and every node carries a linear
/// weight, possibly zero. Couplers are stored by local node position with
/// `a < b` and are never zero: an absent coupler and a zero coupler mean
/// the same thing.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightAssignment {
    nodes: Vec<usize>,
    linear: Vec<f64>,
    couplers: Vec<(usize, usize, f64)>,
}

impl WeightAssignment {
    /// Builds weights from `(row node, column node, value)` entries.
    /// Diagonal entries are node weights; repeated entries are summed.
    pub fn from_node_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let entries: Vec<(usize, usize, f64)> = entries.into_iter().collect();
        let mut nodes: Vec<usize> = entries.iter().flat_map(|&(u, v, _)| [u, v]).collect();
        nodes.sort_unstable();
        nodes.dedup();
        let mut linear = vec![0.0; nodes.len()];
        let mut pairs = std::collections::BTreeMap::new();
        for (u, v, w) in entries {
            if !w.is_finite() {
                return Err(invalid(format!("non-finite weight on ({u}, {v})")));
            }
            let a = nodes.binary_search(&u).unwrap();
            let b = nodes.binary_search(&v).unwrap();
            if a == b {
                linear[a] += w;
            } else {
                *pairs.entry((a.min(b), a.max(b))).or_insert(0.0) += w;
            }
        }
        let couplers = pairs
            .into_iter()
            .filter(|&(_, w)| w != 0.0)
            .map(|((a, b), w)| (a, b, w))
            .collect();
        Ok(Self {
            nodes,
            linear,
            couplers,
        })
    }

    /// All-zero weights on the given nodes.
    pub fn zeros(mut nodes: Vec<usize>) -> Self {
        nodes.sort_unstable();
        nodes.dedup();
        let linear = vec![0.0; nodes.len()];
        Self {
            nodes,
            linear,
            couplers: Vec::new(),
        }
    }

    /// `nodes` must be strictly increasing; couplers use local positions.
    pub(crate) fn from_local(
        nodes: Vec<usize>,
        linear: Vec<f64>,
        mut couplers: Vec<(usize, usize, f64)>,
    ) -> Self {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(nodes.len(), linear.len());
        couplers.retain(|c| c.2 != 0.0);
        couplers.sort_by_key(|&(a, b, _)| (a, b));
        Self {
            nodes,
            linear,
            couplers,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    /// Couplers as `(local a, local b, weight)` with `a < b`.
    pub fn couplers(&self) -> &[(usize, usize, f64)] {
        &self.couplers
    }

    pub fn node_weight(&self, node: usize) -> Option<f64> {
        self.nodes.binary_search(&node).ok().map(|i| self.linear[i])
    }

    pub fn coupler_weight(&self, u: usize, v: usize) -> Option<f64> {
        let a = self.nodes.binary_search(&u).ok()?;
        let b = self.nodes.binary_search(&v).ok()?;
        let key = (a.min(b), a.max(b));
        self.couplers
            .binary_search_by_key(&key, |&(x, y, _)| (x, y))
            .ok()
            .map(|i| self.couplers[i].2)
    }

    /// Entries in wire order: every node's diagonal entry (zeros included)
    /// in ascending node order, then couplers in ascending order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let diag = self
            .nodes
            .iter()
            .zip(&self.linear)
            .map(|(&u, &w)| (u, u, w));
        let off = self
            .couplers
            .iter()
            .map(|&(a, b, w)| (self.nodes[a], self.nodes[b], w));
        diag.chain(off)
    }

    pub fn max_abs(&self) -> f64 {
        self.linear
            .iter()
            .chain(self.couplers.iter().map(|c| &c.2))
            .fold(0.0, |m, w| m.max(w.abs()))
    }

    /// QUBO-form energy of `bits`, given in local node order.
    pub fn energy(&self, bits: &[u8]) -> f64 {
        debug_assert_eq!(bits.len(), self.nodes.len());
        let mut total = 0.0;
        for (w, &b) in self.linear.iter().zip(bits) {
            if b == 1 {
                total += w;
            }
        }
        for &(a, b, w) in &self.couplers {
            if bits[a] == 1 && bits[b] == 1 {
                total += w;
            }
        }
        total
    }

    /// Per-node adjacency lists `(neighbour, weight)` in local positions.
    pub(crate) fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b, w) in &self.couplers {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        adj
    }
}
