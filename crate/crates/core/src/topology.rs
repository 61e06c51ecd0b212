//! Index-based undirected graph view shared by the metric algorithms.

use std::collections::BTreeSet;

/// Read access to an undirected simple graph over vertices `0..node_count()`.
///
/// Neighbor slices must be sorted ascending, free of duplicates and self-loops,
/// and symmetric (`v` in `neighbors(u)` iff `u` in `neighbors(v)`).
pub trait Topology: Sync {
    fn node_count(&self) -> usize;
    fn neighbors(&self, v: usize) -> &[u32];

    fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    fn edge_count(&self) -> usize {
        (0..self.node_count())
            .map(|v| self.degree(v))
            .sum::<usize>()
            / 2
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }
}

/// Plain undirected graph used for generated networks and test fixtures.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UndirectedGraph {
    adj: Vec<Vec<u32>>,
}

impl UndirectedGraph {
    pub fn with_nodes(n: usize) -> Self {
        UndirectedGraph {
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list; self-loops and repeated edges are dropped.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut sets = vec![BTreeSet::new(); n];
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} nodes");
            if u != v {
                sets[u].insert(v as u32);
                sets[v].insert(u as u32);
            }
        }
        UndirectedGraph {
            adj: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    /// Edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, row) in self.adj.iter().enumerate() {
            out.extend(
                row.iter()
                    .map(|&v| v as usize)
                    .filter(|&v| v > u)
                    .map(|v| (u, v)),
            );
        }
        out
    }

    pub(crate) fn from_adjacency(adj: Vec<Vec<u32>>) -> Self {
        UndirectedGraph { adj }
    }
}

impl Topology for UndirectedGraph {
    fn node_count(&self) -> usize {
        self.adj.len()
    }

    fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }
}
