//! Undirected simple graph over dense player indices with a dynamic edge
//! set.
//!
//! Rewiring samples every unordered pair each round, so the representation
//! favors O(1) amortized edge queries and O(degree) neighbor iteration.
//! Neighbor sets are ordered so that iteration order, and therefore every
//! downstream draw, is deterministic.

use std::collections::BTreeSet;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("network needs at least 2 players, got {0}")]
    TooFewNodes(usize),
    #[error("density {0} is outside [0, 1]")]
    DensityOutOfRange(f64),
    #[error("node {node} out of range for a network of {n} players")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop at node {0} is not allowed")]
    SelfLoop(usize),
}

/// Undirected simple graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    adj: Vec<BTreeSet<usize>>,
    edge_count: usize,
}

impl Network {
    /// A graph on `n` nodes with no edges.
    pub fn empty(n: usize) -> Network {
        Network {
            adj: vec![BTreeSet::new(); n],
            edge_count: 0,
        }
    }

    /// Erdős–Rényi draw: each of the C(n,2) unordered pairs becomes an
    /// edge independently with probability `density`.
    pub fn random<R: Rng>(n: usize, density: f64, rng: &mut R) -> Result<Network, GraphError> {
        if n < 2 {
            return Err(GraphError::TooFewNodes(n));
        }
        if !(0.0..=1.0).contains(&density) {
            return Err(GraphError::DensityOutOfRange(density));
        }
        let mut g = Network::empty(n);
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.random_bool(density) {
                    g.insert(u, v);
                }
            }
        }
        Ok(g)
    }

    /// Rebuilds a graph from an explicit edge list.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Network, GraphError> {
        let mut g = Network::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].contains(&v)
    }

    /// Adds the edge `(u, v)`. Re-adding an existing edge is a no-op, so
    /// "keep existing tie" decisions can re-assert edges. Returns whether
    /// the edge was newly inserted.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool, GraphError> {
        self.check_pair(u, v)?;
        Ok(self.insert(u, v))
    }

    /// Removes the edge `(u, v)`; removing a missing edge is a no-op.
    /// Returns whether an edge was actually removed.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> Result<bool, GraphError> {
        self.check_pair(u, v)?;
        if self.adj[u].remove(&v) {
            self.adj[v].remove(&u);
            self.edge_count -= 1;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    pub fn neighbors(&self, u: usize) -> Result<&BTreeSet<usize>, GraphError> {
        self.check_node(u)?;
        Ok(&self.adj[u])
    }

    pub fn degree(&self, u: usize) -> Result<usize, GraphError> {
        self.check_node(u)?;
        Ok(self.adj[u].len())
    }

    /// All edges as `(u, v)` pairs with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.range((u + 1)..).map(move |&v| (u, v)))
    }

    /// Immutable copy of the edge set, labeled with the round it was
    /// captured in.
    pub fn snapshot(&self, round: u32) -> EdgeSnapshot {
        EdgeSnapshot {
            round,
            n: self.node_count(),
            edges: self.edges().collect(),
        }
    }

    fn insert(&mut self, u: usize, v: usize) -> bool {
        if self.adj[u].insert(v) {
            self.adj[v].insert(u);
            self.edge_count += 1;
            true
        } else {
            false
        }
    }

    fn check_node(&self, u: usize) -> Result<(), GraphError> {
        if u < self.adj.len() {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange {
                node: u,
                n: self.adj.len(),
            })
        }
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        Ok(())
    }
}

/// Frozen edge set of one round, used for per-round trajectories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSnapshot {
    pub round: u32,
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl EdgeSnapshot {
    pub fn to_network(&self) -> Result<Network, GraphError> {
        Network::from_edges(self.n, &self.edges)
    }
}
