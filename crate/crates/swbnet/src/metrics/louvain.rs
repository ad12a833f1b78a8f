//! Louvain community detection and Newman modularity.

use rand::seq::SliceRandom;
use rand::Rng;

use super::MetricsError;
use crate::graph::Network;

/// Assignment of every node to exactly one community, with dense ids
/// `0..count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    count: usize,
}

impl Partition {
    /// Relabels an arbitrary assignment into dense ids ordered by first
    /// appearance.
    pub fn from_assignment(raw: &[usize]) -> Partition {
        let mut map: Vec<Option<usize>> =
            vec![None; raw.len().max(raw.iter().max().map_or(0, |m| m + 1))];
        let mut next = 0usize;
        let assignment = raw
            .iter()
            .map(|&c| {
                *map[c].get_or_insert_with(|| {
                    let id = next;
                    next += 1;
                    id
                })
            })
            .collect();
        Partition {
            assignment,
            count: next,
        }
    }

    pub fn singletons(n: usize) -> Partition {
        Partition {
            assignment: (0..n).collect(),
            count: n,
        }
    }

    pub fn community_of(&self, u: usize) -> usize {
        self.assignment[u]
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }
}

/// Newman modularity Q = sum_c [ e_c / m - (d_c / 2m)^2 ] at resolution 1.
pub fn modularity(g: &Network, p: &Partition) -> Result<f64, MetricsError> {
    let m = g.edge_count();
    if m == 0 {
        return Err(MetricsError::EmptyGraph);
    }
    let k = p.count();
    let mut internal = vec![0.0f64; k];
    let mut degree_sum = vec![0.0f64; k];
    for (u, v) in g.edges() {
        if p.community_of(u) == p.community_of(v) {
            internal[p.community_of(u)] += 1.0;
        }
    }
    for u in 0..g.node_count() {
        degree_sum[p.community_of(u)] += g.degree(u).unwrap() as f64;
    }
    let m = m as f64;
    let q = (0..k)
        .map(|c| internal[c] / m - (degree_sum[c] / (2.0 * m)).powi(2))
        .sum();
    Ok(q)
}

// A coarsened graph: parallel edges merged into weights, intra-community
// edges folded into self-loops. A self-loop of weight w contributes 2w to
// its node's strength.
struct LevelGraph {
    adj: Vec<Vec<(usize, f64)>>,
    self_loop: Vec<f64>,
}

impl LevelGraph {
    fn from_network(g: &Network) -> LevelGraph {
        let n = g.node_count();
        let mut adj = vec![Vec::new(); n];
        for (u, v) in g.edges() {
            adj[u].push((v, 1.0));
            adj[v].push((u, 1.0));
        }
        LevelGraph {
            adj,
            self_loop: vec![0.0; n],
        }
    }

    fn node_count(&self) -> usize {
        self.adj.len()
    }

    fn strengths(&self) -> Vec<f64> {
        (0..self.node_count())
            .map(|u| self.adj[u].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * self.self_loop[u])
            .collect()
    }

    fn total_weight(&self) -> f64 {
        let between: f64 = self
            .adj
            .iter()
            .flat_map(|nbrs| nbrs.iter().map(|&(_, w)| w))
            .sum();
        between / 2.0 + self.self_loop.iter().sum::<f64>()
    }
}

/// Greedy modularity optimization: seeded-order local moves to a fixed
/// point, then graph aggregation, repeated until no move improves
/// modularity. Resolution is fixed at 1.
///
/// The node-visit order is a seeded shuffle per pass, so the result is a
/// deterministic function of the graph and the generator state. The
/// returned partition never scores below the singleton partition.
pub fn louvain<R: Rng>(g: &Network, rng: &mut R) -> Partition {
    let n = g.node_count();
    if g.edge_count() == 0 {
        return Partition::singletons(n);
    }

    let mut level = LevelGraph::from_network(g);
    // node u of the original graph lives in level-node membership[u]
    let mut membership: Vec<usize> = (0..n).collect();

    loop {
        let before = level.node_count();
        let (local, moved) = local_moves(&level, rng);
        if !moved {
            break;
        }
        let dense = Partition::from_assignment(&local);
        for slot in membership.iter_mut() {
            *slot = dense.community_of(*slot);
        }
        if dense.count() == before {
            break; // no coarsening happened; a fixed point was reached
        }
        level = aggregate(&level, &dense);
        if level.node_count() <= 1 {
            break;
        }
    }

    Partition::from_assignment(&membership)
}

// One level of local moves. Returns the community of each level-node and
// whether any node moved.
fn local_moves<R: Rng>(level: &LevelGraph, rng: &mut R) -> (Vec<usize>, bool) {
    let n = level.node_count();
    let strengths = level.strengths();
    let m = level.total_weight();
    let mut community: Vec<usize> = (0..n).collect();
    let mut community_strength = strengths.clone();

    let mut order: Vec<usize> = (0..n).collect();
    let mut weight_to: Vec<f64> = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut any_moved = false;

    // Strictly improving moves terminate on their own; the cap only guards
    // against floating-point pathologies.
    for _pass in 0..200 {
        let mut moves = 0usize;
        order.shuffle(rng);
        for &u in &order {
            let current = community[u];
            let k_u = strengths[u];

            for &(v, w) in &level.adj[u] {
                let c = community[v];
                if weight_to[c] == 0.0 {
                    touched.push(c);
                }
                weight_to[c] += w;
            }

            community_strength[current] -= k_u;
            // Gain of staying in the current community, relative to
            // standing alone; weight_to[current] is 0 when no neighbor is
            // in it.
            let mut best = current;
            let mut best_gain = weight_to[current] - k_u * community_strength[current] / (2.0 * m);
            for &c in &touched {
                if c == current {
                    continue;
                }
                let gain = weight_to[c] - k_u * community_strength[c] / (2.0 * m);
                if gain > best_gain + 1e-12 {
                    best_gain = gain;
                    best = c;
                }
            }
            community_strength[best] += k_u;
            if best != current {
                community[u] = best;
                moves += 1;
                any_moved = true;
            }

            for &c in &touched {
                weight_to[c] = 0.0;
            }
            touched.clear();
        }
        if moves == 0 {
            break;
        }
    }

    (community, any_moved)
}

fn aggregate(level: &LevelGraph, partition: &Partition) -> LevelGraph {
    let k = partition.count();
    let mut self_loop = vec![0.0f64; k];
    let mut between: std::collections::BTreeMap<(usize, usize), f64> =
        std::collections::BTreeMap::new();

    for u in 0..level.node_count() {
        let cu = partition.community_of(u);
        self_loop[cu] += level.self_loop[u];
        for &(v, w) in &level.adj[u] {
            if v < u {
                continue; // count each undirected pair once
            }
            let cv = partition.community_of(v);
            if cu == cv {
                self_loop[cu] += w;
            } else {
                let key = (cu.min(cv), cu.max(cv));
                *between.entry(key).or_insert(0.0) += w;
            }
        }
    }

    let mut adj = vec![Vec::new(); k];
    for (&(a, b), &w) in &between {
        adj[a].push((b, w));
        adj[b].push((a, w));
    }
    LevelGraph { adj, self_loop }
}
