//! Eigenvector centrality by power iteration.

use crate::graph::Network;

/// Per-node centrality scores, max-normalized so the largest component of
/// any graph with at least one edge is exactly 1. Isolated nodes and nodes
/// in components that do not carry the principal eigenvalue score ~0.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector {
    scores: Vec<f64>,
}

impl CentralityVector {
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

impl std::ops::Index<usize> for CentralityVector {
    type Output = f64;
    fn index(&self, u: usize) -> &f64 {
        &self.scores[u]
    }
}

const MAX_ITERATIONS: usize = 10_000;
// Tighter than the documented 1e-10 stopping rule: the residual error of
// power iteration is roughly diff * r/(1-r), so a small spectral gap needs
// extra successive-iterate precision to stay within 1e-9 of the limit.
const TOLERANCE: f64 = 1e-13;
// Anything this far below the maximum is numerically zero: it belongs to a
// component that does not carry the principal eigenvalue.
const ZERO_FLOOR: f64 = 1e-12;

/// Principal eigenvector of the adjacency matrix, computed on the whole
/// (possibly disconnected) graph and max-normalized.
///
/// Power iteration runs on A + I, which has the same eigenvectors as A but
/// cannot oscillate on bipartite components. The start vector is all ones,
/// so on graphs whose principal eigenvalue is shared by several components
/// the result is the normalized projection of the uniform vector onto the
/// principal eigenspace. A graph with no edges yields the all-zero vector.
pub fn eigenvector_centrality(g: &Network) -> CentralityVector {
    let n = g.node_count();
    if g.edge_count() == 0 {
        return CentralityVector {
            scores: vec![0.0; n],
        };
    }

    let mut x = vec![1.0f64; n];
    let mut next = vec![0.0f64; n];
    for _ in 0..MAX_ITERATIONS {
        for u in 0..n {
            let mut acc = x[u]; // the +I shift
            for &v in g.neighbors(u).unwrap() {
                acc += x[v];
            }
            next[u] = acc;
        }
        let max = next.iter().cloned().fold(0.0f64, f64::max);
        let mut diff = 0.0f64;
        for u in 0..n {
            next[u] /= max;
            diff = diff.max((next[u] - x[u]).abs());
        }
        std::mem::swap(&mut x, &mut next);
        if diff < TOLERANCE {
            break;
        }
    }

    for s in &mut x {
        if *s < ZERO_FLOOR {
            *s = 0.0;
        }
    }
    CentralityVector { scores: x }
}
