//! Network statistics computed per round and per network.
//!
//! All operations are pure; Louvain additionally takes its own generator
//! stream so that community counts are reproducible.

mod centrality;
mod louvain;

pub use centrality::{eigenvector_centrality, CentralityVector};
pub use louvain::{louvain, modularity, Partition};

use thiserror::Error;

use crate::engine::Action;
use crate::graph::Network;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("gini is undefined for an empty sequence")]
    EmptyInput,
    #[error("gini requires non-negative values, got {0}")]
    NegativeInput(f64),
    #[error("gini is undefined when all values are zero")]
    AllZeroInput,
    #[error("modularity is undefined for a graph with no edges")]
    EmptyGraph,
    #[error("triangle fraction needs at least 3 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("got {got} actions for a network of {expected} players")]
    ActionLengthMismatch { expected: usize, got: usize },
}

/// Global clustering coefficient: 3 x triangles / connected triples.
///
/// A graph with no connected triples has no closed or open cases to
/// count, and reports 0 so that aggregation over rounds stays total.
pub fn transitivity(g: &Network) -> f64 {
    let mut closed = 0usize; // counts each triangle once per edge, i.e. 3T
    for (u, v) in g.edges() {
        closed += g
            .neighbors(u)
            .unwrap()
            .intersection(g.neighbors(v).unwrap())
            .count();
    }
    let triples: usize = (0..g.node_count())
        .map(|u| {
            let d = g.degree(u).unwrap();
            d * (d.saturating_sub(1)) / 2
        })
        .sum();
    if triples == 0 {
        0.0
    } else {
        closed as f64 / triples as f64
    }
}

/// Gini coefficient of a non-negative sequence, in [0, 1).
///
/// Computed via the sorted-rank identity
/// `G = 2 * sum_i (i+1) x_(i) / (n * sum x) - (n + 1) / n`,
/// which equals the mean absolute pairwise difference normalized by twice
/// the mean.
pub fn gini(values: &[f64]) -> Result<f64, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    if let Some(&bad) = values.iter().find(|v| **v < 0.0 || !v.is_finite()) {
        return Err(MetricsError::NegativeInput(bad));
    }
    let total: f64 = values.iter().sum();
    if total == 0.0 {
        return Err(MetricsError::AllZeroInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, x)| (i as f64 + 1.0) * x)
        .sum();
    Ok(2.0 * weighted / (n * total) - (n + 1.0) / n)
}

/// Fraction of all C(n,3) triads that are closed triangles whose three
/// members all cooperated this round.
pub fn cooperator_triangle_fraction(g: &Network, actions: &[Action]) -> Result<f64, MetricsError> {
    let n = g.node_count();
    if n < 3 {
        return Err(MetricsError::TooFewNodes(n));
    }
    if actions.len() != n {
        return Err(MetricsError::ActionLengthMismatch {
            expected: n,
            got: actions.len(),
        });
    }
    let mut count = 0usize;
    for (u, v) in g.edges() {
        if actions[u] != Action::Cooperate || actions[v] != Action::Cooperate {
            continue;
        }
        count += g
            .neighbors(u)
            .unwrap()
            .intersection(g.neighbors(v).unwrap())
            .filter(|&&w| w > v && actions[w] == Action::Cooperate)
            .count();
    }
    let triads = n * (n - 1) * (n - 2) / 6;
    Ok(count as f64 / triads as f64)
}

/// Mean centrality score of cooperators and of defectors. A group with no
/// members reports `None`.
pub fn mean_centrality_by_action(
    cv: &CentralityVector,
    actions: &[Action],
) -> (Option<f64>, Option<f64>) {
    let mut sums = [0.0f64; 2];
    let mut counts = [0usize; 2];
    for (score, action) in cv.scores().iter().zip(actions) {
        let k = match action {
            Action::Cooperate => 0,
            Action::Defect => 1,
        };
        sums[k] += score;
        counts[k] += 1;
    }
    let mean = |k: usize| {
        if counts[k] > 0 {
            Some(sums[k] / counts[k] as f64)
        } else {
            None
        }
    };
    (mean(0), mean(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Network;
    use Action::{Cooperate as C, Defect as D};

    #[test]
    fn transitivity_basics() {
        let triangle = Network::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(transitivity(&triangle), 1.0);

        let path = Network::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(transitivity(&path), 0.0);

        // K4 minus one edge: 2 triangles; degrees (3,3,2,2) give
        // 3+3+1+1 = 8 connected triples, so 6/8.
        let diamond = Network::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        assert!((transitivity(&diamond) - 0.75).abs() < 1e-12);

        assert_eq!(transitivity(&Network::empty(4)), 0.0);
    }

    #[test]
    fn gini_known_values() {
        assert_eq!(gini(&[5.0, 5.0, 5.0]).unwrap(), 0.0);

        let mut mixed = vec![1150.0; 3];
        mixed.extend(vec![200.0; 7]);
        let g = gini(&mixed).unwrap();
        assert!((g - 0.4113402061855669).abs() < 1e-12, "got {g}");

        // One holder of everything approaches (n-1)/n.
        let mut concentrated = vec![0.0; 99];
        concentrated.push(1.0);
        assert!((gini(&concentrated).unwrap() - 0.99).abs() < 1e-12);
    }

    #[test]
    fn gini_rejects_degenerate_input() {
        assert_eq!(gini(&[]), Err(MetricsError::EmptyInput));
        assert_eq!(gini(&[0.0, 0.0]), Err(MetricsError::AllZeroInput));
        assert_eq!(gini(&[1.0, -2.0]), Err(MetricsError::NegativeInput(-2.0)));
    }

    #[test]
    fn cooperator_triangles() {
        let k4 = Network::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(
            cooperator_triangle_fraction(&k4, &[C, C, C, C]).unwrap(),
            1.0
        );
        assert_eq!(
            cooperator_triangle_fraction(&k4, &[D, D, D, D]).unwrap(),
            0.0
        );

        let tri = Network::from_edges(4, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(
            cooperator_triangle_fraction(&tri, &[C, C, C, D]).unwrap(),
            0.25
        );

        assert!(cooperator_triangle_fraction(&Network::empty(2), &[C, C]).is_err());
    }

    #[test]
    fn centrality_means_by_action() {
        let star = Network::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let cv = eigenvector_centrality(&star);
        let (coop, def) = mean_centrality_by_action(&cv, &[C, D, D, D]);
        assert!((coop.unwrap() - 1.0).abs() < 1e-9);
        assert!((def.unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-9);

        let (none_coop, all) = mean_centrality_by_action(&cv, &[D, D, D, D]);
        assert!(none_coop.is_none());
        let overall = cv.scores().iter().sum::<f64>() / 4.0;
        assert!((all.unwrap() - overall).abs() < 1e-12);
    }
}
