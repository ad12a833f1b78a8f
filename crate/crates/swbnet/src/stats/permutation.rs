//! Two-sample permutation test on cluster-level aggregates.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{mean, ClusteredSample, StatsError};

/// Two-sided p-value for the difference in condition means under random
/// relabeling of cluster condition labels.
///
/// Uses the add-one estimator `p = (1 + #{|T_perm| >= |T_obs|}) / (1 + k)`,
/// which can never report zero.
pub fn permutation_test<R: Rng>(
    a: &ClusteredSample,
    b: &ClusteredSample,
    iterations: usize,
    rng: &mut R,
) -> Result<f64, StatsError> {
    for sample in [a, b] {
        if sample.len() < 2 {
            return Err(StatsError::TooFewClusters {
                label: sample.label.clone(),
                need: 2,
                got: sample.len(),
            });
        }
    }
    if iterations < 1_000 {
        return Err(StatsError::TooFewIterations {
            what: "permutation iterations",
            need: 1_000,
            got: iterations,
        });
    }

    let t_obs = (a.mean() - b.mean()).abs();
    let na = a.len();
    let mut pool: Vec<f64> = a.values.iter().chain(&b.values).copied().collect();

    // Permutations reproducing the observed split tie the statistic up to
    // rounding; the relative margin counts them as extreme (the
    // conservative convention) regardless of representation noise.
    let threshold = t_obs - 1e-9 * t_obs.abs();
    let mut extreme = 0usize;
    for _ in 0..iterations {
        pool.shuffle(rng);
        let t = (mean(&pool[..na]) - mean(&pool[na..])).abs();
        if t >= threshold {
            extreme += 1;
        }
    }
    Ok((1 + extreme) as f64 / (1 + iterations) as f64)
}
