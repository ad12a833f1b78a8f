//! Mediation decomposition x -> z -> y with a nonparametric cluster
//! bootstrap for the indirect effect.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::StatsError;

#[derive(Debug, Clone, PartialEq)]
pub struct MediationResult {
    pub total_effect: f64,
    pub direct_effect: f64,
    pub indirect_effect: f64,
    /// indirect / total; see `unstable_total`.
    pub proportion_mediated: f64,
    /// Percentile bootstrap interval (2.5%, 97.5%) for the indirect effect.
    pub ci: (f64, f64),
    /// Two-sided bootstrap sign p-value for the indirect effect.
    pub p_value: f64,
    /// Set when |total| < 1e-6, where the proportion is unreliable.
    pub unstable_total: bool,
    pub clusters: usize,
    pub bootstrap: usize,
}

/// Fits `z = a x + const` and `y = c' x + b z + const` by OLS; the indirect
/// effect is `a * b`, the total effect comes from `y = c x + const`, and
/// `total = direct + indirect` holds exactly on the same sample.
pub fn mediate<R: Rng>(
    x: &[f64],
    z: &[f64],
    y: &[f64],
    bootstrap: usize,
    rng: &mut R,
) -> Result<MediationResult, StatsError> {
    let n = x.len();
    if z.len() != n || y.len() != n {
        return Err(StatsError::LengthMismatch(format!(
            "x: {n}, z: {}, y: {}",
            z.len(),
            y.len()
        )));
    }
    if n < 10 {
        return Err(StatsError::TooFewClusters {
            label: "mediation".into(),
            need: 10,
            got: n,
        });
    }
    if bootstrap < 1_000 {
        return Err(StatsError::TooFewIterations {
            what: "bootstrap draws",
            need: 1_000,
            got: bootstrap,
        });
    }
    if constant(x) {
        return Err(StatsError::Degenerate(
            "condition x has zero variance".into(),
        ));
    }

    let full: Vec<usize> = (0..n).collect();
    let (a, b, direct, total) = fit_paths(x, z, y, &full)?;
    let indirect = a * b;

    let mut draws = Vec::with_capacity(bootstrap);
    let mut idx = vec![0usize; n];
    for _ in 0..bootstrap {
        // Redraw on the rare resample that has no variation in x.
        let (ra, rb) = loop {
            for slot in idx.iter_mut() {
                *slot = rng.random_range(0..n);
            }
            if idx.iter().any(|&i| x[i] != x[idx[0]]) {
                match fit_paths(x, z, y, &idx) {
                    Ok((ra, rb, _, _)) => break (ra, rb),
                    Err(_) => continue, // collinear resample
                }
            }
        };
        draws.push(ra * rb);
    }
    draws.sort_by(|p, q| p.partial_cmp(q).unwrap());

    let ci = (percentile(&draws, 0.025), percentile(&draws, 0.975));
    let below = draws.iter().filter(|&&d| d <= 0.0).count();
    let above = draws.iter().filter(|&&d| d >= 0.0).count();
    let p_value = (2.0 * (1 + below.min(above)) as f64 / (1 + bootstrap) as f64).min(1.0);

    let unstable_total = total.abs() < 1e-6;
    Ok(MediationResult {
        total_effect: total,
        direct_effect: direct,
        indirect_effect: indirect,
        proportion_mediated: indirect / total,
        ci,
        p_value,
        unstable_total,
        clusters: n,
        bootstrap,
    })
}

fn constant(xs: &[f64]) -> bool {
    xs.iter().all(|&v| v == xs[0])
}

// Returns (a, b, c_prime, c) for the cluster subset `idx`.
fn fit_paths(
    x: &[f64],
    z: &[f64],
    y: &[f64],
    idx: &[usize],
) -> Result<(f64, f64, f64, f64), StatsError> {
    let xs: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
    let zs: Vec<f64> = idx.iter().map(|&i| z[i]).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();

    let a = ols(&[&xs], &zs)?[1];
    let coeffs = ols(&[&xs, &zs], &ys)?;
    let (c_prime, b) = (coeffs[1], coeffs[2]);
    let c = ols(&[&xs], &ys)?[1];
    Ok((a, b, c_prime, c))
}

// OLS with an implicit leading intercept column. Returns
// [intercept, coef_1, ...].
fn ols(columns: &[&[f64]], y: &[f64]) -> Result<Vec<f64>, StatsError> {
    let n = y.len();
    let p = columns.len() + 1;
    let mut xtx = DMatrix::zeros(p, p);
    let mut xty = DVector::zeros(p);
    let mut row = vec![0.0f64; p];
    for i in 0..n {
        row[0] = 1.0;
        for (j, col) in columns.iter().enumerate() {
            row[j + 1] = col[i];
        }
        for a in 0..p {
            xty[a] += row[a] * y[i];
            for b in a..p {
                xtx[(a, b)] += row[a] * row[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            xtx[(a, b)] = xtx[(b, a)];
        }
    }
    // Cholesky can numerically "succeed" on an exactly singular Gram
    // matrix, so collinearity is checked explicitly.
    if xtx.rank(1e-10 * xtx.amax()) < p {
        return Err(StatsError::RankDeficient);
    }
    let beta = xtx.cholesky().ok_or(StatsError::RankDeficient)?.solve(&xty);
    Ok(beta.iter().copied().collect())
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    // Linear interpolation between order statistics (type 7).
    let h = q * (sorted.len() as f64 - 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}
