//! Logistic regression by iteratively reweighted least squares.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, Normal};

use super::StatsError;

const MAX_ITERATIONS: usize = 100;
const COEF_TOLERANCE: f64 = 1e-10;
// |beta| beyond this corresponds to odds ratios past e^30; in practice it
// only happens when a covariate separates the outcome perfectly.
const SEPARATION_BOUND: f64 = 30.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub log_likelihood: f64,
    /// Log-likelihood after each IRLS iteration; non-decreasing.
    pub ll_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl LogisticFit {
    pub fn wald_z(&self, j: usize) -> f64 {
        self.coefficients[j] / self.std_errors[j]
    }

    /// Two-sided Wald p-value for coefficient `j`.
    pub fn wald_p(&self, j: usize) -> f64 {
        let normal = Normal::new(0.0, 1.0).unwrap();
        2.0 * (1.0 - normal.cdf(self.wald_z(j).abs()))
    }
}

/// Maximum-likelihood logit fit. `design` is row-major, one row per
/// observation, including the intercept column if one is wanted.
///
/// Steps are halved whenever a full IRLS update would decrease the
/// log-likelihood, so the trace is monotone. Apparent perfect separation
/// (a coefficient running away) is reported instead of returned.
pub fn logistic_fit(outcome: &[bool], design: &[Vec<f64>]) -> Result<LogisticFit, StatsError> {
    let n = outcome.len();
    if n == 0 || design.len() != n {
        return Err(StatsError::LengthMismatch(format!(
            "{} outcomes vs {} design rows",
            n,
            design.len()
        )));
    }
    let p = design[0].len();
    if p == 0 || design.iter().any(|row| row.len() != p) {
        return Err(StatsError::LengthMismatch(
            "design rows must share one positive width".into(),
        ));
    }
    if outcome.iter().all(|&y| y) || outcome.iter().all(|&y| !y) {
        return Err(StatsError::SingleClassOutcome);
    }

    let x: Vec<f64> = design.iter().flatten().copied().collect(); // row-major
    let y: Vec<f64> = outcome.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();

    let mut beta = DVector::zeros(p);
    let mut ll = log_likelihood(&x, &y, &beta, p);
    let mut ll_trace = Vec::with_capacity(16);
    let mut converged = false;
    let mut iterations = 0;

    for iter in 1..=MAX_ITERATIONS {
        iterations = iter;
        let proposal = irls_step(&x, &y, &beta, n, p)?;

        // Step-halving: back off toward the current point until the
        // likelihood stops decreasing.
        let mut candidate = proposal;
        let mut candidate_ll = log_likelihood(&x, &y, &candidate, p);
        let mut halvings = 0;
        while candidate_ll < ll - 1e-12 && halvings < 40 {
            candidate = (&candidate + &beta) * 0.5;
            candidate_ll = log_likelihood(&x, &y, &candidate, p);
            halvings += 1;
        }

        let delta = (&candidate - &beta).amax();
        beta = candidate;
        ll = candidate_ll;
        ll_trace.push(ll);

        if let Some(runaway) = beta.iter().position(|b| b.abs() > SEPARATION_BOUND) {
            return Err(StatsError::PerfectSeparation { column: runaway });
        }
        if delta < COEF_TOLERANCE {
            converged = true;
            break;
        }
    }

    // A fit that never settles while classifying every observation
    // (essentially) perfectly is separation with coefficients still on
    // their way to infinity.
    if !converged && ll > -1e-4 {
        let runaway = beta
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.abs().total_cmp(&b.abs()))
            .map(|(j, _)| j)
            .unwrap_or(0);
        return Err(StatsError::PerfectSeparation { column: runaway });
    }

    let info = information_matrix(&x, &beta, n, p);
    let cov = info
        .clone()
        .try_inverse()
        .ok_or(StatsError::RankDeficient)?;
    let std_errors = (0..p).map(|j| cov[(j, j)].sqrt()).collect();

    Ok(LogisticFit {
        coefficients: beta.iter().copied().collect(),
        std_errors,
        log_likelihood: ll,
        ll_trace,
        iterations,
        converged,
    })
}

fn sigmoid(eta: f64) -> f64 {
    1.0 / (1.0 + (-eta).exp())
}

fn row_eta(x: &[f64], beta: &DVector<f64>, i: usize, p: usize) -> f64 {
    let row = &x[i * p..(i + 1) * p];
    row.iter().zip(beta.iter()).map(|(a, b)| a * b).sum()
}

fn log_likelihood(x: &[f64], y: &[f64], beta: &DVector<f64>, p: usize) -> f64 {
    let mut ll = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        let mu = sigmoid(row_eta(x, beta, i, p)).clamp(1e-12, 1.0 - 1e-12);
        ll += yi * mu.ln() + (1.0 - yi) * (1.0 - mu).ln();
    }
    ll
}

// One full IRLS update: solve (X'WX) beta = X'W z with z the working
// response. Weights are floored so observations at fitted 0/1 cannot
// poison the system.
fn irls_step(
    x: &[f64],
    y: &[f64],
    beta: &DVector<f64>,
    n: usize,
    p: usize,
) -> Result<DVector<f64>, StatsError> {
    let mut xtwx = DMatrix::zeros(p, p);
    let mut xtwz = DVector::zeros(p);
    for i in 0..n {
        let row = &x[i * p..(i + 1) * p];
        let eta = row.iter().zip(beta.iter()).map(|(a, b)| a * b).sum::<f64>();
        let mu = sigmoid(eta);
        let w = (mu * (1.0 - mu)).max(1e-10);
        let z = eta + (y[i] - mu) / w;
        for a in 0..p {
            let wa = w * row[a];
            xtwz[a] += wa * z;
            for b in a..p {
                xtwx[(a, b)] += wa * row[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            xtwx[(a, b)] = xtwx[(b, a)];
        }
    }
    xtwx.cholesky()
        .ok_or(StatsError::RankDeficient)
        .map(|chol| chol.solve(&xtwz))
}

fn information_matrix(x: &[f64], beta: &DVector<f64>, n: usize, p: usize) -> DMatrix<f64> {
    let mut info = DMatrix::zeros(p, p);
    for i in 0..n {
        let row = &x[i * p..(i + 1) * p];
        let mu = sigmoid(row.iter().zip(beta.iter()).map(|(a, b)| a * b).sum::<f64>());
        let w = mu * (1.0 - mu);
        for a in 0..p {
            for b in a..p {
                info[(a, b)] += w * row[a] * row[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            info[(a, b)] = info[(b, a)];
        }
    }
    info
}
