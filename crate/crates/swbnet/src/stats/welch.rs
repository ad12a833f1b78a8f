//! Unequal-variance t-test, the parametric companion to the permutation
//! test.

use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{mean, sample_variance, StatsError};

#[derive(Debug, Clone, PartialEq)]
pub struct WelchT {
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

/// Welch's t-statistic with Welch–Satterthwaite degrees of freedom and a
/// two-sided p-value.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<WelchT, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::Degenerate(format!(
            "welch_t needs at least 2 values per group, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (va, vb) = (sample_variance(a), sample_variance(b));
    if va <= 0.0 && vb <= 0.0 {
        return Err(StatsError::Degenerate(
            "welch_t needs positive variance in at least one group".into(),
        ));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let se2 = va / na + vb / nb;
    let t = (mean(a) - mean(b)) / se2.sqrt();
    let df = se2.powi(2) / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| StatsError::Degenerate(format!("t distribution: {e}")))?;
    let p = 2.0 * (1.0 - dist.cdf(t.abs()));
    Ok(WelchT { t, df, p })
}
