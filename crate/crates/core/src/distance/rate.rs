use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::RngStream;
use crate::stats;

/// Replicated statistic at one scale `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSample {
    pub n: f64,
    pub values: Vec<f64>,
}

/// Least-squares fit of `log mean = intercept + slope * log n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Bootstrap 90% interval for the slope (5th and 95th percentiles),
    /// widened to contain the point estimate.
    pub ci_low: f64,
    pub ci_high: f64,
    /// `(log n, log mean)` pairs.
    pub points: Vec<(f64, f64)>,
}

fn ols(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    // a flat or perfectly fitted sequence has nothing left to explain
    let r2 = if syy <= 1e-300 { 1.0 } else { 1.0 - sse / syy };
    (slope, intercept, r2)
}

fn log_points(means: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    let mut ns: Vec<f64> = means.iter().map(|p| p.0).collect();
    ns.sort_by(f64::total_cmp);
    ns.dedup();
    if ns.len() < 4 {
        return Err(Error::Parameter(format!(
            "rate fit needs at least 4 distinct n values, got {}",
            ns.len()
        )));
    }
    means
        .iter()
        .map(|&(n, m)| {
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::LogDomain(format!("scale n = {n} is not positive")));
            }
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::LogDomain(format!(
                    "mean statistic {m} at n = {n} is not positive"
                )));
            }
            Ok((n.ln(), m.ln()))
        })
        .collect()
}

/// Fit on exact `(n, mean)` pairs; the interval collapses to the slope.
pub fn fit_means(means: &[(f64, f64)]) -> Result<RateFit> {
    let points = log_points(means)?;
    let (slope, intercept, r2) = ols(&points);
    Ok(RateFit {
        slope,
        intercept,
        r2,
        ci_low: slope,
        ci_high: slope,
        points,
    })
}

/// Fit on replicated data with a bootstrap over replications.
pub fn fit_rate(samples: &[RateSample], bootstrap: usize, stream: RngStream) -> Result<RateFit> {
    if samples.iter().any(|s| s.values.is_empty()) {
        return Err(Error::Parameter(
            "every scale needs at least one replication".into(),
        ));
    }
    let means: Vec<(f64, f64)> = samples
        .iter()
        .map(|s| (s.n, stats::mean(&s.values)))
        .collect();
    let mut fit = fit_means(&means)?;
    if bootstrap == 0 {
        return Ok(fit);
    }
    let mut rng = stream.rng();
    let mut slopes = Vec::with_capacity(bootstrap);
    let mut pts = vec![(0.0, 0.0); samples.len()];
    for _ in 0..bootstrap {
        let mut ok = true;
        for (p, s) in pts.iter_mut().zip(samples) {
            let k = s.values.len();
            let m = (0..k)
                .map(|_| s.values[rng.random_range(0..k)])
                .sum::<f64>()
                / k as f64;
            if m <= 0.0 {
                ok = false;
            }
            *p = (s.n.ln(), m.ln());
        }
        if ok {
            slopes.push(ols(&pts).0);
        }
    }
    if !slopes.is_empty() {
        slopes.sort_by(f64::total_cmp);
        fit.ci_low = stats::quantile(&slopes, 0.05).min(fit.slope);
        fit.ci_high = stats::quantile(&slopes, 0.95).max(fit.slope);
    }
    Ok(fit)
}
