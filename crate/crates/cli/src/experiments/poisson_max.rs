use poisdiff::measures::{poisson_max_bound, poisson_max_bound_exp_form, poisson_max_bound_loglog};
use rand_distr::{Distribution, Poisson};

use super::{context, replicate, stream, summarize, ExperimentResult, REPLICATIONS};
use crate::config::ValidConfig;
use crate::output::{fmt_f64, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonMaxRow {
    pub n: u64,
    pub nu: f64,
    pub replications: usize,
    pub mean_max: f64,
    pub std_err: f64,
    /// `None` where `(n, ν)` lies outside the bound's domain.
    pub bound: Option<f64>,
    pub bound_exp_form: Option<f64>,
    /// Whether `n >= exp(e^{ν+1} + ν)`, where the log-log form applies.
    pub loglog_applies: bool,
    pub loglog_bound: Option<f64>,
    /// Mean maximum above the bound by more than 3 standard errors.
    pub violation: bool,
    pub loglog_violation: bool,
}

impl PoissonMaxRow {
    /// `|bound - bound_exp_form|` relative to `max(1, bound)`.
    pub fn form_gap(&self) -> Option<f64> {
        Some((self.bound? - self.bound_exp_form?).abs() / self.bound?.max(1.0))
    }
}

#[derive(Debug, Clone)]
pub struct PoissonMaxOutcome {
    pub rows: Vec<PoissonMaxRow>,
}

impl PoissonMaxOutcome {
    pub fn table(&self) -> Table {
        let opt = |v: Option<f64>| v.map_or(String::new(), fmt_f64);
        let mut t = Table::new(&[
            "n",
            "nu",
            "replications",
            "mean_max",
            "std_err",
            "bound",
            "bound_exp_form",
            "form_gap",
            "loglog_applies",
            "loglog_bound",
            "violation",
            "loglog_violation",
        ]);
        for r in &self.rows {
            t.push(vec![
                r.n.to_string(),
                fmt_f64(r.nu),
                r.replications.to_string(),
                fmt_f64(r.mean_max),
                fmt_f64(r.std_err),
                opt(r.bound),
                opt(r.bound_exp_form),
                opt(r.form_gap()),
                r.loglog_applies.to_string(),
                opt(r.loglog_bound),
                r.violation.to_string(),
                r.loglog_violation.to_string(),
            ]);
        }
        t
    }

    pub fn violations(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.violation || r.loglog_violation)
            .count()
    }
}

/// Monte Carlo `E max_{i <= n} X_i` for iid Poisson(ν) against the
/// Lambert-W bound and its log-log simplification.
pub(crate) fn poisson_max(cfg: &ValidConfig) -> ExperimentResult<PoissonMaxOutcome> {
    let mut rows = Vec::new();
    for (j, &nu) in cfg.config.nu.iter().enumerate() {
        let law = Poisson::new(nu).map_err(|e| super::ExperimentError {
            context: format!("poisson-max-bound, nu = {nu}"),
            source: poisdiff::Error::Parameter(e.to_string()),
        })?;
        for &n in &cfg.config.n {
            let base = stream(cfg, REPLICATIONS).derive(j as u64).derive(n);
            let maxima = replicate(cfg.config.replications, |r| {
                let mut rng = base.derive(r).rng();
                Ok((0..n).map(|_| law.sample(&mut rng)).fold(0.0, f64::max))
            });
            let maxima = context(maxima, || format!("poisson-max-bound, n = {n}, nu = {nu}"))?;
            let (mean_max, std_err) = summarize(&maxima);
            let slack = if std_err.is_finite() {
                3.0 * std_err
            } else {
                0.0
            };
            let bound = poisson_max_bound(n, nu).ok();
            let bound_exp_form = poisson_max_bound_exp_form(n, nu).ok();
            let loglog_applies = (n as f64).ln() >= (nu + 1.0).exp() + nu;
            let loglog_bound = if loglog_applies {
                poisson_max_bound_loglog(n, nu).ok()
            } else {
                None
            };
            rows.push(PoissonMaxRow {
                n,
                nu,
                replications: maxima.len(),
                mean_max,
                std_err,
                bound,
                bound_exp_form,
                loglog_applies,
                loglog_bound,
                violation: bound.is_some_and(|b| mean_max > b + slack),
                loglog_violation: loglog_bound.is_some_and(|b| mean_max > b + slack),
            });
        }
    }
    Ok(PoissonMaxOutcome { rows })
}
