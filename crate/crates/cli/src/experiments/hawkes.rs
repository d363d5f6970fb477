use poisdiff::hawkes::{
    representation_residual, HawkesLimitDiagnostics, HawkesMarginalPlan, HawkesRun, MIN_RUNS,
};

use super::{context, replicate, stream, summarize, ExperimentResult, REFERENCE, REPLICATIONS};
use crate::catalog::Model;
use crate::config::ValidConfig;
use crate::output::{fmt_f64, Plot, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct HawkesRow {
    pub n: u64,
    pub replications: usize,
    /// `n E sup_{v <= T} |Ñ(v) - ρ v|^2`.
    pub lln_stat: f64,
    pub lln_se: f64,
    /// Mean representation residual at `grid` and `2 grid` cells.
    pub residual: f64,
    pub residual_double: f64,
    pub residual_runs: usize,
}

#[derive(Debug, Clone)]
pub struct HawkesOutcome {
    pub grid: usize,
    pub rows: Vec<HawkesRow>,
    /// Marginal diagnostics for every `n` with at least `MIN_RUNS` runs.
    pub diagnostics: Vec<HawkesLimitDiagnostics>,
}

impl HawkesOutcome {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&[
            "n",
            "replications",
            "lln_stat",
            "lln_se",
            "residual_runs",
            "residual_grid",
            "residual_double_grid",
            "ks_w_bar_p_value",
            "x_var",
            "x_var_se",
            "matching_variance",
        ]);
        for r in &self.rows {
            let d = self.diagnostics.iter().find(|d| d.n == r.n as f64);
            t.push(vec![
                r.n.to_string(),
                r.replications.to_string(),
                fmt_f64(r.lln_stat),
                fmt_f64(r.lln_se),
                r.residual_runs.to_string(),
                fmt_f64(r.residual),
                fmt_f64(r.residual_double),
                d.map_or(String::new(), |d| fmt_f64(d.ks_w_bar_final.p_value)),
                d.map_or(String::new(), |d| fmt_f64(d.x_var)),
                d.map_or(String::new(), |d| fmt_f64(d.x_var_se)),
                d.and_then(|d| d.matching.clone()).unwrap_or_default(),
            ]);
        }
        t
    }

    pub fn plot(&self) -> Plot {
        Plot {
            title: "hawkes: n E sup |N_n - rho v|^2".into(),
            x_label: "n".into(),
            y_label: "scaled squared deviation".into(),
            points: self.rows.iter().map(|r| (r.n as f64, r.lln_stat)).collect(),
            fit: None,
        }
    }
}

struct Replicate {
    lln: f64,
    obs: poisdiff::hawkes::HawkesObservation,
    residuals: Option<(f64, f64)>,
}

/// Law of large numbers, representation residual and limit marginals of
/// the time-rescaled Hawkes process.
pub(crate) fn hawkes_limit(cfg: &ValidConfig) -> ExperimentResult<HawkesOutcome> {
    let model = match &cfg.model {
        Some(Model::Hawkes(m)) => m.clone(),
        _ => unreachable!("validated config carries the hawkes model"),
    };
    let (horizon, grid) = (cfg.config.horizon, cfg.config.grid);
    let residual_runs = cfg.config.residual_runs.min(cfg.config.replications);
    let mut rows = Vec::new();
    let mut diagnostics = Vec::new();
    for &n in &cfg.config.n {
        let nf = n as f64;
        let ctx = || format!("hawkes-limit, n = {n}");
        let plan = context(
            HawkesMarginalPlan::new(model.mu, &model.kernel, nf, horizon, grid),
            ctx,
        )?;
        let reps = replicate(cfg.config.replications, |r| {
            let s = stream(cfg, REPLICATIONS).derive(n).derive(r);
            let run = HawkesRun::simulate(model.mu, &model.kernel, nf, horizon, s)?;
            let dev = run.lln_deviation();
            let residuals = if (r as usize) < residual_runs {
                Some((
                    representation_residual(&run, grid)?,
                    representation_residual(&run, 2 * grid)?,
                ))
            } else {
                None
            };
            Ok(Replicate {
                lln: nf * dev * dev,
                obs: plan.observe(&run)?,
                residuals,
            })
        });
        let reps = context(reps, ctx)?;
        let lln: Vec<f64> = reps.iter().map(|r| r.lln).collect();
        let (lln_stat, lln_se) = summarize(&lln);
        let res: Vec<(f64, f64)> = reps.iter().filter_map(|r| r.residuals).collect();
        let k = res.len().max(1) as f64;
        rows.push(HawkesRow {
            n,
            replications: reps.len(),
            lln_stat,
            lln_se,
            residual: res.iter().map(|r| r.0).sum::<f64>() / k,
            residual_double: res.iter().map(|r| r.1).sum::<f64>() / k,
            residual_runs: res.len(),
        });
        if reps.len() >= MIN_RUNS {
            let obs: Vec<_> = reps.into_iter().map(|r| r.obs).collect();
            diagnostics.push(context(
                plan.diagnose(&obs, stream(cfg, REFERENCE).derive(n)),
                ctx,
            )?);
        }
    }
    Ok(HawkesOutcome {
        grid,
        rows,
        diagnostics,
    })
}
