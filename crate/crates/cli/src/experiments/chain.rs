use poisdiff::distance::{fit_rate, marginal_w1, RateFit, RateSample};
use poisdiff::measures::{psi_bound, sample_poisson_measure};
use poisdiff::models::{
    coupling_gap, mm1_reflected, LimitSampler, ModelSpec, ScaledRun, Simulator,
};
use poisdiff::paths::{interpolation_gap, Partition, RcllPath};
use poisdiff::stats::{self, ks_two_sample};

use super::{
    context, replicate, stream, summarize, ExperimentResult, BOOTSTRAP, LIMIT_DRAWS, REPLICATIONS,
};
use crate::catalog::Model;
use crate::config::ValidConfig;
use crate::output::{fmt_f64, Plot, Table};

/// Mean of a replicated positive statistic at one `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub n: u64,
    pub values: Vec<f64>,
    pub mean: f64,
    pub std_err: f64,
}

impl RateRow {
    fn new(n: u64, values: Vec<f64>) -> Self {
        let (mean, std_err) = summarize(&values);
        Self {
            n,
            values,
            mean,
            std_err,
        }
    }
}

fn chain_spec(cfg: &ValidConfig) -> &ModelSpec {
    match &cfg.model {
        Some(Model::Chain(spec)) => spec,
        _ => unreachable!("validated config carries a chain model"),
    }
}

fn simulator(cfg: &ValidConfig) -> ExperimentResult<Simulator> {
    let spec = chain_spec(cfg);
    context(
        Simulator::new(spec, cfg.config.horizon, cfg.config.grid),
        || format!("{}: fluid limit", spec.id),
    )
}

/// One replication of `X̄_n`, reflected for models that carry a reflection.
fn scaled_run(
    sim: &Simulator,
    n: u64,
    r: u64,
    cfg: &ValidConfig,
    track: bool,
) -> poisdiff::Result<ScaledRun> {
    let s = stream(cfg, REPLICATIONS).derive(n).derive(r);
    let run = sim.simulate(n, s, track)?;
    if sim.spec().reflect && !track {
        mm1_reflected(&run)
    } else {
        Ok(run)
    }
}

/// Fits a rate when there are enough scales and every mean is positive.
fn maybe_fit(cfg: &ValidConfig, rows: &[RateRow]) -> ExperimentResult<Option<RateFit>> {
    if rows.len() < 4 || rows.iter().any(|r| r.mean.is_nan() || r.mean <= 0.0) {
        return Ok(None);
    }
    let samples: Vec<RateSample> = rows
        .iter()
        .map(|r| RateSample {
            n: r.n as f64,
            values: r.values.clone(),
        })
        .collect();
    context(
        fit_rate(&samples, cfg.config.bootstrap, stream(cfg, BOOTSTRAP)),
        || "rate fit".into(),
    )
    .map(Some)
}

fn rate_table(statistic: &str, rows: &[RateRow]) -> Table {
    let mut t = Table::new(&["n", "replications", statistic, "std_err"]);
    for r in rows {
        t.push(vec![
            r.n.to_string(),
            r.values.len().to_string(),
            fmt_f64(r.mean),
            fmt_f64(r.std_err),
        ]);
    }
    t
}

fn rate_plot(title: String, y_label: &str, rows: &[RateRow], fit: Option<&RateFit>) -> Plot {
    Plot {
        title,
        x_label: "n".into(),
        y_label: y_label.into(),
        points: rows.iter().map(|r| (r.n as f64, r.mean)).collect(),
        fit: fit.map(|f| (f.slope, f.intercept)),
    }
}

#[derive(Debug, Clone)]
pub struct LlnOutcome {
    pub model: String,
    pub rows: Vec<RateRow>,
    pub fit: Option<RateFit>,
}

impl LlnOutcome {
    pub fn table(&self) -> Table {
        rate_table("mean_sup_error", &self.rows)
    }

    pub fn plot(&self) -> Plot {
        rate_plot(
            format!("{}: E sup |X_n - Lambda|", self.model),
            "mean sup error",
            &self.rows,
            self.fit.as_ref(),
        )
    }
}

/// `E sup_{t <= T} |X̄_n - Λ|` against `n`.
pub(crate) fn lln_rate(cfg: &ValidConfig) -> ExperimentResult<LlnOutcome> {
    let sim = simulator(cfg)?;
    let id = sim.spec().id.clone();
    let mut rows = Vec::new();
    for &n in &cfg.config.n {
        let values = replicate(cfg.config.replications, |r| {
            scaled_run(&sim, n, r, cfg, false)?.sup_error()
        });
        rows.push(RateRow::new(
            n,
            context(values, || format!("lln-rate {id}, n = {n}"))?,
        ));
    }
    let fit = maybe_fit(cfg, &rows)?;
    Ok(LlnOutcome {
        model: id,
        rows,
        fit,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FcltRow {
    pub n: u64,
    pub coord: usize,
    pub replications: usize,
    pub limit_draws: usize,
    pub u_mean: f64,
    pub u_var: f64,
    pub limit_mean: f64,
    pub limit_var: f64,
    pub w1: f64,
    pub ks_statistic: f64,
    pub ks_p_value: f64,
}

#[derive(Debug, Clone)]
pub struct FcltOutcome {
    pub model: String,
    pub rows: Vec<FcltRow>,
}

impl FcltOutcome {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&[
            "n",
            "coord",
            "replications",
            "limit_draws",
            "u_mean",
            "u_var",
            "limit_mean",
            "limit_var",
            "w1",
            "ks_statistic",
            "ks_p_value",
        ]);
        for r in &self.rows {
            t.push(vec![
                r.n.to_string(),
                r.coord.to_string(),
                r.replications.to_string(),
                r.limit_draws.to_string(),
                fmt_f64(r.u_mean),
                fmt_f64(r.u_var),
                fmt_f64(r.limit_mean),
                fmt_f64(r.limit_var),
                fmt_f64(r.w1),
                fmt_f64(r.ks_statistic),
                fmt_f64(r.ks_p_value),
            ]);
        }
        t
    }

    /// Rows of one coordinate in increasing `n`.
    pub fn coordinate(&self, coord: usize) -> Vec<&FcltRow> {
        self.rows.iter().filter(|r| r.coord == coord).collect()
    }
}

/// Law of `U_n(T)` against draws of the diffusion limit at `T`.
pub(crate) fn fclt_marginal(cfg: &ValidConfig) -> ExperimentResult<FcltOutcome> {
    let sim = simulator(cfg)?;
    let id = sim.spec().id.clone();
    let dim = sim.spec().dim;
    let horizon = cfg.config.horizon;
    let sampler = context(LimitSampler::from_simulator(&sim), || {
        format!("{id}: limit sampler")
    })?;
    let draws = cfg.limit_draws();
    let limit = replicate(draws, |r| {
        Ok(sampler
            .sample(stream(cfg, LIMIT_DRAWS).derive(r))?
            .last()
            .to_vec())
    });
    let limit = context(limit, || format!("fclt-marginal {id}: limit draws"))?;

    let mut rows = Vec::new();
    for &n in &cfg.config.n {
        let u = replicate(cfg.config.replications, |r| {
            Ok(scaled_run(&sim, n, r, cfg, false)?.u_at(horizon))
        });
        let u = context(u, || format!("fclt-marginal {id}, n = {n}"))?;
        for coord in 0..dim {
            let us: Vec<f64> = u.iter().map(|v| v[coord]).collect();
            let ls: Vec<f64> = limit.iter().map(|v| v[coord]).collect();
            let ctx = || format!("fclt-marginal {id}, n = {n}, coordinate {coord}");
            let ks = context(ks_two_sample(&us, &ls), ctx)?;
            let w1 = context(marginal_w1(&us, &ls), ctx)?;
            rows.push(FcltRow {
                n,
                coord,
                replications: us.len(),
                limit_draws: ls.len(),
                u_mean: stats::mean(&us),
                u_var: stats::variance(&us),
                limit_mean: stats::mean(&ls),
                limit_var: stats::variance(&ls),
                w1,
                ks_statistic: ks.statistic,
                ks_p_value: ks.p_value,
            });
        }
    }
    Ok(FcltOutcome { model: id, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpRow {
    pub n: u64,
    pub gaps: RateRow,
    /// `Σ_k ‖ζ_k‖ Ψ(n, ρ_k |π| ‖φ_k‖)` times the jump scale.
    pub psi_bound: f64,
    /// Constant fitted once on the smallest `n`, times `psi_bound`.
    pub fitted_bound: f64,
    /// Mean gap exceeds the fitted bound by more than 3 standard errors.
    pub violated: bool,
}

#[derive(Debug, Clone)]
pub struct InterpOutcome {
    /// Model id, or `poisson` for the centred scaled Poisson process.
    pub model: String,
    pub rows: Vec<InterpRow>,
    pub constant: f64,
    pub fit: Option<RateFit>,
}

impl InterpOutcome {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&[
            "n",
            "replications",
            "mean_gap",
            "std_err",
            "psi_bound",
            "ratio",
            "fitted_bound",
            "violated",
        ]);
        for r in &self.rows {
            t.push(vec![
                r.n.to_string(),
                r.gaps.values.len().to_string(),
                fmt_f64(r.gaps.mean),
                fmt_f64(r.gaps.std_err),
                fmt_f64(r.psi_bound),
                fmt_f64(r.gaps.mean / r.psi_bound),
                fmt_f64(r.fitted_bound),
                r.violated.to_string(),
            ]);
        }
        t
    }

    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.violated).count()
    }

    pub fn plot(&self) -> Plot {
        let rows: Vec<RateRow> = self.rows.iter().map(|r| r.gaps.clone()).collect();
        rate_plot(
            format!("{}: E |X - Xi_n X|", self.model),
            "mean interpolation gap",
            &rows,
            self.fit.as_ref(),
        )
    }
}

/// Centred scaled Poisson process `(P(n t) - n t) / √n`; its drift is affine,
/// so only the counting part contributes to the interpolation gap.
fn poisson_gap(
    n: u64,
    horizon: f64,
    pi: &Partition,
    cfg: &ValidConfig,
    r: u64,
) -> poisdiff::Result<f64> {
    let s = stream(cfg, REPLICATIONS).derive(n).derive(r);
    let sample = sample_poisson_measure(s, horizon, n as f64, 1.0)?;
    let scale = (n as f64).sqrt();
    let values: Vec<Vec<f64>> = (1..=sample.times.len())
        .map(|k| vec![k as f64 / scale])
        .collect();
    let path = RcllPath::new(vec![0.0], sample.times, values, horizon)?;
    interpolation_gap(&path, pi)
}

/// `E ‖X - Ξ_n X‖` on the uniform `n`-cell partition, with the interpolation
/// bound scaled by a constant fitted on the smallest `n`.
pub(crate) fn interp_bound(cfg: &ValidConfig) -> ExperimentResult<InterpOutcome> {
    let horizon = cfg.config.horizon;
    let sim = match &cfg.model {
        Some(Model::Chain(_)) => Some(simulator(cfg)?),
        _ => None,
    };
    let id = sim
        .as_ref()
        .map_or("poisson".to_string(), |s| s.spec().id.clone());
    let mut gaps = Vec::new();
    let mut bounds = Vec::new();
    for &n in &cfg.config.n {
        let ctx = || format!("interp-bound {id}, n = {n}");
        let pi = context(Partition::uniform(horizon, n as usize), ctx)?;
        let nf = n as f64;
        let (values, bound) = match &sim {
            None => {
                let v = replicate(cfg.config.replications, |r| {
                    poisson_gap(n, horizon, &pi, cfg, r)
                });
                (v, psi_bound(n, horizon).map(|p| p / nf.sqrt()))
            }
            Some(sim) => {
                let v = replicate(cfg.config.replications, |r| {
                    let run = scaled_run(sim, n, r, cfg, false)?;
                    interpolation_gap(&run.xbar, &pi)
                });
                // ρ_k = n, |π| = T / n, ‖φ_k‖ = rate bound; jumps ζ_k / n
                let bound = sim.spec().channels.iter().try_fold(0.0, |acc, ch| {
                    let z = ch.zeta.iter().map(|x| x * x).sum::<f64>().sqrt();
                    Ok::<f64, poisdiff::Error>(
                        acc + z / nf * psi_bound(n, horizon * ch.rate_bound)?,
                    )
                });
                (v, bound)
            }
        };
        gaps.push(RateRow::new(n, context(values, ctx)?));
        bounds.push(context(bound, ctx)?);
    }
    let constant = gaps[0].mean / bounds[0];
    let rows: Vec<InterpRow> = gaps
        .iter()
        .zip(&bounds)
        .map(|(g, &b)| {
            let fitted = constant * b;
            let slack = if g.std_err.is_finite() {
                3.0 * g.std_err
            } else {
                0.0
            };
            InterpRow {
                n: g.n,
                gaps: g.clone(),
                psi_bound: b,
                fitted_bound: fitted,
                violated: g.mean > fitted + slack,
            }
        })
        .collect();
    let fit = maybe_fit(cfg, &gaps)?;
    Ok(InterpOutcome {
        model: id,
        rows,
        constant,
        fit,
    })
}

#[derive(Debug, Clone)]
pub struct CouplingOutcome {
    pub model: String,
    pub rows: Vec<RateRow>,
    pub fit: Option<RateFit>,
}

impl CouplingOutcome {
    pub fn table(&self) -> Table {
        rate_table("mean_coupling_gap", &self.rows)
    }

    pub fn plot(&self) -> Plot {
        rate_plot(
            format!("{}: coupled martingale gap", self.model),
            "mean coupling gap",
            &self.rows,
            self.fit.as_ref(),
        )
    }
}

/// Mean `n^{-1/2}`-scaled gap between the martingales driven by `X̄_n` and by `Λ`.
pub(crate) fn coupling_rate(cfg: &ValidConfig) -> ExperimentResult<CouplingOutcome> {
    let sim = simulator(cfg)?;
    let id = sim.spec().id.clone();
    let mut rows = Vec::new();
    for &n in &cfg.config.n {
        let values = replicate(cfg.config.replications, |r| {
            coupling_gap(&scaled_run(&sim, n, r, cfg, true)?)
        });
        rows.push(RateRow::new(
            n,
            context(values, || format!("coupling-rate {id}, n = {n}"))?,
        ));
    }
    let fit = maybe_fit(cfg, &rows)?;
    Ok(CouplingOutcome {
        model: id,
        rows,
        fit,
    })
}
