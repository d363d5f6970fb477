use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::kernel::HawkesKernel;
use super::psi::psi_kernel;
use super::scaled::mean_count;
use super::simulate::{compensator_at, HawkesRun};
use crate::distance::marginal_w1;
use crate::error::{check_positive, Error, Result};
use crate::measures::RngStream;
use crate::stats::{self, ks_one_sample, TestResult};

/// Minimum number of runs accepted by [`hawkes_limit_check`].
pub const MIN_RUNS: usize = 500;

/// Exponent `ε` in the tail condition `∫_{n^ε}^∞ ψ <= n^{-1/2}`.
pub const TAIL_EPSILON: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceCandidate {
    pub name: String,
    pub value: f64,
    pub within_3se: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HawkesLimitDiagnostics {
    pub n: f64,
    pub runs: usize,
    pub rho: f64,
    pub kappa: f64,
    pub times: Vec<f64>,
    /// W1 between `Ξ_n W̄(t_j)` and `N(0, ρ t_j)` samples.
    pub w1_w_bar: Vec<f64>,
    /// W1 between `Ξ_n X̄(t_j)` and `N(0, ρ t_j / (1 - κ)^2)` samples.
    pub w1_x_bar_inverse_square: Vec<f64>,
    /// W1 between `Ξ_n X̄(t_j)` and `N(0, ρ t_j / √(1 - κ))` samples.
    pub w1_x_bar_inverse_sqrt: Vec<f64>,
    /// One-sample KS of `W̄(T)` against `N(0, ρ T)`.
    pub ks_w_bar_final: TestResult,
    /// Sample variance of `X̄(T) / √T` and its standard error.
    pub x_var: f64,
    pub x_var_se: f64,
    pub candidates: Vec<VarianceCandidate>,
    /// Name of the unique candidate inside the 3-SE band, if exactly one is.
    pub matching: Option<String>,
    pub tail_epsilon: f64,
    pub tail_integral: f64,
    pub tail_reference: f64,
}

/// `∫_{n^ε}^∞ ψ`, in closed form for a single exponential.
pub fn psi_tail_integral(kernel: &HawkesKernel, n: f64, eps: f64) -> Result<f64> {
    Ok(psi_kernel(kernel)?.tail(n.powf(eps)))
}

fn normal_cdf(x: f64, var: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::new(0.0, var.sqrt())
        .map(|d| d.cdf(x))
        .unwrap_or(f64::NAN)
}

/// Marginal observations of one run: `Ξ_n W̄(t_j)` and `Ξ_n X̄(t_j)` at
/// `t_j = j T / 4`.
#[derive(Debug, Clone, PartialEq)]
pub struct HawkesObservation {
    pub w_bar: Vec<f64>,
    pub x_bar: Vec<f64>,
}

/// Shared quadrature and interpolation nodes for observing many runs at one
/// scale. `grid` sets the quadrature of `E N`.
#[derive(Debug, Clone)]
pub struct HawkesMarginalPlan {
    mu: f64,
    kernel: HawkesKernel,
    n: f64,
    horizon: f64,
    times: Vec<f64>,
    nodes: Vec<f64>,
    mean_nodes: Vec<f64>,
    tail_integral: f64,
}

impl HawkesMarginalPlan {
    pub fn new(mu: f64, kernel: &HawkesKernel, n: f64, horizon: f64, grid: usize) -> Result<Self> {
        check_positive("mu", mu)?;
        check_positive("n", n)?;
        check_positive("horizon", horizon)?;
        if grid == 0 {
            return Err(Error::Parameter("grid must have at least one cell".into()));
        }
        let psi = psi_kernel(kernel)?;
        let h_raw = n * horizon / grid as f64;
        let mean = mean_count(mu, &psi, h_raw, grid);
        let mean_at = |raw: f64| {
            let x = raw / h_raw;
            let i = (x.floor() as usize).min(grid - 1);
            let w = x - i as f64;
            mean[i] + w * (mean[i + 1] - mean[i])
        };

        let times: Vec<f64> = (1..=4).map(|j| horizon * j as f64 / 4.0).collect();
        // Ξ_n on the uniform partition of [0, T] with round(n) cells
        let cells = n.round().max(1.0);
        let cell = horizon / cells;
        let mut nodes: Vec<f64> = Vec::new();
        for &t in &times {
            let a = ((t / cell).floor() * cell).min(horizon);
            let b = (a + cell).min(horizon);
            nodes.push(a);
            nodes.push(b);
        }
        let mean_nodes = nodes.iter().map(|t| mean_at(n * t)).collect();
        Ok(Self {
            mu,
            kernel: kernel.clone(),
            n,
            horizon,
            times,
            nodes,
            mean_nodes,
            tail_integral: psi.tail(n.powf(TAIL_EPSILON)),
        })
    }

    pub fn for_run(run: &HawkesRun, grid: usize) -> Result<Self> {
        Self::new(run.mu, &run.kernel, run.n, run.horizon, grid)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn observe(&self, run: &HawkesRun) -> Result<HawkesObservation> {
        if run.n != self.n
            || run.mu != self.mu
            || run.kernel != self.kernel
            || run.horizon != self.horizon
        {
            return Err(Error::Parameter(
                "runs must share n, mu, kernel and horizon".into(),
            ));
        }
        let n = self.n;
        let s = n.sqrt();
        let raw: Vec<f64> = self.nodes.iter().map(|t| n * t).collect();
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]));
        let sorted: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
        let comp_sorted = compensator_at(self.mu, &self.kernel, &run.events, &sorted);
        let mut comp = vec![0.0; raw.len()];
        for (k, &i) in order.iter().enumerate() {
            comp[i] = comp_sorted[k];
        }
        let mut w_bar = Vec::with_capacity(self.times.len());
        let mut x_bar = Vec::with_capacity(self.times.len());
        for (j, &t) in self.times.iter().enumerate() {
            let (a, b) = (self.nodes[2 * j], self.nodes[2 * j + 1]);
            let wt = if b > a { (t - a) / (b - a) } else { 0.0 };
            let at = |k: usize| {
                let c = run.count(raw[k]) as f64;
                ((c - comp[k]) / s, (c - self.mean_nodes[k]) / s)
            };
            let (wa, xa) = at(2 * j);
            let (wb, xb) = at(2 * j + 1);
            w_bar.push(wa + wt * (wb - wa));
            x_bar.push(xa + wt * (xb - xa));
        }
        Ok(HawkesObservation { w_bar, x_bar })
    }

    /// Compares the observed marginals with the Gaussian candidates.
    pub fn diagnose(
        &self,
        obs: &[HawkesObservation],
        stream: RngStream,
    ) -> Result<HawkesLimitDiagnostics> {
        if obs.len() < MIN_RUNS {
            return Err(Error::Statistics(format!(
                "need at least {MIN_RUNS} runs, got {}",
                obs.len()
            )));
        }
        let (n, horizon) = (self.n, self.horizon);
        let kappa = self.kernel.kappa();
        let rho = self.kernel.stationary_rate(self.mu);
        let times = self.times.clone();
        let w_vals: Vec<Vec<f64>> = (0..times.len())
            .map(|j| obs.iter().map(|o| o.w_bar[j]).collect())
            .collect();
        let x_vals: Vec<Vec<f64>> = (0..times.len())
            .map(|j| obs.iter().map(|o| o.x_bar[j]).collect())
            .collect();

        let var_a = rho / (1.0 - kappa).powi(2);
        let var_b = rho / (1.0 - kappa).sqrt();
        let mut rng = stream.rng();
        let mut gauss = |var: f64| -> Vec<f64> {
            (0..obs.len())
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    var.sqrt() * z
                })
                .collect()
        };
        let mut w1_w = Vec::new();
        let mut w1_xa = Vec::new();
        let mut w1_xb = Vec::new();
        for (j, &t) in times.iter().enumerate() {
            w1_w.push(marginal_w1(&w_vals[j], &gauss(rho * t))?);
            w1_xa.push(marginal_w1(&x_vals[j], &gauss(var_a * t))?);
            w1_xb.push(marginal_w1(&x_vals[j], &gauss(var_b * t))?);
        }
        let last = times.len() - 1;
        let ks = ks_one_sample(&w_vals[last], |x| normal_cdf(x, rho * horizon))?;

        let xs: Vec<f64> = x_vals[last].iter().map(|x| x / horizon.sqrt()).collect();
        let var = stats::variance(&xs);
        let m = stats::mean(&xs);
        let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / xs.len() as f64;
        let se = ((m4 - var * var).max(0.0) / xs.len() as f64).sqrt();
        let candidates: Vec<VarianceCandidate> =
            [("rho/(1-kappa)^2", var_a), ("rho/sqrt(1-kappa)", var_b)]
                .iter()
                .map(|&(name, value)| VarianceCandidate {
                    name: name.into(),
                    value,
                    within_3se: (var - value).abs() <= 3.0 * se,
                })
                .collect();
        let inside: Vec<&VarianceCandidate> = candidates.iter().filter(|c| c.within_3se).collect();
        let matching = (inside.len() == 1).then(|| inside[0].name.clone());

        Ok(HawkesLimitDiagnostics {
            n,
            runs: obs.len(),
            rho,
            kappa,
            times,
            w1_w_bar: w1_w,
            w1_x_bar_inverse_square: w1_xa,
            w1_x_bar_inverse_sqrt: w1_xb,
            ks_w_bar_final: ks,
            x_var: var,
            x_var_se: se,
            candidates,
            matching,
            tail_epsilon: TAIL_EPSILON,
            tail_integral: self.tail_integral,
            tail_reference: 1.0 / n.sqrt(),
        })
    }
}

/// Marginal diagnostics of `W̄^{(n)}` and `X̄^{(n)}` over replicated runs at
/// one scale, at `t_j = j T / 4`. `grid` sets the quadrature of `E N`.
pub fn hawkes_limit_check(
    runs: &[HawkesRun],
    grid: usize,
    stream: RngStream,
) -> Result<HawkesLimitDiagnostics> {
    if runs.len() < MIN_RUNS {
        return Err(Error::Statistics(format!(
            "need at least {MIN_RUNS} runs, got {}",
            runs.len()
        )));
    }
    let plan = HawkesMarginalPlan::for_run(&runs[0], grid)?;
    let obs = runs
        .iter()
        .map(|r| plan.observe(r))
        .collect::<Result<Vec<_>>>()?;
    plan.diagnose(&obs, stream)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_tail_closed_form() {
        let k = HawkesKernel::exponential(0.5, 1.0).unwrap();
        for n in [1e2, 1e4, 1e6] {
            let got = psi_tail_integral(&k, n, 0.5).unwrap();
            let want = 0.5 / 0.5 * (-0.5 * n.sqrt()).exp();
            assert!((got - want).abs() <= 1e-15 * want.max(1e-300));
        }
    }

    #[test]
    fn too_few_runs() {
        let k = HawkesKernel::exponential(0.5, 1.0).unwrap();
        let runs: Vec<HawkesRun> = (0..10)
            .map(|r| HawkesRun::simulate(1.0, &k, 10.0, 1.0, RngStream::new(0, r)).unwrap())
            .collect();
        assert!(matches!(
            hawkes_limit_check(&runs, 64, RngStream::new(0, 0)),
            Err(Error::Statistics(_))
        ));
    }
}
