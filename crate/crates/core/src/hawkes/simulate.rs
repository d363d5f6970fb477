use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::kernel::HawkesKernel;
use crate::error::{check_positive, Error, Result};
use crate::measures::RngStream;

/// Accepted events with the intensity `λ(s_i-)` seen by the thinning step.
#[derive(Debug, Clone, PartialEq)]
pub struct HawkesTrace {
    pub events: Vec<f64>,
    pub intensities: Vec<f64>,
    pub candidates: u64,
}

/// Ogata thinning on `[0, horizon]`. Between events the intensity only
/// decays, so its current value dominates until the next candidate.
pub fn simulate_hawkes_traced(
    mu: f64,
    kernel: &HawkesKernel,
    horizon: f64,
    stream: RngStream,
) -> Result<HawkesTrace> {
    check_positive("mu", mu)?;
    check_positive("horizon", horizon)?;
    kernel.check_stable()?;
    let (a, b) = (kernel.weights(), kernel.rates());
    let mut rng = stream.rng();
    let mut state = vec![0.0; a.len()];
    let mut t = 0.0;
    let mut trace = HawkesTrace {
        events: Vec::new(),
        intensities: Vec::new(),
        candidates: 0,
    };
    loop {
        let bound = mu + state.iter().sum::<f64>();
        let gap: f64 = Exp::new(bound)
            .map_err(|e| Error::Parameter(e.to_string()))?
            .sample(&mut rng);
        t += gap;
        if t > horizon {
            break;
        }
        for (s, bj) in state.iter_mut().zip(b) {
            *s *= (-bj * gap).exp();
        }
        trace.candidates += 1;
        let lambda = mu + state.iter().sum::<f64>();
        if rng.random::<f64>() * bound < lambda {
            trace.events.push(t);
            trace.intensities.push(lambda);
            for (s, aj) in state.iter_mut().zip(a) {
                *s += aj;
            }
        }
    }
    Ok(trace)
}

/// Event times of a Hawkes process on `[0, horizon]`.
pub fn simulate_hawkes(
    mu: f64,
    kernel: &HawkesKernel,
    horizon: f64,
    stream: RngStream,
) -> Result<Vec<f64>> {
    Ok(simulate_hawkes_traced(mu, kernel, horizon, stream)?.events)
}

/// Compensator `μ t + Σ_{s_i < t} Φ(t - s_i)` at sorted times, in one sweep
/// using `Σ_i Φ(t - s_i) = Σ_j (a_j / b_j)(N(t) - Σ_i e^{-b_j (t - s_i)})`.
pub fn compensator_at(mu: f64, kernel: &HawkesKernel, events: &[f64], times: &[f64]) -> Vec<f64> {
    let (a, b) = (kernel.weights(), kernel.rates());
    let mut decay = vec![0.0; a.len()]; // Σ_i e^{-b_j (clock - s_i)}
    let mut clock = 0.0;
    let mut count = 0usize;
    let mut out = Vec::with_capacity(times.len());
    let advance = |decay: &mut [f64], clock: &mut f64, to: f64| {
        let dt = to - *clock;
        if dt > 0.0 {
            for (r, bj) in decay.iter_mut().zip(b) {
                *r *= (-bj * dt).exp();
            }
            *clock = to;
        }
    };
    for &t in times {
        while count < events.len() && events[count] < t {
            advance(&mut decay, &mut clock, events[count]);
            decay.iter_mut().for_each(|r| *r += 1.0);
            count += 1;
        }
        advance(&mut decay, &mut clock, t);
        let excite: f64 = a
            .iter()
            .zip(b)
            .zip(&decay)
            .map(|((aj, bj), r)| aj / bj * (count as f64 - r))
            .sum();
        out.push(mu * t + excite);
    }
    out
}

/// One Hawkes path observed on `[0, n T]`, to be rescaled to `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HawkesRun {
    pub mu: f64,
    pub kernel: HawkesKernel,
    pub n: f64,
    pub horizon: f64,
    pub events: Vec<f64>,
}

impl HawkesRun {
    pub fn simulate(
        mu: f64,
        kernel: &HawkesKernel,
        n: f64,
        horizon: f64,
        stream: RngStream,
    ) -> Result<Self> {
        check_positive("n", n)?;
        let events = simulate_hawkes(mu, kernel, n * horizon, stream)?;
        Ok(Self {
            mu,
            kernel: kernel.clone(),
            n,
            horizon,
            events,
        })
    }

    pub fn rho(&self) -> f64 {
        self.kernel.stationary_rate(self.mu)
    }

    /// `N(t)`, counting events at or before `t`.
    pub fn count(&self, t: f64) -> usize {
        self.events.partition_point(|&s| s <= t)
    }

    /// `sup_{v <= T} |N(n v) / n - ρ v|`, exact: between events the deviation
    /// is affine, so the supremum sits at one-sided limits at events or at `T`.
    pub fn lln_deviation(&self) -> f64 {
        let rho = self.rho();
        let end = self.n * self.horizon;
        let mut sup = 0.0f64;
        for (k, &e) in self.events.iter().enumerate() {
            let drift = rho * e / self.n;
            sup = sup
                .max((k as f64 / self.n - drift).abs())
                .max(((k + 1) as f64 / self.n - drift).abs());
        }
        let last = self.events.len() as f64 / self.n - rho * end / self.n;
        sup.max(last.abs())
    }

    /// Compensator at each event time.
    pub fn compensator_at_events(&self) -> Vec<f64> {
        compensator_at(self.mu, &self.kernel, &self.events, &self.events)
    }
}
