use super::grid::GridPath;
use super::ops::Path;
use super::partition::Partition;
use super::rcll::RcllPath;
use crate::error::{Error, Result};

/// `gamma(t) = int_0^t r(s) ds`, by the trapezoid rule on a partition and
/// piecewise linear in between.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeChange {
    partition: Partition,
    gamma: Vec<f64>,
}

impl TimeChange {
    pub fn from_rate<F: FnMut(f64) -> f64>(partition: &Partition, mut rate: F) -> Result<Self> {
        let rates: Vec<f64> = partition.times().iter().map(|&t| rate(t)).collect();
        Self::from_rate_values(partition, &rates)
    }

    /// Rates sampled at the nodes of `partition`.
    pub fn from_rate_values(partition: &Partition, rates: &[f64]) -> Result<Self> {
        if rates.len() != partition.len() {
            return Err(Error::Parameter(format!(
                "{} rate samples for {} partition nodes",
                rates.len(),
                partition.len()
            )));
        }
        if let Some((i, r)) = rates
            .iter()
            .enumerate()
            .find(|(_, r)| !(r.is_finite() && **r >= 0.0))
        {
            return Err(Error::Parameter(format!(
                "time-change rate must be nonnegative, got {r} at t = {}",
                partition.times()[i]
            )));
        }
        let times = partition.times();
        let mut gamma = Vec::with_capacity(times.len());
        gamma.push(0.0);
        for i in 0..partition.cells() {
            let g = gamma[i] + 0.5 * (times[i + 1] - times[i]) * (rates[i] + rates[i + 1]);
            gamma.push(g);
        }
        Ok(Self {
            partition: partition.clone(),
            gamma,
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn values(&self) -> &[f64] {
        &self.gamma
    }

    /// `gamma(T)`.
    pub fn total(&self) -> f64 {
        self.gamma[self.gamma.len() - 1]
    }

    pub fn gamma(&self, t: f64) -> f64 {
        let times = self.partition.times();
        let t = t.clamp(0.0, self.partition.horizon());
        let i = self.partition.locate(t);
        let w = (t - times[i]) / (times[i + 1] - times[i]);
        self.gamma[i] + w * (self.gamma[i + 1] - self.gamma[i])
    }

    /// Smallest `t` with `gamma(t) >= y`, or `None` beyond `gamma(T)`.
    pub fn inverse(&self, y: f64) -> Option<f64> {
        if y <= 0.0 {
            return Some(0.0);
        }
        if y > self.total() {
            return None;
        }
        let times = self.partition.times();
        let k = self.gamma.partition_point(|&g| g < y);
        // gamma[k-1] < y <= gamma[k]
        let (g0, g1) = (self.gamma[k - 1], self.gamma[k]);
        let w = (y - g0) / (g1 - g0);
        Some(times[k - 1] + w * (times[k] - times[k - 1]))
    }

    fn check_domain<P: Path>(&self, f: &P) -> Result<()> {
        let need = self.total();
        if f.horizon() < need * (1.0 - 1e-12) - 1e-12 {
            return Err(Error::Parameter(format!(
                "path lives on [0, {}] but the time change reaches {need}",
                f.horizon()
            )));
        }
        Ok(())
    }

    /// `f o gamma` sampled at the nodes of the time-change partition.
    pub fn apply<P: Path>(&self, f: &P) -> Result<GridPath> {
        self.check_domain(f)?;
        let d = f.dim();
        let mut values = vec![0.0; self.partition.len() * d];
        for (i, &g) in self.gamma.iter().enumerate() {
            f.eval_into(g.min(f.horizon()), &mut values[i * d..(i + 1) * d]);
        }
        GridPath::new(self.partition.clone(), d, values)
    }

    /// `f o gamma` for a step path, exact for the piecewise linear `gamma`.
    pub fn apply_rcll(&self, f: &RcllPath) -> Result<RcllPath> {
        self.check_domain(f)?;
        let mut initial = f.initial().to_vec();
        let mut times: Vec<f64> = Vec::new();
        let mut values: Vec<Vec<f64>> = Vec::new();
        for (i, &tau) in f.jump_times().iter().enumerate() {
            let Some(t) = self.inverse(tau) else { break };
            let v = f.piece(i + 1).to_vec();
            if t <= 0.0 {
                initial = v;
            } else if times.last().is_some_and(|&s| t <= s) {
                *values.last_mut().unwrap() = v;
            } else {
                times.push(t);
                values.push(v);
            }
        }
        RcllPath::new(initial, times, values, self.partition.horizon())
    }
}

/// `f o gamma` on `[0, T]` with `gamma' = rate`, sampled on `partition`.
pub fn time_change<P: Path, F: FnMut(f64) -> f64>(
    f: &P,
    partition: &Partition,
    rate: F,
) -> Result<GridPath> {
    TimeChange::from_rate(partition, rate)?.apply(f)
}
