use crate::error::{Error, Result};

/// Strictly increasing mesh `0 = t_0 < t_1 < ... < t_l = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    times: Vec<f64>,
}

impl Partition {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::Parameter(
                "a partition needs at least two points".into(),
            ));
        }
        if times[0] != 0.0 {
            return Err(Error::Parameter(format!(
                "a partition starts at 0, got {}",
                times[0]
            )));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter(
                "partition times must be finite and strictly increasing".into(),
            ));
        }
        Ok(Self { times })
    }

    /// `cells` equal subintervals of `[0, horizon]`.
    pub fn uniform(horizon: f64, cells: usize) -> Result<Self> {
        if cells == 0 || !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::Parameter(format!(
                "uniform partition needs cells >= 1 and horizon > 0 (got {cells}, {horizon})"
            )));
        }
        let h = horizon / cells as f64;
        let mut times: Vec<f64> = (0..=cells).map(|i| i as f64 * h).collect();
        times[cells] = horizon;
        Ok(Self { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of subintervals `l(pi)`.
    pub fn cells(&self) -> usize {
        self.times.len() - 1
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn horizon(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn mesh(&self) -> f64 {
        self.times
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Index `i` of the cell `[t_i, t_{i+1})` containing `t`, clamped to the
    /// last cell for `t >= T`.
    pub fn locate(&self, t: f64) -> usize {
        let k = self.times.partition_point(|&s| s <= t);
        k.saturating_sub(1).min(self.cells() - 1)
    }
}
