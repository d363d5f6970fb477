use crate::error::{Error, Result};

/// Right-continuous step path in `R^d` on `[0, T]`.
///
/// Piece `0` is the initial value on `[0, tau_1)`; piece `i >= 1` is the value
/// taken at jump time `tau_i` and held until the next jump (or `T`).
#[derive(Debug, Clone, PartialEq)]
pub struct RcllPath {
    dim: usize,
    horizon: f64,
    times: Vec<f64>,
    // (times.len() + 1) * dim, row-major by piece
    values: Vec<f64>,
}

impl RcllPath {
    pub fn new(
        initial: Vec<f64>,
        times: Vec<f64>,
        jump_values: Vec<Vec<f64>>,
        horizon: f64,
    ) -> Result<Self> {
        let dim = initial.len();
        if times.len() != jump_values.len() {
            return Err(Error::Parameter(format!(
                "{} jump times but {} jump values",
                times.len(),
                jump_values.len()
            )));
        }
        let mut b = RcllPathBuilder::new(initial, horizon)?;
        for (t, v) in times.into_iter().zip(jump_values) {
            if v.len() != dim {
                return Err(Error::UnsupportedDimension {
                    expected: dim,
                    got: v.len(),
                });
            }
            b.push(t, &v)?;
        }
        Ok(b.finish())
    }

    pub fn constant(value: Vec<f64>, horizon: f64) -> Result<Self> {
        Ok(RcllPathBuilder::new(value, horizon)?.finish())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn initial(&self) -> &[f64] {
        &self.values[..self.dim]
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.times
    }

    pub fn num_jumps(&self) -> usize {
        self.times.len()
    }

    /// Number of constant pieces (`jumps + 1`).
    pub fn num_pieces(&self) -> usize {
        self.times.len() + 1
    }

    /// Value held on piece `i`.
    pub fn piece(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn piece_start(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.times[i - 1]
        }
    }

    /// Index of the piece active at time `t` (right-continuous).
    pub fn piece_index(&self, t: f64) -> usize {
        self.times.partition_point(|&s| s <= t)
    }

    /// Index of the piece active just before `t`.
    pub fn piece_index_left(&self, t: f64) -> usize {
        self.times.partition_point(|&s| s < t)
    }

    pub fn at(&self, t: f64) -> &[f64] {
        self.piece(self.piece_index(t))
    }

    pub fn at_left(&self, t: f64) -> &[f64] {
        self.piece(self.piece_index_left(t))
    }

    pub fn piece_values(&self) -> &[f64] {
        &self.values
    }

    /// Same jump times, values replaced piecewise.
    pub(crate) fn with_piece_values(&self, dim: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), dim * self.num_pieces());
        Self {
            dim,
            horizon: self.horizon,
            times: self.times.clone(),
            values,
        }
    }

    /// Coordinatewise map preserving the jump structure.
    pub fn map<F: FnMut(f64) -> f64>(&self, mut f: F) -> Self {
        let values = self.values.iter().map(|&v| f(v)).collect();
        self.with_piece_values(self.dim, values)
    }

    /// One-dimensional projection onto coordinate `j`.
    pub fn component(&self, j: usize) -> Result<Self> {
        if j >= self.dim {
            return Err(Error::Parameter(format!(
                "coordinate {j} out of range for dimension {}",
                self.dim
            )));
        }
        let values = self.values.chunks(self.dim).map(|c| c[j]).collect();
        Ok(self.with_piece_values(1, values))
    }
}

/// Incremental constructor used by the simulators.
#[derive(Debug, Clone)]
pub struct RcllPathBuilder {
    path: RcllPath,
}

impl RcllPathBuilder {
    pub fn new(initial: Vec<f64>, horizon: f64) -> Result<Self> {
        if initial.is_empty() {
            return Err(Error::Parameter("path dimension must be at least 1".into()));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::Parameter(format!(
                "horizon must be positive and finite, got {horizon}"
            )));
        }
        if initial.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("initial value must be finite".into()));
        }
        let dim = initial.len();
        Ok(Self {
            path: RcllPath {
                dim,
                horizon,
                times: Vec::new(),
                values: initial,
            },
        })
    }

    pub fn with_capacity(initial: Vec<f64>, horizon: f64, jumps: usize) -> Result<Self> {
        let mut b = Self::new(initial, horizon)?;
        b.path.times.reserve(jumps);
        b.path.values.reserve(jumps * b.path.dim);
        Ok(b)
    }

    pub fn last(&self) -> &[f64] {
        let p = &self.path;
        &p.values[p.values.len() - p.dim..]
    }

    pub fn last_time(&self) -> f64 {
        self.path.times.last().copied().unwrap_or(0.0)
    }

    pub fn push(&mut self, t: f64, value: &[f64]) -> Result<()> {
        let p = &mut self.path;
        if value.len() != p.dim {
            return Err(Error::UnsupportedDimension {
                expected: p.dim,
                got: value.len(),
            });
        }
        let prev = p.times.last().copied().unwrap_or(0.0);
        if !(t > prev && t <= p.horizon) {
            return Err(Error::Parameter(format!(
                "jump time {t} must lie in ({prev}, {}]",
                p.horizon
            )));
        }
        if value.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!("nonfinite jump value at t = {t}")));
        }
        p.times.push(t);
        p.values.extend_from_slice(value);
        Ok(())
    }

    pub fn finish(self) -> RcllPath {
        self.path
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_is_right_continuous() {
        let p = RcllPath::new(vec![0.0], vec![0.5, 0.75], vec![vec![1.0], vec![3.0]], 1.0).unwrap();
        assert_eq!(p.at(0.0), &[0.0]);
        assert_eq!(p.at(0.4999), &[0.0]);
        assert_eq!(p.at(0.5), &[1.0]);
        assert_eq!(p.at_left(0.5), &[0.0]);
        assert_eq!(p.at(0.75), &[3.0]);
        assert_eq!(p.at(1.0), &[3.0]);
    }

    #[test]
    fn rejects_bad_jumps() {
        assert!(RcllPath::new(vec![0.0], vec![0.0], vec![vec![1.0]], 1.0).is_err());
        assert!(RcllPath::new(vec![0.0], vec![1.5], vec![vec![1.0]], 1.0).is_err());
        assert!(RcllPath::new(vec![0.0], vec![0.5, 0.5], vec![vec![1.0], vec![2.0]], 1.0).is_err());
        assert!(RcllPath::new(vec![0.0], vec![0.5], vec![vec![1.0, 2.0]], 1.0).is_err());
        assert!(RcllPath::new(vec![0.0], vec![0.5], vec![vec![f64::NAN]], 1.0).is_err());
        // a jump exactly at the horizon is allowed
        assert!(RcllPath::new(vec![0.0], vec![1.0], vec![vec![1.0]], 1.0).is_ok());
    }

    #[test]
    fn component_projection() {
        let p = RcllPath::new(vec![1.0, 2.0], vec![0.3], vec![vec![3.0, 4.0]], 1.0).unwrap();
        let c = p.component(1).unwrap();
        assert_eq!(c.at(0.0), &[2.0]);
        assert_eq!(c.at(0.5), &[4.0]);
        assert!(p.component(2).is_err());
    }
}
