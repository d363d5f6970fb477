use super::partition::Partition;
use crate::error::{Error, Result};

/// Continuous path in `R^d`, affine between the nodes of a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    dim: usize,
    partition: Partition,
    // partition.len() * dim, row-major by node
    values: Vec<f64>,
}

impl GridPath {
    pub fn new(partition: Partition, dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter("path dimension must be at least 1".into()));
        }
        if values.len() != partition.len() * dim {
            return Err(Error::Parameter(format!(
                "expected {} values for {} nodes in dimension {dim}, got {}",
                partition.len() * dim,
                partition.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("grid path values must be finite".into()));
        }
        Ok(Self {
            dim,
            partition,
            values,
        })
    }

    /// Path on the uniform grid `j T / G`, `j = 0..=G`.
    pub fn uniform(horizon: f64, cells: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(Partition::uniform(horizon, cells)?, dim, values)
    }

    pub fn from_fn<F: FnMut(f64) -> Vec<f64>>(partition: Partition, mut f: F) -> Result<Self> {
        let mut values = Vec::new();
        let mut dim = 0;
        for &t in partition.times() {
            let v = f(t);
            if dim == 0 {
                dim = v.len();
            } else if v.len() != dim {
                return Err(Error::UnsupportedDimension {
                    expected: dim,
                    got: v.len(),
                });
            }
            values.extend(v);
        }
        Self::new(partition, dim, values)
    }

    pub fn scalar_fn<F: FnMut(f64) -> f64>(partition: Partition, mut f: F) -> Result<Self> {
        Self::from_fn(partition, |t| vec![f(t)])
    }

    pub fn zeros(partition: Partition, dim: usize) -> Result<Self> {
        let len = partition.len() * dim;
        Self::new(partition, dim, vec![0.0; len])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> f64 {
        self.partition.horizon()
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn times(&self) -> &[f64] {
        self.partition.times()
    }

    pub fn len(&self) -> usize {
        self.partition.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn last(&self) -> &[f64] {
        self.node(self.len() - 1)
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let times = self.partition.times();
        let t = t.clamp(0.0, self.horizon());
        let i = self.partition.locate(t);
        let (t0, t1) = (times[i], times[i + 1]);
        let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        let (a, b) = (self.node(i), self.node(i + 1));
        // exact at both ends of the cell
        if w == 1.0 {
            out.copy_from_slice(b);
            return;
        }
        for j in 0..self.dim {
            out[j] = a[j] + w * (b[j] - a[j]);
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out);
        out
    }

    /// Coefficients of the path in the hat basis: `(f(t_{i+1}) - f(t_i)) / sqrt(t_{i+1} - t_i)` per
    /// cell, row-major by cell.
    pub fn hat_coefficients(&self) -> Vec<f64> {
        let times = self.partition.times();
        let mut out = Vec::with_capacity(self.partition.cells() * self.dim);
        for i in 0..self.partition.cells() {
            let s = (times[i + 1] - times[i]).sqrt();
            let (a, b) = (self.node(i), self.node(i + 1));
            out.extend((0..self.dim).map(|j| (b[j] - a[j]) / s));
        }
        out
    }

    pub fn map<F: FnMut(f64) -> f64>(&self, mut f: F) -> Self {
        let values = self.values.iter().map(|&v| f(v)).collect();
        Self {
            dim: self.dim,
            partition: self.partition.clone(),
            values,
        }
    }

    pub(crate) fn with_node_values(&self, dim: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), dim * self.len());
        Self {
            dim,
            partition: self.partition.clone(),
            values,
        }
    }

    /// `a * self + b * other` on the same partition.
    pub fn lin_comb(&self, a: f64, other: &GridPath, b: f64) -> Result<Self> {
        if other.partition != self.partition || other.dim != self.dim {
            return Err(Error::Parameter(
                "linear combination needs a common partition and dimension".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(self.with_node_values(self.dim, values))
    }

    pub fn component(&self, j: usize) -> Result<Self> {
        if j >= self.dim {
            return Err(Error::Parameter(format!(
                "coordinate {j} out of range for dimension {}",
                self.dim
            )));
        }
        let values = self.values.chunks(self.dim).map(|c| c[j]).collect();
        Ok(self.with_node_values(1, values))
    }
}
