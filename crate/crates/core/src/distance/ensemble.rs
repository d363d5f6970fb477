use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::RngStream;
use crate::paths::{interpolate, interpolation_gap, GridPath, Partition, Path, RcllPath};
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Provenance {
    pub model: String,
    pub n: f64,
    pub seed: u64,
    pub first_replication: u64,
    pub replications: u64,
}

/// Grid paths sharing one partition and dimension.
#[derive(Debug, Clone)]
pub struct SamplePathEnsemble {
    paths: Vec<GridPath>,
    pub provenance: Provenance,
}

impl SamplePathEnsemble {
    pub fn new(paths: Vec<GridPath>, provenance: Provenance) -> Result<Self> {
        let first = paths
            .first()
            .ok_or_else(|| Error::Parameter("empty ensemble".into()))?;
        if paths
            .iter()
            .any(|p| p.partition() != first.partition() || p.dim() != first.dim())
        {
            return Err(Error::Parameter(
                "ensemble paths must share a partition and dimension".into(),
            ));
        }
        Ok(Self { paths, provenance })
    }

    /// Ensemble of `Xi_pi f` for arbitrary paths `f`.
    pub fn interpolated<P: Path>(
        paths: &[P],
        pi: &Partition,
        provenance: Provenance,
    ) -> Result<Self> {
        let paths = paths
            .iter()
            .map(|p| interpolate(p, pi))
            .collect::<Result<Vec<_>>>()?;
        Self::new(paths, provenance)
    }

    pub fn paths(&self) -> &[GridPath] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn partition(&self) -> &Partition {
        self.paths[0].partition()
    }

    pub fn dim(&self) -> usize {
        self.paths[0].dim()
    }

    /// Values of coordinate `coord` at node `node` across the ensemble.
    pub fn marginal(&self, node: usize, coord: usize) -> Vec<f64> {
        self.paths.iter().map(|p| p.node(node)[coord]).collect()
    }

    /// Pointwise mean path.
    pub fn mean_path(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.paths[0].values().len()];
        for p in &self.paths {
            for (a, v) in acc.iter_mut().zip(p.values()) {
                *a += v;
            }
        }
        let k = self.paths.len() as f64;
        acc.iter_mut().for_each(|a| *a /= k);
        acc
    }

    /// Mean over paths of the sup-norm distance to the mean path.
    pub fn mean_sup_deviation(&self) -> f64 {
        let m = self.mean_path();
        let devs: Vec<f64> = self
            .paths
            .iter()
            .map(|p| {
                p.values()
                    .iter()
                    .zip(&m)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        stats::mean(&devs)
    }
}

/// A random functional `v -> max_j (<a_j, v> + b_j)` with `|a_j|_1 = 1`,
/// hence 1-Lipschitz for the sup norm on node vectors.
struct MaxAffine {
    slopes: Vec<Vec<(usize, f64)>>,
    intercepts: Vec<f64>,
}

impl MaxAffine {
    fn draw<R: Rng>(rng: &mut R, len: usize, spread: f64) -> Self {
        let pieces = rng.random_range(1..=3usize);
        let mut slopes = Vec::with_capacity(pieces);
        let mut intercepts = Vec::with_capacity(pieces);
        for _ in 0..pieces {
            let choices = [1, 2, 4.min(len), len];
            let k = choices[rng.random_range(0..choices.len())].max(1);
            let idx = sample(rng, len, k);
            let mut w: Vec<(usize, f64)> = idx
                .iter()
                .map(|i| (i, StandardNormal.sample(rng)))
                .collect();
            let l1: f64 = w.iter().map(|(_, x): &(usize, f64)| x.abs()).sum();
            if l1 > 0.0 {
                w.iter_mut().for_each(|(_, x)| *x /= l1);
            }
            slopes.push(w);
            let b: f64 = StandardNormal.sample(rng);
            intercepts.push(if pieces == 1 { 0.0 } else { b * spread });
        }
        Self { slopes, intercepts }
    }

    fn eval(&self, v: &[f64]) -> f64 {
        self.slopes
            .iter()
            .zip(&self.intercepts)
            .map(|(a, b)| a.iter().map(|&(i, w)| w * v[i]).sum::<f64>() + b)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Randomized lower bound on the finite-rank Lipschitz distance: the maximum
/// over `trials` random 1-Lipschitz functionals of the node vector of
/// `|E_a F - E_b F|`. Trial `i` draws from `stream.derive(i)`, so the value is
/// nondecreasing in `trials`.
pub fn finite_rank_gap(
    a: &SamplePathEnsemble,
    b: &SamplePathEnsemble,
    pi: &Partition,
    trials: usize,
    stream: RngStream,
) -> Result<f64> {
    if a.partition() != pi || b.partition() != pi {
        return Err(Error::Parameter(
            "ensembles must be reduced to the nodes of the partition".into(),
        ));
    }
    if a.dim() != b.dim() {
        return Err(Error::UnsupportedDimension {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let len = a.paths[0].values().len();
    let spread = {
        let ma = a.mean_sup_deviation();
        let mb = b.mean_sup_deviation();
        0.5 * (ma + mb) + f64::MIN_POSITIVE
    };
    let mut best = 0.0f64;
    for trial in 0..trials {
        let mut rng = stream.derive(trial as u64).rng();
        let f = MaxAffine::draw(&mut rng, len, spread);
        let ea = a.paths.iter().map(|p| f.eval(p.values())).sum::<f64>() / a.len() as f64;
        let eb = b.paths.iter().map(|p| f.eval(p.values())).sum::<f64>() / b.len() as f64;
        best = best.max((ea - eb).abs());
    }
    Ok(best)
}

/// Exact `|X - Xi_pi X|_inf` for each path.
pub fn interp_errors(paths: &[RcllPath], pi: &Partition) -> Result<Vec<f64>> {
    paths.iter().map(|p| interpolation_gap(p, pi)).collect()
}

/// Mean of [`interp_errors`].
pub fn interp_error_stat(paths: &[RcllPath], pi: &Partition) -> Result<f64> {
    if paths.is_empty() {
        return Err(Error::Parameter(
            "interp_error_stat needs at least one path".into(),
        ));
    }
    Ok(stats::mean(&interp_errors(paths, pi)?))
}
