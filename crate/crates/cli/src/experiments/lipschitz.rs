use nalgebra::DMatrix;
use poisdiff::measures::StreamRng;
use poisdiff::paths::{
    local_time, modulus, running_max, sko_reflect, spectral_norm, sup_distance,
    theta_lipschitz_constant, GridPath, Partition, ThetaPlan, TimeChange,
};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{context, replicate, stream, ExperimentResult, REPLICATIONS};
use crate::config::ValidConfig;
use crate::output::{fmt_f64, Table};

/// Absolute slack allowed on top of `constant * ‖f - g‖`.
pub const SLACK: f64 = 1e-9;

pub const OPERATORS: [(&str, &str); 6] = [
    ("running-max", "1"),
    ("local-time", "1"),
    ("time-change", "1"),
    ("skorokhod", "2"),
    ("modulus", "2"),
    ("theta", "1 + |A| T exp(|A| T)"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzRow {
    pub operator: &'static str,
    pub constant: &'static str,
    pub pairs: usize,
    /// Largest `‖Φ f - Φ g‖ / (constant ‖f - g‖)` seen.
    pub max_ratio: f64,
    pub violations: usize,
}

#[derive(Debug, Clone)]
pub struct LipschitzOutcome {
    pub rows: Vec<LipschitzRow>,
}

impl LipschitzOutcome {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["operator", "constant", "pairs", "max_ratio", "violations"]);
        for r in &self.rows {
            t.push(vec![
                r.operator.to_string(),
                r.constant.to_string(),
                r.pairs.to_string(),
                fmt_f64(r.max_ratio),
                r.violations.to_string(),
            ]);
        }
        t
    }

    pub fn violations(&self) -> usize {
        self.rows.iter().map(|r| r.violations).sum()
    }
}

fn normal(rng: &mut StreamRng) -> f64 {
    StandardNormal.sample(rng)
}

/// Random walk with occasional jumps, at a random amplitude.
fn random_path(rng: &mut StreamRng, pi: &Partition, dim: usize) -> poisdiff::Result<GridPath> {
    let scale = 10f64.powf(rng.random_range(-1.0..1.0));
    let step = scale / (pi.cells() as f64).sqrt();
    let mut values = Vec::with_capacity(pi.len() * dim);
    let mut x: Vec<f64> = (0..dim).map(|_| scale * normal(rng)).collect();
    for _ in 0..pi.len() {
        for xi in x.iter_mut() {
            *xi += step * normal(rng);
            if rng.random_bool(0.02) {
                *xi += scale * normal(rng);
            }
        }
        values.extend_from_slice(&x);
    }
    GridPath::new(pi.clone(), dim, values)
}

/// A second path: independent, a small perturbation, or a constant shift.
fn partner(rng: &mut StreamRng, f: &GridPath) -> poisdiff::Result<GridPath> {
    let dim = f.dim();
    match rng.random_range(0..3) {
        0 => random_path(rng, f.partition(), dim),
        1 => {
            let eps = 10f64.powf(rng.random_range(-4.0..0.0));
            let noise = random_path(rng, f.partition(), dim)?;
            f.lin_comb(1.0, &noise, eps)
        }
        _ => {
            let c = normal(rng);
            Ok(f.map(|v| v + c))
        }
    }
}

/// `(‖Φ f - Φ g‖, constant * ‖f - g‖)` for every operator, in `OPERATORS` order.
fn one_pair(rng: &mut StreamRng, cells: usize, horizon: f64) -> poisdiff::Result<Vec<(f64, f64)>> {
    let pi = Partition::uniform(horizon, cells)?;
    let f = random_path(rng, &pi, 1)?;
    let g = partner(rng, &f)?;
    let d = sup_distance(&f, &g)?;
    let mut out = Vec::with_capacity(OPERATORS.len());
    out.push((sup_distance(&running_max(&f), &running_max(&g))?, d));
    out.push((sup_distance(&local_time(&f)?, &local_time(&g)?)?, d));

    // Γ: f ∘ γ with a nonnegative rate bounded by 2, so paths live on [0, 2T]
    let wide = Partition::uniform(2.0 * horizon, 2 * cells)?;
    let fw = random_path(rng, &wide, 1)?;
    let gw = partner(rng, &fw)?;
    let rates: Vec<f64> = (0..pi.len()).map(|_| rng.random_range(0.0..2.0)).collect();
    let tc = TimeChange::from_rate_values(&pi, &rates)?;
    out.push((
        sup_distance(&tc.apply(&fw)?, &tc.apply(&gw)?)?,
        sup_distance(&fw, &gw)?,
    ));

    out.push((sup_distance(&sko_reflect(&f)?, &sko_reflect(&g)?)?, 2.0 * d));
    let eps = rng.random_range(0.0..0.5) * horizon + horizon / cells as f64;
    out.push(((modulus(&f, eps)? - modulus(&g, eps)?).abs(), 2.0 * d));

    let amp = rng.random_range(0.0..1.5);
    let a = random_matrix(rng, amp);
    let plan = ThetaPlan::constant(&pi, &a)?;
    let f2 = random_path(rng, &pi, 2)?;
    let g2 = partner(rng, &f2)?;
    let c = theta_lipschitz_constant(spectral_norm(&a), horizon);
    out.push((
        sup_distance(&plan.apply(&f2)?, &plan.apply(&g2)?)?,
        c * sup_distance(&f2, &g2)?,
    ));
    Ok(out)
}

fn random_matrix(rng: &mut StreamRng, amp: f64) -> DMatrix<f64> {
    DMatrix::from_fn(2, 2, |_, _| amp * normal(rng))
}

/// Checks the Lipschitz constants of the path operators on random pairs;
/// `replications` is the number of pairs and `grid` the number of cells.
pub(crate) fn operator_lipschitz(cfg: &ValidConfig) -> ExperimentResult<LipschitzOutcome> {
    let (cells, horizon) = (cfg.config.grid, cfg.config.horizon);
    let base = stream(cfg, REPLICATIONS);
    let pairs = replicate(cfg.config.replications, |r| {
        one_pair(&mut base.derive(r).rng(), cells, horizon)
    });
    let pairs = context(pairs, || "operator-lipschitz".into())?;
    let rows = OPERATORS
        .iter()
        .enumerate()
        .map(|(k, &(operator, constant))| {
            let mut max_ratio = 0.0f64;
            let mut violations = 0;
            for p in &pairs {
                let (lhs, rhs) = p[k];
                if rhs > 0.0 {
                    max_ratio = max_ratio.max(lhs / rhs);
                }
                if lhs > rhs + SLACK {
                    violations += 1;
                }
            }
            LipschitzRow {
                operator,
                constant,
                pairs: pairs.len(),
                max_ratio,
                violations,
            }
        })
        .collect();
    Ok(LipschitzOutcome { rows })
}
