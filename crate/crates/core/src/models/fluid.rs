use super::spec::ModelSpec;
use crate::error::{Error, Result};
use crate::paths::{sko_reflect, GridPath, Partition};

const DOMAIN_SLACK: f64 = 1e-9;

/// Classical fourth-order Runge-Kutta solution of `Λ' = Σ_k r_k(t, Λ) zeta_k`
/// with step `T / G`, without reflection.
pub fn free_fluid(spec: &ModelSpec, horizon: f64, grid: usize) -> Result<GridPath> {
    let pi = Partition::uniform(horizon, grid)?;
    let d = spec.dim;
    let h = horizon / grid as f64;
    let mut values = Vec::with_capacity((grid + 1) * d);
    let mut y = spec.x0.clone();
    values.extend_from_slice(&y);
    let axpy = |y: &[f64], a: f64, k: &[f64]| -> Vec<f64> {
        y.iter().zip(k).map(|(u, v)| u + a * v).collect()
    };
    for (j, &t) in pi.times()[..grid].iter().enumerate() {
        let k1 = spec.drift(t, &y);
        let k2 = spec.drift(t + 0.5 * h, &axpy(&y, 0.5 * h, &k1));
        let k3 = spec.drift(t + 0.5 * h, &axpy(&y, 0.5 * h, &k2));
        let k4 = spec.drift(t + h, &axpy(&y, h, &k3));
        for i in 0..d {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if !spec.domain.contains(&y, DOMAIN_SLACK) {
            return Err(Error::DomainEscape {
                t: pi.times()[j + 1],
                state: y,
            });
        }
        values.extend_from_slice(&y);
    }
    GridPath::new(pi, d, values)
}

/// Fluid limit `Λ`; for reflected models this is the reflection of the free
/// solution.
pub fn fluid_limit(spec: &ModelSpec, horizon: f64, grid: usize) -> Result<GridPath> {
    let free = free_fluid(spec, horizon, grid)?;
    if spec.reflect {
        sko_reflect(&free)
    } else {
        Ok(free)
    }
}
