use std::sync::Arc;

use super::simulate::{deviation_path, ScaledRun};
use crate::error::{Error, Result};
use crate::paths::{sko_reflect, GridPath};

/// Reflected version of a free M/M/1 run: `Sko(X̄_n)`, `Λ = Sko(Γ)` and `U_n`
/// recomputed against the reflected fluid path.
pub fn mm1_reflected(run: &ScaledRun) -> Result<ScaledRun> {
    if run.xbar.dim() != 1 {
        return Err(Error::UnsupportedDimension {
            expected: 1,
            got: run.xbar.dim(),
        });
    }
    let xbar = sko_reflect(&run.xbar)?;
    let lambda = Arc::new(sko_reflect(run.lambda.as_ref())?);
    let u = deviation_path(run.n, &xbar, &lambda)?;
    Ok(ScaledRun {
        n: run.n,
        xbar,
        lambda,
        u,
        zeta: run.zeta.clone(),
        channels: run.channels.clone(),
        martingales: run.martingales.clone(),
    })
}

/// Limit of `√n (Sko(Γ + z/√n) - Sko(Γ))`: the directional derivative of the
/// reflection map at the free fluid path `Γ` in direction `z`.
///
/// With `m(s) = max(0, sup_{u<=s} -Γ(u))`, the correction at `s` is the
/// largest `-z(u)` over the times `u <= s` attaining `m(s)`, where the constant
/// `0` competes as long as `m(s) = 0`. When `Γ ≡ 0` this is `Sko(z)`.
pub fn reflect_limit(gamma: &GridPath, z: &GridPath) -> Result<GridPath> {
    if gamma.dim() != 1 || z.dim() != 1 {
        return Err(Error::UnsupportedDimension {
            expected: 1,
            got: gamma.dim().max(z.dim()),
        });
    }
    if gamma.partition() != z.partition() {
        return Err(Error::Parameter(
            "fluid path and direction live on different grids".into(),
        ));
    }
    let scale = gamma.values().iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let tol = 1e-12 * scale;
    let mut m = 0.0f64;
    let mut corr = 0.0f64;
    let values = gamma
        .values()
        .iter()
        .zip(z.values())
        .map(|(&g, &zv)| {
            let v = -g;
            if v > m + tol {
                m = v;
                corr = -zv;
            } else if v >= m - tol {
                corr = corr.max(-zv);
            }
            zv + corr
        })
        .collect();
    GridPath::new(gamma.partition().clone(), 1, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::Partition;

    #[test]
    fn critical_case_is_plain_reflection() {
        let pi = Partition::uniform(1.0, 100).unwrap();
        let gamma = GridPath::zeros(pi.clone(), 1).unwrap();
        let z = GridPath::scalar_fn(pi, |t| (9.0 * t).sin() - t).unwrap();
        assert_eq!(reflect_limit(&gamma, &z).unwrap(), sko_reflect(&z).unwrap());
    }

    #[test]
    fn positive_drift_never_binds_and_negative_drift_pins_to_zero() {
        let pi = Partition::uniform(1.0, 100).unwrap();
        let z = GridPath::scalar_fn(pi.clone(), |t| (9.0 * t).sin() - t).unwrap();
        let up = GridPath::scalar_fn(pi.clone(), |t| 0.5 + t).unwrap();
        assert_eq!(reflect_limit(&up, &z).unwrap(), z);
        let down = GridPath::scalar_fn(pi, |t| -t).unwrap();
        let r = reflect_limit(&down, &z).unwrap();
        assert!(r.values().iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn matches_finite_difference_of_reflection() {
        // Γ hits zero at t = 0.5 and then drifts down
        let pi = Partition::uniform(1.0, 200).unwrap();
        let gamma = GridPath::scalar_fn(pi.clone(), |t| 0.5 - t).unwrap();
        let z = GridPath::scalar_fn(pi, |t| (5.0 * t).cos() - 1.0 + 0.3 * t).unwrap();
        let eps = 1e-7;
        let fd = sko_reflect(&gamma.lin_comb(1.0, &z, eps).unwrap())
            .unwrap()
            .lin_comb(1.0 / eps, &sko_reflect(&gamma).unwrap(), -1.0 / eps)
            .unwrap();
        let d = reflect_limit(&gamma, &z).unwrap();
        for (a, b) in fd.values().iter().zip(d.values()) {
            assert!((a - b).abs() < 1e-5, "{a} vs {b}");
        }
    }
}
