use std::f64::consts::E;

use crate::error::{Error, Result};

/// Interpolation-error scale `log(n e^{x/n}) / log(n x^{-1} log(n e^{x/n}))`.
///
/// `n` is the number of partition cells and `x` the dominating Poisson mass
/// per cell. Inputs outside the regime where both logarithms are positive are
/// reported as domain errors, never clamped.
pub fn psi_bound(n: u64, x: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("psi_bound needs n >= 2, got {n}")));
    }
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!("psi_bound needs x > 0, got {x}")));
    }
    let nf = n as f64;
    // log(n e^{x/n}) without forming e^{x/n}
    let numerator = nf.ln() + x / nf;
    let inner_arg = nf / x * numerator;
    if inner_arg.is_nan() || inner_arg <= 1.0 {
        return Err(Error::Domain(format!(
            "psi_bound: inner log argument {inner_arg} <= 1 for n = {n}, x = {x}"
        )));
    }
    Ok(numerator / inner_arg.ln())
}

const BRANCH_POINT: f64 = -1.0 / E;

/// Principal branch of the Lambert W function on `[-1/e, inf)`.
///
/// Halley iteration started from a branch-point series near `-1/e`, a Padé
/// style guess around the origin and the asymptotic expansion for large `z`.
pub fn lambert_w0(z: f64) -> Result<f64> {
    if z.is_nan() || z < BRANCH_POINT {
        return Err(Error::Domain(format!(
            "lambert_w0 defined for z >= -1/e, got {z}"
        )));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == BRANCH_POINT {
        return Ok(-1.0);
    }
    if z.is_infinite() {
        return Ok(f64::INFINITY);
    }

    let mut w = initial_guess(z);
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        if wp1.abs() < f64::EPSILON {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

fn initial_guess(z: f64) -> f64 {
    if z < -0.25 {
        let p = (2.0 * (E * z + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if z < 3.0 {
        // W(z) ~ z (1 + 4/3 z) / (1 + 7/3 z + 5/6 z^2) near the origin
        z * (1.0 + 4.0 / 3.0 * z) / (1.0 + 7.0 / 3.0 * z + 5.0 / 6.0 * z * z)
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

fn poisson_max_argument(n: u64, nu: f64) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "poisson_max_bound needs n >= 2, got {n}"
        )));
    }
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::Domain(format!(
            "poisson_max_bound needs nu > 0, got {nu}"
        )));
    }
    let log_ratio = (n as f64).ln() - nu;
    if log_ratio.is_nan() || log_ratio <= 0.0 {
        return Err(Error::Domain(format!(
            "poisson_max_bound needs log n > nu, got log {n} <= {nu}"
        )));
    }
    Ok((log_ratio, log_ratio / (nu * E)))
}

/// Upper bound on `E[max_i X_i]` for `n` Poisson(`nu`) variables:
/// `log(n e^{-nu}) / W(log(n e^{-nu}) / (nu e))`.
pub fn poisson_max_bound(n: u64, nu: f64) -> Result<f64> {
    let (log_ratio, arg) = poisson_max_argument(n, nu)?;
    Ok(log_ratio / lambert_w0(arg)?)
}

/// The same bound written as `nu e exp(W(log(n e^{-nu}) / (nu e)))`.
pub fn poisson_max_bound_exp_form(n: u64, nu: f64) -> Result<f64> {
    let (_, arg) = poisson_max_argument(n, nu)?;
    Ok(nu * E * lambert_w0(arg)?.exp())
}

/// Closed-form simplification `log(n e^{-nu}) / log(log(n e^{-nu}) / (nu e))`,
/// meaningful once `n >= exp(e^{nu+1} + nu)`.
pub fn poisson_max_bound_loglog(n: u64, nu: f64) -> Result<f64> {
    let (log_ratio, arg) = poisson_max_argument(n, nu)?;
    if arg.is_nan() || arg <= 1.0 {
        return Err(Error::Domain(format!(
            "log-log form needs log(n e^-nu)/(nu e) > 1, got {arg}"
        )));
    }
    Ok(log_ratio / arg.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_matches_high_precision_values() {
        // frozen from a 50-digit evaluation of the same formula
        let cases = [
            (100, 1.0, 0.752_327_972_034_324_9),
            (1_000_000, 10.0, 0.977_140_958_399_114_8),
            (100, 2.0, 0.849_662_799_926_972_4),
            (1000, 0.5, 0.724_620_405_282_800_8),
        ];
        for (n, x, want) in cases {
            let got = psi_bound(n, x).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-12,
                "psi({n},{x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn psi_domain_errors() {
        assert!(psi_bound(1, 1.0).is_err());
        assert!(psi_bound(10, 0.0).is_err());
        assert!(psi_bound(10, -1.0).is_err());
        // the inner argument is 1 + n log(n) / x, which rounds to 1 for huge x
        assert!(psi_bound(2, 1e300).is_err());
    }

    #[test]
    fn psi_positive_and_increasing_in_x() {
        for &n in &[2u64, 10, 100, 10_000, 1_000_000] {
            let mut prev = 0.0;
            for k in 0..60 {
                let x = 1e-3 * 1.25f64.powi(k);
                match psi_bound(n, x) {
                    Ok(v) => {
                        assert!(v > 0.0);
                        assert!(v >= prev, "n = {n}, x = {x}: {v} < {prev}");
                        prev = v;
                    }
                    Err(_) => break,
                }
            }
        }
    }

    #[test]
    fn lambert_special_values() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(E).unwrap() - 1.0).abs() < 1e-15);
        assert!((lambert_w0(1.0).unwrap() - 0.567_143_290_409_783_8).abs() < 1e-15);
        assert_eq!(lambert_w0(-1.0 / E).unwrap(), -1.0);
        assert!(lambert_w0(-0.5).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
    }

    #[test]
    fn lambert_omega_constant_by_newton() {
        // independent Newton iteration on w e^w = 1
        let mut w = 0.5f64;
        for _ in 0..50 {
            w -= (w * w.exp() - 1.0) / (w.exp() * (w + 1.0));
        }
        assert!((lambert_w0(1.0).unwrap() - w).abs() < 1e-15);
    }

    #[test]
    fn lambert_residual_on_log_grid() {
        let mut zs = vec![BRANCH_POINT + 1e-9];
        for k in 0..=400 {
            let frac = k as f64 / 400.0;
            zs.push(BRANCH_POINT + 1e-9 * (1e9f64 * (-BRANCH_POINT)).powf(frac));
        }
        for k in 0..=600 {
            zs.push(10f64.powf(-8.0 + 16.0 * k as f64 / 600.0));
        }
        for z in zs {
            let w = lambert_w0(z).unwrap();
            assert!(w >= -1.0);
            let residual = (w * w.exp() - z).abs();
            assert!(
                residual <= 1e-12 * z.abs().max(1.0),
                "z = {z}: residual {residual}"
            );
        }
    }

    #[test]
    fn poisson_bound_forms_agree() {
        let a = poisson_max_bound(10_000, 2.0).unwrap();
        let b = poisson_max_bound_exp_form(10_000, 2.0).unwrap();
        assert!(((a - b) / a).abs() < 1e-10);
        // 50-digit reference value
        assert!((a - 10.679_361_506_403_493).abs() < 1e-11);
        for &n in &[100u64, 1000, 10_000, 1_000_000] {
            for &nu in &[0.5, 1.0, 2.0, 5.0] {
                if let Ok(a) = poisson_max_bound(n, nu) {
                    let b = poisson_max_bound_exp_form(n, nu).unwrap();
                    assert!(((a - b) / a).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn poisson_bound_preconditions() {
        assert!(poisson_max_bound(1, 1.0).is_err());
        assert!(poisson_max_bound(100, 0.0).is_err());
        assert!(poisson_max_bound(100, 5.0).is_err());
        assert!(poisson_max_bound_loglog(100, 1.0).is_ok());
    }

    #[test]
    fn lambert_bound_sits_above_loglog_form() {
        // W(a) <= log a for a >= e, so the Lambert form is the weaker of the two
        for &(n, nu) in &[
            (1000u64, 0.5),
            (10_000, 0.5),
            (10_000, 1.0),
            (10_000_000_000, 2.0),
        ] {
            let threshold = ((nu + 1.0f64).exp() + nu).exp();
            assert!(n as f64 >= threshold);
            let lambert = poisson_max_bound(n, nu).unwrap();
            let loglog = poisson_max_bound_loglog(n, nu).unwrap();
            assert!(loglog <= lambert);
        }
    }
}
