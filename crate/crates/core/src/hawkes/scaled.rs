use super::psi::{psi_kernel, trapezoid_convolution, PsiKernel};
use super::simulate::{compensator_at, HawkesRun};
use crate::error::{Error, Result};
use crate::paths::{GridPath, Partition, RcllPath};

/// Rescaled paths on `[0, T]`: `Ñ(t) = N(n t) / n`, `W̄(t) = (N(n t) - Λ(n t)) / √n`
/// and `X̄(t) = (N(n t) - E N(n t)) / √n`, the last two on a uniform grid.
#[derive(Debug, Clone)]
pub struct HawkesScaledPaths {
    pub n_tilde: RcllPath,
    pub w_bar: GridPath,
    pub x_bar: GridPath,
}

/// `E N(t_i) = μ t_i + μ ∫_0^{t_i} Ψ_1(u) du` at `t_i = i h`, where
/// `Ψ_1 = ∫_0^. ψ` comes from the resolvent and the outer integral is a
/// cumulative trapezoid on the grid. Integrating `ψ` itself by the trapezoid
/// rule would bias the slope of the mean by `O(h^2)` and the bias would grow
/// linearly in `t`.
pub fn mean_count(mu: f64, psi: &PsiKernel, h: f64, grid: usize) -> Vec<f64> {
    let c1: Vec<f64> = (0..=grid).map(|i| psi.integral(i as f64 * h)).collect();
    let mut c2 = 0.0;
    let mut out = Vec::with_capacity(grid + 1);
    out.push(0.0);
    for i in 1..=grid {
        c2 += 0.5 * h * (c1[i - 1] + c1[i]);
        out.push(mu * i as f64 * h + mu * c2);
    }
    out
}

pub fn scaled_paths(run: &HawkesRun, grid: usize) -> Result<HawkesScaledPaths> {
    let psi = psi_kernel(&run.kernel)?;
    scaled_paths_with(run, grid, &psi)
}

pub(crate) fn scaled_paths_with(
    run: &HawkesRun,
    grid: usize,
    psi: &PsiKernel,
) -> Result<HawkesScaledPaths> {
    if grid == 0 {
        return Err(Error::Parameter("grid must have at least one cell".into()));
    }
    let (n, horizon) = (run.n, run.horizon);
    let pi = Partition::uniform(horizon, grid)?;
    let raw_times: Vec<f64> = pi.times().iter().map(|t| n * t).collect();
    let comp = compensator_at(run.mu, &run.kernel, &run.events, &raw_times);
    let mean = mean_count(run.mu, psi, n * horizon / grid as f64, grid);
    let s = n.sqrt();
    let mut w = Vec::with_capacity(grid + 1);
    let mut x = Vec::with_capacity(grid + 1);
    let mut count = 0usize;
    for (i, &rt) in raw_times.iter().enumerate() {
        while count < run.events.len() && run.events[count] <= rt {
            count += 1;
        }
        w.push((count as f64 - comp[i]) / s);
        x.push((count as f64 - mean[i]) / s);
    }

    let mut times: Vec<f64> = Vec::with_capacity(run.events.len());
    let mut values: Vec<Vec<f64>> = Vec::with_capacity(run.events.len());
    for (k, &e) in run.events.iter().enumerate() {
        let t = (e / n).min(horizon);
        let v = vec![(k + 1) as f64 / n];
        if times.last().is_some_and(|&p| t <= p) {
            *values.last_mut().unwrap() = v;
        } else {
            times.push(t);
            values.push(v);
        }
    }
    Ok(HawkesScaledPaths {
        n_tilde: RcllPath::new(vec![0.0], times, values, horizon)?,
        w_bar: GridPath::new(pi.clone(), 1, w)?,
        x_bar: GridPath::new(pi, 1, x)?,
    })
}

/// `max_i |X̄(t_i) - W̄(t_i) - ∫_0^{t_i} n ψ(n s) W̄(t_i - s) ds|` on the grid,
/// the convolution by the trapezoid rule with step `T / G`.
pub fn representation_residual(run: &HawkesRun, grid: usize) -> Result<f64> {
    let psi = psi_kernel(&run.kernel)?;
    let p = scaled_paths_with(run, grid, &psi)?;
    let h = run.horizon / grid as f64;
    let kern: Vec<f64> = (0..=grid)
        .map(|i| run.n * psi.eval(run.n * i as f64 * h))
        .collect();
    let conv = trapezoid_convolution(&kern, p.w_bar.values(), h);
    Ok(p.x_bar
        .values()
        .iter()
        .zip(p.w_bar.values())
        .zip(&conv)
        .map(|((x, w), c)| (x - w - c).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hawkes::HawkesKernel;
    use crate::measures::RngStream;

    #[test]
    fn mean_count_closed_form_for_exponential() {
        // E N(t) = μ t + μ (a / c)(t - (1 - e^{-c t}) / c)
        let k = HawkesKernel::exponential(0.5, 1.0).unwrap();
        let psi = psi_kernel(&k).unwrap();
        let (g, h) = (1 << 12, 20.0 / (1 << 12) as f64);
        let m = mean_count(1.3, &psi, h, g);
        for (i, v) in m.iter().enumerate() {
            let t = i as f64 * h;
            let want = 1.3 * t + 1.3 * (t - (1.0 - (-0.5 * t).exp()) / 0.5);
            assert!((v - want).abs() < 1e-5 * want.max(1.0));
        }
    }

    #[test]
    fn mean_count_stays_unbiased_on_coarse_steps() {
        // h = 0.61 over [0, 10^4]: a trapezoid on ψ itself drifts by ~80 events
        let k = HawkesKernel::exponential(0.5, 1.0).unwrap();
        let psi = psi_kernel(&k).unwrap();
        let g = 1 << 14;
        let m = mean_count(1.0, &psi, 1e4 / g as f64, g);
        let t: f64 = 1e4;
        let want = t + (t - (1.0 - (-0.5 * t).exp()) / 0.5);
        assert!((m[g] - want).abs() < 0.1, "{} vs {want}", m[g]);
    }

    #[test]
    fn poisson_case_has_no_excitation() {
        let run = HawkesRun::simulate(2.0, &HawkesKernel::zero(), 50.0, 1.0, RngStream::new(4, 0))
            .unwrap();
        let p = scaled_paths(&run, 64).unwrap();
        // without excitation the compensated and centred paths coincide
        assert_eq!(p.w_bar, p.x_bar);
        assert_eq!(p.n_tilde.at(1.0)[0], run.events.len() as f64 / 50.0);
        assert!(representation_residual(&run, 64).unwrap() < 1e-12);
    }
}
