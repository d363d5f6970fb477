use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::kernel::HawkesKernel;
use crate::error::{Error, Result};

/// Truncation tolerance for the series `Σ_k φ^{(k)}`.
const SERIES_TOL: f64 = 1e-8;

/// Trapezoid rule for `(f * g)(t_i) = ∫_0^{t_i} f(s) g(t_i - s) ds` on a
/// uniform grid of step `h`, for every node at once (FFT).
pub fn trapezoid_convolution(f: &[f64], g: &[f64], h: f64) -> Vec<f64> {
    let n = f.len().min(g.len());
    if n == 0 {
        return Vec::new();
    }
    let size = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut fa: Vec<Complex<f64>> = (0..size)
        .map(|i| Complex::new(if i < n { f[i] } else { 0.0 }, 0.0))
        .collect();
    let mut ga: Vec<Complex<f64>> = (0..size)
        .map(|i| Complex::new(if i < n { g[i] } else { 0.0 }, 0.0))
        .collect();
    fwd.process(&mut fa);
    fwd.process(&mut ga);
    for (x, y) in fa.iter_mut().zip(&ga) {
        *x *= y;
    }
    inv.process(&mut fa);
    let scale = h / size as f64;
    (0..n)
        .map(|i| fa[i].re * scale - 0.5 * h * (f[0] * g[i] + f[i] * g[0]))
        .collect()
}

fn grid_of(kernel: &HawkesKernel, t_max: f64, grid: usize) -> (f64, Vec<f64>) {
    let h = t_max / grid as f64;
    (h, (0..=grid).map(|i| kernel.phi(i as f64 * h)).collect())
}

/// `φ^{(k)}` on the uniform grid of `grid` cells over `[0, t_max]`.
pub fn convolution_power(kernel: &HawkesKernel, k: usize, t_max: f64, grid: usize) -> Vec<f64> {
    let (h, phi) = grid_of(kernel, t_max, grid);
    if k == 0 {
        return vec![0.0; phi.len()];
    }
    let mut cur = phi.clone();
    for _ in 1..k {
        cur = trapezoid_convolution(&cur, &phi, h);
    }
    cur
}

/// Smallest `K` with `κ^{K+1} / (1 - κ) <= tol`.
fn truncation(kappa: f64, tol: f64) -> usize {
    if kappa <= 0.0 {
        return 1;
    }
    let mut k = 1usize;
    while kappa.powi(k as i32 + 1) / (1.0 - kappa) > tol && k < 10_000 {
        k += 1;
    }
    k
}

/// Partial sums `Σ_{k=1}^{terms} φ^{(k)}` on the grid.
pub fn psi_series_terms(kernel: &HawkesKernel, terms: usize, t_max: f64, grid: usize) -> Vec<f64> {
    let (h, phi) = grid_of(kernel, t_max, grid);
    let mut cur = phi.clone();
    let mut acc = phi.clone();
    for _ in 1..terms {
        cur = trapezoid_convolution(&cur, &phi, h);
        for (a, c) in acc.iter_mut().zip(&cur) {
            *a += c;
        }
    }
    acc
}

/// Truncated series for `ψ` on the grid, with the truncation `K` such that
/// `κ^{K+1} / (1 - κ) <= 1e-8`.
pub fn psi_series(kernel: &HawkesKernel, t_max: f64, grid: usize) -> Result<(Vec<f64>, usize)> {
    kernel.check_stable()?;
    if !(t_max > 0.0 && grid > 0) {
        return Err(Error::Parameter(
            "psi_series needs t_max > 0 and grid >= 1".into(),
        ));
    }
    let k = truncation(kernel.kappa(), SERIES_TOL);
    Ok((psi_series_terms(kernel, k, t_max, grid), k))
}

/// The resolvent `ψ = Σ_{k>=1} φ^{(k)}`.
#[derive(Debug, Clone, PartialEq)]
pub enum PsiKernel {
    Zero,
    /// `ψ(t) = a e^{-c t}` with `c = b - a`, for `φ(t) = a e^{-b t}`.
    Exponential {
        a: f64,
        c: f64,
    },
    /// Truncated series on `[0, h * (len - 1)]`, zero beyond.
    Grid {
        h: f64,
        values: Vec<f64>,
        cumulative: Vec<f64>,
        terms: usize,
    },
}

impl PsiKernel {
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match self {
            PsiKernel::Zero => 0.0,
            PsiKernel::Exponential { a, c } => a * (-c * t).exp(),
            PsiKernel::Grid { h, values, .. } => lerp(values, *h, t),
        }
    }

    /// `∫_0^t ψ`.
    pub fn integral(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            PsiKernel::Zero => 0.0,
            PsiKernel::Exponential { a, c } => a / c * -(-c * t).exp_m1(),
            PsiKernel::Grid { h, cumulative, .. } => {
                let last = (cumulative.len() - 1) as f64 * h;
                if t >= last {
                    cumulative[cumulative.len() - 1]
                } else {
                    lerp(cumulative, *h, t)
                }
            }
        }
    }

    /// `∫_t^∞ ψ`.
    pub fn tail(&self, t: f64) -> f64 {
        match self {
            PsiKernel::Zero => 0.0,
            PsiKernel::Exponential { a, c } => a / c * (-c * t.max(0.0)).exp(),
            PsiKernel::Grid { .. } => (self.integral(f64::INFINITY) - self.integral(t)).max(0.0),
        }
    }
}

fn lerp(values: &[f64], h: f64, t: f64) -> f64 {
    let x = t / h;
    let i = x.floor() as usize;
    if i + 1 >= values.len() {
        return if i + 1 == values.len() {
            values[i]
        } else {
            0.0
        };
    }
    let w = x - i as f64;
    values[i] + w * (values[i + 1] - values[i])
}

/// Closed form for a single exponential, truncated series otherwise.
pub fn psi_kernel(kernel: &HawkesKernel) -> Result<PsiKernel> {
    kernel.check_stable()?;
    if kernel.is_zero() {
        return Ok(PsiKernel::Zero);
    }
    let live: Vec<(f64, f64)> = kernel
        .weights()
        .iter()
        .zip(kernel.rates())
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| (*a, *b))
        .collect();
    if live.len() == 1 {
        let (a, b) = live[0];
        return Ok(PsiKernel::Exponential { a, c: b - a });
    }
    // ψ decays at least like exp(-(1 - κ) min b t)
    let kappa = kernel.kappa();
    let slowest = live.iter().map(|p| p.1).fold(f64::INFINITY, f64::min) * (1.0 - kappa);
    let t_max = 40.0 / slowest;
    let grid = 1 << 16;
    let (values, terms) = psi_series(kernel, t_max, grid)?;
    let h = t_max / grid as f64;
    let mut cumulative = Vec::with_capacity(values.len());
    cumulative.push(0.0);
    for i in 1..values.len() {
        cumulative.push(cumulative[i - 1] + 0.5 * h * (values[i - 1] + values[i]));
    }
    Ok(PsiKernel::Grid {
        h,
        values,
        cumulative,
        terms,
    })
}
