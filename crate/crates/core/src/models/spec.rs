use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Fluid-form rate `r_k(t, x)`.
pub type RateFn = Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;
/// Vector-valued function of `(t, x)`; used for the drift vectors `L_k`.
pub type VecFn = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;

/// One Poisson-driven jump channel.
#[derive(Clone)]
pub struct Channel {
    pub name: String,
    pub zeta: Vec<f64>,
    /// Scaling exponent as stated for the model. The simulator only uses the
    /// pre-limit intensity `n r_k`, so this is descriptive.
    pub alpha: f64,
    pub rate: RateFn,
    /// Upper bound of `r_k` over `[0, T]` and the reachable states; the
    /// dominating Poisson stream has intensity `n * rate_bound`.
    pub rate_bound: f64,
    pub lipschitz: f64,
    /// `L_k(t, x) = ∇_x r_k(t, x)`, evaluated along the fluid limit.
    pub gradient: VecFn,
}

impl fmt::Debug for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Channel")
            .field("name", &self.name)
            .field("zeta", &self.zeta)
            .field("alpha", &self.alpha)
            .field("rate_bound", &self.rate_bound)
            .field("lipschitz", &self.lipschitz)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateDomain {
    Unbounded,
    /// Coordinatewise bounds.
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    /// `x_i >= 0` and `Σ x_i <= 1`.
    Simplex,
}

impl StateDomain {
    pub fn contains(&self, x: &[f64], slack: f64) -> bool {
        match self {
            StateDomain::Unbounded => x.iter().all(|v| v.is_finite()),
            StateDomain::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(v, (lo, hi))| *v >= lo - slack && *v <= hi + slack),
            StateDomain::Simplex => {
                x.iter().all(|v| *v >= -slack) && x.iter().sum::<f64>() <= 1.0 + slack
            }
        }
    }
}

/// `(n, Λ(0)) -> X̄_n(0)`.
pub type InitialSampler = Arc<dyn Fn(u64, &[f64]) -> Vec<f64> + Send + Sync>;

/// Law of `X̄_n(0)`.
#[derive(Clone)]
pub enum InitialLaw {
    /// `round(n Λ(0)) / n`, coordinatewise.
    Rounded,
    Custom(InitialSampler),
}

impl fmt::Debug for InitialLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialLaw::Rounded => write!(f, "Rounded"),
            InitialLaw::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl InitialLaw {
    pub fn sample(&self, n: u64, x0: &[f64]) -> Vec<f64> {
        match self {
            InitialLaw::Rounded => {
                let nf = n as f64;
                x0.iter().map(|v| (nf * v).round() / nf).collect()
            }
            InitialLaw::Custom(f) => f(n, x0),
        }
    }
}

/// Remainder `E_{n,k}` of the linearisation `r_k(y) - r_k(x) = <L_k, y - x> + E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Residual {
    /// Affine rates: the remainder vanishes.
    Zero,
    /// `-(y - x)^2` for `x (1 - x)`.
    NegSquare,
    /// `λ (y_s - x_s)(y_i - x_i)` for `λ s i`.
    Product(f64),
}

impl Residual {
    /// Remainder at `(x, y)` for the channel it is attached to.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            Residual::Zero => 0.0,
            Residual::NegSquare => -(y[0] - x[0]).powi(2),
            Residual::Product(lambda) => lambda * (y[0] - x[0]) * (y[1] - x[1]),
        }
    }
}

/// A density-dependent chain `X̄_n` with jumps `zeta_k / n` at rates `n r_k`.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub id: String,
    pub dim: usize,
    pub channels: Vec<Channel>,
    /// `Λ(0)`.
    pub x0: Vec<f64>,
    pub domain: StateDomain,
    /// Apply the Skorokhod reflection to the free process (M/M/1).
    pub reflect: bool,
    pub initial_law: InitialLaw,
    /// Per-channel linearisation remainders.
    pub residuals: Vec<Residual>,
    /// Named parameters, for reports.
    pub params: Vec<(String, f64)>,
}

impl ModelSpec {
    pub fn channels(&self) -> usize {
        self.channels.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.x0.len() != self.dim {
            return Err(Error::Parameter(format!(
                "{}: initial value must have dimension {}",
                self.id, self.dim
            )));
        }
        if self.channels.is_empty() {
            return Err(Error::Parameter(format!(
                "{}: a model needs at least one channel",
                self.id
            )));
        }
        if self.residuals.len() != self.channels.len() {
            return Err(Error::Parameter(format!(
                "{}: one residual per channel",
                self.id
            )));
        }
        for c in &self.channels {
            if c.zeta.len() != self.dim {
                return Err(Error::Parameter(format!(
                    "{}: channel {} has a jump of the wrong dimension",
                    self.id, c.name
                )));
            }
            if !(c.rate_bound.is_finite() && c.rate_bound >= 0.0) {
                return Err(Error::Parameter(format!(
                    "{}: channel {} needs a finite rate bound",
                    self.id, c.name
                )));
            }
        }
        if !self.domain.contains(&self.x0, 0.0) {
            return Err(Error::Domain(format!(
                "{}: initial value {:?} outside the state domain",
                self.id, self.x0
            )));
        }
        Ok(())
    }

    /// `Σ_k r_k(t, x) zeta_k`.
    pub fn drift(&self, t: f64, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for c in &self.channels {
            let r = (c.rate)(t, x);
            for (o, z) in out.iter_mut().zip(&c.zeta) {
                *o += r * z;
            }
        }
        out
    }

    /// `A(t) = Σ_k zeta_k L_k(t, x)^T` at the state `x`.
    pub fn drift_matrix(&self, t: f64, x: &[f64]) -> DMatrix<f64> {
        let d = self.dim;
        let mut a = DMatrix::zeros(d, d);
        for c in &self.channels {
            let l = (c.gradient)(t, x);
            for i in 0..d {
                for j in 0..d {
                    a[(i, j)] += c.zeta[i] * l[j];
                }
            }
        }
        a
    }

    pub fn zeta_norm(&self, k: usize) -> f64 {
        self.channels[k]
            .zeta
            .iter()
            .map(|z| z * z)
            .sum::<f64>()
            .sqrt()
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}
