use std::sync::Arc;

use rand_distr::{Distribution, StandardNormal};

use super::mm1::reflect_limit;
use super::simulate::Simulator;
use super::spec::ModelSpec;
use crate::error::Result;
use crate::measures::RngStream;
use crate::paths::{GridPath, ThetaPlan, TimeChange};

/// Sampler of the diffusion limit `Θ_A(Σ_k (B_k ∘ γ_k) zeta_k)` with
/// `A(t) = Σ_k zeta_k L_k(t)^T` along the fluid limit.
#[derive(Debug, Clone)]
pub struct LimitSampler {
    reflect: bool,
    fluid: Arc<GridPath>,
    gammas: Vec<TimeChange>,
    zeta: Vec<Vec<f64>>,
    plan: ThetaPlan,
}

impl LimitSampler {
    pub fn new(spec: &ModelSpec, horizon: f64, grid: usize) -> Result<Self> {
        Self::from_simulator(&Simulator::new(spec, horizon, grid)?)
    }

    pub fn from_simulator(sim: &Simulator) -> Result<Self> {
        let spec = sim.spec();
        let fluid = Arc::clone(sim.fluid());
        let f = Arc::clone(&fluid);
        let plan = ThetaPlan::varying(fluid.partition(), |t| spec.drift_matrix(t, &f.eval(t)))?;
        Ok(Self {
            reflect: spec.reflect,
            fluid,
            gammas: sim.time_changes().to_vec(),
            zeta: spec.channels.iter().map(|c| c.zeta.clone()).collect(),
            plan,
        })
    }

    pub fn plan(&self) -> &ThetaPlan {
        &self.plan
    }

    pub fn time_changes(&self) -> &[TimeChange] {
        &self.gammas
    }

    /// `Σ_k B_k(γ_k(t)) zeta_k` on the fluid grid; `B_k` is drawn from
    /// `stream.derive(k)`.
    pub fn pre_theta(&self, stream: RngStream) -> Result<GridPath> {
        let pi = self.fluid.partition();
        let d = self.fluid.dim();
        let mut values = vec![0.0; pi.len() * d];
        for (k, (g, zeta)) in self.gammas.iter().zip(&self.zeta).enumerate() {
            let mut rng = stream.derive(k as u64).rng();
            let gv = g.values();
            let mut b = 0.0;
            for j in 1..pi.len() {
                let z: f64 = StandardNormal.sample(&mut rng);
                b += z * (gv[j] - gv[j - 1]).max(0.0).sqrt();
                for i in 0..d {
                    values[j * d + i] += b * zeta[i];
                }
            }
        }
        GridPath::new(pi.clone(), d, values)
    }

    /// One draw of the limit process (reflected for reflected models).
    pub fn sample(&self, stream: RngStream) -> Result<GridPath> {
        let y = self.plan.apply(&self.pre_theta(stream)?)?;
        if self.reflect {
            reflect_limit(&self.fluid, &y)
        } else {
            Ok(y)
        }
    }
}

/// One draw of the diffusion limit of `spec` on the uniform grid of `grid` cells.
pub fn sample_limit(
    spec: &ModelSpec,
    horizon: f64,
    grid: usize,
    stream: RngStream,
) -> Result<GridPath> {
    LimitSampler::new(spec, horizon, grid)?.sample(stream)
}
