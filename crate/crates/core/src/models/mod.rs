//! Density-dependent Markov chains driven by Poisson measures.
//!
//! A [`ModelSpec`] lists the jump channels of `X̄_n`: each channel jumps by
//! `zeta_k / n` at intensity `n r_k(t, X̄_n)`. From a spec we build the fluid
//! limit `Λ`, simulate `X̄_n` exactly by thinning, sample the diffusion limit
//! `Θ_A(Σ_k (B_k ∘ γ_k) zeta_k)` and track the coupled martingales that compare
//! the chain with its fluid limit.

mod builtin;
mod fluid;
mod limit;
mod mm1;
mod simulate;
mod spec;

pub use builtin::{
    builtin_specs, mm1, mm_infty, moran, sir, telegraph, Mm1Params, MmInftyParams, MoranParams,
    SirParams, TelegraphParams,
};
pub use fluid::{fluid_limit, free_fluid};
pub use limit::{sample_limit, LimitSampler};
pub use mm1::{mm1_reflected, reflect_limit};
pub use simulate::{
    coupling_gap, simulate_scaled, ChannelStats, MartingaleTrace, ScaledRun, Simulator,
};
pub use spec::{
    Channel, InitialLaw, InitialSampler, ModelSpec, RateFn, Residual, StateDomain, VecFn,
};
