//! Linear Hawkes processes with exponential-sum kernels.
//!
//! The intensity is `μ + Σ_{s_i < t} φ(t - s_i)` with
//! `φ(t) = Σ_j a_j e^{-b_j t}`. Exponential sums keep the intensity a sum of
//! per-term states, so simulation costs O(#terms) per event and the
//! compensator has a closed form. The resolvent `ψ = Σ_k φ^{(k)}` drives the
//! mean `E N(t) = μ t + μ ∫_0^t (t - s) ψ(s) ds` and the representation
//! `X̄ = W̄ + ∫ n ψ(n s) W̄(· - s) ds` of the centred process through the
//! compensated one.

mod kernel;
mod limit;
mod psi;
mod scaled;
mod simulate;

pub use kernel::HawkesKernel;
pub use limit::{
    hawkes_limit_check, psi_tail_integral, HawkesLimitDiagnostics, HawkesMarginalPlan,
    HawkesObservation, VarianceCandidate, MIN_RUNS, TAIL_EPSILON,
};
pub use psi::{
    convolution_power, psi_kernel, psi_series, psi_series_terms, trapezoid_convolution, PsiKernel,
};
pub use scaled::{mean_count, representation_residual, scaled_paths, HawkesScaledPaths};
pub use simulate::{
    compensator_at, simulate_hawkes, simulate_hawkes_traced, HawkesRun, HawkesTrace,
};
