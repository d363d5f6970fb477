//! Empirical surrogates for Wasserstein-type distances and log-log rate fits.

mod ensemble;
mod rate;
mod w1;

pub use ensemble::{
    finite_rank_gap, interp_error_stat, interp_errors, Provenance, SamplePathEnsemble,
};
pub use rate::{fit_means, fit_rate, RateFit, RateSample};
pub use w1::marginal_w1;
