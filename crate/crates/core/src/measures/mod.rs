//! Random streams, marked Poisson measures and analytic bound functions.

mod bounds;
mod poisson;
mod rng;

pub use bounds::{
    lambert_w0, poisson_max_bound, poisson_max_bound_exp_form, poisson_max_bound_loglog, psi_bound,
};
pub use poisson::{sample_poisson_measure, sample_poisson_measure_with, MarkedPoissonSample};
pub use rng::{RngStream, StreamRng};
