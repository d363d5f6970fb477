//! One runner per experiment kind. Each replication draws from its own
//! stream, `RngStream::new(seed, purpose).derive(n).derive(replication)`, and
//! results are gathered in replication order, so the output does not depend
//! on the number of worker threads.

mod chain;
mod hawkes;
mod lipschitz;
mod poisson_max;

use std::fmt;

use poisdiff::distance::RateFit;
use poisdiff::measures::RngStream;
use rayon::prelude::*;

use crate::config::{Kind, ValidConfig};
use crate::output::{Plot, Table};

pub use chain::{
    CouplingOutcome, FcltOutcome, FcltRow, InterpOutcome, InterpRow, LlnOutcome, RateRow,
};
pub use hawkes::{HawkesOutcome, HawkesRow};
pub use lipschitz::{LipschitzOutcome, LipschitzRow};
pub use poisson_max::{PoissonMaxOutcome, PoissonMaxRow};

/// Stream purposes under the master seed.
pub(crate) const REPLICATIONS: u64 = 0;
pub(crate) const LIMIT_DRAWS: u64 = 1;
pub(crate) const BOOTSTRAP: u64 = 2;
pub(crate) const REFERENCE: u64 = 3;

/// A model error raised while running an experiment, with its context.
#[derive(Debug)]
pub struct ExperimentError {
    pub context: String,
    pub source: poisdiff::Error,
}

impl fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.context, self.source)
    }
}

impl std::error::Error for ExperimentError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

pub type ExperimentResult<T> = Result<T, ExperimentError>;

pub(crate) fn context<T>(
    r: poisdiff::Result<T>,
    what: impl FnOnce() -> String,
) -> ExperimentResult<T> {
    r.map_err(|source| ExperimentError {
        context: what(),
        source,
    })
}

pub(crate) fn stream(cfg: &ValidConfig, purpose: u64) -> RngStream {
    RngStream::new(cfg.config.seed, purpose)
}

/// Runs `f(r)` for `r < reps` on the current rayon pool, in replication order.
pub(crate) fn replicate<T, F>(reps: usize, f: F) -> poisdiff::Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> poisdiff::Result<T> + Sync + Send,
{
    (0..reps as u64).into_par_iter().map(f).collect()
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Lln(LlnOutcome),
    Fclt(FcltOutcome),
    Interp(InterpOutcome),
    Coupling(CouplingOutcome),
    Hawkes(HawkesOutcome),
    PoissonMax(PoissonMaxOutcome),
    Lipschitz(LipschitzOutcome),
}

impl Outcome {
    pub fn table(&self) -> Table {
        match self {
            Outcome::Lln(o) => o.table(),
            Outcome::Fclt(o) => o.table(),
            Outcome::Interp(o) => o.table(),
            Outcome::Coupling(o) => o.table(),
            Outcome::Hawkes(o) => o.table(),
            Outcome::PoissonMax(o) => o.table(),
            Outcome::Lipschitz(o) => o.table(),
        }
    }

    pub fn rate_fit(&self) -> Option<&RateFit> {
        match self {
            Outcome::Lln(o) => o.fit.as_ref(),
            Outcome::Interp(o) => o.fit.as_ref(),
            Outcome::Coupling(o) => o.fit.as_ref(),
            _ => None,
        }
    }

    pub fn plot(&self) -> Option<Plot> {
        match self {
            Outcome::Lln(o) => Some(o.plot()),
            Outcome::Interp(o) => Some(o.plot()),
            Outcome::Coupling(o) => Some(o.plot()),
            Outcome::Hawkes(o) => Some(o.plot()),
            _ => None,
        }
    }

    /// Kind-specific JSON written next to the summary, as `(file name, body)`.
    pub fn details(&self) -> Option<(&'static str, serde_json::Value)> {
        match self {
            Outcome::Hawkes(o) => Some((
                "hawkes_diagnostics.json",
                serde_json::to_value(&o.diagnostics).ok()?,
            )),
            _ => None,
        }
    }
}

/// Runs the experiment described by a validated config on the current pool.
pub fn run(cfg: &ValidConfig) -> ExperimentResult<Outcome> {
    Ok(match cfg.config.kind {
        Kind::LlnRate => Outcome::Lln(chain::lln_rate(cfg)?),
        Kind::FcltMarginal => Outcome::Fclt(chain::fclt_marginal(cfg)?),
        Kind::InterpBound => Outcome::Interp(chain::interp_bound(cfg)?),
        Kind::CouplingRate => Outcome::Coupling(chain::coupling_rate(cfg)?),
        Kind::HawkesLimit => Outcome::Hawkes(hawkes::hawkes_limit(cfg)?),
        Kind::PoissonMaxBound => Outcome::PoissonMax(poisson_max::poisson_max(cfg)?),
        Kind::OperatorLipschitz => Outcome::Lipschitz(lipschitz::operator_lipschitz(cfg)?),
    })
}

/// `(mean, standard error)` of replicated values.
pub(crate) fn summarize(values: &[f64]) -> (f64, f64) {
    let mean = poisdiff::stats::mean(values);
    let se = if values.len() > 1 {
        poisdiff::stats::std_err(values)
    } else {
        f64::NAN
    };
    (mean, se)
}
