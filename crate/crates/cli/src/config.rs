use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::catalog::{self, Model};

/// The only config schema this build understands.
pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_GRID: usize = 4096;
pub const DEFAULT_BOOTSTRAP: usize = 200;
pub const DEFAULT_RESIDUAL_RUNS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    LlnRate,
    FcltMarginal,
    InterpBound,
    CouplingRate,
    HawkesLimit,
    PoissonMaxBound,
    OperatorLipschitz,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::LlnRate,
        Kind::FcltMarginal,
        Kind::InterpBound,
        Kind::CouplingRate,
        Kind::HawkesLimit,
        Kind::PoissonMaxBound,
        Kind::OperatorLipschitz,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::LlnRate => "lln-rate",
            Kind::FcltMarginal => "fclt-marginal",
            Kind::InterpBound => "interp-bound",
            Kind::CouplingRate => "coupling-rate",
            Kind::HawkesLimit => "hawkes-limit",
            Kind::PoissonMaxBound => "poisson-max-bound",
            Kind::OperatorLipschitz => "operator-lipschitz",
        }
    }

    fn uses_n(self) -> bool {
        self != Kind::OperatorLipschitz
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub id: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub n: Vec<u64>,
    #[serde(default = "default_horizon", alias = "T")]
    pub horizon: f64,
    pub replications: usize,
    #[serde(default = "default_grid")]
    pub grid: usize,
    pub seed: u64,
    /// Output directory; excluded from the config hash.
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
    #[serde(default = "default_true")]
    pub plot: bool,
    /// Limit-sampler draws for `fclt-marginal`; defaults to `replications`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_draws: Option<usize>,
    /// Poisson means for `poisson-max-bound`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nu: Vec<f64>,
    /// Runs per `n` on which `hawkes-limit` evaluates the representation residual.
    #[serde(default = "default_residual_runs")]
    pub residual_runs: usize,
}

fn default_horizon() -> f64 {
    1.0
}
fn default_grid() -> usize {
    DEFAULT_GRID
}
fn default_bootstrap() -> usize {
    DEFAULT_BOOTSTRAP
}
fn default_true() -> bool {
    true
}
fn default_residual_runs() -> usize {
    DEFAULT_RESIDUAL_RUNS
}

/// A config problem, located at a line of the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// A config that passed validation, with its model built.
#[derive(Debug, Clone)]
pub struct ValidConfig {
    pub config: ExperimentConfig,
    pub model: Option<Model>,
}

impl ValidConfig {
    pub fn limit_draws(&self) -> usize {
        self.config.limit_draws.unwrap_or(self.config.replications)
    }

    pub fn model_id(&self) -> &str {
        self.model.as_ref().map_or("none", Model::id)
    }
}

impl ExperimentConfig {
    /// Parses and validates a JSON config; `seed` overrides the config seed.
    pub fn parse(src: &str, seed: Option<u64>) -> Result<ValidConfig, ConfigError> {
        let mut cfg: ExperimentConfig = serde_json::from_str(src).map_err(|e| ConfigError {
            line: e.line().max(1),
            message: e.to_string(),
        })?;
        if let Some(s) = seed {
            cfg.seed = s;
        }
        cfg.validate(src)
    }

    /// Canonical JSON of the effective config, the input to the config hash.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(self, src: &str) -> Result<ValidConfig, ConfigError> {
        let err = |key: &str, message: String| ConfigError {
            line: line_of(src, key),
            message,
        };
        if self.schema_version != SCHEMA_VERSION {
            return Err(err(
                "schema_version",
                format!(
                    "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }
        if self.replications == 0 {
            return Err(err(
                "replications",
                "replications must be at least 1".into(),
            ));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            let key = if src.contains("\"T\"") {
                "T"
            } else {
                "horizon"
            };
            return Err(err(
                key,
                format!("horizon must be positive and finite, got {}", self.horizon),
            ));
        }
        if self.grid < 2 {
            return Err(err(
                "grid",
                format!("grid must have at least 2 cells, got {}", self.grid),
            ));
        }
        if self.bootstrap == 0 {
            return Err(err("bootstrap", "bootstrap must be at least 1".into()));
        }
        if self.limit_draws == Some(0) {
            return Err(err("limit_draws", "limit_draws must be at least 1".into()));
        }
        if self.kind.uses_n() {
            if self.n.is_empty() {
                return Err(err("n", format!("{} needs a nonempty n list", self.kind)));
            }
            let min_n = match self.kind {
                Kind::InterpBound | Kind::PoissonMaxBound => 2,
                _ => 1,
            };
            if let Some(&bad) = self.n.iter().find(|&&n| n < min_n) {
                return Err(err(
                    "n",
                    format!("n values must be at least {min_n}, got {bad}"),
                ));
            }
            if self.n.windows(2).any(|w| w[1] <= w[0]) {
                return Err(err("n", "n list must be strictly increasing".into()));
            }
        }
        if self.kind == Kind::PoissonMaxBound {
            if self.nu.is_empty() {
                return Err(err(
                    "nu",
                    "poisson-max-bound needs a nonempty nu list".into(),
                ));
            }
            if let Some(bad) = self.nu.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(err(
                    "nu",
                    format!("nu values must be positive and finite, got {bad}"),
                ));
            }
        }

        let model = match &self.model {
            None => None,
            Some(m) => Some(catalog::build(&m.id, &m.params).map_err(|e| {
                let key = e.param.as_deref().unwrap_or("id");
                err(key, e.message)
            })?),
        };
        let model = match (self.kind, model) {
            (Kind::LlnRate | Kind::FcltMarginal | Kind::CouplingRate, None) => {
                return Err(err("kind", format!("{} needs a model", self.kind)));
            }
            (
                Kind::LlnRate | Kind::FcltMarginal | Kind::CouplingRate | Kind::InterpBound,
                Some(Model::Hawkes(_)),
            ) => {
                return Err(err(
                    "model",
                    format!("{} needs a Markov chain model, not hawkes", self.kind),
                ));
            }
            (Kind::HawkesLimit, None) => {
                Some(catalog::build("hawkes", &BTreeMap::new()).expect("hawkes defaults are valid"))
            }
            (Kind::HawkesLimit, Some(Model::Chain(_))) => {
                return Err(err("model", "hawkes-limit needs the hawkes model".into()));
            }
            (Kind::PoissonMaxBound | Kind::OperatorLipschitz, Some(_)) => {
                return Err(err("model", format!("{} takes no model", self.kind)));
            }
            (_, m) => m,
        };
        Ok(ValidConfig {
            config: self,
            model,
        })
    }
}

/// First line mentioning `"key"` as an object key, or 1.
fn line_of(src: &str, key: &str) -> usize {
    let quoted = format!("\"{key}\"");
    for (i, line) in src.lines().enumerate() {
        if let Some(pos) = line.find(&quoted) {
            if line[pos + quoted.len()..].trim_start().starts_with(':') {
                return i + 1;
            }
        }
    }
    1
}
