use std::collections::BTreeMap;

use poisdiff::hawkes::HawkesKernel;
use poisdiff::models::{
    mm1, mm_infty, moran, sir, telegraph, Mm1Params, MmInftyParams, ModelSpec, MoranParams,
    SirParams, TelegraphParams,
};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSchema {
    pub name: &'static str,
    pub symbol: &'static str,
    pub default: f64,
    pub domain: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub class: &'static str,
    pub dim: usize,
    pub source: &'static str,
    pub params: Vec<ParamSchema>,
}

fn p(name: &'static str, symbol: &'static str, default: f64, domain: &'static str) -> ParamSchema {
    ParamSchema {
        name,
        symbol,
        default,
        domain,
    }
}

/// The builtin models with their parameter schemas.
pub fn list_models() -> Vec<CatalogEntry> {
    let t = TelegraphParams::default();
    let q = MmInftyParams::default();
    let m = Mm1Params::default();
    let s = SirParams::default();
    let w = MoranParams::default();
    let h = HawkesParams::default();
    vec![
        CatalogEntry {
            id: "telegraph",
            class: "chain",
            dim: 1,
            source: "n independent on/off sources; fraction switched on",
            params: vec![
                p("sigma0", "σ_0", t.sigma0, "> 0"),
                p("sigma1", "σ_1", t.sigma1, "> 0"),
                p("lambda0", "Λ(0)", t.lambda0, "[0, 1]"),
            ],
        },
        CatalogEntry {
            id: "mm-infty",
            class: "chain",
            dim: 1,
            source: "infinite-server queue with arrival rate nλ and service rate μ per customer",
            params: vec![
                p("lambda", "λ", q.lambda, "> 0"),
                p("mu", "μ", q.mu, "> 0"),
                p("lambda0", "Λ(0)", q.lambda0, "[0, x_max]"),
                p(
                    "x_max",
                    "x_max",
                    q.x_max,
                    "> 0; state cap for the service bound",
                ),
            ],
        },
        CatalogEntry {
            id: "mm1",
            class: "chain",
            dim: 1,
            source: "single-server queue as the Skorokhod reflection of its free process",
            params: vec![
                p("lambda", "λ", m.lambda, "> 0"),
                p("mu", "μ", m.mu, "> 0"),
                p("x", "x", m.x, ">= 0"),
            ],
        },
        CatalogEntry {
            id: "sir",
            class: "chain",
            dim: 2,
            source: "SIR epidemic on the complete graph; state (s, i)",
            params: vec![
                p("lambda", "λ", s.lambda, "> 0"),
                p("gamma", "γ", s.gamma, "> 0"),
                p("s0", "s(0)", s.s0, "[0, 1], s0 + i0 <= 1"),
                p("i0", "i(0)", s.i0, "[0, 1], s0 + i0 <= 1"),
            ],
        },
        CatalogEntry {
            id: "moran",
            class: "chain",
            dim: 1,
            source: "two-allele Moran model with mutation; frequency of allele A",
            params: vec![
                p("nu1", "ν_1", w.nu1, "> 0"),
                p("nu2", "ν_2", w.nu2, "> 0"),
                p("lambda0", "Λ(0)", w.lambda0, "[0, 1]"),
            ],
        },
        CatalogEntry {
            id: "hawkes",
            class: "hawkes",
            dim: 1,
            source: "linear Hawkes process with kernel φ(t) = α e^{-β t}, rescaled in time by n",
            params: vec![
                p("mu", "μ", h.mu, "> 0"),
                p("alpha", "α", h.alpha, ">= 0, kappa = alpha / beta < 1"),
                p("beta", "β", h.beta, "> 0"),
            ],
        },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HawkesParams {
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for HawkesParams {
    fn default() -> Self {
        Self {
            mu: 1.0,
            alpha: 0.5,
            beta: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HawkesModel {
    pub mu: f64,
    pub kernel: HawkesKernel,
}

#[derive(Debug, Clone)]
pub enum Model {
    Chain(ModelSpec),
    Hawkes(HawkesModel),
}

impl Model {
    pub fn id(&self) -> &str {
        match self {
            Model::Chain(s) => &s.id,
            Model::Hawkes(_) => "hawkes",
        }
    }
}

/// A rejected model description; `param` names the offending key if known.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelError {
    pub param: Option<String>,
    pub message: String,
}

fn set(
    fields: &mut [(&str, &mut f64)],
    id: &str,
    params: &BTreeMap<String, f64>,
) -> Result<(), ModelError> {
    for (key, value) in params {
        let slot = fields
            .iter_mut()
            .find(|(name, _)| name == key)
            .ok_or_else(|| ModelError {
                param: Some(key.clone()),
                message: format!("model {id} has no parameter {key}"),
            })?;
        *slot.1 = *value;
    }
    Ok(())
}

/// Builds a catalog model from its id and parameter overrides.
pub fn build(id: &str, params: &BTreeMap<String, f64>) -> Result<Model, ModelError> {
    // blame the last parameter given when the builder rejects the combination
    let blame = |e: poisdiff::Error| ModelError {
        param: params.keys().last().cloned(),
        message: format!("model {id}: {e}"),
    };
    let spec = match id {
        "telegraph" => {
            let mut v = TelegraphParams::default();
            set(
                &mut [
                    ("sigma0", &mut v.sigma0),
                    ("sigma1", &mut v.sigma1),
                    ("lambda0", &mut v.lambda0),
                ],
                id,
                params,
            )?;
            telegraph(v).map_err(blame)?
        }
        "mm-infty" => {
            let mut v = MmInftyParams::default();
            set(
                &mut [
                    ("lambda", &mut v.lambda),
                    ("mu", &mut v.mu),
                    ("lambda0", &mut v.lambda0),
                    ("x_max", &mut v.x_max),
                ],
                id,
                params,
            )?;
            mm_infty(v).map_err(blame)?
        }
        "mm1" => {
            let mut v = Mm1Params::default();
            set(
                &mut [
                    ("lambda", &mut v.lambda),
                    ("mu", &mut v.mu),
                    ("x", &mut v.x),
                ],
                id,
                params,
            )?;
            mm1(v).map_err(blame)?
        }
        "sir" => {
            let mut v = SirParams::default();
            set(
                &mut [
                    ("lambda", &mut v.lambda),
                    ("gamma", &mut v.gamma),
                    ("s0", &mut v.s0),
                    ("i0", &mut v.i0),
                ],
                id,
                params,
            )?;
            sir(v).map_err(blame)?
        }
        "moran" => {
            let mut v = MoranParams::default();
            set(
                &mut [
                    ("nu1", &mut v.nu1),
                    ("nu2", &mut v.nu2),
                    ("lambda0", &mut v.lambda0),
                ],
                id,
                params,
            )?;
            moran(v).map_err(blame)?
        }
        "hawkes" => {
            let mut v = HawkesParams::default();
            set(
                &mut [
                    ("mu", &mut v.mu),
                    ("alpha", &mut v.alpha),
                    ("beta", &mut v.beta),
                ],
                id,
                params,
            )?;
            if !(v.mu.is_finite() && v.mu > 0.0) {
                return Err(ModelError {
                    param: Some("mu".into()),
                    message: format!("hawkes mu must be positive, got {}", v.mu),
                });
            }
            let kernel = HawkesKernel::exponential(v.alpha, v.beta).map_err(blame)?;
            if kernel.check_stable().is_err() {
                let key = if params.contains_key("alpha") {
                    "alpha"
                } else {
                    "beta"
                };
                return Err(ModelError {
                    param: Some(key.into()),
                    message: format!(
                        "hawkes kernel is unstable: kappa = alpha / beta = {} >= 1",
                        kernel.kappa()
                    ),
                });
            }
            return Ok(Model::Hawkes(HawkesModel { mu: v.mu, kernel }));
        }
        other => {
            return Err(ModelError {
                param: Some("id".into()),
                message: format!("unknown model {other:?}; see list-models"),
            })
        }
    };
    Ok(Model::Chain(spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_entries() {
        let c = list_models();
        assert_eq!(c.len(), 6);
        let ids: Vec<&str> = c.iter().map(|e| e.id).collect();
        assert_eq!(
            ids,
            ["telegraph", "mm-infty", "mm1", "sir", "moran", "hawkes"]
        );
    }

    #[test]
    fn telegraph_parameters() {
        let c = list_models();
        let symbols: Vec<&str> = c[0].params.iter().map(|p| p.symbol).collect();
        assert_eq!(symbols, ["σ_0", "σ_1", "Λ(0)"]);
    }

    #[test]
    fn defaults_build() {
        for e in list_models() {
            let m = build(e.id, &BTreeMap::new()).unwrap();
            assert_eq!(m.id(), e.id);
        }
    }

    #[test]
    fn hawkes_stability_enforced() {
        let params = BTreeMap::from([("alpha".to_string(), 1.0), ("beta".to_string(), 1.0)]);
        let e = build("hawkes", &params).unwrap_err();
        assert!(e.message.contains("kappa"));
        let params = BTreeMap::from([("alpha".to_string(), 0.9)]);
        assert!(build("hawkes", &params).is_ok());
    }

    #[test]
    fn unknown_parameter() {
        let params = BTreeMap::from([("rho".to_string(), 1.0)]);
        assert_eq!(
            build("telegraph", &params).unwrap_err().param.as_deref(),
            Some("rho")
        );
    }
}
