use std::sync::Arc;

use super::spec::{Channel, InitialLaw, ModelSpec, RateFn, Residual, StateDomain, VecFn};
use crate::error::{check_positive, Error, Result};

fn rate<F: Fn(f64, &[f64]) -> f64 + Send + Sync + 'static>(f: F) -> RateFn {
    Arc::new(f)
}

fn grad<F: Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static>(f: F) -> VecFn {
    Arc::new(f)
}

fn channel(
    name: &str,
    zeta: Vec<f64>,
    alpha: f64,
    r: RateFn,
    bound: f64,
    lipschitz: f64,
    g: VecFn,
) -> Channel {
    Channel {
        name: name.into(),
        zeta,
        alpha,
        rate: r,
        rate_bound: bound,
        lipschitz,
        gradient: g,
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Parameter(format!(
            "{name} must lie in [0, 1], got {v}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelegraphParams {
    pub sigma0: f64,
    pub sigma1: f64,
    pub lambda0: f64,
}

impl Default for TelegraphParams {
    fn default() -> Self {
        Self {
            sigma0: 1.0,
            sigma1: 2.0,
            lambda0: 0.2,
        }
    }
}

/// `n` independent two-state sources; `X̄_n` is the fraction switched on.
pub fn telegraph(p: TelegraphParams) -> Result<ModelSpec> {
    check_positive("sigma0", p.sigma0)?;
    check_positive("sigma1", p.sigma1)?;
    check_unit("lambda0", p.lambda0)?;
    let TelegraphParams {
        sigma0: s0,
        sigma1: s1,
        lambda0,
    } = p;
    let spec = ModelSpec {
        id: "telegraph".into(),
        dim: 1,
        channels: vec![
            channel(
                "on",
                vec![1.0],
                0.0,
                rate(move |_, x| s0 * (1.0 - x[0])),
                s0,
                s0,
                grad(move |_, _| vec![-s0]),
            ),
            channel(
                "off",
                vec![-1.0],
                0.0,
                rate(move |_, x| s1 * x[0]),
                s1,
                s1,
                grad(move |_, _| vec![s1]),
            ),
        ],
        x0: vec![lambda0],
        domain: StateDomain::Box {
            lower: vec![0.0],
            upper: vec![1.0],
        },
        reflect: false,
        initial_law: InitialLaw::Rounded,
        residuals: vec![Residual::Zero; 2],
        params: vec![
            ("sigma0".into(), s0),
            ("sigma1".into(), s1),
            ("lambda0".into(), lambda0),
        ],
    };
    spec.validate()?;
    Ok(spec)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmInftyParams {
    pub lambda: f64,
    pub mu: f64,
    pub lambda0: f64,
    /// State cap used for the service-channel rate bound `mu * x_max`.
    pub x_max: f64,
}

impl Default for MmInftyParams {
    fn default() -> Self {
        Self {
            lambda: 2.0,
            mu: 1.0,
            lambda0: 0.5,
            x_max: 4.0,
        }
    }
}

/// Infinite-server queue with arrival rate `n λ` and per-customer service rate `μ`.
pub fn mm_infty(p: MmInftyParams) -> Result<ModelSpec> {
    check_positive("lambda", p.lambda)?;
    check_positive("mu", p.mu)?;
    check_positive("x_max", p.x_max)?;
    if !(p.lambda0 >= 0.0 && p.lambda0 <= p.x_max) {
        return Err(Error::Parameter(format!(
            "lambda0 must lie in [0, x_max], got {}",
            p.lambda0
        )));
    }
    let MmInftyParams {
        lambda,
        mu,
        lambda0,
        x_max,
    } = p;
    let spec = ModelSpec {
        id: "mm-infty".into(),
        dim: 1,
        channels: vec![
            channel(
                "arrival",
                vec![1.0],
                1.0,
                rate(move |_, _| lambda),
                lambda,
                0.0,
                grad(|_, _| vec![0.0]),
            ),
            channel(
                "service",
                vec![-1.0],
                1.0,
                rate(move |_, x| mu * x[0]),
                mu * x_max,
                mu,
                grad(move |_, _| vec![mu]),
            ),
        ],
        x0: vec![lambda0],
        domain: StateDomain::Box {
            lower: vec![0.0],
            upper: vec![x_max],
        },
        reflect: false,
        initial_law: InitialLaw::Rounded,
        residuals: vec![Residual::Zero; 2],
        params: vec![
            ("lambda".into(), lambda),
            ("mu".into(), mu),
            ("lambda0".into(), lambda0),
            ("x_max".into(), x_max),
        ],
    };
    spec.validate()?;
    Ok(spec)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mm1Params {
    pub lambda: f64,
    pub mu: f64,
    pub x: f64,
}

impl Default for Mm1Params {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            mu: 1.0,
            x: 0.0,
        }
    }
}

/// Single-server queue, described by its free process (constant rates); the
/// queue itself is the Skorokhod reflection of that process.
pub fn mm1(p: Mm1Params) -> Result<ModelSpec> {
    check_positive("lambda", p.lambda)?;
    check_positive("mu", p.mu)?;
    if !(p.x >= 0.0 && p.x.is_finite()) {
        return Err(Error::Parameter(format!(
            "x must be nonnegative, got {}",
            p.x
        )));
    }
    let Mm1Params { lambda, mu, x } = p;
    let spec = ModelSpec {
        id: "mm1".into(),
        dim: 1,
        channels: vec![
            channel(
                "arrival",
                vec![1.0],
                1.0,
                rate(move |_, _| lambda),
                lambda,
                0.0,
                grad(|_, _| vec![0.0]),
            ),
            channel(
                "service",
                vec![-1.0],
                1.0,
                rate(move |_, _| mu),
                mu,
                0.0,
                grad(|_, _| vec![0.0]),
            ),
        ],
        x0: vec![x],
        domain: StateDomain::Unbounded,
        reflect: true,
        initial_law: InitialLaw::Rounded,
        residuals: vec![Residual::Zero; 2],
        params: vec![
            ("lambda".into(), lambda),
            ("mu".into(), mu),
            ("x".into(), x),
        ],
    };
    spec.validate()?;
    Ok(spec)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirParams {
    pub lambda: f64,
    pub gamma: f64,
    pub s0: f64,
    pub i0: f64,
}

impl Default for SirParams {
    fn default() -> Self {
        Self {
            lambda: 2.0,
            gamma: 1.0,
            s0: 0.9,
            i0: 0.1,
        }
    }
}

/// Epidemic on the complete graph; state `(s, i)`.
pub fn sir(p: SirParams) -> Result<ModelSpec> {
    check_positive("lambda", p.lambda)?;
    check_positive("gamma", p.gamma)?;
    check_unit("s0", p.s0)?;
    check_unit("i0", p.i0)?;
    if p.s0 + p.i0 > 1.0 {
        return Err(Error::Parameter(format!(
            "s0 + i0 must not exceed 1, got {}",
            p.s0 + p.i0
        )));
    }
    let SirParams {
        lambda,
        gamma,
        s0,
        i0,
    } = p;
    let spec = ModelSpec {
        id: "sir".into(),
        dim: 2,
        channels: vec![
            // s i <= 1/4 on the simplex
            channel(
                "infection",
                vec![-1.0, 1.0],
                1.0,
                rate(move |_, x| lambda * x[0] * x[1]),
                lambda / 4.0,
                2.0 * lambda,
                grad(move |_, x| vec![lambda * x[1], lambda * x[0]]),
            ),
            channel(
                "recovery",
                vec![0.0, -1.0],
                1.0,
                rate(move |_, x| gamma * x[1]),
                gamma,
                gamma,
                grad(move |_, _| vec![0.0, gamma]),
            ),
        ],
        x0: vec![s0, i0],
        domain: StateDomain::Simplex,
        reflect: false,
        initial_law: InitialLaw::Rounded,
        residuals: vec![Residual::Product(lambda), Residual::Zero],
        params: vec![
            ("lambda".into(), lambda),
            ("gamma".into(), gamma),
            ("s0".into(), s0),
            ("i0".into(), i0),
        ],
    };
    spec.validate()?;
    Ok(spec)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoranParams {
    pub nu1: f64,
    pub nu2: f64,
    pub lambda0: f64,
}

impl Default for MoranParams {
    fn default() -> Self {
        Self {
            nu1: 0.5,
            nu2: 1.0,
            lambda0: 0.3,
        }
    }
}

/// Two-allele Moran model with mutation; `X̄_n` is the frequency of allele A.
pub fn moran(p: MoranParams) -> Result<ModelSpec> {
    check_positive("nu1", p.nu1)?;
    check_positive("nu2", p.nu2)?;
    check_unit("lambda0", p.lambda0)?;
    let MoranParams { nu1, nu2, lambda0 } = p;
    let het = |x: &[f64]| x[0] * (1.0 - x[0]);
    let het_grad = grad(|_, x| vec![1.0 - 2.0 * x[0]]);
    let spec = ModelSpec {
        id: "moran".into(),
        dim: 1,
        channels: vec![
            channel(
                "birth-a",
                vec![1.0],
                -1.0,
                rate(move |_, x| het(x)),
                0.25,
                1.0,
                het_grad.clone(),
            ),
            channel(
                "birth-b",
                vec![-1.0],
                -1.0,
                rate(move |_, x| het(x)),
                0.25,
                1.0,
                het_grad,
            ),
            channel(
                "mutation-ba",
                vec![1.0],
                -1.0,
                rate(move |_, x| nu2 * (1.0 - x[0])),
                nu2,
                nu2,
                grad(move |_, _| vec![-nu2]),
            ),
            channel(
                "mutation-ab",
                vec![-1.0],
                -1.0,
                rate(move |_, x| nu1 * x[0]),
                nu1,
                nu1,
                grad(move |_, _| vec![nu1]),
            ),
        ],
        x0: vec![lambda0],
        domain: StateDomain::Box {
            lower: vec![0.0],
            upper: vec![1.0],
        },
        reflect: false,
        initial_law: InitialLaw::Rounded,
        residuals: vec![
            Residual::NegSquare,
            Residual::NegSquare,
            Residual::Zero,
            Residual::Zero,
        ],
        params: vec![
            ("nu1".into(), nu1),
            ("nu2".into(), nu2),
            ("lambda0".into(), lambda0),
        ],
    };
    spec.validate()?;
    Ok(spec)
}

/// The five builtin chains with default parameters.
pub fn builtin_specs() -> Vec<ModelSpec> {
    vec![
        telegraph(TelegraphParams::default()).expect("default telegraph parameters are valid"),
        mm_infty(MmInftyParams::default()).expect("default M/M/inf parameters are valid"),
        mm1(Mm1Params::default()).expect("default M/M/1 parameters are valid"),
        sir(SirParams::default()).expect("default SIR parameters are valid"),
        moran(MoranParams::default()).expect("default Moran parameters are valid"),
    ]
}
