use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::fluid::free_fluid;
use super::spec::ModelSpec;
use crate::error::{Error, Result};
use crate::measures::{RngStream, StreamRng};
use crate::paths::{sup_distance, GridPath, RcllPath, RcllPathBuilder, TimeChange};

/// Default number of fluid-grid cells.
pub const DEFAULT_GRID: usize = 1 << 12;

/// Per-channel event bookkeeping of one run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChannelStats {
    /// Events of the dominating stream.
    pub candidates: u64,
    /// Events accepted against `r_k(s, X̄_n(s-))`.
    pub accepted: u64,
    /// Events accepted against `r_k(s, Λ(s))`, same marks.
    pub accepted_lambda: u64,
    /// `∫_0^T r_k(s, X̄_n(s)) ds`.
    pub compensator: f64,
    /// `γ_k(T) = ∫_0^T r_k(s, Λ(s)) ds`.
    pub lambda_compensator: f64,
}

/// Unscaled coupled martingales `M_{n,k,X̄}` and `M_{n,k,Λ}` on a common mesh:
/// the fluid grid plus both one-sided values at every event accepted by
/// either threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleTrace {
    pub channels: usize,
    pub times: Vec<f64>,
    /// Row-major `times.len() x channels`.
    pub xbar: Vec<f64>,
    pub lambda: Vec<f64>,
}

impl MartingaleTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn row_xbar(&self, i: usize) -> &[f64] {
        &self.xbar[i * self.channels..(i + 1) * self.channels]
    }

    pub fn row_lambda(&self, i: usize) -> &[f64] {
        &self.lambda[i * self.channels..(i + 1) * self.channels]
    }

    pub fn final_xbar(&self) -> &[f64] {
        self.row_xbar(self.len() - 1)
    }

    pub fn final_lambda(&self) -> &[f64] {
        self.row_lambda(self.len() - 1)
    }
}

/// One realisation of `X̄_n` with its fluid limit and scaled deviation.
#[derive(Debug, Clone)]
pub struct ScaledRun {
    pub n: u64,
    pub xbar: RcllPath,
    pub lambda: Arc<GridPath>,
    /// `U_n = √n (X̄_n - Λ)`, recorded at the jump times of `X̄_n`.
    pub u: RcllPath,
    pub zeta: Vec<Vec<f64>>,
    pub channels: Vec<ChannelStats>,
    pub martingales: Option<MartingaleTrace>,
}

impl ScaledRun {
    /// `√n (X̄_n(t) - Λ(t))`.
    pub fn u_at(&self, t: f64) -> Vec<f64> {
        let s = (self.n as f64).sqrt();
        let l = self.lambda.eval(t);
        self.xbar
            .at(t)
            .iter()
            .zip(&l)
            .map(|(x, y)| s * (x - y))
            .collect()
    }

    /// `sup_{t <= T} |X̄_n(t) - Λ(t)|`, exact against the grid representation of `Λ`.
    pub fn sup_error(&self) -> Result<f64> {
        sup_distance(&self.xbar, self.lambda.as_ref())
    }
}

pub(crate) fn deviation_path(n: u64, xbar: &RcllPath, lambda: &GridPath) -> Result<RcllPath> {
    let s = (n as f64).sqrt();
    let d = xbar.dim();
    let dev = |t: f64, x: &[f64]| -> Vec<f64> {
        let l = lambda.eval(t);
        (0..d).map(|i| s * (x[i] - l[i])).collect()
    };
    let mut b =
        RcllPathBuilder::with_capacity(dev(0.0, xbar.initial()), xbar.horizon(), xbar.num_jumps())?;
    for (i, &t) in xbar.jump_times().iter().enumerate() {
        b.push(t, &dev(t, xbar.piece(i + 1)))?;
    }
    Ok(b.finish())
}

/// Cached fluid limit and time changes for repeated simulation of one model.
#[derive(Debug, Clone)]
pub struct Simulator {
    spec: ModelSpec,
    horizon: f64,
    fluid: Arc<GridPath>,
    gammas: Vec<TimeChange>,
}

impl Simulator {
    pub fn new(spec: &ModelSpec, horizon: f64, grid: usize) -> Result<Self> {
        spec.validate()?;
        let fluid = free_fluid(spec, horizon, grid)?;
        let gammas = spec
            .channels
            .iter()
            .map(|c| {
                let rates: Vec<f64> = fluid
                    .times()
                    .iter()
                    .enumerate()
                    .map(|(i, &t)| (c.rate)(t, fluid.node(i)))
                    .collect();
                TimeChange::from_rate_values(fluid.partition(), &rates)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            spec: spec.clone(),
            horizon,
            fluid: Arc::new(fluid),
            gammas,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Fluid limit of the free process (not reflected).
    pub fn fluid(&self) -> &Arc<GridPath> {
        &self.fluid
    }

    /// `γ_k(t) = ∫_0^t r_k(s, Λ(s)) ds` per channel.
    pub fn time_changes(&self) -> &[TimeChange] {
        &self.gammas
    }

    /// Exact thinning simulation of `X̄_n` on `[0, T]`. Channel `k` draws its
    /// dominating stream from `stream.derive(k)`.
    pub fn simulate(
        &self,
        n: u64,
        stream: RngStream,
        track_martingales: bool,
    ) -> Result<ScaledRun> {
        if n == 0 {
            return Err(Error::Parameter("scale n must be at least 1".into()));
        }
        let spec = &self.spec;
        let m = spec.channels.len();
        let d = spec.dim;
        let nf = n as f64;
        let horizon = self.horizon;

        let mut x = spec.initial_law.sample(n, &spec.x0);
        if x.len() != d {
            return Err(Error::UnsupportedDimension {
                expected: d,
                got: x.len(),
            });
        }
        let mut path = RcllPathBuilder::new(x.clone(), horizon)?;

        struct Stream {
            rng: StreamRng,
            exp: Option<Exp<f64>>,
            next: f64,
        }
        let mut streams: Vec<Stream> = spec
            .channels
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let mut rng = stream.derive(k as u64).rng();
                let intensity = nf * c.rate_bound;
                let exp = if intensity > 0.0 {
                    Exp::new(intensity).ok()
                } else {
                    None
                };
                let next = exp.map_or(f64::INFINITY, |e| e.sample(&mut rng));
                Stream { rng, exp, next }
            })
            .collect();

        let mut stats = vec![ChannelStats::default(); m];
        let mut trace = track_martingales.then(|| MartingaleTrace {
            channels: m,
            times: Vec::new(),
            xbar: Vec::new(),
            lambda: Vec::new(),
        });
        let grid_times = self.fluid.times();
        let mut next_node = 0usize;
        let mut cursor = 0.0f64;
        let mut lam = vec![0.0; d];

        // compensator integrals over [a, b] at the frozen state x (Simpson in time)
        let integrate = |stats: &mut [ChannelStats], x: &[f64], a: f64, b: f64| {
            if b <= a {
                return;
            }
            let mid = 0.5 * (a + b);
            for (s, c) in stats.iter_mut().zip(&spec.channels) {
                let v = (c.rate)(a, x) + 4.0 * (c.rate)(mid, x) + (c.rate)(b, x);
                s.compensator += (b - a) / 6.0 * v;
            }
        };
        let record = |trace: &mut Option<MartingaleTrace>, stats: &[ChannelStats], t: f64| {
            if let Some(tr) = trace.as_mut() {
                tr.times.push(t);
                for (k, s) in stats.iter().enumerate() {
                    tr.xbar.push(s.accepted as f64 - nf * s.compensator);
                    tr.lambda
                        .push(s.accepted_lambda as f64 - nf * self.gammas[k].gamma(t));
                }
            }
        };

        loop {
            let (k, t) =
                streams
                    .iter()
                    .enumerate()
                    .fold((usize::MAX, f64::INFINITY), |acc, (k, s)| {
                        if s.next < acc.1 {
                            (k, s.next)
                        } else {
                            acc
                        }
                    });
            let t_stop = t.min(horizon);
            while next_node < grid_times.len() && grid_times[next_node] <= t_stop {
                let tn = grid_times[next_node];
                integrate(&mut stats, &x, cursor, tn);
                cursor = tn;
                record(&mut trace, &stats, tn);
                next_node += 1;
            }
            if t > horizon {
                break;
            }
            integrate(&mut stats, &x, cursor, t);
            cursor = t;

            let c = &spec.channels[k];
            let st = &mut streams[k];
            let z = st.rng.random::<f64>() * c.rate_bound;
            st.next += st.exp.expect("finite intensity").sample(&mut st.rng);
            stats[k].candidates += 1;

            let rx = (c.rate)(t, &x);
            if !(rx.is_finite() && rx >= 0.0) {
                return Err(Error::Rate {
                    channel: k,
                    name: c.name.clone(),
                    value: rx,
                    state: x,
                });
            }
            if rx > c.rate_bound * (1.0 + 1e-12) {
                return Err(Error::BoundExceeded {
                    channel: k,
                    name: c.name.clone(),
                    bound: c.rate_bound,
                    value: rx,
                    state: x,
                });
            }
            let acc_x = z < rx;
            let acc_l = if trace.is_some() {
                self.fluid.eval_into(t, &mut lam);
                z < (c.rate)(t, &lam)
            } else {
                false
            };
            if acc_x || acc_l {
                record(&mut trace, &stats, t);
            }
            if acc_x {
                stats[k].accepted += 1;
                for (xi, zi) in x.iter_mut().zip(&c.zeta) {
                    *xi += zi / nf;
                }
                path.push(t, &x)?;
            }
            if acc_l {
                stats[k].accepted_lambda += 1;
            }
            if acc_x || acc_l {
                record(&mut trace, &stats, t);
            }
        }
        for (s, g) in stats.iter_mut().zip(&self.gammas) {
            s.lambda_compensator = g.total();
        }
        let xbar = path.finish();
        let u = deviation_path(n, &xbar, &self.fluid)?;
        Ok(ScaledRun {
            n,
            xbar,
            lambda: Arc::clone(&self.fluid),
            u,
            zeta: spec.channels.iter().map(|c| c.zeta.clone()).collect(),
            channels: stats,
            martingales: trace,
        })
    }
}

/// One run of `X̄_n` on `[0, T]` with the default fluid grid and martingale
/// tracking.
pub fn simulate_scaled(
    spec: &ModelSpec,
    n: u64,
    horizon: f64,
    stream: RngStream,
) -> Result<ScaledRun> {
    Simulator::new(spec, horizon, DEFAULT_GRID)?.simulate(n, stream, true)
}

/// `sup_t |Σ_k zeta_k (M_{n,k,X̄}(t) - M_{n,k,Λ}(t))| / √n` over the trace mesh.
pub fn coupling_gap(run: &ScaledRun) -> Result<f64> {
    let tr = run
        .martingales
        .as_ref()
        .ok_or_else(|| Error::Parameter("run was simulated without martingale tracking".into()))?;
    let d = run.xbar.dim();
    let s = (run.n as f64).sqrt();
    let mut best = 0.0f64;
    let mut v = vec![0.0; d];
    for i in 0..tr.len() {
        v.iter_mut().for_each(|e| *e = 0.0);
        for (k, (a, b)) in tr.row_xbar(i).iter().zip(tr.row_lambda(i)).enumerate() {
            for (vj, zj) in v.iter_mut().zip(&run.zeta[k]) {
                *vj += zj * (a - b);
            }
        }
        best = best.max(v.iter().map(|e| e * e).sum::<f64>().sqrt() / s);
    }
    Ok(best)
}
