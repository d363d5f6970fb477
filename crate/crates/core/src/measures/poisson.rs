use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::rng::RngStream;
use crate::error::{check_positive, Result};

/// Homogeneous marked Poisson measure on `[0, horizon] x [0, z_max]`.
///
/// Events are the atoms of a Poisson measure with intensity
/// `n_rate ds (x) dz` restricted to marks below `z_max`: times form a Poisson
/// process of rate `n_rate * z_max`, marks are independent uniforms.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedPoissonSample {
    pub horizon: f64,
    pub n_rate: f64,
    pub z_max: f64,
    pub times: Vec<f64>,
    pub marks: Vec<f64>,
}

impl MarkedPoissonSample {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.marks.iter().copied())
    }
}

pub fn sample_poisson_measure(
    stream: RngStream,
    horizon: f64,
    n_rate: f64,
    z_max: f64,
) -> Result<MarkedPoissonSample> {
    sample_poisson_measure_with(&mut stream.rng(), horizon, n_rate, z_max)
}

/// Same as [`sample_poisson_measure`] but drawing from a caller-owned generator.
pub fn sample_poisson_measure_with<R: Rng + ?Sized>(
    rng: &mut R,
    horizon: f64,
    n_rate: f64,
    z_max: f64,
) -> Result<MarkedPoissonSample> {
    check_positive("horizon", horizon)?;
    check_positive("n_rate", n_rate)?;
    check_positive("z_max", z_max)?;
    let total = n_rate * z_max;
    check_positive("n_rate * z_max", total)?;

    let expected = (total * horizon).ceil() as usize;
    let mut times = Vec::with_capacity(expected + expected / 8 + 8);
    let mut marks = Vec::with_capacity(times.capacity());
    let mut t = 0.0;
    loop {
        let gap: f64 = Exp1.sample(rng);
        let next = t + gap / total;
        if next > horizon {
            break;
        }
        // a gap that underflows the current time would break strict ordering
        if next <= t {
            continue;
        }
        t = next;
        times.push(t);
        marks.push(rng.random::<f64>() * z_max);
    }
    Ok(MarkedPoissonSample {
        horizon,
        n_rate,
        z_max,
        times,
        marks,
    })
}
