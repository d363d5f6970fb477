use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `φ(t) = Σ_j a_j e^{-b_j t}` with `a_j >= 0`, `b_j > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HawkesKernel {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl HawkesKernel {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Parameter(format!(
                "{} weights but {} decay rates",
                a.len(),
                b.len()
            )));
        }
        for (&aj, &bj) in a.iter().zip(&b) {
            if !(aj.is_finite() && aj >= 0.0) {
                return Err(Error::Parameter(format!(
                    "kernel weight must be nonnegative, got {aj}"
                )));
            }
            if !(bj.is_finite() && bj > 0.0) {
                return Err(Error::Parameter(format!(
                    "kernel decay rate must be positive, got {bj}"
                )));
            }
        }
        Ok(Self { a, b })
    }

    pub fn exponential(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a], vec![b])
    }

    /// The null kernel (homogeneous Poisson process).
    pub fn zero() -> Self {
        Self {
            a: Vec::new(),
            b: Vec::new(),
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.a
    }

    pub fn rates(&self) -> &[f64] {
        &self.b
    }

    pub fn terms(&self) -> usize {
        self.a.len()
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|&a| a == 0.0)
    }

    /// Branching ratio `κ = ∫_0^∞ φ`.
    pub fn kappa(&self) -> f64 {
        self.a.iter().zip(&self.b).map(|(a, b)| a / b).sum()
    }

    pub fn check_stable(&self) -> Result<()> {
        let k = self.kappa();
        if k >= 1.0 {
            return Err(Error::Stability(k));
        }
        Ok(())
    }

    pub fn phi(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| a * (-b * t).exp())
            .sum()
    }

    /// `Φ(t) = ∫_0^t φ`.
    pub fn big_phi(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| a / b * -(-b * t).exp_m1())
            .sum()
    }

    /// `sup φ = φ(0)`.
    pub fn sup(&self) -> f64 {
        self.a.iter().sum()
    }

    /// Long-run event rate `μ / (1 - κ)`.
    pub fn stationary_rate(&self, mu: f64) -> f64 {
        mu / (1.0 - self.kappa())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let k = HawkesKernel::new(vec![0.5, 0.2], vec![1.0, 4.0]).unwrap();
        assert!((k.kappa() - 0.55).abs() < 1e-15);
        assert!((k.phi(0.0) - 0.7).abs() < 1e-15);
        assert!((k.big_phi(1e3) - 0.55).abs() < 1e-12);
        // Φ' = φ
        let h = 1e-6;
        assert!(((k.big_phi(0.7 + h) - k.big_phi(0.7 - h)) / (2.0 * h) - k.phi(0.7)).abs() < 1e-8);
        assert!(k.check_stable().is_ok());
        assert!(matches!(
            HawkesKernel::exponential(1.0, 1.0).unwrap().check_stable(),
            Err(Error::Stability(_))
        ));
        assert!(HawkesKernel::exponential(-1.0, 1.0).is_err());
        assert!(HawkesKernel::new(vec![1.0], vec![]).is_err());
    }
}
