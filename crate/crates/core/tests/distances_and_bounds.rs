use poisdiff::distance::{
    finite_rank_gap, fit_means, fit_rate, marginal_w1, Provenance, RateSample, SamplePathEnsemble,
};
use poisdiff::measures::{poisson_max_bound, RngStream};
use poisdiff::paths::{GridPath, Partition};
use poisdiff::stats::{mean, std_err};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use statrs::distribution::{DiscreteCDF, Poisson as PoissonLaw};

fn sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, 1..60)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn w1_is_a_metric(a in sample(), b in sample(), c in sample()) {
        let ab = marginal_w1(&a, &b).unwrap();
        prop_assert_eq!(ab, marginal_w1(&b, &a).unwrap());
        prop_assert!(ab >= 0.0);
        prop_assert!(marginal_w1(&a, &a).unwrap() == 0.0);
        let (ac, cb) = (marginal_w1(&a, &c).unwrap(), marginal_w1(&c, &b).unwrap());
        prop_assert!(ab <= ac + cb + 1e-12);
    }

    #[test]
    fn w1_of_a_shift_is_the_shift(a in sample(), c in -5.0..5.0f64) {
        let b: Vec<f64> = a.iter().map(|x| x + c).collect();
        prop_assert!((marginal_w1(&a, &b).unwrap() - c.abs()).abs() < 1e-12);
    }

    #[test]
    fn rate_fit_is_scale_equivariant(
        slope in -1.0..0.0f64,
        c in 0.1..10.0f64,
        s in 0.1..10.0f64,
        noise in prop::collection::vec(0.8..1.25f64, 5),
    ) {
        let ns: [f64; 5] = [1e2, 1e3, 1e4, 1e5, 1e6];
        let base: Vec<(f64, f64)> = ns.iter().zip(&noise).map(|(&n, e)| (n, e * n.powf(slope))).collect();
        let f = fit_means(&base).unwrap();
        let scaled_values: Vec<(f64, f64)> = base.iter().map(|&(n, m)| (n, c * m)).collect();
        let g = fit_means(&scaled_values).unwrap();
        prop_assert!((g.slope - f.slope).abs() < 1e-10);
        prop_assert!((g.intercept - f.intercept - c.ln()).abs() < 1e-10);
        let scaled_n: Vec<(f64, f64)> = base.iter().map(|&(n, m)| (s * n, m)).collect();
        let h = fit_means(&scaled_n).unwrap();
        prop_assert!((h.slope - f.slope).abs() < 1e-10);
        prop_assert!((h.intercept - f.intercept + f.slope * s.ln()).abs() < 1e-9);
    }
}

#[test]
fn w1_between_shifted_normals() {
    let mut rng = RngStream::new(31, 0).rng();
    let xs: Vec<f64> = (0..100_000)
        .map(|_| -> f64 { StandardNormal.sample(&mut rng) })
        .collect();
    let ys: Vec<f64> = (0..100_000)
        .map(|_| -> f64 {
            let z: f64 = StandardNormal.sample(&mut rng);
            0.5 + z
        })
        .collect();
    let w = marginal_w1(&xs, &ys).unwrap();
    assert!((w - 0.5).abs() < 0.01, "{w}");
}

#[test]
fn bootstrap_interval_covers_a_noisy_power_law() {
    let mut rng = RngStream::new(32, 0).rng();
    let samples: Vec<RateSample> = [1e2, 1e3, 1e4, 1e5]
        .iter()
        .map(|&n: &f64| RateSample {
            n,
            values: (0..200)
                .map(|_| n.powf(-0.5) * rng.random_range(0.5..1.5))
                .collect(),
        })
        .collect();
    let fit = fit_rate(&samples, 400, RngStream::new(32, 1)).unwrap();
    assert!(fit.ci_low <= fit.slope && fit.slope <= fit.ci_high);
    assert!(
        fit.ci_low < -0.5 + 0.05 && fit.ci_high > -0.5 - 0.05,
        "{fit:?}"
    );
}

fn ensemble(shift: f64, seed: u64, pi: &Partition) -> SamplePathEnsemble {
    let paths = (0..400u64)
        .map(|r| {
            let mut rng = RngStream::new(seed, r).rng();
            let mut x = 0.0;
            let v: Vec<f64> = pi
                .times()
                .iter()
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    x += 0.2 * z;
                    x + shift
                })
                .collect();
            GridPath::new(pi.clone(), 1, v).unwrap()
        })
        .collect();
    SamplePathEnsemble::new(paths, Provenance::default()).unwrap()
}

#[test]
fn finite_rank_gap_stays_under_the_coupling_envelope_and_grows_with_the_shift() {
    let pi = Partition::uniform(1.0, 16).unwrap();
    let base = ensemble(0.0, 33, &pi);
    let mut prev = 0.0;
    for (i, shift) in [0.05, 0.2, 0.8].into_iter().enumerate() {
        let other = ensemble(shift, 34 + i as u64, &pi);
        // index coupling: E sup |a_i - b_i| dominates every 1-Lipschitz mean difference
        let envelope = mean(
            &base
                .paths()
                .iter()
                .zip(other.paths())
                .map(|(a, b)| {
                    a.values()
                        .iter()
                        .zip(b.values())
                        .map(|(x, y)| (x - y).abs())
                        .fold(0.0, f64::max)
                })
                .collect::<Vec<_>>(),
        );
        let gap = finite_rank_gap(&base, &other, &pi, 300, RngStream::new(35, 0)).unwrap();
        assert!(gap <= envelope + 1e-12, "shift {shift}: {gap} > {envelope}");
        assert!(gap > prev, "shift {shift}: {gap} <= {prev}");
        prev = gap;
    }
    assert!(prev > 0.5 * 0.8);
}

/// `E max_{i <= n} X_i = Σ_{k >= 1} (1 - F(k - 1)^n)` for iid Poisson(ν).
fn exact_expected_max(n: u64, nu: f64) -> f64 {
    let law = PoissonLaw::new(nu).unwrap();
    let mut total = 0.0;
    for k in 1.. {
        let term = 1.0 - law.cdf(k - 1).powf(n as f64);
        total += term;
        if term < 1e-16 {
            break;
        }
    }
    total
}

#[test]
fn poisson_max_monte_carlo_matches_the_exact_expectation() {
    for (j, &(n, nu)) in [(10u64, 2.0), (1000, 0.5), (10_000, 0.1), (10_000, 1.0)]
        .iter()
        .enumerate()
    {
        let law = Poisson::new(nu).unwrap();
        let maxima: Vec<f64> = (0..2000u64)
            .map(|r| {
                let mut rng = RngStream::new(36 + j as u64, r).rng();
                (0..n).map(|_| law.sample(&mut rng)).fold(0.0, f64::max)
            })
            .collect();
        let exact = exact_expected_max(n, nu);
        assert!(
            (mean(&maxima) - exact).abs() < 4.0 * std_err(&maxima),
            "n {n} nu {nu}: {} vs {exact}",
            mean(&maxima)
        );
        if let Ok(b) = poisson_max_bound(n, nu) {
            assert!(exact <= b, "n {n} nu {nu}: exact {exact} above bound {b}");
        }
    }
}
