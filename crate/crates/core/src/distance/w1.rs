use crate::error::{Error, Result};

/// Wasserstein-1 distance between two empirical laws on the line, computed by
/// the quantile coupling `int_0^1 |F^{-1}(u) - G^{-1}(u)| du`.
pub fn marginal_w1(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::Parameter(
            "marginal_w1 needs two nonempty samples".into(),
        ));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Parameter("marginal_w1 needs finite samples".into()));
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    if a.len() == b.len() {
        let s: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
        return Ok(s / a.len() as f64);
    }
    // walk the merged quantile breakpoints i/n and j/m with integer arithmetic
    let (n, m) = (a.len() as u128, b.len() as u128);
    let (mut i, mut j) = (0usize, 0usize);
    let mut u_prev: u128 = 0; // in units of 1/(n m)
    let mut total = 0.0;
    while i < a.len() && j < b.len() {
        let next_a = (i as u128 + 1) * m;
        let next_b = (j as u128 + 1) * n;
        let u = next_a.min(next_b);
        total += (u - u_prev) as f64 * (a[i] - b[j]).abs();
        u_prev = u;
        if next_a == u {
            i += 1;
        }
        if next_b == u {
            j += 1;
        }
    }
    Ok(total / (n * m) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_masses_and_identity() {
        assert_eq!(marginal_w1(&[0.0], &[1.0]).unwrap(), 1.0);
        assert_eq!(
            marginal_w1(&[3.0, 1.0, 2.0], &[1.0, 2.0, 3.0]).unwrap(),
            0.0
        );
        assert!(marginal_w1(&[], &[1.0]).is_err());
    }

    #[test]
    fn unequal_sizes_by_hand() {
        // {0, 1} vs {0, 0, 3}: quantiles on thirds/halves
        // u in (0,1/3): 0 vs 0; (1/3,1/2): 0 vs 0; (1/2,2/3): 1 vs 0; (2/3,1): 1 vs 3
        let w = marginal_w1(&[0.0, 1.0], &[0.0, 0.0, 3.0]).unwrap();
        assert!((w - (1.0 / 6.0 + 2.0 / 3.0)).abs() < 1e-15);
    }
}
