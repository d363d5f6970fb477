use super::grid::GridPath;
use super::partition::Partition;
use super::rcll::RcllPath;
use crate::error::{Error, Result};

/// Relative tolerance used when comparing horizons of two paths.
const HORIZON_TOL: f64 = 1e-12;

/// Common interface of the two path representations.
pub trait Path {
    fn dim(&self) -> usize;
    fn horizon(&self) -> f64;
    fn eval_into(&self, t: f64, out: &mut [f64]);
    /// Left limit `f(t-)`; equals `f(0)` at `t = 0`.
    fn eval_left_into(&self, t: f64, out: &mut [f64]);
    /// Sorted times, including `0` and `T`, between which the path is affine.
    fn breakpoints(&self) -> Vec<f64>;

    fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(t, &mut out);
        out
    }
}

impl Path for RcllPath {
    fn dim(&self) -> usize {
        RcllPath::dim(self)
    }

    fn horizon(&self) -> f64 {
        RcllPath::horizon(self)
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) {
        out.copy_from_slice(self.at(t));
    }

    fn eval_left_into(&self, t: f64, out: &mut [f64]) {
        out.copy_from_slice(self.at_left(t));
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = Vec::with_capacity(self.num_jumps() + 2);
        b.push(0.0);
        b.extend_from_slice(self.jump_times());
        if *b.last().unwrap() < RcllPath::horizon(self) {
            b.push(RcllPath::horizon(self));
        }
        b
    }
}

impl Path for GridPath {
    fn dim(&self) -> usize {
        GridPath::dim(self)
    }

    fn horizon(&self) -> f64 {
        GridPath::horizon(self)
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) {
        GridPath::eval_into(self, t, out)
    }

    fn eval_left_into(&self, t: f64, out: &mut [f64]) {
        GridPath::eval_into(self, t, out)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.times().to_vec()
    }
}

/// Paths whose node values (pieces for step paths, grid nodes for grid paths)
/// determine the cumulative maps below.
pub trait NodePath: Path + Sized {
    fn node_values(&self) -> &[f64];
    fn with_nodes(&self, dim: usize, values: Vec<f64>) -> Self;
    fn modulus_of_structure(&self, eps: f64) -> f64;
}

impl NodePath for RcllPath {
    fn node_values(&self) -> &[f64] {
        self.piece_values()
    }

    fn with_nodes(&self, dim: usize, values: Vec<f64>) -> Self {
        self.with_piece_values(dim, values)
    }

    // Pieces i < j are both visited by some pair s, s' with s' - s <= eps iff
    // tau_j - tau_{i+1} < eps, because piece i is open on the right.
    fn modulus_of_structure(&self, eps: f64) -> f64 {
        let times = self.jump_times();
        let n = self.num_pieces();
        let mut best = 0.0f64;
        for i in 0..n.saturating_sub(1) {
            let right = times[i];
            let a = self.piece(i);
            for j in (i + 1)..n {
                if times[j - 1] - right >= eps {
                    break;
                }
                best = best.max(dist(a, self.piece(j)));
            }
        }
        best
    }
}

impl NodePath for GridPath {
    fn node_values(&self) -> &[f64] {
        self.values()
    }

    fn with_nodes(&self, dim: usize, values: Vec<f64>) -> Self {
        self.with_node_values(dim, values)
    }

    fn modulus_of_structure(&self, eps: f64) -> f64 {
        let times = self.times();
        let limit = eps + HORIZON_TOL * self.horizon();
        let mut best = 0.0f64;
        for i in 0..times.len() {
            let a = self.node(i);
            for j in (i + 1)..times.len() {
                if times[j] - times[i] > limit {
                    break;
                }
                best = best.max(dist(a, self.node(j)));
            }
        }
        best
    }
}

fn norm(v: &[f64]) -> f64 {
    if v.len() == 1 {
        v[0].abs()
    } else {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    if a.len() == 1 {
        (a[0] - b[0]).abs()
    } else {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}

/// `sup_{t <= T} |f(t)|`, exact for both representations.
pub fn sup_norm<P: Path>(f: &P) -> f64 {
    let mut v = vec![0.0; f.dim()];
    let mut best = 0.0f64;
    for t in f.breakpoints() {
        f.eval_into(t, &mut v);
        best = best.max(norm(&v));
        f.eval_left_into(t, &mut v);
        best = best.max(norm(&v));
    }
    best
}

fn check_compatible(fd: usize, fh: f64, gd: usize, gh: f64) -> Result<()> {
    if fd != gd {
        return Err(Error::UnsupportedDimension {
            expected: fd,
            got: gd,
        });
    }
    if (fh - gh).abs() > HORIZON_TOL * fh.abs().max(1.0) {
        return Err(Error::Parameter(format!("horizon mismatch: {fh} vs {gh}")));
    }
    Ok(())
}

/// `sup_{t <= T} |f(t) - g(t)|`, exact: the difference is affine between the
/// merged breakpoints, so checking both one-sided values there suffices.
pub fn sup_distance<P: Path, Q: Path>(f: &P, g: &Q) -> Result<f64> {
    check_compatible(f.dim(), f.horizon(), g.dim(), g.horizon())?;
    let (bf, bg) = (f.breakpoints(), g.breakpoints());
    let horizon = f.horizon().min(g.horizon());
    let mut times = Vec::with_capacity(bf.len() + bg.len());
    let (mut i, mut j) = (0, 0);
    while i < bf.len() || j < bg.len() {
        let t = if j >= bg.len() || (i < bf.len() && bf[i] <= bg[j]) {
            i += 1;
            bf[i - 1]
        } else {
            j += 1;
            bg[j - 1]
        };
        let t = t.min(horizon);
        if times.last() != Some(&t) {
            times.push(t);
        }
    }
    let d = f.dim();
    let (mut a, mut b) = (vec![0.0; d], vec![0.0; d]);
    let mut best = 0.0f64;
    for t in times {
        f.eval_into(t, &mut a);
        g.eval_into(t, &mut b);
        best = best.max(dist(&a, &b));
        f.eval_left_into(t, &mut a);
        g.eval_left_into(t, &mut b);
        best = best.max(dist(&a, &b));
    }
    Ok(best)
}

/// Affine interpolation of `f` along `pi`.
pub fn interpolate<P: Path>(f: &P, pi: &Partition) -> Result<GridPath> {
    let (t_f, t_pi) = (f.horizon(), pi.horizon());
    if (t_f - t_pi).abs() > HORIZON_TOL * t_f.max(1.0) {
        return Err(Error::Parameter(format!(
            "partition spans [0, {t_pi}] but the path lives on [0, {t_f}]"
        )));
    }
    let d = f.dim();
    let mut values = vec![0.0; pi.len() * d];
    for (i, &t) in pi.times().iter().enumerate() {
        f.eval_into(t.min(t_f), &mut values[i * d..(i + 1) * d]);
    }
    GridPath::new(pi.clone(), d, values)
}

/// Exact `|f - interpolate(f, pi)|_inf`.
pub fn interpolation_gap<P: Path>(f: &P, pi: &Partition) -> Result<f64> {
    let g = interpolate(f, pi)?;
    sup_distance(f, &g)
}

/// `s -> sup_{u <= s} |f(u)|`, a one-dimensional path.
pub fn running_max<P: NodePath>(f: &P) -> P {
    let d = f.dim();
    let mut acc = 0.0f64;
    let values = f
        .node_values()
        .chunks(d)
        .map(|v| {
            acc = acc.max(norm(v));
            acc
        })
        .collect();
    f.with_nodes(1, values)
}

fn require_scalar<P: Path>(f: &P) -> Result<()> {
    if f.dim() != 1 {
        return Err(Error::UnsupportedDimension {
            expected: 1,
            got: f.dim(),
        });
    }
    Ok(())
}

/// `s -> sup_{u <= s} max(-f(u), 0)` for scalar paths.
pub fn local_time<P: NodePath>(f: &P) -> Result<P> {
    require_scalar(f)?;
    let mut acc = 0.0f64;
    let values = f
        .node_values()
        .iter()
        .map(|&v| {
            acc = acc.max(-v);
            acc
        })
        .collect();
    Ok(f.with_nodes(1, values))
}

/// Skorokhod reflection at zero: `f + local_time(f)`.
pub fn sko_reflect<P: NodePath>(f: &P) -> Result<P> {
    require_scalar(f)?;
    let mut acc = 0.0f64;
    let values = f
        .node_values()
        .iter()
        .map(|&v| {
            acc = acc.max(-v);
            (v + acc).max(0.0)
        })
        .collect();
    Ok(f.with_nodes(1, values))
}

/// Modulus of continuity `sup_{|s - s'| <= eps} |f(s) - f(s')|`.
///
/// Exact for step paths. For grid paths the supremum runs over grid-time
/// pairs, which is a lower bound within one grid step of the true value.
pub fn modulus<P: NodePath>(f: &P, eps: f64) -> Result<f64> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::Parameter(format!(
            "modulus window must be positive, got {eps}"
        )));
    }
    Ok(f.modulus_of_structure(eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_jump() -> RcllPath {
        RcllPath::new(vec![0.0], vec![0.5], vec![vec![1.0]], 1.0).unwrap()
    }

    #[test]
    fn two_point_interpolation_of_a_jump() {
        let pi = Partition::uniform(1.0, 1).unwrap();
        let g = interpolate(&unit_jump(), &pi).unwrap();
        for t in [0.0, 0.25, 0.6, 1.0] {
            assert!((g.eval(t)[0] - t).abs() < 1e-15);
        }
        // chord vs step: the gap is attained at t = 0.5 from the left
        assert!((interpolation_gap(&unit_jump(), &pi).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn affine_paths_are_fixed_points() {
        let pi = Partition::new(vec![0.0, 0.2, 0.9, 1.0]).unwrap();
        let f = GridPath::scalar_fn(pi.clone(), |t| 3.0 * t - 1.0).unwrap();
        let g = interpolate(&f, &pi).unwrap();
        assert_eq!(f, g);
        let fine = Partition::uniform(1.0, 64).unwrap();
        let h = GridPath::scalar_fn(fine.clone(), |t| 3.0 * t - 1.0).unwrap();
        let hi = interpolate(&h, &pi).unwrap();
        assert!(sup_distance(&h, &hi).unwrap() < 1e-14);
    }

    #[test]
    fn horizon_mismatch_is_rejected() {
        let pi = Partition::uniform(2.0, 4).unwrap();
        assert!(interpolate(&unit_jump(), &pi).is_err());
    }

    #[test]
    fn local_time_and_reflection_closed_forms() {
        let pi = Partition::uniform(1.0, 100).unwrap();
        let f = GridPath::scalar_fn(pi.clone(), |t| -t).unwrap();
        let lt = local_time(&f).unwrap();
        let sk = sko_reflect(&f).unwrap();
        for (i, &t) in pi.times().iter().enumerate() {
            assert!((lt.node(i)[0] - t).abs() < 1e-15);
            assert_eq!(sk.node(i)[0], 0.0);
        }
        let pos = GridPath::scalar_fn(pi, |t| 1.0 + t * t).unwrap();
        assert!(sup_norm(&local_time(&pos).unwrap()) == 0.0);
        assert_eq!(sko_reflect(&pos).unwrap(), pos);
    }

    #[test]
    fn scalar_maps_reject_vectors() {
        let p = RcllPath::constant(vec![0.0, 1.0], 1.0).unwrap();
        assert!(matches!(
            sko_reflect(&p),
            Err(Error::UnsupportedDimension { .. })
        ));
        assert!(local_time(&p).is_err());
    }

    #[test]
    fn running_max_uses_euclidean_norm() {
        let p = RcllPath::new(
            vec![3.0, 4.0],
            vec![0.2, 0.4],
            vec![vec![0.0, 1.0], vec![6.0, 8.0]],
            1.0,
        )
        .unwrap();
        let m = running_max(&p);
        assert_eq!(m.at(0.0), &[5.0]);
        assert_eq!(m.at(0.3), &[5.0]);
        assert_eq!(m.at(0.5), &[10.0]);
    }

    #[test]
    fn step_modulus_respects_open_pieces() {
        // jumps at 0.3 and 0.6: values 0, 1, 3
        let p = RcllPath::new(vec![0.0], vec![0.3, 0.6], vec![vec![1.0], vec![3.0]], 1.0).unwrap();
        // piece 0 and piece 2 are reachable iff 0.6 - 0.3 < eps
        assert_eq!(modulus(&p, 0.3).unwrap(), 2.0);
        assert_eq!(modulus(&p, 0.31).unwrap(), 3.0);
        assert_eq!(modulus(&p, 1e-9).unwrap(), 2.0);
        assert!(modulus(&p, 0.0).is_err());
        assert_eq!(
            modulus(&RcllPath::constant(vec![1.0], 1.0).unwrap(), 0.5).unwrap(),
            0.0
        );
    }

    #[test]
    fn sup_distance_sees_left_limits() {
        let f = unit_jump();
        let g = GridPath::scalar_fn(Partition::uniform(1.0, 2).unwrap(), |_| 1.0).unwrap();
        // f - g = -1 on [0, 0.5)
        assert_eq!(sup_distance(&f, &g).unwrap(), 1.0);
        assert_eq!(sup_norm(&f), 1.0);
    }
}
