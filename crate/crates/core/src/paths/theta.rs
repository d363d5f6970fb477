use nalgebra::{DMatrix, DVector};

use super::grid::GridPath;
use super::partition::Partition;
use crate::error::{Error, Result};

/// Largest singular value.
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.max()
}

/// `1 + |A| T exp(T |A|)` with the spectral norm of `A`.
pub fn theta_lipschitz_constant(a_norm: f64, horizon: f64) -> f64 {
    1.0 + a_norm * horizon * (horizon * a_norm).exp()
}

/// `(exp(X), phi_1(X))` with `phi_1(X) = sum_k X^k / (k+1)!`, by scaling and squaring.
fn exp_phi1(x: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let d = x.nrows();
    let norm = x.norm(); // Frobenius, an upper bound on the spectral norm
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let xs = x * scale;
    let id = DMatrix::<f64>::identity(d, d);
    // Taylor: term_k = xs^k / k!, exp = sum term_k, phi1 = sum term_k / (k+1)
    let mut term = id.clone();
    let mut e = id.clone();
    let mut p = id.clone();
    for k in 1..=24 {
        term = &term * &xs / k as f64;
        e += &term;
        p += &term / (k + 1) as f64;
        if term.norm() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        p = (&e + &id) * &p * 0.5;
        e = &e * &e;
    }
    (e, p)
}

/// Per-cell propagators for the linear map `f -> y`, `y = f + A int_0^. y`.
///
/// On each cell the input is affine, so with `z = y - f` solving `z' = A z + A f`
/// the update `z_{j+1} = E z_j + (E - I) f_j + (phi_1(hA) - I)(f_{j+1} - f_j)`,
/// `E = exp(hA)`, is exact. A time-dependent `A` is frozen at cell midpoints.
#[derive(Debug, Clone)]
pub struct ThetaPlan {
    partition: Partition,
    dim: usize,
    // per cell: (E, E - I, phi_1(hA) - I)
    cells: Vec<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)>,
    norm_bound: f64,
}

impl ThetaPlan {
    pub fn constant(partition: &Partition, a: &DMatrix<f64>) -> Result<Self> {
        check_square(a)?;
        let dim = a.nrows();
        let times = partition.times();
        let mut cells: Vec<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> =
            Vec::with_capacity(partition.cells());
        let id = DMatrix::<f64>::identity(dim, dim);
        let mut prev_h = f64::NAN;
        for w in times.windows(2) {
            let h = w[1] - w[0];
            // uniform grids repeat the same step
            if h == prev_h {
                let c = cells[cells.len() - 1].clone();
                cells.push(c);
                continue;
            }
            prev_h = h;
            let (e, p) = exp_phi1(&(a * h));
            cells.push((e.clone(), e - &id, p - &id));
        }
        Ok(Self {
            partition: partition.clone(),
            dim,
            cells,
            norm_bound: spectral_norm(a),
        })
    }

    pub fn varying<F: Fn(f64) -> DMatrix<f64>>(partition: &Partition, a: F) -> Result<Self> {
        let times = partition.times();
        let mut cells = Vec::with_capacity(partition.cells());
        let mut dim = None;
        let mut norm_bound = 0.0f64;
        for w in times.windows(2) {
            let h = w[1] - w[0];
            let am = a(0.5 * (w[0] + w[1]));
            check_square(&am)?;
            match dim {
                None => dim = Some(am.nrows()),
                Some(d) if d != am.nrows() => {
                    return Err(Error::UnsupportedDimension {
                        expected: d,
                        got: am.nrows(),
                    })
                }
                _ => {}
            }
            norm_bound = norm_bound.max(spectral_norm(&am));
            let id = DMatrix::<f64>::identity(am.nrows(), am.nrows());
            let (e, p) = exp_phi1(&(am * h));
            cells.push((e.clone(), e - &id, p - &id));
        }
        Ok(Self {
            partition: partition.clone(),
            dim: dim.unwrap_or(0),
            cells,
            norm_bound,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// `sup_t |A(t)|` over the frozen matrices.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn lipschitz_constant(&self) -> f64 {
        theta_lipschitz_constant(self.norm_bound, self.partition.horizon())
    }

    pub fn apply(&self, f: &GridPath) -> Result<GridPath> {
        if f.dim() != self.dim {
            return Err(Error::Parameter(format!(
                "path dimension {} does not match the {}x{} drift matrix",
                f.dim(),
                self.dim,
                self.dim
            )));
        }
        if f.partition() != &self.partition {
            return Err(Error::Parameter(
                "path and drift plan live on different partitions".into(),
            ));
        }
        let d = self.dim;
        let mut out = Vec::with_capacity(f.values().len());
        let mut z = DVector::<f64>::zeros(d);
        out.extend_from_slice(f.node(0));
        for (j, (e, em, pm)) in self.cells.iter().enumerate() {
            let fj = DVector::from_column_slice(f.node(j));
            let fj1 = DVector::from_column_slice(f.node(j + 1));
            let delta = &fj1 - &fj;
            z = e * &z + em * &fj + pm * &delta;
            out.extend((0..d).map(|i| fj1[i] + z[i]));
        }
        GridPath::new(self.partition.clone(), d, out)
    }
}

fn check_square(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::Parameter(format!(
            "drift matrix must be square and nonempty, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parameter("drift matrix must be finite".into()));
    }
    Ok(())
}

/// Solution of `y(t) = f(t) + A int_0^t y(s) ds` on the grid of `f`.
pub fn theta_ode(f: &GridPath, a: &DMatrix<f64>) -> Result<GridPath> {
    ThetaPlan::constant(f.partition(), a)?.apply(f)
}

/// Same with a time-dependent `A(t)`.
pub fn theta_ode_varying<F: Fn(f64) -> DMatrix<f64>>(f: &GridPath, a: F) -> Result<GridPath> {
    ThetaPlan::varying(f.partition(), a)?.apply(f)
}
