//! Path containers and the Lipschitz operators acting on them.
//!
//! Two representations cover every process in the crate:
//!
//! - [`RcllPath`]: right-continuous step path stored as jump times and the
//!   values taken from each jump on. Suprema over such a path are attained at
//!   jump times or endpoints, so every norm here is computed exactly from the
//!   jump list.
//! - [`GridPath`]: continuous path known at the nodes of a [`Partition`] and
//!   affine in between.
//!
//! Both implement [`Path`] (pointwise evaluation and exact sup-distances) and
//! [`NodePath`] (the node-wise cumulative maps: running max, local time,
//! reflection). For grid paths those maps are exact at nodes.

mod csv;
mod grid;
mod ops;
mod partition;
mod rcll;
mod theta;
mod time_change;

pub use csv::{read_grid_csv, read_rcll_csv, write_csv};
pub use grid::GridPath;
pub use ops::{
    interpolate, interpolation_gap, local_time, modulus, running_max, sko_reflect, sup_distance,
    sup_norm, NodePath, Path,
};
pub use partition::Partition;
pub use rcll::{RcllPath, RcllPathBuilder};
pub use theta::{spectral_norm, theta_lipschitz_constant, theta_ode, theta_ode_varying, ThetaPlan};
pub use time_change::{time_change, TimeChange};
