//! Discretisation substrate: a periodic box standing in for `ℝ^N`.

mod field;
mod grid;
pub mod snapshot;
mod transform;

pub use field::{Field, SpectralField};
pub use grid::PeriodicGrid;
pub use transform::{
    dealias, dealias_cutoff, dealias_fraction, derivative_from_spectrum, forward, gradient,
    gradient_from_spectrum, gradient_lp_norm, gradient_magnitude, inverse, lp_norm,
    spectral_tail_ratio,
};
pub(crate) use transform::dealias_in_place;
