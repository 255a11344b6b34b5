//! Theorem-facing measurements on fields and trajectories.

mod asymptotics;
pub mod csv;
mod fit;
mod gradient_decay;
mod mass;
mod record;

pub use asymptotics::{ben_artzi_koch_gap, self_similar_error};
pub use fit::{fit_power_law, ExponentFit};
pub use gradient_decay::{
    admissible_p0, d_norm_bound, d_quantity, smallness, weight_exponent, weighted_gradient,
    DValue, TimeLadder,
};
pub use mass::{
    estimate_mass_limit, is_monotone, mass, mass_identity_residual, mass_residual,
    plateau_quality, MassLimit,
};
pub use record::{tail_fraction, DiagnosticsRecord};
