//! Pseudo-spectral simulation of `u_t = -Lu + λ|∇u|^q` on a periodic box,
//! where `L` is a Lévy operator given by its Fourier symbol `a(ξ)`.
//!
//! The linear part is applied exactly as the multiplier `e^{-t a(ξ)}`; the
//! nonlinear part goes through a second-order exponential integrator on the
//! Duhamel formula. [`diagnostics`] measures the quantities that the
//! long-time theory makes claims about, and [`oracle`] provides independent
//! reference solvers.

pub mod diagnostics;
pub mod error;
pub mod oracle;
pub mod semigroup;
pub mod solver;
pub mod spectral;
pub mod symbol;

pub use error::{Error, Result};
pub use solver::{run, ProblemSpec, RunStatus, Trajectory};
pub use spectral::{Field, PeriodicGrid};
pub use symbol::SymbolSpec;
