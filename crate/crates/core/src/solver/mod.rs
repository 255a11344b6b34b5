//! Time integration of `u_t = -Lu + λ|∇u|^q` through its Duhamel form.

mod integrator;
mod picard;
mod problem;
mod trajectory;

pub use integrator::{nonlinearity, phi1, phi2, step, ExponentialStepper};
pub use picard::{
    picard_solve, picard_solve_with_nodes, PicardIterate, PicardSolution, DEFAULT_NODES,
    MIN_NODES,
};
pub use problem::{dyadic_samples, ProblemSpec};
pub use trajectory::{run, RunStatus, Trajectory, RESOLUTION_TOLERANCE};
