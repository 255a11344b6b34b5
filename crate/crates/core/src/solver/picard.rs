//! Fixed-point iteration `u ↦ e^{-tL}u_0 + λ∫₀ᵗ e^{-(t-τ)L}|∇u(τ)|^q dτ`.
//!
//! Time is split into `m` cells of width `Δ` with nodes at the midpoints
//! `τ_i = (i + ½)Δ`, where the iterates live. On each cell the nonlinearity
//! is frozen at the node value and integrated exactly against the
//! exponential, which gives the weights
//!
//! ```text
//! full cell j, seen from t:  e^{-(t-(j+1)Δ)a} Δ φ₁(-Δa)
//! half cell ending at τ_i:   (Δ/2) φ₁(-(Δ/2)a)
//! ```

use num_complex::Complex64;

use super::integrator::{evaluate_nonlinear, phi1};
use super::problem::ProblemSpec;
use crate::error::{Error, Result};
use crate::semigroup::symbol_on_grid;
use crate::spectral::{self, Field, SpectralField};

pub const MIN_NODES: usize = 16;
pub const DEFAULT_NODES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardIterate {
    pub iteration: usize,
    /// `max_i ‖u^{m+1}(τ_i) - u^m(τ_i)‖_∞`.
    pub distance: f64,
    /// `distance / previous distance`; `None` on the first iteration.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PicardSolution {
    /// `u(horizon)` from the converged node values.
    pub field: Field,
    pub history: Vec<PicardIterate>,
}

impl PicardSolution {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }
}

struct Weights {
    cell_decay: Vec<f64>,
    half_decay: Vec<f64>,
    cell: Vec<f64>,
    half: Vec<f64>,
}

fn axpy(acc: &mut [Complex64], x: &[Complex64], w: &[f64]) {
    for ((a, x), w) in acc.iter_mut().zip(x).zip(w) {
        *a += x * w;
    }
}

pub fn picard_solve(
    problem: &ProblemSpec,
    horizon: f64,
    max_iter: usize,
    tol: f64,
) -> Result<PicardSolution> {
    picard_solve_with_nodes(problem, horizon, max_iter, tol, DEFAULT_NODES)
}

pub fn picard_solve_with_nodes(
    problem: &ProblemSpec,
    horizon: f64,
    max_iter: usize,
    tol: f64,
    nodes: usize,
) -> Result<PicardSolution> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon {horizon} must be > 0")));
    }
    if nodes < MIN_NODES {
        return Err(Error::InvalidArgument(format!("need at least {MIN_NODES} nodes, got {nodes}")));
    }
    if max_iter == 0 || !(tol > 0.0) {
        return Err(Error::InvalidArgument("need max_iter >= 1 and tol > 0".into()));
    }
    let grid = *problem.initial.grid();
    let symbol = symbol_on_grid(&grid, &problem.symbol)?;
    let delta = horizon / nodes as f64;
    let weights = Weights {
        cell_decay: symbol.iter().map(|a| (-delta * a).exp()).collect(),
        half_decay: symbol.iter().map(|a| (-0.5 * delta * a).exp()).collect(),
        cell: symbol.iter().map(|a| delta * phi1(-delta * a)).collect(),
        half: symbol.iter().map(|a| 0.5 * delta * phi1(-0.5 * delta * a)).collect(),
    };
    let u0_hat = spectral::forward(&problem.initial);
    let linear: Vec<SpectralField> = (0..nodes)
        .map(|i| {
            let t = (i as f64 + 0.5) * delta;
            let m: Vec<f64> = symbol.iter().map(|a| (-t * a).exp()).collect();
            u0_hat.multiplied(&m)
        })
        .collect();
    let linear_end: Vec<f64> = symbol.iter().map(|a| (-horizon * a).exp()).collect();

    let nonlinear_terms = |iterate: &[SpectralField]| -> Vec<Option<SpectralField>> {
        iterate
            .iter()
            .map(|u| evaluate_nonlinear(u, problem.lambda, problem.q).spectrum)
            .collect()
    };
    // Applies the quadrature to frozen nonlinear terms: node values and the end value.
    let apply = |terms: &[Option<SpectralField>]| -> (Vec<SpectralField>, SpectralField) {
        let mut carried = vec![Complex64::new(0.0, 0.0); grid.len()];
        let mut out = Vec::with_capacity(nodes);
        for (i, term) in terms.iter().enumerate() {
            let mut node: Vec<Complex64> = linear[i]
                .coeffs()
                .iter()
                .zip(&carried)
                .zip(&weights.half_decay)
                .map(|((l, c), d)| l + c * d)
                .collect();
            if let Some(n) = term {
                axpy(&mut node, n.coeffs(), &weights.half);
            }
            out.push(SpectralField::from_coeffs(grid, node).expect("sizes match"));
            for (c, d) in carried.iter_mut().zip(&weights.cell_decay) {
                *c *= d;
            }
            if let Some(n) = term {
                axpy(&mut carried, n.coeffs(), &weights.cell);
            }
        }
        let mut end = u0_hat.multiplied(&linear_end).into_coeffs();
        for (e, c) in end.iter_mut().zip(&carried) {
            *e += c;
        }
        (out, SpectralField::from_coeffs(grid, end).expect("sizes match"))
    };

    let mut iterate = linear.clone();
    let mut values: Vec<Field> = iterate.iter().map(spectral::inverse).collect();
    let mut history = Vec::new();
    let mut streak = 0;
    let mut last_distance = f64::NAN;
    for iteration in 1..=max_iter {
        let (next, end) = apply(&nonlinear_terms(&iterate));
        let next_values: Vec<Field> = next.iter().map(spectral::inverse).collect();
        let distance = next_values
            .iter()
            .zip(&values)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max);
        let ratio = history
            .last()
            .map(|prev: &PicardIterate| distance / prev.distance);
        history.push(PicardIterate {
            iteration,
            distance,
            ratio,
        });
        log::debug!("picard iteration {iteration}: distance {distance:e}");
        last_distance = distance;
        if distance < tol {
            return Ok(PicardSolution {
                field: spectral::inverse(&end),
                history,
            });
        }
        let contracting = distance.is_finite() && ratio.map_or(true, |r| r < 1.0);
        streak = if contracting { 0 } else { streak + 1 };
        if streak >= 3 || !distance.is_finite() {
            return Err(Error::HorizonTooLarge { horizon });
        }
        iterate = next;
        values = next_values;
    }
    Err(Error::NoConvergence {
        max_iter,
        distance: last_distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::apply_semigroup;
    use crate::solver::run;
    use crate::spectral::PeriodicGrid;
    use crate::symbol::SymbolSpec;

    fn problem(lambda: f64, amplitude: f64, dt: f64) -> ProblemSpec {
        let grid = PeriodicGrid::new(1, 128, 12.0).unwrap();
        ProblemSpec {
            symbol: SymbolSpec::fractional(2.0, 1.0).unwrap(),
            lambda,
            q: 2.0,
            initial: Field::from_fn(grid, |x| amplitude * (-x[0] * x[0] / 2.0).exp()),
            horizon: 0.5,
            dt,
            sample_times: vec![0.5],
        }
    }

    #[test]
    fn linear_problem_converges_immediately() {
        let p = problem(0.0, 1.0, 0.01);
        let sol = picard_solve(&p, 0.5, 10, 1e-12).unwrap();
        assert_eq!(sol.iterations(), 1);
        let exact = apply_semigroup(&p.initial, 0.5, &p.symbol).unwrap();
        assert!(sol.field.max_abs_diff(&exact) < 1e-13);
    }

    #[test]
    fn agrees_with_time_stepping() {
        let tol = 1e-6;
        let p = problem(0.2, 0.5, 0.5 / 512.0);
        let sol = picard_solve_with_nodes(&p, 0.5, 50, tol, 256).unwrap();
        assert!(sol.history.iter().skip(1).all(|h| h.ratio.unwrap() < 1.0));
        let traj = run(&p).unwrap();
        let diff = sol.field.max_abs_diff(traj.final_field());
        assert!(diff < 10.0 * tol, "difference {diff:e}");
        assert!(sol.field.max_abs() <= p.initial.max_abs() + tol);
    }

    #[test]
    fn guards() {
        let p = problem(0.2, 0.5, 0.01);
        assert!(picard_solve_with_nodes(&p, 0.5, 10, 1e-6, 8).is_err());
        assert!(matches!(
            picard_solve(&p, 0.5, 1, 1e-14),
            Err(Error::NoConvergence { .. })
        ));
        let wild = problem(1.0, 40.0, 0.01);
        assert!(matches!(
            picard_solve(&wild, 4.0, 200, 1e-10),
            Err(Error::HorizonTooLarge { .. })
        ));
    }
}
