//! Second-order exponential time differencing on the Duhamel formula.
//!
//! For `û' = -a û + N̂(u)` one step of size `dt` is
//!
//! ```text
//! p̂       = e^{-dt a} ûₙ + dt φ₁(-dt a) N̂(uₙ)
//! ûₙ₊₁    = p̂ + dt φ₂(-dt a) (N̂(p) - N̂(uₙ))
//! ```
//!
//! with `φ₁(z) = (e^z - 1)/z` and `φ₂(z) = (e^z - 1 - z)/z²`. The linear part
//! is exact, and at the zero mode (`a = 0`) the update reduces to the
//! trapezoidal rule on the endpoint nonlinearities.

use num_complex::Complex64;

use super::problem::ProblemSpec;
use crate::error::{Error, Result};
use crate::semigroup::symbol_on_grid;
use crate::spectral::{self, dealias_in_place, Field, PeriodicGrid, SpectralField};

/// `(e^z - 1)/z`, with a series branch near zero.
pub fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0
    } else {
        z.exp_m1() / z
    }
}

/// `(e^z - 1 - z)/z²`, with a series branch near zero.
pub fn phi2(z: f64) -> f64 {
    if z.abs() < 0.1 {
        // Σ z^k/(k+2)!
        let mut term = 0.5;
        let mut sum = 0.0;
        for k in 0..10 {
            sum += term;
            term *= z / (k as f64 + 3.0);
        }
        sum
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

/// The nonlinear term evaluated from a spectrum.
#[derive(Debug, Clone)]
pub(crate) struct NonlinearEval {
    /// Dealiased coefficients of `λ|∇u|^q`; `None` when `λ = 0`.
    pub spectrum: Option<SpectralField>,
    /// `∫|∇u|^q dx` before dealiasing.
    pub grad_q_integral: f64,
    /// `∫|∇u|^2 dx`.
    pub grad_2_integral: f64,
    /// `max |∇u|`.
    pub grad_sup: f64,
}

pub(crate) fn evaluate_nonlinear(u_hat: &SpectralField, lambda: f64, q: f64) -> NonlinearEval {
    let grid = *u_hat.grid();
    let components = spectral::gradient_from_spectrum(u_hat);
    let mut squared = vec![0.0; grid.len()];
    for c in &components {
        for (s, v) in squared.iter_mut().zip(c.values()) {
            *s += v * v;
        }
    }
    let half_q = q / 2.0;
    let pointwise: Vec<f64> = if q == 2.0 {
        squared.clone()
    } else {
        squared.iter().map(|&s| s.powf(half_q)).collect()
    };
    let h = grid.cell_volume();
    let grad_q_integral = pointwise.iter().sum::<f64>() * h;
    let grad_2_integral = squared.iter().sum::<f64>() * h;
    let grad_sup = squared.iter().fold(0.0f64, |m, &s| m.max(s)).sqrt();
    let spectrum = (lambda != 0.0).then(|| {
        let field = Field::from_values(grid, pointwise.iter().map(|v| lambda * v).collect())
            .expect("sizes match");
        let mut spec = spectral::forward(&field);
        dealias_in_place(&mut spec, q);
        spec
    });
    NonlinearEval {
        spectrum,
        grad_q_integral,
        grad_2_integral,
        grad_sup,
    }
}

/// `λ (Σ_j (∂_j f)^2)^{q/2}` with spectral gradients, dealiased.
pub fn nonlinearity(f: &Field, lambda: f64, q: f64) -> Field {
    match evaluate_nonlinear(&spectral::forward(f), lambda, q).spectrum {
        Some(spec) => spectral::inverse(&spec),
        None => Field::zeros(*f.grid()),
    }
}

/// Precomputed per-mode weights for a fixed step size.
#[derive(Debug, Clone)]
pub struct ExponentialStepper {
    grid: PeriodicGrid,
    lambda: f64,
    q: f64,
    dt: f64,
    decay: Vec<f64>,
    weight1: Vec<f64>,
    weight2: Vec<f64>,
    bound: f64,
}

/// State carried between steps: the spectrum and its nonlinear evaluation.
#[derive(Debug, Clone)]
pub(crate) struct StepState {
    pub u_hat: SpectralField,
    pub eval: NonlinearEval,
}

impl ExponentialStepper {
    pub fn new(problem: &ProblemSpec) -> Result<Self> {
        Self::with_dt(problem, problem.dt)
    }

    pub fn with_dt(problem: &ProblemSpec, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("step {dt} must be > 0")));
        }
        let grid = *problem.initial.grid();
        let symbol = symbol_on_grid(&grid, &problem.symbol)?;
        let decay = symbol.iter().map(|a| (-dt * a).exp()).collect();
        let weight1 = symbol.iter().map(|a| dt * phi1(-dt * a)).collect();
        let weight2 = symbol.iter().map(|a| dt * phi2(-dt * a)).collect();
        Ok(Self {
            grid,
            lambda: problem.lambda,
            q: problem.q,
            dt,
            decay,
            weight1,
            weight2,
            bound: 10.0 * problem.initial.max_abs(),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub(crate) fn prepare(&self, u: &Field) -> StepState {
        let u_hat = spectral::forward(u);
        let eval = evaluate_nonlinear(&u_hat, self.lambda, self.q);
        StepState { u_hat, eval }
    }

    /// Advances the spectral state by one step; returns the new state and
    /// its physical field.
    pub(crate) fn advance(&self, state: &StepState, t_end: f64) -> Result<(StepState, Field)> {
        let next_hat = match &state.eval.spectrum {
            None => state.u_hat.multiplied(&self.decay),
            Some(n0) => {
                let u0 = state.u_hat.coeffs();
                let n0 = n0.coeffs();
                let pred: Vec<Complex64> = (0..u0.len())
                    .map(|k| u0[k] * self.decay[k] + n0[k] * self.weight1[k])
                    .collect();
                let pred = SpectralField::from_coeffs(self.grid, pred).expect("sizes match");
                let pred_eval = evaluate_nonlinear(&pred, self.lambda, self.q);
                let n1 = pred_eval.spectrum.as_ref().expect("lambda != 0").coeffs();
                let corrected: Vec<Complex64> = (0..u0.len())
                    .map(|k| pred.coeffs()[k] + (n1[k] - n0[k]) * self.weight2[k])
                    .collect();
                SpectralField::from_coeffs(self.grid, corrected).expect("sizes match")
            }
        };
        let field = spectral::inverse(&next_hat);
        if !field.is_finite() {
            return Err(Error::StepControl { t: t_end });
        }
        let sup = field.max_abs();
        if sup > self.bound.max(f64::MIN_POSITIVE) {
            return Err(Error::BlowUp { t: t_end, sup });
        }
        let eval = evaluate_nonlinear(&next_hat, self.lambda, self.q);
        Ok((
            StepState {
                u_hat: next_hat,
                eval,
            },
            field,
        ))
    }

    /// One step from a physical field.
    pub fn step_field(&self, f: &Field) -> Result<Field> {
        let state = self.prepare(f);
        Ok(self.advance(&state, self.dt)?.1)
    }
}

/// Advances `f` by one exponential-integrator step of size `dt`.
///
/// Fails with [`Error::BlowUp`] when the result exceeds `10·‖u_0‖_∞` and with
/// [`Error::StepControl`] on non-finite values.
pub fn step(f: &Field, dt: f64, problem: &ProblemSpec) -> Result<Field> {
    ExponentialStepper::with_dt(problem, dt)?.step_field(f)
}
