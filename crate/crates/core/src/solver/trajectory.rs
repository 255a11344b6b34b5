use super::integrator::ExponentialStepper;
use super::problem::ProblemSpec;
use crate::diagnostics::{self, admissible_p0, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::spectral::{self, Field};

/// Tail ratio above which the initial datum counts as under-resolved.
pub const RESOLUTION_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Completed,
    BlowUp { t: f64, sup: f64 },
    StepControlFailure { t: f64 },
}

/// Samples of one run. `records[0]` and `fields[0]` are the initial state;
/// the rest follow the requested sample times, snapped to the step grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub problem: ProblemSpec,
    pub alpha: f64,
    pub p0: Option<f64>,
    pub records: Vec<DiagnosticsRecord>,
    pub fields: Vec<Field>,
    pub status: RunStatus,
    pub steps_taken: usize,
    /// Mass after every accepted step, starting with `M(0)`.
    pub step_masses: Vec<f64>,
    /// Largest `‖u‖_∞` and `‖∇u‖_∞` over every accepted step.
    pub sup_peak: f64,
    pub gradient_sup_peak: f64,
    /// The self-similar columns were computed against this mass.
    pub m_inf: Option<f64>,
}

impl Trajectory {
    pub fn is_completed(&self) -> bool {
        self.status == RunStatus::Completed
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    /// `(t, M(t))` at every sample including `t = 0`.
    pub fn mass_series(&self) -> Vec<(f64, f64)> {
        self.records.iter().map(|r| (r.t, r.mass)).collect()
    }

    pub fn initial_mass(&self) -> f64 {
        self.records[0].mass
    }

    pub fn final_record(&self) -> &DiagnosticsRecord {
        self.records.last().expect("records start with t = 0")
    }

    pub fn final_field(&self) -> &Field {
        self.fields.last().expect("fields start with u_0")
    }

    /// Recorded sample closest to `t`.
    pub fn sample_near(&self, t: f64) -> (&DiagnosticsRecord, &Field) {
        let i = self
            .records
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1.t - t).abs().total_cmp(&(b.1.t - t).abs()))
            .map(|(i, _)| i)
            .expect("records start with t = 0");
        (&self.records[i], &self.fields[i])
    }

    /// Per-step mass monotonicity in the direction of `λ`, with `slack`
    /// relative to `|M(0)|`.
    pub fn mass_is_monotone(&self, slack: f64) -> bool {
        let sign = self.problem.lambda.signum();
        if sign == 0.0 {
            return true;
        }
        let tol = slack * self.initial_mass().abs();
        diagnostics::is_monotone(&self.step_masses, sign, tol)
    }

    /// Recomputes the self-similar columns against `m_inf`. Samples whose
    /// kernel is unresolved get NaN.
    pub fn fill_self_similar_errors(&mut self, m_inf: f64) {
        let ell = self.problem.symbol.ell;
        for (record, field) in self.records.iter_mut().zip(&self.fields) {
            if record.t <= 0.0 {
                continue;
            }
            let t_eff = ell * record.t;
            record.sse_r1 = diagnostics::self_similar_error(field, m_inf, t_eff, 1.0, self.alpha)
                .unwrap_or(f64::NAN);
            record.sse_r2 = diagnostics::self_similar_error(field, m_inf, t_eff, 2.0, self.alpha)
                .unwrap_or(f64::NAN);
        }
        self.m_inf = Some(m_inf);
    }
}

/// Step indices of the sample times on the grid `k·dt`.
fn sample_steps(problem: &ProblemSpec, total: usize) -> Result<Vec<usize>> {
    let steps: Vec<usize> = problem
        .sample_times
        .iter()
        .map(|&t| ((t / problem.dt).round() as usize).clamp(1, total))
        .collect();
    if steps.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidProblem(
            "two sample times fall on the same step; refine dt".into(),
        ));
    }
    Ok(steps)
}

/// Integrates the problem with fixed steps and samples diagnostics.
///
/// Step failures do not raise: the trajectory is returned up to the last
/// accepted sample with the failure recorded in `status`. After a complete
/// run the self-similar columns are filled with `M_∞ = M(T)`.
pub fn run(problem: &ProblemSpec) -> Result<Trajectory> {
    problem.validate()?;
    let alpha = problem.symbol.dominant_alpha()?;
    let grid = *problem.initial.grid();
    let tail = spectral::spectral_tail_ratio(&spectral::forward(&problem.initial), problem.q);
    if tail > RESOLUTION_TOLERANCE {
        return Err(Error::UnderResolvedData { tail });
    }
    if !problem.box_is_adequate() {
        log::warn!(
            "box half width {} is below 8 T^(1/alpha) = {:.3}; kernel tails will wrap",
            grid.half_width(),
            8.0 * problem.horizon.powf(1.0 / alpha)
        );
    }
    let total = problem.step_count();
    if ((total as f64) * problem.dt - problem.horizon).abs() > 1e-9 * problem.horizon {
        log::warn!(
            "dt = {} does not divide T = {}; the run ends at {}",
            problem.dt,
            problem.horizon,
            total as f64 * problem.dt
        );
    }
    let samples = sample_steps(problem, total)?;
    let last_step = *samples.last().unwrap_or(&total);
    let p0 = admissible_p0(grid.dim(), alpha, problem.q);
    let stepper = ExponentialStepper::new(problem)?;
    let h = grid.cell_volume();

    let mut state = stepper.prepare(&problem.initial);
    let mut traj = Trajectory {
        problem: problem.clone(),
        alpha,
        p0,
        records: vec![DiagnosticsRecord::measure(&problem.initial, 0.0, problem.q, p0, 0.0, 0.0)?],
        fields: vec![problem.initial.clone()],
        status: RunStatus::Completed,
        steps_taken: 0,
        step_masses: vec![state.u_hat.coeffs()[0].re * h],
        sup_peak: problem.initial.max_abs(),
        gradient_sup_peak: state.eval.grad_sup,
        m_inf: None,
    };
    let mut q_cum = 0.0;
    let mut dissipation_cum = 0.0;
    let mut next_sample = 0;
    for k in 1..=last_step {
        let t = k as f64 * problem.dt;
        let (next, field) = match stepper.advance(&state, t) {
            Ok(v) => v,
            Err(Error::BlowUp { t, sup }) => {
                log::warn!("blow-up at t = {t}: sup |u| = {sup:e}");
                traj.status = RunStatus::BlowUp { t, sup };
                return Ok(traj);
            }
            Err(Error::StepControl { t }) => {
                log::warn!("non-finite values at t = {t}");
                traj.status = RunStatus::StepControlFailure { t };
                return Ok(traj);
            }
            Err(e) => return Err(e),
        };
        q_cum += 0.5 * problem.dt * (state.eval.grad_q_integral + next.eval.grad_q_integral);
        dissipation_cum +=
            0.5 * problem.dt * (state.eval.grad_2_integral + next.eval.grad_2_integral);
        state = next;
        traj.steps_taken = k;
        traj.step_masses.push(state.u_hat.coeffs()[0].re * h);
        traj.sup_peak = traj.sup_peak.max(field.max_abs());
        traj.gradient_sup_peak = traj.gradient_sup_peak.max(state.eval.grad_sup);
        if next_sample < samples.len() && samples[next_sample] == k {
            traj.records.push(DiagnosticsRecord::measure(
                &field,
                t,
                problem.q,
                p0,
                q_cum,
                dissipation_cum,
            )?);
            traj.fields.push(field);
            next_sample += 1;
        }
    }
    let m_inf = traj.final_record().mass;
    traj.fill_self_similar_errors(m_inf);
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::apply_semigroup;
    use crate::solver::dyadic_samples;
    use crate::spectral::PeriodicGrid;
    use crate::symbol::SymbolSpec;

    fn gaussian_problem(lambda: f64, q: f64, alpha: f64) -> ProblemSpec {
        let grid = PeriodicGrid::new(1, 256, 16.0).unwrap();
        ProblemSpec {
            symbol: SymbolSpec::fractional(alpha, 1.0).unwrap(),
            lambda,
            q,
            initial: Field::from_fn(grid, |x| (-x[0] * x[0] / 2.0).exp()),
            horizon: 2.0,
            dt: 0.01,
            sample_times: dyadic_samples(2.0, 4, 1),
        }
    }

    #[test]
    fn linear_run_matches_semigroup() {
        let p = gaussian_problem(0.0, 2.0, 1.5);
        let traj = run(&p).unwrap();
        assert!(traj.is_completed());
        assert_eq!(traj.records.len(), 6);
        for (r, f) in traj.records.iter().zip(&traj.fields) {
            let exact = apply_semigroup(&p.initial, r.t, &p.symbol).unwrap();
            assert!(f.max_abs_diff(&exact) < 1e-10, "t = {}", r.t);
        }
        assert!(diagnostics::mass_identity_residual(&traj).unwrap() < 1e-12);
    }

    #[test]
    fn evaporation_stays_between_zero_and_linear_flow() {
        let p = gaussian_problem(-1.0, 2.0, 1.5);
        let traj = run(&p).unwrap();
        for (r, f) in traj.records.iter().zip(&traj.fields) {
            let linear = apply_semigroup(&p.initial, r.t, &p.symbol).unwrap();
            for (u, l) in f.values().iter().zip(linear.values()) {
                assert!(*u >= -1e-9 && *u <= l + 1e-9, "t = {}", r.t);
            }
        }
        assert!(traj.mass_is_monotone(1e-10));
    }

    #[test]
    fn small_deposition_mass_nondecreasing() {
        let mut p = gaussian_problem(0.1, 2.0, 2.0);
        p.initial = p.initial.scaled(0.5);
        let traj = run(&p).unwrap();
        assert!(traj.is_completed());
        assert!(traj.step_masses.windows(2).all(|w| w[1] - w[0] >= -1e-10));
        assert!(traj.final_record().mass > traj.initial_mass());
        assert!(diagnostics::mass_identity_residual(&traj).unwrap() < 1e-4);
    }

    #[test]
    fn under_resolved_datum_is_rejected() {
        let mut p = gaussian_problem(-1.0, 2.0, 1.5);
        let grid = *p.initial.grid();
        p.initial = Field::from_fn(grid, |x| if x[0].abs() < 1.0 { 1.0 } else { 0.0 });
        assert!(matches!(run(&p), Err(Error::UnderResolvedData { .. })));
    }

    #[test]
    fn instability_is_recorded() {
        // A step far beyond the stability of the explicit nonlinear part.
        let mut p = gaussian_problem(1.0, 2.0, 2.0);
        p.initial = p.initial.scaled(30.0);
        p.dt = 0.5;
        p.sample_times = vec![1.0, 2.0];
        let traj = run(&p).unwrap();
        assert!(matches!(traj.status, RunStatus::BlowUp { .. } | RunStatus::StepControlFailure { .. }));
        assert!(diagnostics::mass_identity_residual(&traj).is_err());
    }
}
