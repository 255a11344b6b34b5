//! Low-tech reference solvers that share no time-stepping code with the
//! spectral pipeline: a direct periodic convolution for `e^{-tL}` and an
//! explicit finite-difference scheme for the classical Laplacian.

use crate::diagnostics::{admissible_p0, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::semigroup::{stable_kernel, KernelSpec};
use crate::solver::{ProblemSpec, RunStatus, Trajectory};
use crate::spectral::{Field, PeriodicGrid};
use crate::symbol::SymbolKind;

const MAX_POINTS_1D: usize = 256;
const MAX_POINTS_2D: usize = 64;

/// `e^{-tL} f` as a direct periodic convolution with the sampled α-stable
/// kernel, clipped at zero and renormalised to unit mass.
pub fn convolve_semigroup(f: &Field, t: f64, alpha: f64) -> Result<Field> {
    let grid = *f.grid();
    let n = grid.n();
    let limit = if grid.dim() == 1 {
        MAX_POINTS_1D
    } else {
        MAX_POINTS_2D
    };
    if n > limit {
        return Err(Error::InvalidArgument(format!(
            "direct convolution limited to {limit} points per axis, got {n}"
        )));
    }
    let mut kernel = stable_kernel(&KernelSpec::new(alpha, t, grid)?)?.map(|v| v.max(0.0));
    let total: f64 = kernel.values().iter().sum();
    for v in kernel.values_mut() {
        *v /= total;
    }
    let k = kernel.values();
    let u = f.values();
    let centre = n / 2;
    let wrap = |i: usize, j: usize| (i + n + centre - j) % n;
    let values = match grid.dim() {
        1 => (0..n)
            .map(|i| (0..n).map(|j| k[wrap(i, j)] * u[j]).sum())
            .collect(),
        _ => (0..n * n)
            .map(|flat| {
                let (i0, i1) = (flat / n, flat % n);
                let mut acc = 0.0;
                for j0 in 0..n {
                    let row = wrap(i0, j0) * n;
                    for j1 in 0..n {
                        acc += k[row + wrap(i1, j1)] * u[j0 * n + j1];
                    }
                }
                acc
            })
            .collect(),
    };
    Field::from_values(grid, values)
}

/// Heat kernel `(4πt)^{-N/2} e^{-|x|^2/4t}` on the whole space.
pub fn heat_kernel(x: &[f64], t: f64) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    (4.0 * std::f64::consts::PI * t).powf(-(x.len() as f64) / 2.0) * (-r2 / (4.0 * t)).exp()
}

/// Cauchy kernel `t / (π(x^2 + t^2))`, the 1D kernel for `α = 1`.
pub fn cauchy_kernel(x: f64, t: f64) -> f64 {
    t / (std::f64::consts::PI * (x * x + t * t))
}

/// Heat kernel summed over the periodic images of the box `[-L, L)^N`.
pub fn periodic_heat_kernel(x: &[f64], t: f64, half_width: f64) -> f64 {
    let period = 2.0 * half_width;
    let reach = (1.0 + (40.0 * t).sqrt() / period).ceil() as i64;
    x.iter()
        .map(|&xi| {
            (-reach..=reach)
                .map(|k| heat_kernel(&[xi + k as f64 * period], t))
                .sum::<f64>()
        })
        .product()
}

/// Cauchy kernel summed over the images of `[-L, L)`, in closed form
/// `sinh(πt/L) / (2L(cosh(πt/L) - cos(πx/L)))`.
pub fn periodic_cauchy_kernel(x: f64, t: f64, half_width: f64) -> f64 {
    let a = std::f64::consts::PI * t / half_width;
    let b = std::f64::consts::PI * x / half_width;
    a.sinh() / (2.0 * half_width * (a.cosh() - b.cos()))
}

/// Diffusion coefficient `ν` of a symbol `ν|ξ|^2`, if it is one.
fn laplacian_coefficient(problem: &ProblemSpec) -> Option<f64> {
    let symbol = &problem.symbol;
    if !symbol.is_pure_laplacian() {
        return None;
    }
    Some(match symbol.kind {
        SymbolKind::Multifractional => symbol.terms.iter().map(|t| t.coefficient).sum(),
        _ => symbol.ell,
    })
}

/// Largest stable explicit step `h^2 / (4Nν)`.
pub fn fd_stable_step(grid: &PeriodicGrid, diffusion: f64) -> f64 {
    grid.spacing().powi(2) / (4.0 * grid.dim() as f64 * diffusion)
}

struct FdOperator {
    grid: PeriodicGrid,
    diffusion: f64,
    lambda: f64,
    q: f64,
}

impl FdOperator {
    /// Neighbour flat indices `(minus, plus)` along `axis`.
    fn neighbours(&self, flat: usize, axis: usize) -> (usize, usize) {
        let n = self.grid.n();
        let stride = if self.grid.dim() == 2 && axis == 0 { n } else { 1 };
        let i = (flat / stride) % n;
        let base = flat - i * stride;
        (base + ((i + n - 1) % n) * stride, base + ((i + 1) % n) * stride)
    }

    /// Returns the right-hand side and `∫|∇_h u|^q`.
    fn rhs(&self, u: &[f64]) -> (Vec<f64>, f64) {
        let h = self.grid.spacing();
        let mut grad_q = 0.0;
        let out = (0..u.len())
            .map(|flat| {
                let mut lap = 0.0;
                let mut grad_sq = 0.0;
                for axis in 0..self.grid.dim() {
                    let (m, p) = self.neighbours(flat, axis);
                    lap += u[p] - 2.0 * u[flat] + u[m];
                    grad_sq += ((u[p] - u[m]) / (2.0 * h)).powi(2);
                }
                let g = grad_sq.powf(self.q / 2.0);
                grad_q += g;
                self.diffusion * lap / (h * h) + self.lambda * g
            })
            .collect();
        (out, grad_q * self.grid.cell_volume())
    }
}

/// Explicit Euler with centred differences for `u_t = νΔu + λ|∇u|^q`.
///
/// Samples land on the same snapped times as the spectral runner. The
/// records reuse the spectral diagnostics, except `Qcum`, which integrates
/// the difference gradient.
pub fn fd_solve(problem: &ProblemSpec) -> Result<Trajectory> {
    problem.validate()?;
    let diffusion = laplacian_coefficient(problem).ok_or_else(|| {
        Error::InvalidArgument("finite differences need a pure Laplacian symbol".into())
    })?;
    let grid = *problem.initial.grid();
    let limit = fd_stable_step(&grid, diffusion);
    if problem.dt > limit {
        return Err(Error::InvalidArgument(format!(
            "dt = {} exceeds the explicit stability bound h^2/(4N nu) = {limit}",
            problem.dt
        )));
    }
    let op = FdOperator {
        grid,
        diffusion,
        lambda: problem.lambda,
        q: problem.q,
    };
    let total = problem.step_count();
    let samples: Vec<usize> = problem
        .sample_times
        .iter()
        .map(|&t| ((t / problem.dt).round() as usize).clamp(1, total))
        .collect();
    let p0 = admissible_p0(grid.dim(), 2.0, problem.q);
    let h = grid.cell_volume();
    let mut u = problem.initial.values().to_vec();
    let (mut rate, mut grad_q) = op.rhs(&u);
    let mut traj = Trajectory {
        problem: problem.clone(),
        alpha: 2.0,
        p0,
        records: vec![DiagnosticsRecord::measure(&problem.initial, 0.0, problem.q, p0, 0.0, 0.0)?],
        fields: vec![problem.initial.clone()],
        status: RunStatus::Completed,
        steps_taken: 0,
        step_masses: vec![u.iter().sum::<f64>() * h],
        sup_peak: problem.initial.max_abs(),
        gradient_sup_peak: 0.0,
        m_inf: None,
    };
    let mut q_cum = 0.0;
    let mut next_sample = 0;
    let last = *samples.last().unwrap_or(&total);
    for k in 1..=last {
        for (v, r) in u.iter_mut().zip(&rate) {
            *v += problem.dt * r;
        }
        let t = k as f64 * problem.dt;
        if u.iter().any(|v| !v.is_finite()) {
            traj.status = RunStatus::StepControlFailure { t };
            return Ok(traj);
        }
        let (next_rate, next_grad_q) = op.rhs(&u);
        q_cum += 0.5 * problem.dt * (grad_q + next_grad_q);
        rate = next_rate;
        grad_q = next_grad_q;
        traj.steps_taken = k;
        traj.step_masses.push(u.iter().sum::<f64>() * h);
        traj.sup_peak = traj.sup_peak.max(u.iter().fold(0.0, |m, v| m.max(v.abs())));
        if next_sample < samples.len() && samples[next_sample] == k {
            let field = Field::from_values(grid, u.clone())?;
            traj.records
                .push(DiagnosticsRecord::measure(&field, t, problem.q, p0, q_cum, f64::NAN)?);
            traj.fields.push(field);
            next_sample += 1;
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::apply_semigroup;
    use crate::solver::run;
    use crate::spectral::lp_norm;
    use crate::symbol::SymbolSpec;

    fn heat_problem(n: usize, l: f64, lambda: f64, amplitude: f64) -> ProblemSpec {
        let grid = PeriodicGrid::new(1, n, l).unwrap();
        let dt = fd_stable_step(&grid, 1.0) / 2.0;
        let steps = (1.0 / dt).ceil();
        ProblemSpec {
            symbol: SymbolSpec::fractional(2.0, 1.0).unwrap(),
            lambda,
            q: 2.0,
            initial: Field::from_fn(grid, |x| amplitude * (-x[0] * x[0] / 2.0).exp()),
            horizon: 1.0,
            dt: 1.0 / steps,
            sample_times: vec![0.5, 1.0],
        }
    }

    #[test]
    fn periodic_kernels_match_whole_line_far_from_images() {
        let l = 1000.0;
        for x in [0.0, 0.5, 3.0] {
            let c = cauchy_kernel(x, 1.0);
            assert!((periodic_cauchy_kernel(x, 1.0, l) - c).abs() < 1e-6);
            let h = heat_kernel(&[x], 1.0);
            assert!((periodic_heat_kernel(&[x], 1.0, 20.0) - h).abs() < 1e-10);
        }
        let sum: f64 = (0..400)
            .map(|j| periodic_cauchy_kernel(-2.0 + j as f64 * 0.01, 0.3, 2.0) * 0.01)
            .sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn convolution_matches_multiplier() {
        let grid = PeriodicGrid::new(1, 256, 16.0).unwrap();
        let f = Field::from_fn(grid, |x| (-(x[0] - 1.0).powi(2) / 3.0).exp());
        let spec = SymbolSpec::fractional(2.0, 1.0).unwrap();
        let a = convolve_semigroup(&f, 1.5, 2.0).unwrap();
        let b = apply_semigroup(&f, 1.5, &spec).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-8);
        let c = Field::constant(grid, 2.5);
        assert!(convolve_semigroup(&c, 1.5, 1.5).unwrap().max_abs_diff(&c) < 1e-13);
        assert!(convolve_semigroup(&f, 1.5, 1.2).unwrap().min() >= 0.0);
    }

    #[test]
    fn convolution_in_two_dimensions() {
        let grid = PeriodicGrid::new(2, 64, 8.0).unwrap();
        let f = Field::from_fn(grid, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp());
        let spec = SymbolSpec::fractional(2.0, 1.0).unwrap();
        let a = convolve_semigroup(&f, 1.0, 2.0).unwrap();
        let b = apply_semigroup(&f, 1.0, &spec).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-8);
        let big = PeriodicGrid::new(2, 128, 8.0).unwrap();
        assert!(convolve_semigroup(&Field::zeros(big), 1.0, 2.0).is_err());
    }

    #[test]
    fn heat_against_closed_form() {
        let p = heat_problem(256, 12.0, 0.0, 1.0);
        let traj = fd_solve(&p).unwrap();
        // Variance 1 + 2t at t = 1.
        let exact = Field::from_fn(*p.initial.grid(), |x| (-x[0] * x[0] / 6.0).exp() / 3f64.sqrt());
        assert!(traj.final_field().max_abs_diff(&exact) < 1e-4);
        let mut c = p.clone();
        c.initial = Field::constant(*p.initial.grid(), 0.3);
        let flat = fd_solve(&c).unwrap();
        assert!(flat.final_field().max_abs_diff(&c.initial) < 1e-15);
    }

    #[test]
    fn rejects_unstable_step_and_fractional_symbols() {
        let mut p = heat_problem(64, 8.0, 0.0, 1.0);
        p.dt = 0.1;
        p.sample_times = vec![1.0];
        assert!(matches!(fd_solve(&p), Err(Error::InvalidArgument(_))));
        let mut p = heat_problem(64, 8.0, 0.0, 1.0);
        p.symbol = SymbolSpec::fractional(1.5, 1.0).unwrap();
        assert!(fd_solve(&p).is_err());
    }

    #[test]
    fn discrete_maximum_principle() {
        let p = heat_problem(128, 10.0, -1.0, 1.0);
        let traj = fd_solve(&p).unwrap();
        for f in &traj.fields {
            assert!(f.min() >= 0.0);
            assert!(f.max() <= 1.0);
        }
    }

    #[test]
    fn agreement_improves_at_second_order() {
        let errors: Vec<f64> = [64, 128, 256]
            .iter()
            .map(|&n| {
                let p = heat_problem(n, 10.0, -1.0, 1.0);
                let fd = fd_solve(&p).unwrap();
                let sp = run(&p).unwrap();
                lp_norm(&fd.final_field().sub(sp.final_field()), 2.0).unwrap()
            })
            .collect();
        for w in errors.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 1.8, "order {order} from {errors:?}");
        }
    }
}
