//! Single-run presets: build the problem, integrate, and judge the recorded
//! diagnostics.

use lkpz_core::diagnostics::{
    estimate_mass_limit, fit_power_law, mass_identity_residual, weighted_gradient, ExponentFit,
    MassLimit,
};
use lkpz_core::solver::{run, ProblemSpec, RunStatus, Trajectory};

use crate::config::{ExperimentConfig, Preset};
use crate::error::CliResult;
use crate::initial::{self, InitialDatum};
use crate::report::{Check, Report};

/// Smallness threshold of the small-data presets.
pub const SMALLNESS_LIMIT: f64 = 0.1;
/// `|M(T) - M(T/2)| / M(T)` below this counts as a plateau.
pub const PLATEAU_LIMIT: f64 = 0.01;
/// Tolerance of the maximum principle.
pub const SUP_SLACK: f64 = 1e-9;
/// Gradient-decay constant against `D(u_0, p_0)`.
pub const GRADIENT_DECAY_FACTOR: f64 = 3.0;

pub struct RunOutcome {
    pub report: Report,
    pub trajectory: Trajectory,
    pub fits: Vec<(String, ExponentFit)>,
    pub initial: InitialDatum,
}

pub fn problem_spec(config: &ExperimentConfig, u0: lkpz_core::Field) -> ProblemSpec {
    ProblemSpec {
        symbol: config.symbol.clone(),
        lambda: config.lambda,
        q: config.q,
        initial: u0,
        horizon: config.horizon,
        dt: config.dt,
        sample_times: config.sample_times(),
    }
}

/// Lower bound on the mass growth exponent for `1 < q ≤ q_c`: `(1+α-2q)/(2q)`
/// on the line and `(N+α-(N+1)q)/α` for `N ≥ 2`.
pub fn growth_exponent_bound(dim: usize, alpha: f64, q: f64) -> f64 {
    if dim == 1 {
        (1.0 + alpha - 2.0 * q) / (2.0 * q)
    } else {
        let n = dim as f64;
        (n + alpha - (n + 1.0) * q) / alpha
    }
}

/// Fit window of the late-time exponents: the last four octaves.
pub fn fit_window(horizon: f64) -> (f64, f64) {
    (horizon / 16.0, horizon)
}

/// Integrates a configured problem and returns its report.
pub fn run_single(config: &ExperimentConfig) -> CliResult<RunOutcome> {
    let datum = initial::build(config)?;
    let problem = problem_spec(config, datum.field.clone());
    if config.preset.is_theorem_preset() {
        problem.validate_theorem_preset()?;
    }
    let mut traj = run(&problem)?;
    let mut report = Report::new(format!("preset: {}", config.preset));
    describe(&mut report, config, &datum);
    if let RunStatus::BlowUp { t, sup } = traj.status {
        report.solver_failure = Some(format!("blow-up at t = {t}: sup |u| = {sup:e}"));
    } else if let RunStatus::StepControlFailure { t } = traj.status {
        report.solver_failure = Some(format!("non-finite values at t = {t}"));
    }
    let limit = if traj.is_completed() {
        let limit = estimate_mass_limit(&traj.mass_series()).ok();
        if let Some(l) = limit {
            traj.fill_self_similar_errors(l.extrapolated);
        }
        limit
    } else {
        None
    };
    let fits = late_fits(&traj);
    if traj.is_completed() {
        common_checks(&mut report, &traj);
        preset_checks(&mut report, config, &traj, &datum, limit, &fits);
    }
    Ok(RunOutcome {
        report,
        trajectory: traj,
        fits,
        initial: datum,
    })
}

fn describe(report: &mut Report, config: &ExperimentConfig, datum: &InitialDatum) {
    let g = &config.grid;
    report.note(format!(
        "N = {}, n = {}, L = {}, alpha = {}, lambda = {}, q = {}, q_c = {}",
        g.dim,
        g.n,
        g.half_width,
        config.alpha(),
        config.lambda,
        config.q,
        config.critical_exponent()
    ));
    report.note(format!("T = {}, dt = {}, seed = {}", config.horizon, config.dt, config.seed));
    if datum.scale != 1.0 {
        report.note(format!("initial datum scaled by {:e} for the smallness gate", datum.scale));
    }
    if let Some(s) = &datum.small {
        report.note(format!(
            "p0 = {}, D(u0, p0) = {:e} at t = {:e}, |grad u0|_inf = {:e}, smallness = {:e}",
            s.p0, s.d.value, s.d.argmax, s.gradient_sup, s.combination
        ));
    }
}

fn series(traj: &Trajectory, value: impl Fn(&lkpz_core::diagnostics::DiagnosticsRecord) -> f64) -> Vec<(f64, f64)> {
    traj.records
        .iter()
        .filter(|r| r.t > 0.0)
        .map(|r| (r.t, value(r)))
        .collect()
}

fn late_fits(traj: &Trajectory) -> Vec<(String, ExponentFit)> {
    let (t_a, t_b) = fit_window(traj.final_record().t);
    let quantities: [(&str, fn(&lkpz_core::diagnostics::DiagnosticsRecord) -> f64); 5] = [
        ("M", |r| r.mass),
        ("Linf", |r| r.linf),
        ("Ginf", |r| r.ginf),
        ("SSE_r1", |r| r.sse_r1),
        ("SSE_r2", |r| r.sse_r2),
    ];
    quantities
        .iter()
        .filter_map(|(name, f)| {
            fit_power_law(&series(traj, f), t_a, t_b)
                .ok()
                .map(|fit| (name.to_string(), fit))
        })
        .collect()
}

fn fit<'a>(fits: &'a [(String, ExponentFit)], name: &str) -> Option<&'a ExponentFit> {
    fits.iter().find(|(n, _)| n == name).map(|(_, f)| f)
}

fn common_checks(report: &mut Report, traj: &Trajectory) {
    let lambda = traj.problem.lambda;
    let tol = if lambda == 0.0 { 1e-12 } else { 1e-4 };
    match mass_identity_residual(traj) {
        Ok(r) => report.push(Check::require(
            "mass identity",
            r < tol,
            format!("max |M(t) - M(0) - lambda Q(t)| / |M(0)| = {r:e} (limit {tol:e})"),
        )),
        Err(e) => report.push(Check::require("mass identity", false, e.to_string())),
    }
    let u0 = &traj.records[0];
    report.push(Check::require(
        "maximum principle",
        traj.sup_peak <= u0.linf * (1.0 + SUP_SLACK),
        format!("max_t |u|_inf = {:e}, |u0|_inf = {:e}", traj.sup_peak, u0.linf),
    ));
    report.push(Check::require(
        "gradient maximum principle",
        traj.gradient_sup_peak <= u0.ginf * (1.0 + SUP_SLACK),
        format!(
            "max_t |grad u|_inf = {:e}, |grad u0|_inf = {:e}",
            traj.gradient_sup_peak, u0.ginf
        ),
    ));
    if lambda != 0.0 {
        let direction = if lambda > 0.0 { "nondecreasing" } else { "nonincreasing" };
        report.push(Check::require(
            "mass monotonicity",
            traj.mass_is_monotone(1e-12),
            format!("M(t) {direction} at every step"),
        ));
    }
    let tail = traj.final_record().tail_frac;
    if tail > 1e-3 {
        report.note(format!("warning: outer shell carries {tail:e} of the final L1 norm"));
    }
}

fn preset_checks(
    report: &mut Report,
    config: &ExperimentConfig,
    traj: &Trajectory,
    datum: &InitialDatum,
    limit: Option<MassLimit>,
    fits: &[(String, ExponentFit)],
) {
    let m0 = traj.initial_mass();
    let end = traj.final_record();
    let ratio = end.mass / m0;
    let dim = config.grid.dim;
    let alpha = config.alpha();
    let horizon = end.t;
    let mass_slope = fit(fits, "M").map(|f| f.slope);
    let plateau = limit.map_or(f64::NAN, |l| l.plateau_quality);
    let plateau_check = || {
        Check::require(
            "mass plateau",
            plateau < PLATEAU_LIMIT,
            format!("|M(T) - M(T/2)| / M(T) = {plateau:e} (limit {PLATEAU_LIMIT})"),
        )
    };
    match config.preset {
        Preset::LinearSelfsim => {
            let errors: Vec<(f64, f64)> = series(traj, |r| r.sse_r1)
                .into_iter()
                .filter(|(_, e)| e.is_finite())
                .collect();
            let decreasing = errors.len() >= 2 && errors.windows(2).all(|w| w[1].1 < w[0].1);
            report.push(Check::require(
                "self-similar error decreasing",
                decreasing,
                format!(
                    "{} resolved samples, |u - M p_alpha|_1 from {:e} to {:e}",
                    errors.len(),
                    errors.first().map_or(f64::NAN, |e| e.1),
                    errors.last().map_or(f64::NAN, |e| e.1)
                ),
            ));
            for (name, expected) in [
                ("Linf", -(dim as f64) / alpha),
                ("Ginf", -(dim as f64 + 1.0) / alpha),
            ] {
                let slope = fit(fits, name).map_or(f64::NAN, |f| f.slope);
                report.push(Check::require(
                    format!("{name} decay slope"),
                    (slope - expected).abs() <= 0.05 * expected.abs(),
                    format!("fitted {slope:.6} vs {expected:.6} (5%)"),
                ));
            }
        }
        Preset::DepositionSubcritical => {
            report.push(Check::require(
                "mass growth",
                ratio > 2.0,
                format!("M(T)/M(0) = {ratio:.6} (need > 2)"),
            ));
            let bound = growth_exponent_bound(dim, alpha, config.q);
            let slope = mass_slope.unwrap_or(f64::NAN);
            report.push(Check::require(
                "growth rate lower bound",
                slope >= bound - 0.05,
                format!("fitted slope {slope:.6} >= {bound:.6} - 0.05"),
            ));
        }
        Preset::DepositionSupercritical => {
            smallness_check(report, datum);
            report.push(plateau_check());
            gradient_decay_check(report, traj, datum);
        }
        Preset::DepositionBrownianQ2 => {
            report.push(plateau_check());
            let (half, _) = traj.sample_near(horizon / 2.0);
            let increment = (end.dissipation_cum - half.dissipation_cum) / end.dissipation_cum;
            report.push(Check::require(
                "dissipation bounded",
                increment < 0.01,
                format!(
                    "int_0^T |grad u|_2^2 = {:e}, last dyadic increment {increment:e} of the total",
                    end.dissipation_cum
                ),
            ));
        }
        Preset::EvaporationSubcritical => {
            let slope = mass_slope.unwrap_or(f64::NAN);
            report.push(Check::require(
                "mass decay",
                ratio < 0.2 && slope < 0.0,
                format!("M(T)/M(0) = {ratio:.6} (need < 0.2), fitted slope {slope:.6} (need < 0)"),
            ));
        }
        Preset::EvaporationSupercritical => {
            smallness_check(report, datum);
            let m_inf = limit.map_or(f64::NAN, |l| l.extrapolated);
            report.push(Check::require(
                "positive mass limit",
                m_inf > 0.5 * m0,
                format!("M_inf estimate {m_inf:e} vs M(0) = {m0:e} (need > 0.5 M(0))"),
            ));
            report.push(plateau_check());
            self_similar_checks(report, traj, horizon);
            gradient_decay_check(report, traj, datum);
        }
        Preset::SweepQ | Preset::KernelTable | Preset::Validate => {}
    }
}

fn smallness_check(report: &mut Report, datum: &InitialDatum) {
    match &datum.small {
        Some(s) => report.push(Check::require(
            "small data",
            s.combination < SMALLNESS_LIMIT,
            format!(
                "|lambda| |grad u0|_inf^(q-p0) D(u0,p0)^(p0-1) = {:e} (limit {SMALLNESS_LIMIT})",
                s.combination
            ),
        )),
        None => report.push(Check::require("small data", false, "no admissible p0")),
    }
}

/// `|u(t) - M_∞ p_α(t)|` at `T/4` against `T/32`: the L1 error must halve
/// and the weighted L2 error must decrease.
fn self_similar_checks(report: &mut Report, traj: &Trajectory, horizon: f64) {
    let (early, _) = traj.sample_near(horizon / 32.0);
    let (late, _) = traj.sample_near(horizon / 4.0);
    report.push(Check::require(
        "self-similar L1 convergence",
        late.sse_r1 < 0.5 * early.sse_r1,
        format!(
            "|u - M_inf p_alpha|_1 = {:e} at t = {} vs {:e} at t = {}",
            late.sse_r1, late.t, early.sse_r1, early.t
        ),
    ));
    report.push(Check::require(
        "self-similar weighted L2 convergence",
        late.sse_r2 < early.sse_r2,
        format!(
            "t^(N/2alpha) |u - M_inf p_alpha|_2 = {:e} at t = {} vs {:e} at t = {}",
            late.sse_r2, late.t, early.sse_r2, early.t
        ),
    ));
}

fn gradient_decay_check(report: &mut Report, traj: &Trajectory, datum: &InitialDatum) {
    let Some(small) = &datum.small else {
        report.push(Check::require("gradient decay", false, "no admissible p0"));
        return;
    };
    let dim = traj.problem.initial.grid().dim();
    let values: Vec<f64> = traj
        .records
        .iter()
        .filter(|r| r.t > 0.0)
        .map(|r| weighted_gradient(r.t, r.gp0, dim, traj.alpha, small.p0))
        .collect();
    let worst = if values.iter().any(|v| v.is_nan()) {
        f64::NAN
    } else {
        values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    };
    let bound = GRADIENT_DECAY_FACTOR * small.d.value;
    let holds = worst <= bound;
    let detail = format!(
        "max_t t^(1/alpha)(1+t)^beta |grad u|_p0 = {worst:e} vs {GRADIENT_DECAY_FACTOR} D(u0,p0) = {bound:e}"
    );
    if !holds && !small.d.bracketed {
        report.push(Check::inconclusive(
            "gradient decay",
            format!("{detail}; D not bracketed by its ladder"),
        ));
    } else {
        report.push(Check::require("gradient decay", holds, detail));
    }
}
