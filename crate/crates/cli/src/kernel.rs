//! The `kernel-table` and `validate` presets: checks on the linear
//! building blocks that need no time stepping.

use lkpz_core::oracle::{heat_kernel, periodic_cauchy_kernel, periodic_heat_kernel};
use lkpz_core::semigroup::{apply_semigroup, kernel_spectrum, stable_kernel, verify_self_similarity, KernelSpec};
use lkpz_core::spectral::{Field, PeriodicGrid};
use lkpz_core::symbol::{check_perturbation_condition, SymbolKind, SymbolSpec};

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::initial;
use crate::report::{Check, Report};

pub const KERNEL_HEADER: &str = "x,p_alpha";

/// `p_α(x, t)` at points `x` on the first axis, through the trigonometric
/// interpolant of the sampled kernel.
pub fn kernel_values(alpha: f64, t: f64, grid: PeriodicGrid, points: &[f64]) -> CliResult<Vec<(f64, f64)>> {
    let spec = KernelSpec::new(alpha, t, grid)?;
    spec.check_resolved()?;
    let spectrum = kernel_spectrum(&spec);
    Ok(points
        .iter()
        .map(|&x| (x, spectrum.evaluate_at(&[x, 0.0])))
        .collect())
}

pub fn write_kernel_csv(mut out: impl std::io::Write, values: &[(f64, f64)]) -> std::io::Result<()> {
    writeln!(out, "{KERNEL_HEADER}")?;
    for (x, p) in values {
        writeln!(out, "{x:e},{p:e}")?;
    }
    Ok(())
}

/// Largest deviation of the sampled kernel from `exact` over the grid.
fn closed_form_deviation(kernel: &Field, exact: impl Fn(&[f64]) -> f64) -> f64 {
    let grid = kernel.grid();
    (0..grid.len())
        .map(|flat| {
            let x = grid.point(flat);
            (kernel.values()[flat] - exact(&x[..grid.dim()])).abs()
        })
        .fold(0.0, f64::max)
}

pub struct KernelTable {
    pub values: Vec<(f64, f64)>,
    pub report: Report,
}

pub fn kernel_table(config: &ExperimentConfig) -> CliResult<KernelTable> {
    let grid = initial::grid(config)?;
    let alpha = config.alpha();
    let t = config.kernel.t;
    let values = kernel_values(alpha, t, grid, &config.kernel.points)?;
    let mut report = Report::new(format!("preset: {}", config.preset));
    report.note(format!("alpha = {alpha}, t = {t}, N = {}, n = {}, L = {}", grid.dim(), grid.n(), grid.half_width()));
    let kernel = stable_kernel(&KernelSpec::new(alpha, t, grid)?)?;
    let mass: f64 = kernel.values().iter().sum::<f64>() * grid.cell_volume();
    report.push(Check::require(
        "unit mass",
        (mass - 1.0).abs() < 1e-12,
        format!("sum p h^N - 1 = {:e}", mass - 1.0),
    ));
    match verify_self_similarity(alpha, t, 4.0 * t, &grid) {
        Ok(dev) => report.push(Check::require(
            "self-similarity",
            dev < 1e-6,
            format!("max |p(x,4t) - s^-N p(x/s,t)| / max p = {dev:e}"),
        )),
        Err(e) => report.push(Check::inconclusive("self-similarity", e.to_string())),
    }
    Ok(KernelTable { values, report })
}

/// Perturbation condition, closed-form kernels and heat evolution on the
/// configured grid.
pub fn validate(config: &ExperimentConfig) -> CliResult<Report> {
    let grid = initial::grid(config)?;
    let t = config.kernel.t;
    let mut report = Report::new(format!("preset: {}", config.preset));
    report.push(perturbation_check(&config.symbol));
    let checks: [(f64, Box<dyn Fn(&[f64]) -> f64>); 2] = [
        (2.0, Box::new(move |x: &[f64]| periodic_heat_kernel(x, t, grid.half_width()))),
        (1.0, Box::new(move |x: &[f64]| periodic_cauchy_kernel(x[0], t, grid.half_width()))),
    ];
    for (alpha, exact) in checks {
        if alpha == 1.0 && grid.dim() != 1 {
            continue;
        }
        let name = format!("kernel closed form alpha = {alpha}");
        match stable_kernel(&KernelSpec::new(alpha, t, grid)?) {
            Ok(kernel) => {
                let dev = closed_form_deviation(&kernel, exact);
                report.push(Check::require(&name, dev < 1e-8, format!("sup deviation {dev:e}")));
            }
            Err(e) => report.push(Check::inconclusive(&name, e.to_string())),
        }
    }
    let heat = SymbolSpec::fractional(2.0, 1.0)?;
    let sigma2 = (4.0 * grid.spacing()).powi(2).max(1.0);
    let gaussian = |s2: f64| {
        move |x: &[f64]| heat_kernel(x, s2 / 2.0)
    };
    let u0 = Field::from_fn(grid, gaussian(sigma2));
    let evolved = apply_semigroup(&u0, t, &heat)?;
    let exact = Field::from_fn(grid, gaussian(sigma2 + 2.0 * t));
    let dev = evolved.max_abs_diff(&exact);
    report.push(Check::require(
        "heat semigroup",
        dev < 1e-8,
        format!("sup |e^(t Delta) g - g_t| = {dev:e}"),
    ));
    Ok(report)
}

fn perturbation_check(symbol: &SymbolSpec) -> Check {
    let xi_min = match (&symbol.kind, &symbol.table) {
        (SymbolKind::Tabulated, Some(table)) => table.radii.iter().copied().find(|&r| r > 0.0).unwrap_or(1e-6),
        _ => 1e-6,
    };
    let outcome = check_perturbation_condition(symbol, xi_min, 1e-2);
    Check::require(
        "perturbation condition",
        outcome.holds,
        format!(
            "k(xi)/|xi|^alpha = {:e} at |xi| = {:e}",
            outcome.ratios.last().copied().unwrap_or(f64::NAN),
            outcome.radii.last().copied().unwrap_or(f64::NAN)
        ),
    )
}
