//! Runs one configuration across a list of exponents `q` and classifies the
//! mass regime of each.

use std::fmt;
use std::path::Path;

use lkpz_core::diagnostics::{estimate_mass_limit, plateau_quality};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::execute::write_run_outputs;
use crate::presets::{run_single, PLATEAU_LIMIT};
use crate::report::{Check, Report};

pub const GROWTH_SLOPE: f64 = 0.02;
pub const DECAY_RATIO: f64 = 0.2;
pub const SWEEP_HEADER: &str = "q,M_ratio,slope,plateau_quality,regime";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Growing,
    Plateau,
    Decaying,
    Transitional,
    Failed,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Growing => "growing",
            Regime::Plateau => "plateau",
            Regime::Decaying => "decaying-to-zero",
            Regime::Transitional => "transitional",
            Regime::Failed => "failed",
        })
    }
}

/// Growing beats plateau, which beats decaying; anything else is
/// transitional.
pub fn classify(mass_ratio: f64, slope: f64, plateau: f64) -> Regime {
    if slope > GROWTH_SLOPE {
        Regime::Growing
    } else if plateau < PLATEAU_LIMIT {
        Regime::Plateau
    } else if mass_ratio < DECAY_RATIO && slope < 0.0 {
        Regime::Decaying
    } else {
        Regime::Transitional
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub q: f64,
    pub mass_ratio: f64,
    pub slope: f64,
    pub plateau_quality: f64,
    pub regime: Regime,
}

pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub report: Report,
}

/// Subdirectory holding the run for one exponent.
pub fn run_dir_name(q: f64) -> String {
    format!("q_{q}")
}

fn run_one(config: &ExperimentConfig, q: f64, out: &Path) -> CliResult<(SweepRow, Option<String>)> {
    let mut c = config.clone();
    c.q = q;
    c.initial.smallness = None;
    log::info!("sweep: q = {q}");
    let outcome = run_single(&c)?;
    write_run_outputs(&out.join(run_dir_name(q)), &outcome, c.snapshots)?;
    let traj = &outcome.trajectory;
    if let Some(failure) = &outcome.report.solver_failure {
        let row = SweepRow {
            q,
            mass_ratio: f64::NAN,
            slope: f64::NAN,
            plateau_quality: f64::NAN,
            regime: Regime::Failed,
        };
        return Ok((row, Some(format!("q = {q}: {failure}"))));
    }
    let m0 = traj.initial_mass();
    let end = traj.final_record();
    let plateau = estimate_mass_limit(&traj.mass_series())
        .map(|l| l.plateau_quality)
        .unwrap_or_else(|_| {
            let (half, _) = traj.sample_near(end.t / 2.0);
            plateau_quality(end.mass, half.mass)
        });
    let slope = outcome
        .fits
        .iter()
        .find(|(name, _)| name == "M")
        .map_or(f64::NAN, |(_, f)| f.slope);
    let mass_ratio = end.mass / m0;
    let row = SweepRow {
        q,
        mass_ratio,
        slope,
        plateau_quality: plateau,
        regime: classify(mass_ratio, slope, plateau),
    };
    Ok((row, None))
}

pub fn write_sweep_csv(mut out: impl std::io::Write, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{:e},{:e},{:e},{:e},{}",
            r.q, r.mass_ratio, r.slope, r.plateau_quality, r.regime
        )?;
    }
    Ok(())
}

/// Runs every `q` concurrently, each in its own subdirectory of `out`.
pub fn sweep_q(config: &ExperimentConfig, out: &Path) -> CliResult<SweepOutcome> {
    let results: Vec<CliResult<(SweepRow, Option<String>)>> = config
        .sweep_q
        .par_iter()
        .map(|&q| run_one(config, q, out))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for r in results {
        let (row, failure) = r?;
        rows.push(row);
        failures.extend(failure);
    }
    rows.sort_by(|a, b| a.q.total_cmp(&b.q));
    let mut report = Report::new(format!("preset: {}", config.preset));
    let q_c = config.critical_exponent();
    report.note(format!(
        "N = {}, alpha = {}, lambda = {}, q_c = {q_c}, T = {}",
        config.grid.dim,
        config.alpha(),
        config.lambda,
        config.horizon
    ));
    for r in &rows {
        report.note(format!(
            "q = {}: M(T)/M(0) = {:e}, slope = {:e}, plateau quality = {:e}, {}",
            r.q, r.mass_ratio, r.slope, r.plateau_quality, r.regime
        ));
    }
    if !failures.is_empty() {
        report.solver_failure = Some(failures.join("; "));
    }
    report.push(dichotomy_check(&rows, config.lambda, q_c));
    Ok(SweepOutcome { rows, report })
}

/// The regime must switch at `q_c` to within one step of the `q` grid.
pub fn dichotomy_check(rows: &[SweepRow], lambda: f64, q_c: f64) -> Check {
    const NAME: &str = "critical exponent dichotomy";
    if lambda == 0.0 {
        let holds = rows
            .iter()
            .all(|r| r.regime == Regime::Plateau && r.slope.abs() <= 1e-6);
        return Check::require(NAME, holds, "lambda = 0: every row a plateau with |slope| <= 1e-6");
    }
    let below = if lambda < 0.0 { Regime::Decaying } else { Regime::Growing };
    if rows.len() < 2 {
        return Check::require(NAME, false, "need at least two exponents");
    }
    let step = (rows[rows.len() - 1].q - rows[0].q) / (rows.len() - 1) as f64;
    let last_below = rows.iter().filter(|r| r.regime == below).map(|r| r.q).reduce(f64::max);
    let first_plateau = rows
        .iter()
        .filter(|r| r.regime == Regime::Plateau)
        .map(|r| r.q)
        .reduce(f64::min);
    let (Some(lo), Some(hi)) = (last_below, first_plateau) else {
        return Check::require(
            NAME,
            false,
            format!(
                "largest {below} q = {last_below:?}, smallest plateau q = {first_plateau:?}"
            ),
        );
    };
    let slack = 1e-9 * step;
    let holds = lo < hi && (lo - q_c).abs() <= step + slack && (hi - q_c).abs() <= step + slack;
    Check::require(
        NAME,
        holds,
        format!("largest {below} q = {lo}, smallest plateau q = {hi}, q_c = {q_c}, step = {step}"),
    )
}

pub fn write_sweep(out: &Path, outcome: &SweepOutcome) -> CliResult<()> {
    let path = out.join("sweep.csv");
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &outcome.rows).expect("writing to memory");
    std::fs::write(&path, buf).map_err(|source| CliError::Write { path, source })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(q: f64, regime: Regime) -> SweepRow {
        SweepRow {
            q,
            mass_ratio: 1.0,
            slope: 0.0,
            plateau_quality: 0.0,
            regime,
        }
    }

    #[test]
    fn classification_precedence() {
        assert_eq!(classify(3.0, 0.1, 0.5), Regime::Growing);
        assert_eq!(classify(0.1, -0.5, 0.001), Regime::Plateau);
        assert_eq!(classify(0.1, -0.5, 0.3), Regime::Decaying);
        assert_eq!(classify(0.5, -0.1, 0.3), Regime::Transitional);
        assert_eq!(classify(1.0, 0.0, 0.0), Regime::Plateau);
    }

    #[test]
    fn dichotomy_within_one_step() {
        let rows = vec![
            row(1.1, Regime::Decaying),
            row(1.2, Regime::Decaying),
            row(1.3, Regime::Plateau),
            row(1.4, Regime::Plateau),
        ];
        assert_eq!(dichotomy_check(&rows, -1.0, 1.25).verdict, crate::report::Verdict::Pass);
        let late = vec![
            row(1.1, Regime::Decaying),
            row(1.2, Regime::Transitional),
            row(1.3, Regime::Transitional),
            row(1.4, Regime::Plateau),
        ];
        assert_eq!(dichotomy_check(&late, -1.0, 1.25).verdict, crate::report::Verdict::Fail);
    }
}
