use crate::error::{Error, Result};
use crate::solver::{RunStatus, Trajectory};
use crate::spectral::Field;

/// `∫u dx`, signed.
pub fn mass(f: &Field) -> f64 {
    f.values().iter().sum::<f64>() * f.grid().cell_volume()
}

/// `max_t |M(t) - M(0) - λQ(t)| / |M(0)|` over the recorded samples.
pub fn mass_identity_residual(traj: &Trajectory) -> Result<f64> {
    if traj.status != RunStatus::Completed {
        return Err(Error::IncompleteTrajectory);
    }
    let samples: Vec<(f64, f64)> = traj.records.iter().map(|r| (r.mass, r.q_cum)).collect();
    mass_residual(&samples, traj.problem.lambda)
}

/// The same residual on raw `(M(t), Q(t))` pairs, the first being `t = 0`.
pub fn mass_residual(samples: &[(f64, f64)], lambda: f64) -> Result<f64> {
    let &(m0, _) = samples
        .first()
        .ok_or_else(|| Error::InvalidData("no samples".into()))?;
    if m0 == 0.0 {
        return Err(Error::ZeroInitialMass);
    }
    Ok(samples
        .iter()
        .map(|&(m, q)| (m - m0 - lambda * q).abs() / m0.abs())
        .fold(0.0, f64::max))
}

/// Finite-time estimates of `M_∞ = lim M(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassLimit {
    pub at_end: f64,
    pub at_half: f64,
    /// Aitken extrapolation from `M(T/4), M(T/2), M(T)`; equals `at_end`
    /// when the differences are not geometric-like.
    pub extrapolated: f64,
    /// `|M(T) - M(T/2)| / M(T)`.
    pub plateau_quality: f64,
}

fn value_at(series: &[(f64, f64)], t: f64) -> Option<f64> {
    series
        .iter()
        .find(|(s, _)| (s - t).abs() <= 1e-9 * t.abs().max(1.0))
        .map(|&(_, m)| m)
}

/// Estimates the mass limit from a `(t, M)` series that contains the
/// dyadic samples `T/4`, `T/2` and `T`.
pub fn estimate_mass_limit(series: &[(f64, f64)]) -> Result<MassLimit> {
    let &(horizon, at_end) = series
        .last()
        .ok_or_else(|| Error::InvalidData("empty mass series".into()))?;
    let at_half = value_at(series, horizon / 2.0)
        .ok_or_else(|| Error::InvalidData(format!("no sample at T/2 = {}", horizon / 2.0)))?;
    let at_quarter = value_at(series, horizon / 4.0)
        .ok_or_else(|| Error::InvalidData(format!("no sample at T/4 = {}", horizon / 4.0)))?;
    let d1 = at_half - at_quarter;
    let d2 = at_end - at_half;
    let ratio = d2 / d1;
    let extrapolated = if d1 != 0.0 && ratio > 0.0 && ratio < 1.0 {
        at_end + d2 * ratio / (1.0 - ratio)
    } else {
        at_end
    };
    Ok(MassLimit {
        at_end,
        at_half,
        extrapolated,
        plateau_quality: plateau_quality(at_end, at_half),
    })
}

pub fn plateau_quality(at_end: f64, at_half: f64) -> f64 {
    if at_end == 0.0 {
        f64::INFINITY
    } else {
        (at_end - at_half).abs() / at_end.abs()
    }
}

/// Whether `values` move only in the direction of `sign` (`+1`
/// nondecreasing, `-1` nonincreasing) up to an absolute `slack` per step.
pub fn is_monotone(values: &[f64], sign: f64, slack: f64) -> bool {
    values.windows(2).all(|w| sign * (w[1] - w[0]) >= -slack)
}
