use crate::error::{Error, Result};
use crate::spectral::Field;
use crate::symbol::SymbolSpec;

/// A full instance of `u_t = -Lu + λ|∇u|^q`, `u(0) = u_0`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub symbol: SymbolSpec,
    /// Deposition for `λ > 0`, evaporation for `λ < 0`.
    pub lambda: f64,
    pub q: f64,
    pub initial: Field,
    pub horizon: f64,
    pub dt: f64,
    /// Increasing sample times in `(0, horizon]`.
    pub sample_times: Vec<f64>,
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        self.symbol.validate()?;
        if !(self.q > 1.0 && self.q.is_finite()) {
            return Err(Error::InvalidProblem(format!("q = {} must exceed 1", self.q)));
        }
        if !self.lambda.is_finite() {
            return Err(Error::InvalidProblem("lambda must be finite".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidProblem(format!("horizon {} must be > 0", self.horizon)));
        }
        if !(self.dt > 0.0 && self.dt <= self.horizon) {
            return Err(Error::InvalidProblem(format!(
                "dt = {} must lie in (0, horizon]",
                self.dt
            )));
        }
        if self
            .sample_times
            .iter()
            .any(|&t| !(t > 0.0 && t <= self.horizon * (1.0 + 1e-12)))
        {
            return Err(Error::InvalidProblem("sample times must lie in (0, horizon]".into()));
        }
        if self.sample_times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidProblem("sample times must increase".into()));
        }
        if !self.initial.is_finite() {
            return Err(Error::InvalidProblem("initial datum has non-finite values".into()));
        }
        Ok(())
    }

    /// Extra conditions of the long-time theorems: `α ∈ (1, 2]`,
    /// `u_0 >= 0` and `u_0` not identically zero.
    pub fn validate_theorem_preset(&self) -> Result<()> {
        self.validate()?;
        let alpha = self.symbol.dominant_alpha()?;
        if !(alpha > 1.0 && alpha <= 2.0) {
            return Err(Error::InvalidProblem(format!(
                "nonlinear presets need alpha in (1, 2], got {alpha}"
            )));
        }
        if self.initial.min() < 0.0 {
            return Err(Error::InvalidProblem("initial datum must be nonnegative".into()));
        }
        if self.initial.max_abs() == 0.0 {
            return Err(Error::InvalidProblem("initial datum is identically zero".into()));
        }
        Ok(())
    }

    /// Critical exponent `(N + α)/(N + 1)`.
    pub fn critical_exponent(&self) -> Result<f64> {
        let n = self.initial.grid().dim() as f64;
        Ok((n + self.symbol.dominant_alpha()?) / (n + 1.0))
    }

    /// Whether the box half width clears `8·T^{1/α}`, below which the
    /// algebraic kernel tails wrap around noticeably.
    pub fn box_is_adequate(&self) -> bool {
        match self.symbol.dominant_alpha() {
            Ok(alpha) => self.initial.grid().half_width() >= 8.0 * self.horizon.powf(1.0 / alpha),
            Err(_) => false,
        }
    }

    /// Number of steps of size `dt` covering the horizon.
    pub fn step_count(&self) -> usize {
        (self.horizon / self.dt).round().max(1.0) as usize
    }
}

/// Dyadic schedule `T·2^{-m/k}`, `m = 0, …, octaves·k`, increasing.
pub fn dyadic_samples(horizon: f64, octaves: usize, per_octave: usize) -> Vec<f64> {
    let per_octave = per_octave.max(1);
    let total = octaves * per_octave;
    (0..=total)
        .rev()
        .map(|m| horizon * 2f64.powf(-(m as f64) / per_octave as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::PeriodicGrid;

    fn problem() -> ProblemSpec {
        let grid = PeriodicGrid::new(1, 64, 10.0).unwrap();
        ProblemSpec {
            symbol: SymbolSpec::fractional(1.5, 1.0).unwrap(),
            lambda: -1.0,
            q: 2.0,
            initial: Field::from_fn(grid, |x| (-x[0] * x[0]).exp()),
            horizon: 1.0,
            dt: 0.01,
            sample_times: vec![0.5, 1.0],
        }
    }

    #[test]
    fn validation() {
        assert!(problem().validate().is_ok());
        assert!(problem().validate_theorem_preset().is_ok());
        let mut p = problem();
        p.q = 1.0;
        assert!(p.validate().is_err());
        let mut p = problem();
        p.sample_times = vec![1.0, 0.5];
        assert!(p.validate().is_err());
        let mut p = problem();
        p.dt = 2.0;
        assert!(p.validate().is_err());
        let mut p = problem();
        p.initial = p.initial.shifted(-0.5);
        assert!(p.validate().is_ok());
        assert!(p.validate_theorem_preset().is_err());
        let mut p = problem();
        p.symbol = SymbolSpec::fractional(0.9, 1.0).unwrap();
        assert!(p.validate_theorem_preset().is_err());
    }

    #[test]
    fn critical_exponent_and_samples() {
        assert!((problem().critical_exponent().unwrap() - 1.25).abs() < 1e-15);
        assert_eq!(dyadic_samples(8.0, 3, 1), vec![1.0, 2.0, 4.0, 8.0]);
        assert!(problem().box_is_adequate());
        let mut p = problem();
        p.horizon = 8.0;
        assert!(!p.box_is_adequate());
    }
}
