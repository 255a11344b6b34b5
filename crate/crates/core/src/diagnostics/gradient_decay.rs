//! The weighted gradient functional
//! `D(v, p) = sup_{t>0} t^{1/α}(1+t)^β ‖∇e^{-tL}v‖_p`, `β = (N/α)(1 - 1/p)`,
//! and the quantities built on it.

use crate::error::{Error, Result};
use crate::semigroup::Propagator;
use crate::spectral::{self, Field};
use crate::symbol::SymbolSpec;

/// Increasing positive sample times for the supremum in `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeLadder {
    times: Vec<f64>,
}

impl TimeLadder {
    /// At least four decades, strictly increasing, positive.
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidArgument("ladder needs positive finite times".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("ladder times must increase".into()));
        }
        let decades = (times[times.len() - 1] / times[0]).log10();
        if decades < 4.0 - 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "ladder spans {decades:.2} decades, need at least 4"
            )));
        }
        Ok(Self { times })
    }

    /// `per_decade` points per decade from `t_min` to `t_max` inclusive.
    pub fn geometric(t_min: f64, t_max: f64, per_decade: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min) {
            return Err(Error::InvalidArgument(format!("bad ladder range [{t_min}, {t_max}]")));
        }
        let decades = (t_max / t_min).log10();
        let count = ((decades * per_decade.max(1) as f64).ceil() as usize).max(1);
        let ratio = (t_max / t_min).powf(1.0 / count as f64);
        let times = (0..=count).map(|i| t_min * ratio.powi(i as i32)).collect();
        Self::new(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

/// Value of `D(v, p)` on a ladder and where it was attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DValue {
    pub value: f64,
    pub argmax: f64,
    /// False when the maximum sits at either end of the ladder.
    pub bracketed: bool,
}

/// Exponent `β = (N/α)(1 - 1/p)` of the large-time weight.
pub fn weight_exponent(dim: usize, alpha: f64, p: f64) -> f64 {
    dim as f64 / alpha * (1.0 - 1.0 / p)
}

/// `D(v, p)` maximised over the ladder.
pub fn d_quantity(v: &Field, p: f64, spec: &SymbolSpec, ladder: &TimeLadder) -> Result<DValue> {
    let alpha = spec.dominant_alpha()?;
    let beta = weight_exponent(v.grid().dim(), alpha, p);
    let propagator = Propagator::new(*v.grid(), spec)?;
    let v_hat = spectral::forward(v);
    let mut best = DValue {
        value: f64::NEG_INFINITY,
        argmax: f64::NAN,
        bracketed: false,
    };
    let mut best_index = 0;
    for (i, &t) in ladder.times().iter().enumerate() {
        let components = spectral::gradient_from_spectrum(&propagator.apply_spectrum(&v_hat, t));
        let norm = spectral::gradient_lp_norm(&components, p)?;
        let value = t.powf(1.0 / alpha) * (1.0 + t).powf(beta) * norm;
        if value > best.value {
            best.value = value;
            best.argmax = t;
            best_index = i;
        }
    }
    best.bracketed = best_index > 0 && best_index + 1 < ladder.times().len();
    if !best.bracketed {
        log::warn!(
            "D(v, {p}) attained at the ladder end t = {:e}; the supremum is not bracketed",
            best.argmax
        );
    }
    Ok(best)
}

/// `(‖v‖_p^{1/β} + ‖v‖_1^{1/β})^β`, the norm combination bounding `D(v, p)`
/// up to a constant.
pub fn d_norm_bound(v: &Field, p: f64, alpha: f64) -> Result<f64> {
    let beta = weight_exponent(v.grid().dim(), alpha, p);
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument(format!("need p > 1, got {p}")));
    }
    let lp = spectral::lp_norm(v, p)?;
    let l1 = spectral::lp_norm(v, 1.0)?;
    Ok((lp.powf(1.0 / beta) + l1.powf(1.0 / beta)).powf(beta))
}

/// Midpoint of the admissible interval
/// `((N+α)/(N+1), min(N/(N+1-α), q))` for the gradient-decay exponent;
/// `None` when the interval is empty.
pub fn admissible_p0(dim: usize, alpha: f64, q: f64) -> Option<f64> {
    let n = dim as f64;
    let left = (n + alpha) / (n + 1.0);
    let upper = if n + 1.0 - alpha > 0.0 {
        n / (n + 1.0 - alpha)
    } else {
        f64::INFINITY
    };
    let right = upper.min(q);
    (right > left).then(|| 0.5 * (left + right))
}

/// `t^{1/α}(1+t)^{N(1-1/p₀)/α} ‖∇u‖_{p₀}` given the measured norm.
pub fn weighted_gradient(t: f64, gradient_norm: f64, dim: usize, alpha: f64, p0: f64) -> f64 {
    t.powf(1.0 / alpha) * (1.0 + t).powf(weight_exponent(dim, alpha, p0)) * gradient_norm
}

/// `|λ| ‖∇u_0‖_∞^{q-p₀} D(u_0, p₀)^{p₀-1}`, the small-data combination.
pub fn smallness(lambda: f64, q: f64, p0: f64, gradient_sup: f64, d: f64) -> f64 {
    lambda.abs() * gradient_sup.powf(q - p0) * d.powf(p0 - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::PeriodicGrid;

    fn gaussian() -> Field {
        let grid = PeriodicGrid::new(1, 1024, 400.0).unwrap();
        Field::from_fn(grid, |x| (-x[0] * x[0] / 2.0).exp())
    }

    #[test]
    fn ladder_validation() {
        assert!(TimeLadder::new(vec![1.0, 10.0]).is_err());
        assert!(TimeLadder::new(vec![1e-3, 1.0, 0.5, 10.0]).is_err());
        let l = TimeLadder::geometric(1e-2, 1e3, 4).unwrap();
        assert_eq!(l.times().len(), 21);
        assert!((l.times()[20] - 1e3).abs() < 1e-9);
    }

    #[test]
    fn p0_interval() {
        // N = 1, α = 1.5: (1.25, min(2, q)).
        assert!((admissible_p0(1, 1.5, 1.8).unwrap() - 1.525).abs() < 1e-15);
        assert!((admissible_p0(1, 1.5, 3.0).unwrap() - 1.625).abs() < 1e-15);
        assert_eq!(admissible_p0(1, 1.5, 1.2), None);
        // α = 2, N = 1: N + 1 - α = 0 so only q caps the interval.
        assert!((admissible_p0(1, 2.0, 2.0).unwrap() - 1.75).abs() < 1e-15);
    }

    #[test]
    fn homogeneous_of_degree_one() {
        let v = gaussian();
        let spec = SymbolSpec::fractional(2.0, 1.0).unwrap();
        let ladder = TimeLadder::geometric(1e-3, 1e2, 6).unwrap();
        let d = d_quantity(&v, 2.0, &spec, &ladder).unwrap();
        for eps in [0.1, 0.5] {
            let de = d_quantity(&v.scaled(eps), 2.0, &spec, &ladder).unwrap();
            assert!((de.value - eps * d.value).abs() <= 1e-10 * eps * d.value);
        }
    }

    /// On the whole line the weighted norm of a Gaussian creeps up to its
    /// limit as `t → ∞`; on the box the lowest mode decays exponentially
    /// beyond `t ~ L^2`, which brackets the supremum.
    #[test]
    fn gaussian_sup_is_bracketed_and_stable() {
        let grid = PeriodicGrid::new(1, 256, 20.0).unwrap();
        let v = Field::from_fn(grid, |x| (-x[0] * x[0] / 2.0).exp());
        let spec = SymbolSpec::fractional(2.0, 1.0).unwrap();
        let coarse = d_quantity(&v, 2.0, &spec, &TimeLadder::geometric(1e-3, 1e5, 8).unwrap())
            .unwrap();
        let fine = d_quantity(&v, 2.0, &spec, &TimeLadder::geometric(1e-3, 1e5, 32).unwrap())
            .unwrap();
        assert!(coarse.bracketed && fine.bracketed);
        assert!(coarse.value.is_finite());
        assert!((fine.value - coarse.value).abs() / fine.value < 0.01);
        assert!(fine.value >= coarse.value * (1.0 - 1e-12));
    }

    #[test]
    fn bounded_by_norm_combination() {
        let spec = SymbolSpec::fractional(2.0, 1.0).unwrap();
        let ladder = TimeLadder::geometric(1e-3, 1e3, 8).unwrap();
        let reference = gaussian();
        let c = d_quantity(&reference, 2.0, &spec, &ladder).unwrap().value
            / d_norm_bound(&reference, 2.0, 2.0).unwrap();
        let grid = *reference.grid();
        for (a, s, shift) in [(3.0, 0.7, 0.0), (0.2, 4.0, 5.0), (1.0, 2.0, -3.0)] {
            let v = Field::from_fn(grid, |x| a * (-(x[0] - shift).powi(2) / (2.0 * s * s)).exp());
            let d = d_quantity(&v, 2.0, &spec, &ladder).unwrap().value;
            assert!(d <= 4.0 * c * d_norm_bound(&v, 2.0, 2.0).unwrap());
        }
    }
}
