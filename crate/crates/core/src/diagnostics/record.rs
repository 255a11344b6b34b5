use crate::error::Result;
use crate::spectral::{self, Field};

/// Scalars measured on one sample of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// Signed integral `∫u`.
    pub mass: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub g1: f64,
    /// `‖∇u‖_{p₀}`; NaN when no admissible `p₀` exists.
    pub gp0: f64,
    pub g2: f64,
    pub gq: f64,
    pub ginf: f64,
    /// `∫₀ᵗ ‖∇u‖_q^q dτ`, trapezoidal in time.
    pub q_cum: f64,
    /// `∫₀ᵗ ‖∇u‖_2^2 dτ`, trapezoidal in time.
    pub dissipation_cum: f64,
    /// Weighted self-similar errors for `r = 1, 2`; NaN until filled.
    pub sse_r1: f64,
    pub sse_r2: f64,
    /// Share of `∫|u|` carried by the outer shell `max_j |x_j| > L/2`.
    pub tail_frac: f64,
}

impl DiagnosticsRecord {
    /// Measures `u` at time `t`. The cumulative integrals are supplied by the
    /// caller, which owns the time quadrature.
    pub fn measure(
        u: &Field,
        t: f64,
        q: f64,
        p0: Option<f64>,
        q_cum: f64,
        dissipation_cum: f64,
    ) -> Result<Self> {
        let grad = spectral::gradient_magnitude(&spectral::gradient(u));
        Ok(Self {
            t,
            mass: super::mass(u),
            l1: spectral::lp_norm(u, 1.0)?,
            l2: spectral::lp_norm(u, 2.0)?,
            linf: u.max_abs(),
            g1: spectral::lp_norm(&grad, 1.0)?,
            gp0: match p0 {
                Some(p) => spectral::lp_norm(&grad, p)?,
                None => f64::NAN,
            },
            g2: spectral::lp_norm(&grad, 2.0)?,
            gq: spectral::lp_norm(&grad, q)?,
            ginf: grad.max_abs(),
            q_cum,
            dissipation_cum,
            sse_r1: f64::NAN,
            sse_r2: f64::NAN,
            tail_frac: tail_fraction(u),
        })
    }
}

/// `∫_{max_j |x_j| > L/2} |u| / ∫|u|`, zero for `u ≡ 0`.
pub fn tail_fraction(u: &Field) -> f64 {
    let grid = u.grid();
    let inner = grid.half_width() / 2.0;
    let mut total = 0.0;
    let mut outer = 0.0;
    for (flat, v) in u.values().iter().enumerate() {
        let x = grid.point(flat);
        total += v.abs();
        if x[..grid.dim()].iter().any(|c| c.abs() > inner) {
            outer += v.abs();
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outer / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::PeriodicGrid;

    #[test]
    fn gaussian_record() {
        let grid = PeriodicGrid::new(1, 512, 20.0).unwrap();
        let u = Field::from_fn(grid, |x| 2.0 * (-x[0] * x[0] / 2.0).exp());
        let r = DiagnosticsRecord::measure(&u, 1.0, 2.0, Some(1.5), 0.0, 0.0).unwrap();
        let exact_mass = 2.0 * (2.0 * std::f64::consts::PI).sqrt();
        assert!((r.mass - exact_mass).abs() < 1e-10);
        assert_eq!(r.mass, r.l1);
        assert!((r.linf - 2.0).abs() < 1e-15);
        // |u'| has integral 2·max u; the kink at the peak limits accuracy.
        assert!((r.g1 - 4.0).abs() < 5e-3);
        assert!(r.tail_frac < 1e-20);
        assert!(r.sse_r1.is_nan());
    }

    #[test]
    fn tail_fraction_counts_outer_shell() {
        let grid = PeriodicGrid::new(2, 8, 4.0).unwrap();
        let u = Field::constant(grid, 1.0);
        // Inner cells have both coordinates in [-2, 2]: 5 of 8 per axis.
        assert!((tail_fraction(&u) - (1.0 - 25.0 / 64.0)).abs() < 1e-15);
        assert_eq!(tail_fraction(&Field::zeros(grid)), 0.0);
    }
}
