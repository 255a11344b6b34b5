use crate::error::{Error, Result};
use crate::semigroup::{stable_kernel, KernelSpec};
use crate::spectral::{self, Field};

/// `t^{N(1-1/r)/α} ‖u_t - M_∞ p_α(t)‖_r`.
pub fn self_similar_error(u_t: &Field, m_inf: f64, t: f64, r: f64, alpha: f64) -> Result<f64> {
    let grid = *u_t.grid();
    let weight = t.powf(grid.dim() as f64 * (1.0 - 1.0 / r) / alpha);
    if m_inf == 0.0 {
        return Ok(weight * spectral::lp_norm(u_t, r)?);
    }
    let kernel = stable_kernel(&KernelSpec::new(alpha, t, grid)?)?;
    let diff = u_t.sub(&kernel.scaled(m_inf));
    Ok(weight * spectral::lp_norm(&diff, r)?)
}

/// `2R ∫_{|x|≤3R} |∇w| + 2∫_{|x|>R} |w| - ‖w‖_1`, nonnegative for every
/// integrable `w` with integrable gradient.
pub fn ben_artzi_koch_gap(w: &Field, radius: f64) -> Result<f64> {
    let grid = *w.grid();
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius {radius} must be > 0")));
    }
    if 3.0 * radius >= grid.half_width() {
        return Err(Error::InvalidArgument(format!(
            "3R = {} does not fit inside the box half width {}",
            3.0 * radius,
            grid.half_width()
        )));
    }
    let grad = spectral::gradient_magnitude(&spectral::gradient(w));
    let h = grid.cell_volume();
    let mut inner_gradient = 0.0;
    let mut outer_mass = 0.0;
    let mut total = 0.0;
    for flat in 0..grid.len() {
        let r = grid.radius(flat);
        let v = w.values()[flat].abs();
        total += v;
        if r <= 3.0 * radius {
            inner_gradient += grad.values()[flat];
        }
        if r > radius {
            outer_mass += v;
        }
    }
    Ok(h * (2.0 * radius * inner_gradient + 2.0 * outer_mass - total))
}
