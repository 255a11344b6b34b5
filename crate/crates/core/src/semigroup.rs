//! The linear semigroup `e^{-tL}` as a Fourier multiplier, and the α-stable
//! kernel `p_α(·, t)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{self, Field, PeriodicGrid, SpectralField};
use crate::symbol::SymbolSpec;

/// `a(ξ)` at every mode of `grid`, in flat FFT order.
pub fn symbol_on_grid(grid: &PeriodicGrid, spec: &SymbolSpec) -> Result<Vec<f64>> {
    grid.mode_norms()
        .into_iter()
        .map(|r| spec.evaluate_radial(r))
        .collect()
}

/// Cached symbol values for repeated semigroup application on one grid.
#[derive(Debug, Clone)]
pub struct Propagator {
    grid: PeriodicGrid,
    symbol: Vec<f64>,
}

impl Propagator {
    pub fn new(grid: PeriodicGrid, spec: &SymbolSpec) -> Result<Self> {
        Ok(Self {
            grid,
            symbol: symbol_on_grid(&grid, spec)?,
        })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    /// `a(ξ)` per mode.
    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    /// Multiplier `e^{-t a(ξ)}` per mode.
    pub fn multiplier(&self, t: f64) -> Vec<f64> {
        self.symbol.iter().map(|a| (-t * a).exp()).collect()
    }

    pub fn apply_spectrum(&self, spectrum: &SpectralField, t: f64) -> SpectralField {
        spectrum.multiplied(&self.multiplier(t))
    }

    pub fn apply(&self, f: &Field, t: f64) -> Field {
        assert_eq!(f.grid(), &self.grid, "field and propagator grids differ");
        spectral::inverse(&self.apply_spectrum(&spectral::forward(f), t))
    }
}

/// `e^{-tL} f`: each Fourier coefficient scaled by `e^{-t a(ξ)}`.
pub fn apply_semigroup(f: &Field, t: f64, spec: &SymbolSpec) -> Result<Field> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("semigroup time {t} must be >= 0")));
    }
    Ok(Propagator::new(*f.grid(), spec)?.apply(f, t))
}

/// The α-stable kernel at time `t` on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub alpha: f64,
    pub t: f64,
    pub grid: PeriodicGrid,
}

impl KernelSpec {
    pub fn new(alpha: f64, t: f64, grid: PeriodicGrid) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::InvalidArgument(format!("alpha {alpha} outside (0, 2]")));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("kernel time {t} must be > 0")));
        }
        Ok(Self { alpha, t, grid })
    }

    /// Characteristic width `t^{1/α}`.
    pub fn width(&self) -> f64 {
        self.t.powf(1.0 / self.alpha)
    }

    pub fn check_resolved(&self) -> Result<()> {
        let spacing = self.grid.spacing();
        let width = self.width();
        if width < 4.0 * spacing {
            Err(Error::Unresolved { width, spacing })
        } else {
            Ok(())
        }
    }
}

/// Fourier coefficients of `p_α(·, t)` centred at `x = 0`.
///
/// With grid points `x_j = -L + jh` the phase `e^{iξ_k x_j}` splits into
/// `(-1)^k` times the DFT kernel, so the coefficients are
/// `h^{-N} (-1)^{Σk} e^{-t|ξ|^α}`.
pub fn kernel_spectrum(spec: &KernelSpec) -> SpectralField {
    let grid = spec.grid;
    let scale = 1.0 / grid.cell_volume();
    let coeffs = (0..grid.len())
        .map(|flat| {
            let idx = grid.axis_indices(flat);
            let parity: i64 = (0..grid.dim()).map(|a| grid.mode_number(idx[a])).sum();
            let sign = if parity.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let xi = grid.wave_vector(flat);
            let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
            Complex64::new(sign * scale * (-spec.t * r.powf(spec.alpha)).exp(), 0.0)
        })
        .collect();
    SpectralField::from_coeffs(grid, coeffs).expect("sizes match")
}

/// `p_α(·, t)` sampled on the grid by inverting `e^{-t|ξ|^α}`.
///
/// Not clipped: small negative ringing is left in place so the zero mode,
/// and hence the unit mass, stays exact.
pub fn stable_kernel(spec: &KernelSpec) -> Result<Field> {
    spec.check_resolved()?;
    Ok(spectral::inverse(&kernel_spectrum(spec)))
}

fn dyadic_exponent(ratio: f64) -> Option<i32> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return None;
    }
    let k = ratio.log2().round();
    ((ratio / 2f64.powf(k) - 1.0).abs() < 1e-12).then_some(k as i32)
}

/// Largest pointwise deviation of `p_α(x, t2)` from
/// `s^{-N} p_α(x/s, t1)`, `s = (t2/t1)^{1/α}`, relative to `max p_α(·, t2)`.
///
/// Points are taken from the central region where `x/s` stays inside the
/// inner half of the box, at most 257 per axis. When `x/s` is a grid point
/// the sample is used directly; otherwise the `t1` kernel is evaluated
/// through its trigonometric interpolant.
pub fn verify_self_similarity(alpha: f64, t1: f64, t2: f64, grid: &PeriodicGrid) -> Result<f64> {
    let first = KernelSpec::new(alpha, t1, *grid)?;
    let second = KernelSpec::new(alpha, t2, *grid)?;
    if dyadic_exponent(t2 / t1).is_none() {
        return Err(Error::InvalidArgument(format!(
            "t2/t1 = {} is not an integer power of 2",
            t2 / t1
        )));
    }
    first.check_resolved()?;
    second.check_resolved()?;
    if t1 == t2 {
        return Ok(0.0);
    }

    let p1_spec = kernel_spectrum(&first);
    let p1 = spectral::inverse(&p1_spec);
    let p2 = spectral::inverse(&kernel_spectrum(&second));
    let peak = p2.max();
    let s = (t2 / t1).powf(1.0 / alpha);
    let dim = grid.dim();
    let n = grid.n();
    let h = grid.spacing();
    let half = n / 2;
    let reach = s.min(1.0) * grid.half_width() / 2.0;
    let radius_idx = (reach / h).floor() as usize;
    let stride = (2 * radius_idx / 256).max(1);
    let axis: Vec<usize> = (half - radius_idx..=half + radius_idx).step_by(stride).collect();

    // Grid index of x/s along one axis, if it is one.
    let rescaled_index = |j: usize| -> Option<usize> {
        let m = (j as f64 - half as f64) / s;
        let r = m.round();
        ((m - r).abs() < 1e-9).then(|| (half as f64 + r) as usize)
    };

    let scale = s.powi(-(dim as i32));
    let mut worst = 0.0f64;
    let mut visit = |idx: [usize; 2]| {
        let flat = if dim == 1 { idx[0] } else { idx[0] * n + idx[1] };
        let x = grid.point(flat);
        let lookup: Option<usize> = match dim {
            1 => rescaled_index(idx[0]),
            _ => match (rescaled_index(idx[0]), rescaled_index(idx[1])) {
                (Some(a), Some(b)) => Some(a * n + b),
                _ => None,
            },
        };
        let rescaled = match lookup {
            Some(g) => p1.values()[g],
            None => {
                let y = [x[0] / s, x[1] / s];
                p1_spec.evaluate_at(&y[..dim])
            }
        };
        worst = worst.max((p2.values()[flat] - scale * rescaled).abs());
    };
    if dim == 1 {
        for &j in &axis {
            visit([j, 0]);
        }
    } else {
        for &i in &axis {
            for &j in &axis {
                visit([i, j]);
            }
        }
    }
    Ok(worst / peak)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::lp_norm;
    use crate::symbol::SymbolTerm;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn gaussian(grid: PeriodicGrid, var: f64) -> Field {
        Field::from_fn(grid, |x| {
            (-x.iter().map(|v| v * v).sum::<f64>() / (2.0 * var)).exp()
                / (2.0 * PI * var).powf(grid.dim() as f64 / 2.0)
        })
    }

    #[test]
    fn zero_time_is_identity() {
        let grid = PeriodicGrid::new(1, 64, 5.0).unwrap();
        let f = gaussian(grid, 0.5);
        let spec = SymbolSpec::fractional(1.5, 1.0).unwrap();
        let out = apply_semigroup(&f, 0.0, &spec).unwrap();
        assert!(out.max_abs_diff(&f) < 1e-14);
        assert!(apply_semigroup(&f, -1.0, &spec).is_err());
    }

    #[test]
    fn constants_are_fixed() {
        let grid = PeriodicGrid::new(2, 16, 3.0).unwrap();
        let f = Field::constant(grid, 3.25);
        let spec = SymbolSpec::fractional(0.7, 2.0).unwrap();
        let out = apply_semigroup(&f, 10.0, &spec).unwrap();
        assert!(out.max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn heat_evolution_of_gaussian_is_exact() {
        let grid = PeriodicGrid::new(1, 512, 20.0).unwrap();
        let (var0, t) = (1.0, 1.5);
        let f = gaussian(grid, var0);
        let spec = SymbolSpec::fractional(2.0, 1.0).unwrap();
        let out = apply_semigroup(&f, t, &spec).unwrap();
        assert!(out.max_abs_diff(&gaussian(grid, var0 + 2.0 * t)) < 1e-8);
    }

    #[test]
    fn kernel_values_at_origin() {
        let grid = PeriodicGrid::new(1, 16384, 1024.0).unwrap();
        let origin = grid.n() / 2;
        let p2 = stable_kernel(&KernelSpec::new(2.0, 1.0, grid).unwrap()).unwrap();
        assert!((p2.values()[origin] - (4.0 * PI).powf(-0.5)).abs() < 1e-9);
        let p1 = stable_kernel(&KernelSpec::new(1.0, 1.0, grid).unwrap()).unwrap();
        assert!((p1.values()[origin] - 1.0 / PI).abs() < 1e-6);
    }

    #[test]
    fn kernel_has_unit_mass_and_is_nearly_positive() {
        let grid = PeriodicGrid::new(1, 1024, 64.0).unwrap();
        for alpha in [0.8, 1.0, 1.5, 2.0] {
            let p = stable_kernel(&KernelSpec::new(alpha, 2.0, grid).unwrap()).unwrap();
            let mass: f64 = p.values().iter().sum::<f64>() * grid.cell_volume();
            assert!((mass - 1.0).abs() < 1e-6, "alpha {alpha}: mass {mass}");
            assert!(p.min() > -1e-9, "alpha {alpha}: min {}", p.min());
        }
        let grid2 = PeriodicGrid::new(2, 128, 16.0).unwrap();
        let p = stable_kernel(&KernelSpec::new(1.5, 2.0, grid2).unwrap()).unwrap();
        let mass: f64 = p.values().iter().sum::<f64>() * grid2.cell_volume();
        assert!((mass - 1.0).abs() < 1e-6);
    }

    #[test]
    fn unresolved_kernel_is_rejected() {
        let grid = PeriodicGrid::new(1, 64, 32.0).unwrap();
        let spec = KernelSpec::new(2.0, 1.0, grid).unwrap();
        assert!(matches!(stable_kernel(&spec), Err(Error::Unresolved { .. })));
    }

    #[test]
    fn self_similarity_closed_forms() {
        let grid = PeriodicGrid::new(1, 4096, 256.0).unwrap();
        assert!(verify_self_similarity(2.0, 1.0, 4.0, &grid).unwrap() < 1e-8);
        assert_eq!(verify_self_similarity(1.5, 2.0, 2.0, &grid).unwrap(), 0.0);
        assert!(matches!(
            verify_self_similarity(2.0, 1.0, 3.0, &grid),
            Err(Error::InvalidArgument(_))
        ));
        let wide = PeriodicGrid::new(1, 32768, 2048.0).unwrap();
        assert!(verify_self_similarity(1.0, 1.0, 2.0, &wide).unwrap() < 1e-6);
    }

    #[test]
    fn self_similarity_in_two_dimensions() {
        let grid = PeriodicGrid::new(2, 256, 16.0).unwrap();
        assert!(verify_self_similarity(2.0, 0.25, 1.0, &grid).unwrap() < 1e-8);
    }

    #[test]
    fn linear_solution_approaches_scaled_kernel() {
        // a = |ξ|^1.2 + |ξ|^2 satisfies the low-frequency perturbation condition.
        let spec = SymbolSpec::multifractional(vec![
            SymbolTerm::new(1.0, 1.2),
            SymbolTerm::new(1.0, 2.0),
        ])
        .unwrap();
        let grid = PeriodicGrid::new(1, 4096, 512.0).unwrap();
        let u0 = Field::from_fn(grid, |x| (-(x[0] - 0.5).powi(2)).exp());
        let mass = lp_norm(&u0, 1.0).unwrap();
        let err = |t: f64, p: f64| {
            let u = apply_semigroup(&u0, t, &spec).unwrap();
            let k = stable_kernel(&KernelSpec::new(1.2, t, grid).unwrap()).unwrap();
            let weight = if p.is_infinite() { t.powf(1.0 / 1.2) } else { t.powf((1.0 - 1.0 / p) / 1.2) };
            weight * lp_norm(&u.sub(&k.scaled(mass)), p).unwrap()
        };
        for p in [1.0, f64::INFINITY] {
            assert!(err(64.0, p) < 0.5 * err(4.0, p), "p = {p}");
        }
    }

    fn bump(grid: PeriodicGrid, center: f64, width: f64, amp: f64) -> Field {
        Field::from_fn(grid, |x| {
            let r = (x[0] - center) / width;
            if r.abs() < 1.0 {
                amp * (1.0 - r * r).powi(4)
            } else {
                0.0
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn semigroup_property(s in 0.0f64..3.0, t in 0.0f64..3.0, alpha in 0.5f64..=2.0) {
            let grid = PeriodicGrid::new(1, 128, 10.0).unwrap();
            let spec = SymbolSpec::fractional(alpha, 1.0).unwrap();
            let f = gaussian(grid, 0.7).add(&bump(grid, 2.0, 1.5, -0.3));
            let prop = Propagator::new(grid, &spec).unwrap();
            let twice = prop.apply(&prop.apply(&f, s), t);
            let once = prop.apply(&f, s + t);
            prop_assert!(twice.max_abs_diff(&once) <= 1e-12 * f.max_abs());
        }

        #[test]
        fn contraction_in_lp(t in 0.5f64..20.0, alpha in 0.8f64..=2.0, amp in -2.0f64..2.0, c in -4.0f64..4.0) {
            let grid = PeriodicGrid::new(1, 256, 16.0).unwrap();
            let spec = SymbolSpec::fractional(alpha, 1.0).unwrap();
            let f = gaussian(grid, 1.0).add(&bump(grid, c, 2.0, amp));
            let out = apply_semigroup(&f, t, &spec).unwrap();
            for p in [1.0, 2.0, f64::INFINITY] {
                prop_assert!(lp_norm(&out, p).unwrap() <= lp_norm(&f, p).unwrap() * (1.0 + 1e-12));
            }
        }

        #[test]
        fn positivity_up_to_ringing(t in 0.5f64..20.0, alpha in 0.8f64..=2.0, c in -4.0f64..4.0) {
            let grid = PeriodicGrid::new(1, 256, 16.0).unwrap();
            let spec = SymbolSpec::fractional(alpha, 1.0).unwrap();
            let f = bump(grid, c, 2.0, 1.0);
            let out = apply_semigroup(&f, t, &spec).unwrap();
            prop_assert!(out.min() >= -1e-9 * f.max_abs());
        }
    }
}
