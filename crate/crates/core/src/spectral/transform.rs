use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::{Field, SpectralField};
use super::grid::PeriodicGrid;
use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        }
    })
}

/// In-place unnormalised transform along every axis.
fn transform_in_place(grid: &PeriodicGrid, data: &mut [Complex64], inverse: bool) {
    let n = grid.n();
    let fft = plan(n, inverse);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    // Contiguous last axis.
    for row in data.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    if grid.dim() == 2 {
        let mut column = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                column[i] = data[i * n + j];
            }
            fft.process_with_scratch(&mut column, &mut scratch);
            for i in 0..n {
                data[i * n + j] = column[i];
            }
        }
    }
}

/// Unnormalised forward DFT of a real field.
pub fn forward(f: &Field) -> SpectralField {
    let grid = *f.grid();
    let mut data: Vec<Complex64> = f
        .values()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    transform_in_place(&grid, &mut data, false);
    SpectralField::from_coeffs(grid, data).expect("sizes match by construction")
}

/// Inverse DFT (with the `1/n^N` factor), keeping the real part.
pub fn inverse(spectrum: &SpectralField) -> Field {
    let grid = *spectrum.grid();
    let mut data = spectrum.coeffs().to_vec();
    transform_in_place(&grid, &mut data, true);
    let scale = 1.0 / grid.len() as f64;
    let values = data.iter().map(|c| c.re * scale).collect();
    Field::from_values(grid, values).expect("sizes match by construction")
}

/// Spectral derivative `∂/∂x_axis` of a field given by its coefficients.
/// The unpaired Nyquist mode of the differentiated axis is dropped.
pub fn derivative_from_spectrum(spectrum: &SpectralField, axis: usize) -> Field {
    let grid = *spectrum.grid();
    let coeffs = spectrum
        .coeffs()
        .iter()
        .enumerate()
        .map(|(flat, c)| {
            let j = grid.axis_indices(flat)[axis];
            if grid.is_nyquist(j) {
                Complex64::new(0.0, 0.0)
            } else {
                c * Complex64::new(0.0, grid.wavenumber(j))
            }
        })
        .collect();
    inverse(&SpectralField::from_coeffs(grid, coeffs).expect("sizes match"))
}

/// All `N` partial derivatives of a field given by its coefficients.
pub fn gradient_from_spectrum(spectrum: &SpectralField) -> Vec<Field> {
    (0..spectrum.grid().dim())
        .map(|axis| derivative_from_spectrum(spectrum, axis))
        .collect()
}

/// `(∂f/∂x_1, …, ∂f/∂x_N)` computed spectrally.
pub fn gradient(f: &Field) -> Vec<Field> {
    gradient_from_spectrum(&forward(f))
}

/// Pointwise Euclidean length `|∇f|` from the gradient components.
pub fn gradient_magnitude(components: &[Field]) -> Field {
    let mut out = Field::zeros(*components[0].grid());
    for c in components {
        for (o, v) in out.values_mut().iter_mut().zip(c.values()) {
            *o += v * v;
        }
    }
    out.map(f64::sqrt)
}

/// `‖f‖_p` with the grid quadrature `(Σ |f_i|^p h^N)^{1/p}`; `p = ∞` gives
/// the maximum modulus.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("L^p norm needs p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let h = f.grid().cell_volume();
    let sum: f64 = if p == 1.0 {
        f.values().iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        f.values().iter().map(|v| v * v).sum()
    } else {
        f.values().iter().map(|v| v.abs().powf(p)).sum()
    };
    Ok((sum * h).powf(1.0 / p))
}

/// `‖∇f‖_p` where `|∇f|` is the pointwise Euclidean length.
pub fn gradient_lp_norm(components: &[Field], p: f64) -> Result<f64> {
    lp_norm(&gradient_magnitude(components), p)
}

/// Fraction `ρ` of the Nyquist number kept by [`dealias`]: 2/3 for `q <= 3`,
/// 1/2 above.
pub fn dealias_fraction(q: f64) -> f64 {
    if q <= 3.0 {
        2.0 / 3.0
    } else {
        0.5
    }
}

/// Largest retained `|k|` component, `ρ·n/2`.
pub fn dealias_cutoff(grid: &PeriodicGrid, q: f64) -> f64 {
    dealias_fraction(q) * (grid.n() / 2) as f64
}

/// Zeroes every mode with some `|k_j|` above the cutoff for exponent `q`.
pub fn dealias(spectrum: &SpectralField, q: f64) -> SpectralField {
    let mut out = spectrum.clone();
    dealias_in_place(&mut out, q);
    out
}

pub(crate) fn dealias_in_place(spectrum: &mut SpectralField, q: f64) {
    let grid = *spectrum.grid();
    let cutoff = dealias_cutoff(&grid, q);
    for (flat, c) in spectrum.coeffs_mut().iter_mut().enumerate() {
        if grid.max_mode_number(flat) as f64 > cutoff {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

/// Largest coefficient modulus beyond the dealiasing cutoff relative to the
/// largest overall. A field counts as resolved when this is below `1e-8`.
pub fn spectral_tail_ratio(spectrum: &SpectralField, q: f64) -> f64 {
    let grid = *spectrum.grid();
    let cutoff = dealias_cutoff(&grid, q);
    let mut peak = 0.0f64;
    let mut tail = 0.0f64;
    for (flat, c) in spectrum.coeffs().iter().enumerate() {
        let m = c.norm();
        peak = peak.max(m);
        if grid.max_mode_number(flat) as f64 > cutoff {
            tail = tail.max(m);
        }
    }
    if peak == 0.0 {
        0.0
    } else {
        tail / peak
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn grid1(n: usize, l: f64) -> PeriodicGrid {
        PeriodicGrid::new(1, n, l).unwrap()
    }

    #[test]
    fn constant_has_only_zero_mode() {
        let grid = grid1(32, 3.0);
        let spec = forward(&Field::constant(grid, 2.5));
        assert!((spec.coeffs()[0].re - 2.5 * 32.0).abs() < 1e-12);
        for c in &spec.coeffs()[1..] {
            assert!(c.norm() < 1e-12);
        }
    }

    #[test]
    fn pure_harmonic_has_two_modes() {
        let l = 2.0;
        let grid = grid1(64, l);
        let f = Field::from_fn(grid, |x| (PI * x[0] / l).cos());
        let spec = forward(&f);
        for (j, c) in spec.coeffs().iter().enumerate() {
            let k = grid.mode_number(j);
            if k.abs() == 1 {
                assert!((c.norm() - 32.0).abs() < 1e-10);
            } else {
                assert!(c.norm() < 1e-10, "mode {k} = {c}");
            }
        }
    }

    #[test]
    fn derivative_of_resolved_harmonic() {
        let l = 5.0;
        let grid = grid1(128, l);
        let f = Field::from_fn(grid, |x| (PI * x[0] / l).sin());
        let exact = Field::from_fn(grid, |x| PI / l * (PI * x[0] / l).cos());
        let g = gradient(&f);
        assert_eq!(g.len(), 1);
        assert!(g[0].max_abs_diff(&exact) < 1e-10);
    }

    #[test]
    fn constant_field_has_zero_gradient() {
        let grid = PeriodicGrid::new(2, 16, 1.0).unwrap();
        for c in gradient(&Field::constant(grid, 4.0)) {
            assert!(c.max_abs() < 1e-12);
        }
    }

    #[test]
    fn separable_field_has_no_cross_derivative() {
        let l = 3.0;
        let grid = PeriodicGrid::new(2, 32, l).unwrap();
        let f = Field::from_fn(grid, |x| (PI * x[0] / l).sin());
        let g = gradient(&f);
        assert!(g[1].max_abs() < 1e-12);
        let exact = Field::from_fn(grid, |x| PI / l * (PI * x[0] / l).cos());
        assert!(g[0].max_abs_diff(&exact) < 1e-10);
    }

    #[test]
    fn mixed_derivatives_commute() {
        let grid = PeriodicGrid::new(2, 64, 8.0).unwrap();
        let f = Field::from_fn(grid, |x| (-(x[0] - 0.5).powi(2) - 0.5 * (x[1] + 0.3).powi(2) - x[0] * x[1] * 0.2).exp());
        let g = gradient(&f);
        let dxy = gradient(&g[1]).remove(0);
        let dyx = gradient(&g[0]).remove(1);
        assert!(dxy.max_abs_diff(&dyx) < 1e-10);
    }

    #[test]
    fn lp_norm_basics() {
        let grid = grid1(64, 4.0);
        let c = Field::constant(grid, -1.5);
        assert!((lp_norm(&c, 1.0).unwrap() - 1.5 * 8.0).abs() < 1e-12);
        let mut spike = Field::zeros(grid);
        spike.values_mut()[10] = 7.0;
        assert_eq!(lp_norm(&spike, f64::INFINITY).unwrap(), 7.0);
        assert!(matches!(lp_norm(&c, 0.5), Err(Error::InvalidArgument(_))));

        let grid2 = PeriodicGrid::new(2, 16, 2.0).unwrap();
        let c2 = Field::constant(grid2, 3.0);
        assert!((lp_norm(&c2, 1.0).unwrap() - 3.0 * 16.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_l1_norm_matches_integral() {
        let (a, sigma) = (2.0, 0.7);
        let grid = grid1(512, 12.0);
        let f = Field::from_fn(grid, |x| a * (-x[0] * x[0] / (2.0 * sigma * sigma)).exp());
        let exact = a * sigma * (2.0 * PI).sqrt();
        assert!(((lp_norm(&f, 1.0).unwrap() - exact) / exact).abs() < 1e-6);
    }

    #[test]
    fn parseval() {
        let grid = PeriodicGrid::new(2, 32, 3.0).unwrap();
        let f = Field::from_fn(grid, |x| (x[0] * 1.3).sin() * (-x[1] * x[1]).exp() + 0.1);
        let spec = forward(&f);
        let lhs = lp_norm(&f, 2.0).unwrap().powi(2);
        let rhs = spec.energy() * grid.cell_volume() / grid.len() as f64;
        assert!(((lhs - rhs) / lhs).abs() < 1e-10);
    }

    #[test]
    fn dealias_keeps_low_and_drops_high_modes() {
        let grid = grid1(32, 1.0);
        let mut spec = SpectralField::zeros(grid);
        spec.coeffs_mut()[3] = Complex64::new(16.0, 0.0);
        spec.coeffs_mut()[29] = Complex64::new(16.0, 0.0);
        let out = dealias(&spec, 2.0);
        assert_eq!(out, spec);

        // Cutoff is (2/3)·16 ≈ 10.67, so mode 12 must go.
        let high = Field::from_fn(grid, |x| (PI * 12.0 * x[0]).cos());
        let out = dealias(&forward(&high), 2.0);
        assert!(out.energy() < 1e-20);
        // With q > 3 the cutoff is 8: mode 9 goes as well.
        let mid = Field::from_fn(grid, |x| (PI * 9.0 * x[0]).sin());
        assert!(dealias(&forward(&mid), 2.0).energy() > 1.0);
        assert!(dealias(&forward(&mid), 3.5).energy() < 1e-20);
    }

    #[test]
    fn spectral_coefficients_are_hermitian() {
        let grid = PeriodicGrid::new(2, 16, 2.0).unwrap();
        let f = Field::from_fn(grid, |x| (x[0] - 0.3 * x[1]).sin() + x[1].cos() * 0.5);
        let spec = forward(&f);
        for flat in 0..grid.len() {
            let m = spec.mirror_index(flat);
            assert!((spec.coeffs()[flat] - spec.coeffs()[m].conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn trigonometric_interpolation_reproduces_grid_values_and_harmonics() {
        let l = 4.0;
        let grid = grid1(32, l);
        let f = Field::from_fn(grid, |x| (PI * 2.0 * x[0] / l).sin() + 0.5);
        let spec = forward(&f);
        assert!((spec.evaluate_at(&[grid.coordinate(5)]) - f.values()[5]).abs() < 1e-12);
        let x = 0.123;
        let exact = (PI * 2.0 * x / l).sin() + 0.5;
        assert!((spec.evaluate_at(&[x]) - exact).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(values in prop::collection::vec(-1e3f64..1e3, 64)) {
            let grid = grid1(64, 2.0);
            let f = Field::from_values(grid, values).unwrap();
            let back = inverse(&forward(&f));
            let scale = f.max_abs().max(1e-300);
            prop_assert!(back.max_abs_diff(&f) / scale < 1e-12);
        }

        #[test]
        fn round_trip_is_identity_2d(values in prop::collection::vec(-1.0f64..1.0, 256)) {
            let grid = PeriodicGrid::new(2, 16, 1.0).unwrap();
            let f = Field::from_values(grid, values).unwrap();
            let back = inverse(&forward(&f));
            prop_assert!(back.max_abs_diff(&f) / f.max_abs().max(1e-300) < 1e-12);
        }

        #[test]
        fn dealias_never_adds_energy(values in prop::collection::vec(-1.0f64..1.0, 32), q in 1.01f64..5.0) {
            let grid = grid1(32, 1.0);
            let spec = forward(&Field::from_values(grid, values).unwrap());
            prop_assert!(dealias(&spec, q).energy() <= spec.energy());
        }

        #[test]
        fn restricting_support_never_increases_norm(
            values in prop::collection::vec(-5.0f64..5.0, 64),
            mask in prop::collection::vec(any::<bool>(), 64),
            p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0, f64::INFINITY]),
        ) {
            let grid = grid1(64, 2.0);
            let f = Field::from_values(grid, values.clone()).unwrap();
            let masked: Vec<f64> = values.iter().zip(&mask).map(|(&v, &keep)| if keep { v } else { 0.0 }).collect();
            let g = Field::from_values(grid, masked).unwrap();
            prop_assert!(lp_norm(&g, p).unwrap() <= lp_norm(&f, p).unwrap() * (1.0 + 1e-14));
        }
    }
}
