use num_complex::Complex64;

use super::grid::PeriodicGrid;
use crate::error::{Error, Result};

/// Real lattice function on a [`PeriodicGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: PeriodicGrid,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: PeriodicGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: PeriodicGrid, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Samples `f` at every grid point; `f` receives the `N` coordinates.
    pub fn from_fn(grid: PeriodicGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        let dim = grid.dim();
        let values = (0..grid.len())
            .map(|flat| f(&grid.point(flat)[..dim]))
            .collect();
        Self { grid, values }
    }

    pub fn from_values(grid: PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Field {
        self.map(|v| v * factor)
    }

    pub fn shifted(&self, offset: f64) -> Field {
        self.map(|v| v + offset)
    }

    /// `self - other`, pointwise.
    pub fn sub(&self, other: &Field) -> Field {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + other`, pointwise.
    pub fn add(&self, other: &Field) -> Field {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Largest pointwise difference `max |self - other|`.
    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Fourier coefficients of a real [`Field`], in flat FFT order.
///
/// The forward transform is the unnormalised DFT over the grid indices, so
/// the zero mode equals the plain sum of the values and the inverse carries
/// the `1/n^N` factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: PeriodicGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn from_coeffs(grid: PeriodicGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for a grid of {} modes",
                coeffs.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Multiplies each mode by `weights[mode]`.
    pub fn multiplied(&self, weights: &[f64]) -> SpectralField {
        assert_eq!(weights.len(), self.coeffs.len());
        SpectralField {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(weights)
                .map(|(c, w)| c * w)
                .collect(),
        }
    }

    /// `Σ |F_k|^2` over all modes.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Index of the mirror mode `-k`.
    pub fn mirror_index(&self, flat: usize) -> usize {
        let n = self.grid.n();
        let idx = self.grid.axis_indices(flat);
        let neg = |j: usize| (n - j) % n;
        match self.grid.dim() {
            1 => neg(idx[0]),
            _ => neg(idx[0]) * n + neg(idx[1]),
        }
    }

    /// Evaluates the trigonometric interpolant of the underlying real field
    /// at an arbitrary point `x` (length `N`).
    pub fn evaluate_at(&self, x: &[f64]) -> f64 {
        let grid = &self.grid;
        let n = grid.n();
        let l = grid.half_width();
        // e^{iξ_k (x + L)} per axis, in FFT index order.
        let phases: Vec<Vec<Complex64>> = x
            .iter()
            .take(grid.dim())
            .map(|&xa| {
                (0..n)
                    .map(|j| Complex64::from_polar(1.0, grid.wavenumber(j) * (xa + l)))
                    .collect()
            })
            .collect();
        let sum: Complex64 = match grid.dim() {
            1 => self
                .coeffs
                .iter()
                .zip(&phases[0])
                .map(|(c, p)| c * p)
                .sum(),
            _ => (0..n)
                .map(|i| {
                    let row: Complex64 = self.coeffs[i * n..(i + 1) * n]
                        .iter()
                        .zip(&phases[1])
                        .map(|(c, p)| c * p)
                        .sum();
                    row * phases[0][i]
                })
                .sum(),
        };
        sum.re / grid.len() as f64
    }
}
