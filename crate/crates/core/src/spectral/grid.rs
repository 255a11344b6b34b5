use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform periodic grid on `[-L, L)^N`, `N ∈ {1, 2}`, with `n` points per
/// axis. Values are stored row-major with the first axis slowest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid {
    dim: usize,
    n: usize,
    half_width: f64,
}

impl PeriodicGrid {
    pub fn new(dim: usize, n: usize, half_width: f64) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in {{1, 2}}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "{n} points per axis: need a power of two >= 8"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half width {half_width} must be > 0")));
        }
        Ok(Self { dim, n, half_width })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Quadrature weight `h^N` of a single grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Total number of grid points, `n^N`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of index `j` along one axis.
    pub fn coordinate(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    /// Per-axis indices of a flat index; unused axes are zero.
    pub fn axis_indices(&self, flat: usize) -> [usize; 2] {
        match self.dim {
            1 => [flat, 0],
            _ => [flat / self.n, flat % self.n],
        }
    }

    /// Coordinates of a flat index; unused axes are zero.
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let idx = self.axis_indices(flat);
        let mut x = [0.0; 2];
        for (axis, xi) in x.iter_mut().enumerate().take(self.dim) {
            *xi = self.coordinate(idx[axis]);
        }
        x
    }

    /// Euclidean norm of the coordinates of a flat index.
    pub fn radius(&self, flat: usize) -> f64 {
        let x = self.point(flat);
        (x[0] * x[0] + x[1] * x[1]).sqrt()
    }

    /// Signed integer mode number of FFT index `j`: `0, 1, …, n/2-1, -n/2, …, -1`.
    pub fn mode_number(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Angular wavenumber `π k / L` of FFT index `j`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        PI * self.mode_number(j) as f64 / self.half_width
    }

    /// Wavenumbers along one axis in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.wavenumber(j)).collect()
    }

    /// True when FFT index `j` is the unpaired Nyquist mode `k = -n/2`.
    pub fn is_nyquist(&self, j: usize) -> bool {
        j == self.n / 2
    }

    /// Wavenumber vector of a flat spectral index; unused axes are zero.
    pub fn wave_vector(&self, flat: usize) -> [f64; 2] {
        let idx = self.axis_indices(flat);
        let mut xi = [0.0; 2];
        for (axis, v) in xi.iter_mut().enumerate().take(self.dim) {
            *v = self.wavenumber(idx[axis]);
        }
        xi
    }

    /// `|ξ|` for every mode in flat FFT order.
    pub fn mode_norms(&self) -> Vec<f64> {
        (0..self.len())
            .map(|flat| {
                let xi = self.wave_vector(flat);
                (xi[0] * xi[0] + xi[1] * xi[1]).sqrt()
            })
            .collect()
    }

    /// Largest `|k|` over the axes of a flat spectral index.
    pub fn max_mode_number(&self, flat: usize) -> u64 {
        let idx = self.axis_indices(flat);
        (0..self.dim)
            .map(|axis| self.mode_number(idx[axis]).unsigned_abs())
            .max()
            .unwrap_or(0)
    }
}
