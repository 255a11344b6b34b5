//! Construction of the initial datum.

use std::f64::consts::PI;

use lkpz_core::diagnostics::{admissible_p0, d_quantity, smallness, DValue, TimeLadder};
use lkpz_core::spectral::{self, snapshot, Field, PeriodicGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, Shape};
use crate::error::{CliError, CliResult};

pub fn grid(config: &ExperimentConfig) -> CliResult<PeriodicGrid> {
    let g = &config.grid;
    Ok(PeriodicGrid::new(g.dim, g.n, g.half_width)?)
}

/// The configured datum before any smallness rescaling.
pub fn base_datum(config: &ExperimentConfig) -> CliResult<Field> {
    let grid = grid(config)?;
    let init = &config.initial;
    let w = init.width;
    let c = init.center;
    let r2 = move |x: &[f64]| -> f64 {
        x.iter().zip(c).map(|(xi, ci)| (xi - ci).powi(2)).sum()
    };
    let base = match &init.shape {
        Shape::Gaussian => {
            Field::from_fn(grid, |x| init.amplitude * (-r2(x) / (2.0 * w * w)).exp())
        }
        Shape::Bump { power } => Field::from_fn(grid, |x| {
            let s = 1.0 - r2(x) / (w * w);
            if s > 0.0 {
                init.amplitude * s.powi(*power as i32)
            } else {
                0.0
            }
        }),
        Shape::File(path) => {
            let f = snapshot::read(path)?;
            if f.grid() != &grid {
                return Err(CliError::Setup(format!(
                    "{} holds a grid (N={}, n={}, L={}) that differs from [grid]",
                    path.display(),
                    f.grid().dim(),
                    f.grid().n(),
                    f.grid().half_width()
                )));
            }
            f
        }
    };
    if init.noise == 0.0 {
        return Ok(base);
    }
    let factor = noise_factor(grid, config.seed, init.noise_modes, init.noise);
    let values = base
        .values()
        .iter()
        .zip(factor.values())
        .map(|(a, b)| a * b)
        .collect();
    Ok(Field::from_values(grid, values)?)
}

/// `1 + level·s(x)` with `s` a random combination of the lowest periodic
/// modes, normalised so `|s| ≤ 1`. Deterministic in `seed`.
pub fn noise_factor(grid: PeriodicGrid, seed: u64, modes: usize, level: f64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = grid.half_width();
    let mut waves: Vec<([f64; 2], f64, f64)> = Vec::new();
    let modes = modes.max(1) as i64;
    let second: Vec<i64> = if grid.dim() == 2 { (-modes..=modes).collect() } else { vec![0] };
    for k0 in 0..=modes {
        for &k1 in &second {
            if k0 == 0 && k1 <= 0 {
                continue;
            }
            let amplitude: f64 = rng.random_range(-1.0..1.0);
            let phase: f64 = rng.random_range(0.0..2.0 * PI);
            waves.push(([k0 as f64, k1 as f64], amplitude, phase));
        }
    }
    let total: f64 = waves.iter().map(|w| w.1.abs()).sum();
    Field::from_fn(grid, |x| {
        let s: f64 = waves
            .iter()
            .map(|(k, a, phase)| {
                let arg: f64 = x.iter().zip(k).map(|(xi, ki)| PI * ki * (xi + l) / l).sum();
                a * (arg + phase).cos()
            })
            .sum();
        1.0 + level * s / total
    })
}

/// Time ladder for `D(u_0, p_0)`: from well below the grid scale to past
/// the box relaxation time `L^α`, eight points per decade.
pub fn d_ladder(grid: &PeriodicGrid, alpha: f64) -> CliResult<TimeLadder> {
    let t_min = (grid.spacing() / 100.0).powf(alpha);
    let t_max = (100.0 * grid.half_width()).powf(alpha);
    Ok(TimeLadder::geometric(t_min, t_max, 8)?)
}

/// The small-data combination for a datum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallData {
    pub p0: f64,
    pub d: DValue,
    pub gradient_sup: f64,
    pub combination: f64,
}

pub fn small_data(config: &ExperimentConfig, u0: &Field) -> CliResult<Option<SmallData>> {
    let alpha = config.alpha();
    let Some(p0) = admissible_p0(config.grid.dim, alpha, config.q) else {
        return Ok(None);
    };
    let ladder = d_ladder(u0.grid(), alpha)?;
    let d = d_quantity(u0, p0, &config.symbol, &ladder)?;
    let gradient_sup = spectral::gradient_magnitude(&spectral::gradient(u0)).max_abs();
    Ok(Some(SmallData {
        p0,
        d,
        gradient_sup,
        combination: smallness(config.lambda, config.q, p0, gradient_sup, d.value),
    }))
}

/// Initial datum after the smallness gate, with the factor applied.
#[derive(Debug, Clone)]
pub struct InitialDatum {
    pub field: Field,
    pub scale: f64,
    pub small: Option<SmallData>,
}

/// Builds `u_0`. With a smallness target the datum is multiplied by
/// `(target/current)^{1/(q-1)}` when it is too large; the combination is
/// homogeneous of degree `q - 1`.
pub fn build(config: &ExperimentConfig) -> CliResult<InitialDatum> {
    let field = base_datum(config)?;
    let Some(target) = config.initial.smallness else {
        return Ok(InitialDatum {
            small: small_data(config, &field)?,
            field,
            scale: 1.0,
        });
    };
    let small = small_data(config, &field)?.ok_or_else(|| {
        CliError::Setup(format!(
            "no admissible p0 for q = {} and alpha = {}, so the smallness gate is undefined",
            config.q,
            config.alpha()
        ))
    })?;
    if small.combination <= target {
        return Ok(InitialDatum {
            field,
            scale: 1.0,
            small: Some(small),
        });
    }
    let scale = (target / small.combination).powf(1.0 / (config.q - 1.0));
    let field = field.scaled(scale);
    Ok(InitialDatum {
        small: small_data(config, &field)?,
        field,
        scale,
    })
}
