//! Fourier symbols of radial Lévy diffusion operators.
//!
//! An operator `L` enters the solver only through its symbol `a(ξ)`, the
//! Fourier multiplier with `(Lv)^(ξ) = a(ξ) v^(ξ)`. Every symbol here is real,
//! nonnegative and radial, written as `a(ξ) = ℓ|ξ|^α + k(ξ)` where `ℓ|ξ|^α` is
//! the dominant low-frequency term and `k` is a perturbation.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    /// `ℓ|ξ|^α`.
    Fractional,
    /// `Σ a_j |ξ|^{α_j}`; a Brownian part `-a_0 Δ` is the term `(a_0, 2)`.
    Multifractional,
    /// Sampled values of `a` against `|ξ|`, interpolated piecewise linearly.
    Tabulated,
}

/// One term `coefficient · |ξ|^exponent` of a multifractional symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolTerm {
    pub coefficient: f64,
    pub exponent: f64,
}

impl SymbolTerm {
    pub fn new(coefficient: f64, exponent: f64) -> Self {
        Self {
            coefficient,
            exponent,
        }
    }
}

/// Samples of a radial symbol on increasing radii starting at `|ξ| = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTable {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSpec {
    pub kind: SymbolKind,
    /// Stability index of the dominant term, in `(0, 2]`.
    pub alpha: f64,
    /// Coefficient of the dominant term.
    pub ell: f64,
    pub terms: Vec<SymbolTerm>,
    pub table: Option<SymbolTable>,
}

fn check_exponent(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidSymbol(format!(
            "exponent {alpha} outside (0, 2]"
        )))
    }
}

fn check_coefficient(c: f64) -> Result<()> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSymbol(format!("coefficient {c} must be > 0")))
    }
}

impl SymbolSpec {
    /// `ℓ|ξ|^α`, the generator of the α-stable semigroup (scaled).
    pub fn fractional(alpha: f64, ell: f64) -> Result<Self> {
        let spec = Self {
            kind: SymbolKind::Fractional,
            alpha,
            ell,
            terms: Vec::new(),
            table: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `Σ a_j |ξ|^{α_j}`; `alpha` becomes the smallest exponent and `ell` the
    /// summed coefficient of the terms carrying it.
    pub fn multifractional(terms: Vec<SymbolTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidSymbol("empty term list".into()));
        }
        for term in &terms {
            check_coefficient(term.coefficient)?;
            check_exponent(term.exponent)?;
        }
        let alpha = terms
            .iter()
            .map(|t| t.exponent)
            .fold(f64::INFINITY, f64::min);
        let ell = terms
            .iter()
            .filter(|t| t.exponent == alpha)
            .map(|t| t.coefficient)
            .sum();
        let spec = Self {
            kind: SymbolKind::Multifractional,
            alpha,
            ell,
            terms,
            table: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// A sampled symbol. `radii` must start at 0 with value 0 and increase
    /// strictly; `alpha`/`ell` declare the dominant term the table is meant
    /// to carry.
    pub fn tabulated(alpha: f64, ell: f64, radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let spec = Self {
            kind: SymbolKind::Tabulated,
            alpha,
            ell,
            terms: Vec::new(),
            table: Some(SymbolTable { radii, values }),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_exponent(self.alpha)?;
        check_coefficient(self.ell)?;
        match self.kind {
            SymbolKind::Fractional => Ok(()),
            SymbolKind::Multifractional => {
                let alpha = self.dominant_alpha()?;
                for term in &self.terms {
                    check_coefficient(term.coefficient)?;
                    check_exponent(term.exponent)?;
                }
                if alpha != self.alpha {
                    return Err(Error::InvalidSymbol(format!(
                        "alpha {} differs from the smallest exponent {alpha}",
                        self.alpha
                    )));
                }
                Ok(())
            }
            SymbolKind::Tabulated => {
                let table = self
                    .table
                    .as_ref()
                    .ok_or_else(|| Error::InvalidSymbol("tabulated symbol without table".into()))?;
                if table.radii.len() != table.values.len() || table.radii.len() < 2 {
                    return Err(Error::InvalidSymbol(
                        "table needs at least two (radius, value) pairs".into(),
                    ));
                }
                if table.radii[0] != 0.0 || table.values[0] != 0.0 {
                    return Err(Error::InvalidSymbol("table must start at a(0) = 0".into()));
                }
                if table.radii.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidSymbol("table radii must increase".into()));
                }
                if table.values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidSymbol(
                        "table values must be finite and nonnegative".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// `a(ξ)` at a wavenumber vector of any dimension.
    pub fn evaluate(&self, xi: &[f64]) -> Result<f64> {
        let radius = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        self.evaluate_radial(radius)
    }

    /// `a` as a function of `|ξ|`.
    pub fn evaluate_radial(&self, radius: f64) -> Result<f64> {
        if radius == 0.0 {
            return Ok(0.0);
        }
        match self.kind {
            SymbolKind::Fractional => Ok(self.ell * radius.powf(self.alpha)),
            SymbolKind::Multifractional => Ok(self
                .terms
                .iter()
                .map(|t| t.coefficient * radius.powf(t.exponent))
                .sum()),
            SymbolKind::Tabulated => {
                let table = self
                    .table
                    .as_ref()
                    .ok_or_else(|| Error::InvalidSymbol("tabulated symbol without table".into()))?;
                interpolate(table, radius)
            }
        }
    }

    /// The exponent of the dominant low-frequency term.
    pub fn dominant_alpha(&self) -> Result<f64> {
        match self.kind {
            SymbolKind::Fractional | SymbolKind::Tabulated => Ok(self.alpha),
            SymbolKind::Multifractional => {
                if self.terms.is_empty() {
                    return Err(Error::InvalidSymbol("empty term list".into()));
                }
                Ok(self
                    .terms
                    .iter()
                    .map(|t| t.exponent)
                    .fold(f64::INFINITY, f64::min))
            }
        }
    }

    /// `k(ξ) = a(ξ) − ℓ|ξ|^α` at radius `|ξ|`.
    pub fn perturbation(&self, radius: f64) -> Result<f64> {
        Ok(self.evaluate_radial(radius)? - self.ell * radius.powf(self.alpha))
    }

    /// True when the operator has a Brownian part, i.e. a `|ξ|^2` term.
    pub fn has_brownian_part(&self) -> bool {
        match self.kind {
            SymbolKind::Fractional => self.alpha == 2.0,
            SymbolKind::Multifractional => self.terms.iter().any(|t| t.exponent == 2.0),
            SymbolKind::Tabulated => false,
        }
    }

    /// True for a pure `ℓ|ξ|^2` symbol, the classical Laplacian.
    pub fn is_pure_laplacian(&self) -> bool {
        match self.kind {
            SymbolKind::Fractional => self.alpha == 2.0,
            SymbolKind::Multifractional => self.terms.iter().all(|t| t.exponent == 2.0),
            SymbolKind::Tabulated => false,
        }
    }
}

fn interpolate(table: &SymbolTable, radius: f64) -> Result<f64> {
    let max = *table.radii.last().expect("validated table is nonempty");
    if !(radius >= 0.0 && radius <= max) {
        return Err(Error::OutOfRange {
            radius,
            min: 0.0,
            max,
        });
    }
    let upper = table.radii.partition_point(|&r| r < radius).max(1);
    let (r0, r1) = (table.radii[upper - 1], table.radii[upper]);
    let (v0, v1) = (table.values[upper - 1], table.values[upper]);
    let w = (radius - r0) / (r1 - r0);
    Ok(v0 + w * (v1 - v0))
}

/// Outcome of sampling `|k(ξ)|/|ξ|^α` towards the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationCheck {
    pub holds: bool,
    /// Sampled radii, decreasing.
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
}

pub const LADDER_FACTOR: f64 = 0.5;
pub const LADDER_RUNGS: usize = 20;

/// Checks that `k(ξ)/|ξ|^α → 0` as `ξ → 0` on the default ladder of 20 radii
/// halving down to `xi_min`.
pub fn check_perturbation_condition(
    spec: &SymbolSpec,
    xi_min: f64,
    ratio_tol: f64,
) -> PerturbationCheck {
    check_perturbation_condition_with(spec, xi_min, ratio_tol, LADDER_FACTOR, LADDER_RUNGS)
}

/// Ladder `xi_min / factor^(rungs-1), …, xi_min / factor, xi_min`.
///
/// The condition holds when the sampled ratios never increase and the last
/// one is below `ratio_tol`.
pub fn check_perturbation_condition_with(
    spec: &SymbolSpec,
    xi_min: f64,
    ratio_tol: f64,
    factor: f64,
    rungs: usize,
) -> PerturbationCheck {
    let failed = PerturbationCheck {
        holds: false,
        radii: Vec::new(),
        ratios: Vec::new(),
    };
    if !(xi_min > 0.0 && ratio_tol > 0.0 && factor > 0.0 && factor < 1.0 && rungs > 0) {
        return failed;
    }
    let radii: Vec<f64> = (0..rungs)
        .map(|m| xi_min * factor.powi(-((rungs - 1 - m) as i32)))
        .collect();
    let mut ratios = Vec::with_capacity(rungs);
    for &r in &radii {
        match spec.perturbation(r) {
            Ok(k) => ratios.push(k.abs() / r.powf(spec.alpha)),
            Err(_) => {
                return PerturbationCheck {
                    holds: false,
                    radii,
                    ratios,
                }
            }
        }
    }
    let nonincreasing = ratios
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-15);
    let last_small = ratios.last().is_some_and(|&r| r < ratio_tol);
    PerturbationCheck {
        holds: nonincreasing && last_small,
        radii,
        ratios,
    }
}
