use crate::error::{Error, Result};

/// Least-squares line through `(log t, log value)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub t_a: f64,
    pub t_b: f64,
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the log residuals.
    pub rms: f64,
    pub samples: usize,
}

/// Fits `value ≈ e^{intercept} t^{slope}` over samples with `t ∈ [t_a, t_b]`.
pub fn fit_power_law(samples: &[(f64, f64)], t_a: f64, t_b: f64) -> Result<ExponentFit> {
    if !(t_a > 0.0 && t_b > t_a) {
        return Err(Error::InvalidArgument(format!("bad fit window [{t_a}, {t_b}]")));
    }
    let slack = 1e-9;
    let window: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|&(t, _)| t >= t_a * (1.0 - slack) && t <= t_b * (1.0 + slack))
        .collect();
    if window.len() < 5 {
        return Err(Error::InvalidData(format!(
            "{} samples in [{t_a}, {t_b}], need at least 5",
            window.len()
        )));
    }
    if let Some(&(t, v)) = window.iter().find(|&&(_, v)| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidData(format!("value {v} at t = {t} is not positive")));
    }
    let points: Vec<(f64, f64)> = window.iter().map(|&(t, v)| (t.ln(), v.ln())).collect();
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidData("all samples share one time".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rms = (points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(ExponentFit {
        t_a,
        t_b,
        slope,
        intercept,
        rms,
        samples: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ladder(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (0..=32).map(|i| 2f64.powf(i as f64 / 4.0)).map(|t| (t, f(t))).collect()
    }

    #[test]
    fn exact_power_law() {
        let fit = fit_power_law(&ladder(|t| 3.0 * t.powf(-1.5)), 1.0, 256.0).unwrap();
        assert!((fit.slope + 1.5).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(fit.rms < 1e-12);
    }

    #[test]
    fn perturbed_power_law() {
        let data = ladder(|t| t.powf(-1.5) * (1.0 + 0.01 * t.ln().sin()));
        let fit = fit_power_law(&data, 1.0, 256.0).unwrap();
        assert!((fit.slope + 1.5).abs() < 0.02);
    }

    #[test]
    fn rejects_bad_samples() {
        let data = ladder(|t| t);
        assert!(fit_power_law(&data, 1.0, 1.5).is_err());
        let mut bad = data.clone();
        bad[3].1 = 0.0;
        assert!(matches!(fit_power_law(&bad, 1.0, 256.0), Err(Error::InvalidData(_))));
    }
}
