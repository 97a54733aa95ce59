use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Least-squares line through `(ln t, ln value)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// Residual standard error of the log-log regression.
    pub residual: f64,
    /// Half-width of the 95% confidence interval on the slope.
    pub half_width: f64,
    pub points: usize,
}

pub const MIN_FIT_POINTS: usize = 8;

/// Ordinary least squares on log-log data. Needs at least eight strictly
/// positive samples.
pub fn fit_decay_exponent(series: &[(f64, f64)]) -> Result<DecayFit> {
    if series.len() < MIN_FIT_POINTS {
        return Err(Error::Fit(format!("need at least {MIN_FIT_POINTS} points, got {}", series.len())));
    }
    if let Some((t, v)) = series.iter().find(|(t, v)| !(*t > 0.0 && *v > 0.0) || !t.is_finite() || !v.is_finite()) {
        return Err(Error::Fit(format!("non-positive sample ({t}, {v})")));
    }
    let n = series.len() as f64;
    let xs: Vec<f64> = series.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = series.iter().map(|(_, v)| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let dof = n - 2.0;
    let residual = (ssr / dof).sqrt();
    let quantile =
        StudentsT::new(0.0, 1.0, dof).map(|t| t.inverse_cdf(0.975)).map_err(|e| Error::Fit(e.to_string()))?;
    Ok(DecayFit { slope, intercept, residual, half_width: quantile * residual / sxx.sqrt(), points: series.len() })
}

/// Drops samples in the first decade `t < 10 t_min`, then fits.
pub fn fit_after_first_decade(series: &[(f64, f64)]) -> Result<DecayFit> {
    let t_min = series.iter().map(|(t, _)| *t).fold(f64::INFINITY, f64::min);
    let tail: Vec<(f64, f64)> = series.iter().copied().filter(|(t, _)| *t >= 10.0 * t_min * (1.0 - 1e-12)).collect();
    fit_decay_exponent(&tail)
}

/// Log-spaced grid from `start` to `stop` with `per_decade` points per decade,
/// both ends included.
pub fn log_spaced(start: f64, stop: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && stop > start && per_decade > 0) {
        return Err(Error::InvalidParameter(format!("log grid needs 0 < start < stop, got [{start}, {stop}]")));
    }
    let decades = (stop / start).log10();
    let intervals = ((decades * per_decade as f64).round() as usize).max(1);
    Ok((0..=intervals)
        .map(|i| if i == intervals { stop } else { start * (stop / start).powf(i as f64 / intervals as f64) })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_power_laws() {
        let ts = log_spaced(1.0, 1000.0, 16).unwrap();
        assert_eq!(ts.len(), 49);
        let inv: Vec<_> = ts.iter().map(|&t| (t, 1.0 / t)).collect();
        let fit = fit_decay_exponent(&inv).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        let seven: Vec<_> = ts.iter().map(|&t| (t, 7.0 * t.powf(-2.0 / 3.0))).collect();
        let fit = fit_decay_exponent(&seven).unwrap();
        assert!((fit.slope + 2.0 / 3.0).abs() < 1e-12);
        assert_relative_eq!(fit.intercept, 7f64.ln(), max_relative = 1e-12);
        assert!(fit.half_width < 1e-10);
    }

    #[test]
    fn noisy_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let ts = log_spaced(10.0, 1000.0, 16).unwrap();
        let noisy: Vec<_> = ts.iter().map(|&t| (t, t.powf(-0.75) * (1.0 + rng.gen_range(-1e-3..1e-3)))).collect();
        let fit = fit_decay_exponent(&noisy).unwrap();
        assert!((fit.slope + 0.75).abs() < 1e-2);
        assert!(fit.half_width > 0.0 && fit.half_width < 1e-2);
    }

    #[test]
    fn rejects_bad_series() {
        let short: Vec<_> = (1..8).map(|t| (t as f64, 1.0)).collect();
        assert!(fit_decay_exponent(&short).is_err());
        let mut bad: Vec<_> = (1..12).map(|t| (t as f64, 1.0)).collect();
        bad[3].1 = 0.0;
        assert!(fit_decay_exponent(&bad).is_err());
        let flat: Vec<_> = (0..10).map(|_| (2.0, 1.0)).collect();
        assert!(fit_decay_exponent(&flat).is_err());
    }

    #[test]
    fn first_decade_is_dropped() {
        let ts = log_spaced(1.0, 1000.0, 16).unwrap();
        // Transient that only lives in the first decade.
        let s: Vec<_> = ts.iter().map(|&t| (t, if t < 9.9 { 5.0 } else { t.powf(-0.5) })).collect();
        let fit = fit_after_first_decade(&s).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert_eq!(fit.points, 33);
    }
}
