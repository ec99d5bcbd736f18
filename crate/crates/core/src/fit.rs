//! Least-squares power-law fits in log-log coordinates.

use crate::error::{Error, Result};

/// Minimum number of samples inside the window.
pub const MIN_POINTS: usize = 8;
/// Fits with a lower coefficient of determination are rejected.
pub const MIN_R2: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub exponent: f64,
    /// `ln` of the prefactor: `value ~ e^{intercept} t^{exponent}`.
    pub intercept: f64,
    pub r2: f64,
    pub window: (f64, f64),
    pub points: usize,
}

/// Regression of `ln value` on `ln t` over `window`, without the `r^2`
/// gate. Errors on too few points or non-positive values.
pub fn loglog_regression(series: &[(f64, f64)], window: (f64, f64)) -> Result<GrowthFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::invalid(format!("window ({lo}, {hi}) must satisfy 0 < tMin < tMax")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(t, v) in series {
        if t < lo || t > hi {
            continue;
        }
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Fit(format!("value {v} at t = {t} is not positive and finite")));
        }
        xs.push(t.ln());
        ys.push(v.ln());
    }
    let n = xs.len();
    if n < MIN_POINTS {
        return Err(Error::Fit(format!("{n} points in window, need at least {MIN_POINTS}")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::Fit("all sample times coincide".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(GrowthFit {
        exponent: slope,
        intercept: my - slope * mx,
        r2,
        window,
        points: n,
    })
}

/// [`loglog_regression`] that additionally refuses fits with `r^2 < 0.99`.
pub fn fit_loglog_slope(series: &[(f64, f64)], window: (f64, f64)) -> Result<GrowthFit> {
    let fit = loglog_regression(series, window)?;
    if fit.r2 < MIN_R2 {
        return Err(Error::Fit(format!(
            "r^2 = {:.5} below {MIN_R2} (slope {:.4})",
            fit.r2, fit.exponent
        )));
    }
    Ok(fit)
}

/// `n` log-spaced points spanning `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        log_grid(1.0, 1000.0, 200).into_iter().map(|t| (t, f(t))).collect()
    }

    #[test]
    fn exact_power_laws() {
        let f = fit_loglog_slope(&series(|t| t.powi(3)), (1.0, 1000.0)).unwrap();
        assert!((f.exponent - 3.0).abs() < 1e-10);
        let f = fit_loglog_slope(&series(|t| 2.0 * t.powi(-4)), (2.0, 500.0)).unwrap();
        assert!((f.exponent + 4.0).abs() < 1e-10);
        assert!((f.intercept - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn noisy_power_law() {
        let f = fit_loglog_slope(&series(|t| t.powf(1.5) * (1.0 + 0.01 * t.sin())), (1.0, 1000.0)).unwrap();
        assert!((f.exponent - 1.5).abs() < 0.02);
        assert!(f.r2 > 0.999);
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = series(|t| t);
        assert!(fit_loglog_slope(&s[..5], (1.0, 1000.0)).is_err());
        let mut z = s.clone();
        z[50].1 = 0.0;
        assert!(fit_loglog_slope(&z, (1.0, 1000.0)).is_err());
        // a sinusoid is not a power law
        let osc = series(|t| 2.0 + (3.0 * t.ln()).sin());
        assert!(matches!(fit_loglog_slope(&osc, (1.0, 1000.0)), Err(Error::Fit(_))));
        assert!(loglog_regression(&osc, (1.0, 1000.0)).is_ok());
        assert!(fit_loglog_slope(&s, (5.0, 1.0)).is_err());
    }
}
