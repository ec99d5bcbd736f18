//! Scalar models of the three mechanisms the weights are designed around:
//! resonant exchange inside one critical interval, forced decay of a
//! damped zero mode, and lift-up of the streamwise zero-mode velocity.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fit::{fit_loglog_slope, GrowthFit};
use crate::ode::{dopri5, Tolerance};
use crate::quad;
use crate::symbols::zero_mode_rate;

/// Critical interval `[t_k, t_{k-1}]` of `(k, eta)` in terms of `|eta|`, `|k|`.
fn orr_interval(k: i64, eta: f64) -> (f64, f64) {
    let (i, kf) = (eta.abs(), k.unsigned_abs() as f64);
    let t = |l: f64| {
        if l == 0.0 {
            2.0 * i
        } else {
            i / l - i / (2.0 * l * (l + 1.0))
        }
    };
    (t(kf), t(kf - 1.0))
}

/// Integrates the resonant pair
/// `R' = kappa k^2/|eta| NR`, `NR' = kappa |eta| / (k^2 (1 + (t - eta/k)^2)) R`
/// across the critical interval of `(k, eta)` from `R = NR = 1`.
/// Returns the terminal `(R, NR)`.
pub fn orr_toy_integrate(k: i64, eta_val: f64, kappa: f64) -> Result<(f64, f64)> {
    if k == 0 || (k as f64) * eta_val <= 0.0 {
        return Err(Error::precondition("orr toy needs k != 0 and k eta > 0"));
    }
    let n = eta_val.abs().sqrt().floor() as i64;
    if k.abs() > n {
        return Err(Error::precondition(format!(
            "|k| = {} exceeds E(sqrt|eta|) = {n}: no critical interval",
            k.abs()
        )));
    }
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::invalid("kappa must be finite and >= 0"));
    }
    let (t0, t1) = orr_interval(k, eta_val);
    let k2 = (k * k) as f64;
    let i = eta_val.abs();
    let center = i / k.abs() as f64;
    let y = dopri5(
        |t, y: &[f64; 2]| {
            let d = t - center;
            [kappa * k2 / i * y[1], kappa * i / (k2 * (1.0 + d * d)) * y[0]]
        },
        t0,
        t1,
        [1.0, 1.0],
        Tolerance::default(),
    )?;
    Ok((y[0], y[1]))
}

/// Report of [`zero_mode_decay_bound`].
#[derive(Debug, Clone)]
pub struct ZeroModeReport {
    pub sigma: f64,
    /// `sup_t <t>^3 |theta(t)|`.
    pub sup_weighted: f64,
    pub argmax_t: f64,
    /// `sup_t <t>^3 |theta(t)| sigma^3 / (|theta(0)| + 1)`.
    pub constant: f64,
    pub series: Vec<(f64, f64)>,
}

/// Evolves `theta' + sigma theta = F` on the increasing grid `times`
/// (starting at 0) with `F = <t>^{-3}` when `forced`, exactly per step:
/// `theta(t+h) = e^{-sigma h} theta(t) + int_t^{t+h} e^{-sigma(t+h-s)} F(s) ds`.
pub fn zero_mode_evolve(sigma: f64, theta0: f64, forced: bool, times: &[f64]) -> Result<Vec<f64>> {
    if times.first() != Some(&0.0) {
        return Err(Error::precondition("time grid must start at 0"));
    }
    let mut out = Vec::with_capacity(times.len());
    let mut th = theta0;
    out.push(th);
    for w in times.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            return Err(Error::precondition("time grid must be increasing"));
        }
        th *= (-sigma * (b - a)).exp();
        if forced {
            let q = quad::integrate(|s| (-sigma * (b - s)).exp() * (1.0 + s * s).powf(-1.5), a, b, 1e-12, 1e-300)?;
            th += q.value;
        }
        out.push(th);
    }
    Ok(out)
}

/// `<t>^3 |theta_0(t)|` for the forced zero-mode model with unit data, up to
/// `t_max`, and the constant in `<t>^3 |theta| <= C sigma^{-3} (|theta(0)|+1)`.
pub fn zero_mode_decay_bound(eta_val: f64, alpha: i64, t_max: f64) -> Result<ZeroModeReport> {
    if alpha == 0 {
        return Err(Error::precondition("zero-mode bound needs alpha != 0"));
    }
    if !(t_max > 1.0) {
        return Err(Error::invalid("t_max must exceed 1"));
    }
    let sigma = zero_mode_rate(eta_val, alpha);
    let mut times = vec![0.0];
    times.extend(crate::fit::log_grid(1e-2, t_max, 1200));
    let theta0 = 1.0;
    let th = zero_mode_evolve(sigma, theta0, true, &times)?;
    let mut best = (0.0f64, 0.0f64);
    let series: Vec<(f64, f64)> = times.iter().zip(&th).map(|(&t, &v)| (t, v)).collect();
    for &(t, v) in &series {
        let w = (1.0 + t * t).powf(1.5) * v.abs();
        if w > best.0 {
            best = (w, t);
        }
    }
    Ok(ZeroModeReport {
        sigma,
        sup_weighted: best.0,
        argmax_t: best.1,
        constant: best.0 * sigma.powi(3) / (theta0.abs() + 1.0),
        series,
    })
}

/// `sigma int_10^t (sigma <t - tau>)^m e^{-sigma (t - tau)} dtau`, written as
/// `int_0^{sigma (t-10)} (sigma^2 + u^2)^{m/2} e^{-u} du`.
pub fn semigroup_integral(sigma: f64, m: f64, t: f64) -> Result<f64> {
    if t <= 10.0 {
        return Ok(0.0);
    }
    let upper = sigma * (t - 10.0);
    if m == 0.0 {
        return Ok(-(-upper).exp_m1());
    }
    let q = quad::integrate(|u| (sigma * sigma + u * u).powf(0.5 * m) * (-u).exp(), 0.0, upper, 1e-12, 1e-300)?;
    Ok(q.value)
}

/// Report of [`semigroup_bound_check`].
#[derive(Debug, Clone)]
pub struct SemigroupReport {
    pub m: f64,
    /// Per grid point `(eta, alpha, sup_t value)`.
    pub per_frequency: Vec<(f64, i64, f64)>,
    pub constant: f64,
    /// `(max - min) / max` over the grid.
    pub spread: f64,
}

/// The integral is nondecreasing in `t`, so its supremum over `t <= 200/sigma`
/// is its value at the endpoint.
pub fn semigroup_bound_check(grid: &[(f64, i64)], m: f64) -> Result<SemigroupReport> {
    if !(m >= 0.0) {
        return Err(Error::precondition("m must be >= 0"));
    }
    if grid.is_empty() {
        return Err(Error::precondition("empty frequency grid"));
    }
    let mut per = Vec::with_capacity(grid.len());
    for &(eta, alpha) in grid {
        if alpha == 0 {
            return Err(Error::precondition("semigroup bound needs alpha != 0"));
        }
        let sigma = zero_mode_rate(eta, alpha);
        let t_end = 200.0 / sigma;
        per.push((eta, alpha, semigroup_integral(sigma, m, t_end)?));
    }
    let max = per.iter().map(|p| p.2).fold(f64::NEG_INFINITY, f64::max);
    let min = per.iter().map(|p| p.2).fold(f64::INFINITY, f64::min);
    Ok(SemigroupReport {
        m,
        per_frequency: per,
        constant: max,
        spread: (max - min) / max,
    })
}

/// `1 - e^{-x}(1 + x)`, accurate for small `x`.
fn liftup_shape(x: f64) -> f64 {
    if x < 0.1 {
        // 1 - e^{-x}(1+x) = sum_{n>=2} (-1)^n (n-1) x^n / n!; term carries the opposite sign
        let mut term = x;
        let mut sum = 0.0;
        for n in 2..16 {
            term *= -x / n as f64;
            sum -= (n - 1) as f64 * term;
        }
        sum
    } else {
        -(-x).exp_m1() - x * (-x).exp()
    }
}

/// `theta_l(t; eta, alpha) = eps^2 (|eta| + |alpha|) sigma int_0^t tau e^{-sigma tau} dtau`.
pub fn liftup_theta(epsilon: f64, eta: f64, alpha: i64, t: f64) -> f64 {
    let sigma = zero_mode_rate(eta, alpha);
    let mag = eta.abs() + alpha.unsigned_abs() as f64;
    if sigma == 0.0 {
        return 0.0;
    }
    epsilon * epsilon * mag * liftup_shape(sigma * t) / sigma
}

/// Supremum of [`liftup_theta`] over the grid at each time.
pub fn liftup_envelope(epsilon: f64, freq_grid: &[(f64, i64)], t_grid: &[f64], exec: Exec) -> Vec<(f64, f64)> {
    exec.map(t_grid.len(), |i| {
        let t = t_grid[i];
        let v = freq_grid
            .iter()
            .map(|&(eta, a)| liftup_theta(epsilon, eta, a, t))
            .fold(0.0, f64::max);
        (t, v)
    })
}

/// Log-log slope of the lift-up envelope over the span of `t_grid`.
pub fn liftup_growth(epsilon: f64, freq_grid: &[(f64, i64)], t_grid: &[f64]) -> Result<GrowthFit> {
    if freq_grid.iter().any(|&(_, a)| a == 0) {
        return Err(Error::precondition("lift-up grid needs alpha != 0"));
    }
    let (lo, hi) = match (t_grid.first(), t_grid.last()) {
        (Some(&a), Some(&b)) if b > a => (a, b),
        _ => return Err(Error::precondition("time grid needs two increasing points")),
    };
    let env = liftup_envelope(epsilon, freq_grid, t_grid, Exec::default());
    fit_loglog_slope(&env, (lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::log_grid;

    #[test]
    fn orr_uncoupled_is_identity() {
        assert_eq!(orr_toy_integrate(1, 100.0, 0.0).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn orr_rejects_outside_regime() {
        assert!(orr_toy_integrate(0, 100.0, 1.0).is_err());
        assert!(orr_toy_integrate(-1, 100.0, 1.0).is_err());
        assert!(orr_toy_integrate(11, 100.0, 1.0).is_err());
        assert!(orr_toy_integrate(-2, -100.0, 1.0).is_ok());
    }

    #[test]
    fn orr_short_intervals_stay_bounded() {
        let kappa = 1.0;
        let mut worst = 0.0f64;
        for k in 1..=30i64 {
            let eta = (k * k) as f64;
            let (r, nr) = orr_toy_integrate(k, eta, kappa).unwrap();
            worst = worst.max(r.max(nr));
        }
        assert!(worst < (4.0 * kappa).exp(), "{worst}");
    }

    #[test]
    fn orr_amplification_is_monotone() {
        let mut last = 0.0;
        for kappa in [0.0, 0.25, 0.5, 1.0, 2.0] {
            let (_, nr) = orr_toy_integrate(1, 400.0, kappa).unwrap();
            assert!(nr >= last);
            last = nr;
        }
        let mut last = 0.0;
        for eta in [4.0, 16.0, 64.0, 256.0, 1024.0] {
            let (_, nr) = orr_toy_integrate(2, eta, 1.0).unwrap();
            assert!(nr >= last, "{eta}");
            last = nr;
        }
    }

    #[test]
    fn orr_growth_is_polynomial_in_eta() {
        let mut pts = Vec::new();
        for eta in log_grid(1e2, 1e5, 10) {
            let (_, nr) = orr_toy_integrate(1, eta, 1.0).unwrap();
            pts.push((eta, nr));
        }
        let lo = crate::fit::loglog_regression(&pts[..8], (1e2, 1e5)).unwrap();
        let all = crate::fit::loglog_regression(&pts, (1e2, 1e5)).unwrap();
        assert!(all.exponent > 0.0);
        assert!((lo.exponent - all.exponent).abs() < 0.1 * all.exponent);
    }

    #[test]
    fn homogeneous_zero_mode_is_exponential() {
        let times: Vec<f64> = (0..200).map(|i| i as f64 * 0.5).collect();
        let th = zero_mode_evolve(0.3, 1.0, false, &times).unwrap();
        for (t, v) in times.iter().zip(&th) {
            let e = (-0.3 * t).exp();
            assert!((v - e).abs() <= 1e-12 * e);
        }
    }

    #[test]
    fn forced_zero_mode_matches_quadrature() {
        let sigma = 0.2;
        let times: Vec<f64> = (0..=40).map(|i| i as f64).collect();
        let th = zero_mode_evolve(sigma, 0.5, true, &times).unwrap();
        let t = 40.0;
        let q = quad::integrate(|s| (-sigma * (t - s)).exp() * (1.0 + s * s).powf(-1.5), 0.0, t, 1e-13, 0.0).unwrap();
        let exact = 0.5 * (-sigma * t).exp() + q.value;
        assert!((th[40] - exact).abs() < 1e-11 * exact);
    }

    #[test]
    fn zero_mode_bound_examples() {
        let r = zero_mode_decay_bound(0.0, 1, 1e3).unwrap();
        assert_eq!(r.sigma, 1.0);
        assert!(r.sup_weighted.is_finite() && r.sup_weighted < 10.0);
        let r = zero_mode_decay_bound(3.0, 1, 1e4).unwrap();
        assert!((r.sigma - 0.01).abs() < 1e-15);
        let scaled = r.sup_weighted / 1e6;
        assert!(scaled > 0.1 && scaled < 10.0, "{scaled}");
        assert!(zero_mode_decay_bound(1.0, 0, 10.0).is_err());
    }

    #[test]
    fn semigroup_integral_examples() {
        assert_eq!(semigroup_integral(0.1, 1.5, 10.0).unwrap(), 0.0);
        let v = semigroup_integral(0.1, 0.0, 30.0).unwrap();
        assert!((v - (1.0 - (-2.0f64).exp())).abs() < 1e-15);
        let q = semigroup_integral(0.1, 1.0, 30.0).unwrap();
        let direct = quad::integrate(
            |tau| 0.1 * 0.1 * (1.0 + (30.0 - tau) * (30.0 - tau)).sqrt() * (-0.1 * (30.0 - tau)).exp(),
            10.0,
            30.0,
            1e-13,
            0.0,
        )
        .unwrap();
        assert!((q - direct.value).abs() < 1e-10);
    }

    #[test]
    fn semigroup_bound_m_zero_is_one() {
        let grid: Vec<(f64, i64)> = (1..=5).flat_map(|e| (1..=3).map(move |a| (e as f64, a))).collect();
        let r = semigroup_bound_check(&grid, 0.0).unwrap();
        assert!(r.constant <= 1.0);
        assert!(r.spread < 1e-12);
        assert!(semigroup_bound_check(&[(1.0, 0)], 1.0).is_err());
    }

    #[test]
    fn liftup_homogeneity_and_evenness() {
        for &(eta, a, t) in &[(3.0, 2, 50.0), (0.5, 1, 10.0), (40.0, 7, 900.0)] {
            let base = liftup_theta(1e-3, eta, a, t);
            assert!((liftup_theta(2e-3, eta, a, t) - 4.0 * base).abs() <= 4.0 * base * 1e-14);
            assert_eq!(liftup_theta(1e-3, -eta, a, t), base);
            assert_eq!(liftup_theta(1e-3, eta, -a, t), base);
        }
    }

    #[test]
    fn liftup_single_frequency_saturates() {
        let t = log_grid(1e4, 1e6, 20);
        let env = liftup_envelope(1.0, &[(1.0, 1)], &t, Exec::Sequential);
        let fit = crate::fit::loglog_regression(&env, (1e4, 1e6)).unwrap();
        assert!(fit.exponent.abs() < 1e-3);
    }

    #[test]
    fn liftup_small_x_branch_is_continuous() {
        let a = liftup_shape(0.1 * (1.0 - 1e-15));
        let b = liftup_shape(0.1);
        assert!((a - b).abs() < 1e-13 * a);
        assert!((liftup_shape(1e-4) - 0.5e-8 * (1.0 - 2e-4 / 3.0 + 0.25e-8)).abs() < 1e-12 * 0.5e-8);
    }
}
