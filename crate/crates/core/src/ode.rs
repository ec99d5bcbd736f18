//! Adaptive Dormand-Prince 5(4) integrator for small dense systems.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rtol: 1e-10, atol: 1e-10 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` to `t1` and returns `y(t1)`.
pub fn dopri5<const N: usize, F>(f: F, t0: f64, t1: f64, y0: [f64; N], tol: Tolerance) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    if t1 < t0 {
        return Err(Error::precondition("dopri5 integrates forward only"));
    }
    let mut t = t0;
    let mut y = y0;
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y);
    }
    let mut h = (span / 100.0).min(0.1).max(span * 1e-12);
    let mut steps = 0usize;
    while t < t1 {
        if steps > 5_000_000 {
            return Err(Error::NumericalAbort {
                t,
                reason: "dopri5 step budget exhausted".into(),
            });
        }
        steps += 1;
        h = h.min(t1 - t);
        let mut k = [[0.0; N]; 7];
        for s in 0..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for i in 0..N {
                    ys[i] += h * A[s][j] * kj[i];
                }
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for i in 0..N {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += h * d5;
            let sc = tol.atol + tol.rtol * y[i].abs().max(y5[i].abs());
            err = err.max((h * (d5 - d4)).abs() / sc);
        }
        if !err.is_finite() {
            return Err(Error::NumericalAbort {
                t,
                reason: "non-finite state in dopri5".into(),
            });
        }
        if err <= 1.0 {
            t += h;
            y = y5;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let y = dopri5(|_, y| [y[1], -y[0]], 0.0, 10.0, [1.0, 0.0], Tolerance::default()).unwrap();
        assert!((y[0] - 10f64.cos()).abs() < 1e-8);
        assert!((y[1] + 10f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn exponential_growth() {
        let y = dopri5(|_, y| [2.0 * y[0]], 0.0, 3.0, [1.0], Tolerance::default()).unwrap();
        assert!((y[0] / 6f64.exp() - 1.0).abs() < 1e-8);
    }
}
