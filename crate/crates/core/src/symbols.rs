//! Closed-form Fourier symbols in sheared coordinates.
//!
//! With `D = k^2 + (eta - k t)^2 + alpha^2` the original-frame velocity is
//! `V = (k(eta-kt), -(k^2+alpha^2), (eta-kt) alpha) / D^2` times `theta`.
//! The transport velocity seen in sheared coordinates is
//! `u = (V1 - t V2, V2, V3)`, which on `k = 0` reduces to the zero-mode
//! formula with `Delta_yz^{-2}`. The `(0,0,0)` mode carries no velocity.

use crate::error::{Error, Result};
use crate::freq::Frequency;

/// Real multipliers applied to `theta_hat` at one frequency and time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VelocitySymbol {
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
}

impl VelocitySymbol {
    pub const ZERO: VelocitySymbol = VelocitySymbol { v1: 0.0, v2: 0.0, v3: 0.0 };

    pub fn norm(&self) -> f64 {
        (self.v1 * self.v1 + self.v2 * self.v2 + self.v3 * self.v3).sqrt()
    }
}

#[inline]
fn parts(t: f64, f: &Frequency) -> (f64, f64, f64, f64) {
    let k = f.k as f64;
    let a = f.alpha as f64;
    let shear = f.eta - k * t;
    let b = k * k + a * a;
    (k, a, shear, b)
}

/// Original-frame velocity symbol.
pub fn v_hat_symbol(t: f64, f: &Frequency) -> VelocitySymbol {
    if f.is_zero() {
        return VelocitySymbol::ZERO;
    }
    let (k, a, shear, b) = parts(t, f);
    let d = b + shear * shear;
    let d2 = d * d;
    VelocitySymbol {
        v1: k * shear / d2,
        v2: -b / d2,
        v3: shear * a / d2,
    }
}

/// Transport velocity in sheared coordinates.
pub fn u_moving_symbol(t: f64, f: &Frequency) -> VelocitySymbol {
    if f.is_zero() {
        return VelocitySymbol::ZERO;
    }
    let (k, a, shear, b) = parts(t, f);
    let d = b + shear * shear;
    let d2 = d * d;
    if f.k == 0 {
        let a2 = a * a;
        VelocitySymbol {
            v1: t * a2 / d2,
            v2: -a2 / d2,
            v3: f.eta * a / d2,
        }
    } else {
        VelocitySymbol {
            v1: (t * b + k * shear) / d2,
            v2: -b / d2,
            v3: shear * a / d2,
        }
    }
}

/// Linear damping rate `(k^2+alpha^2)/D^2`; zero at the origin.
pub fn damping_coeff(t: f64, f: &Frequency) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    let (_, _, shear, b) = parts(t, f);
    let d = b + shear * shear;
    b / (d * d)
}

/// `int_{t0}^{t1} damping_coeff(tau, f) dtau` for `k != 0`.
pub fn damping_integral(t0: f64, t1: f64, f: &Frequency) -> Result<f64> {
    if f.k == 0 {
        return Err(Error::precondition(
            "damping_integral needs k != 0; the k = 0 rate is constant",
        ));
    }
    if !(0.0 <= t0 && t0 <= t1) {
        return Err(Error::precondition(format!("need 0 <= t0 <= t1, got [{t0}, {t1}]")));
    }
    Ok(damping_integral_unchecked(t0, t1, f))
}

/// Closed form of `damping_integral` without argument checks.
///
/// With `u = eta - k tau` and `b = k^2 + alpha^2` the antiderivative in `u`
/// is `G(u) = atan(u/sqrt b)/(2 sqrt b) + u/(2(b+u^2))`; the differences
/// `G(u0) - G(u1)` are taken in subtraction-free form.
#[inline]
pub fn damping_integral_unchecked(t0: f64, t1: f64, f: &Frequency) -> f64 {
    let k = f.k as f64;
    let a = f.alpha as f64;
    let b = k * k + a * a;
    let sb = b.sqrt();
    let u0 = f.eta - k * t0;
    let u1 = f.eta - k * t1;
    let du = k * (t1 - t0);
    let d_atan = (du / sb).atan2(1.0 + u0 * u1 / b);
    let d_rat = du * (b - u0 * u1) / ((b + u0 * u0) * (b + u1 * u1));
    (d_atan / (2.0 * sb) + 0.5 * d_rat) / k
}

/// Zero-mode propagator `exp(-alpha^2 t / (eta^2+alpha^2)^2)`.
pub fn semigroup(t: f64, eta: f64, alpha: i64) -> Result<f64> {
    if eta == 0.0 && alpha == 0 {
        return Err(Error::precondition("semigroup is undefined at (eta, alpha) = (0, 0)"));
    }
    if t < 0.0 {
        return Err(Error::precondition("semigroup needs t >= 0"));
    }
    Ok((-zero_mode_rate(eta, alpha) * t).exp())
}

/// `alpha^2/(eta^2+alpha^2)^2`, zero at the origin.
pub fn zero_mode_rate(eta: f64, alpha: i64) -> f64 {
    let a2 = (alpha * alpha) as f64;
    let d = eta * eta + a2;
    if d == 0.0 {
        0.0
    } else {
        a2 / (d * d)
    }
}

/// Result of [`nonzero_mode_decay_bound_check`].
#[derive(Debug, Clone, Copy)]
pub struct DecayBoundReport {
    /// Smallest `C` for which all four bounds hold on the grid.
    pub constant: f64,
    /// Time at which `|v2|` peaks on the grid.
    pub v2_peak_t: f64,
}

impl DecayBoundReport {
    pub fn holds_with(&self, c: f64) -> bool {
        self.constant.is_finite() && self.constant <= c
    }
}

/// Empirical constant in
/// `|v1| <t>^3 <= C <f>^3`, `|v2| <t>^4 <= C <f>^6`, `|v3| <t>^3 <= C <f>^4`
/// and `|u| <t>^3 <= C <f>^6` over `t_grid`.
pub fn nonzero_mode_decay_bound_check(f: &Frequency, t_grid: &[f64]) -> Result<DecayBoundReport> {
    if f.k == 0 {
        return Err(Error::precondition("non-zero mode bound needs k != 0"));
    }
    let br = f.bracket();
    let mut c = 0.0f64;
    let mut peak = (f64::NEG_INFINITY, 0.0);
    for &t in t_grid {
        let jt = (1.0 + t * t).sqrt();
        let v = v_hat_symbol(t, f);
        let u = u_moving_symbol(t, f);
        c = c
            .max(v.v1.abs() * jt.powi(3) / br.powi(3))
            .max(v.v2.abs() * jt.powi(4) / br.powi(6))
            .max(v.v3.abs() * jt.powi(3) / br.powi(4))
            .max(u.norm() * jt.powi(3) / br.powi(6));
        if v.v2.abs() > peak.0 {
            peak = (v.v2.abs(), t);
        }
    }
    Ok(DecayBoundReport {
        constant: c,
        v2_peak_t: peak.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use proptest::prelude::*;

    fn f(k: i64, eta: f64, a: i64) -> Frequency {
        Frequency::new(k, eta, a)
    }

    #[test]
    fn v_hat_examples() {
        assert_eq!(v_hat_symbol(0.0, &f(1, 0.0, 0)), VelocitySymbol { v1: 0.0, v2: -1.0, v3: 0.0 });
        assert_eq!(v_hat_symbol(2.0, &f(1, 2.0, 0)), VelocitySymbol { v1: 0.0, v2: -1.0, v3: 0.0 });
        assert_eq!(v_hat_symbol(3.3, &Frequency::ZERO), VelocitySymbol::ZERO);
    }

    #[test]
    fn u_moving_examples() {
        assert_eq!(u_moving_symbol(0.0, &f(1, 0.0, 1)), VelocitySymbol { v1: 0.0, v2: -0.5, v3: 0.0 });
        assert_eq!(u_moving_symbol(1.0, &f(0, 0.0, 1)), VelocitySymbol { v1: 1.0, v2: -1.0, v3: 0.0 });
        assert_eq!(u_moving_symbol(7.0, &Frequency::ZERO), VelocitySymbol::ZERO);
    }

    #[test]
    fn u_is_v_seen_through_the_shear() {
        for &(k, eta, a, t) in &[(1, 0.5, 2, 0.3), (-2, 3.0, -1, 4.0), (3, -1.0, 0, 10.0)] {
            let fr = f(k, eta, a);
            let v = v_hat_symbol(t, &fr);
            let u = u_moving_symbol(t, &fr);
            assert!((u.v1 - (v.v1 - t * v.v2)).abs() < 1e-15);
            assert_eq!(u.v2, v.v2);
            assert_eq!(u.v3, v.v3);
        }
    }

    #[test]
    fn damping_examples() {
        for t in [0.0, 1.0, 17.0] {
            assert!((damping_coeff(t, &f(0, 1.0, 1)) - 0.25).abs() < 1e-15);
            assert_eq!(damping_coeff(t, &f(0, 2.5, 0)), 0.0);
        }
        assert_eq!(damping_coeff(1.0, &f(1, 1.0, 0)), 1.0);
        assert_eq!(damping_coeff(1.0, &Frequency::ZERO), 0.0);
    }

    #[test]
    fn damping_integral_against_quadrature() {
        let fr = f(1, 5.0, 0);
        let q = quad::integrate(|s| damping_coeff(s, &fr), 0.0, 10.0, 1e-14, 0.0).unwrap();
        let c = damping_integral(0.0, 10.0, &fr).unwrap();
        assert!((c - q.value).abs() / q.value < 1e-10, "{c} {}", q.value);
        assert_eq!(damping_integral(3.0, 3.0, &fr).unwrap(), 0.0);
        for fr in [f(-2, 7.25, 3), f(3, -4.0, -1), f(1, 0.0, 0)] {
            for (t0, t1) in [(0.0, 1.0), (2.0, 9.0), (50.0, 50.5), (0.0, 300.0)] {
                let q = quad::integrate(|s| damping_coeff(s, &fr), t0, t1, 1e-14, 1e-300).unwrap();
                let c = damping_integral(t0, t1, &fr).unwrap();
                assert!((c - q.value).abs() <= 1e-10 * q.value.abs() + 1e-16, "{fr:?} {t0} {t1}");
            }
        }
    }

    #[test]
    fn damping_integral_has_finite_limit() {
        // integral over [0, inf) for (1,0,0): int_0^inf (1+t^2)^-2 = pi/4
        let fr = f(1, 0.0, 0);
        let far = damping_integral(0.0, 1e8, &fr).unwrap();
        assert!((far - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        let farther = damping_integral(0.0, 1e12, &fr).unwrap();
        assert!((farther - far).abs() < 1e-15);
    }

    #[test]
    fn damping_integral_rejects_bad_input() {
        assert!(damping_integral(0.0, 1.0, &f(0, 1.0, 1)).is_err());
        assert!(damping_integral(2.0, 1.0, &f(1, 1.0, 1)).is_err());
        assert!(damping_integral(-1.0, 1.0, &f(1, 1.0, 1)).is_err());
    }

    #[test]
    fn semigroup_examples() {
        assert_eq!(semigroup(0.0, 3.0, 2).unwrap(), 1.0);
        assert_eq!(semigroup(123.0, 3.0, 0).unwrap(), 1.0);
        assert!((semigroup(4.0, 1.0, 1).unwrap() - (-1f64).exp()).abs() < 1e-15);
        assert!(semigroup(1.0, 0.0, 0).is_err());
    }

    #[test]
    fn decay_bound_examples() {
        let grid: Vec<f64> = (0..=10_000).map(|i| i as f64 * 0.01).collect();
        let r = nonzero_mode_decay_bound_check(&f(1, 0.0, 0), &grid).unwrap();
        assert!(r.holds_with(2.0), "{r:?}");
        let r = nonzero_mode_decay_bound_check(&f(1, 50.0, 0), &grid).unwrap();
        assert!(r.constant.is_finite());
        assert!((r.v2_peak_t - 50.0).abs() < 0.011);
        let a = nonzero_mode_decay_bound_check(&f(3, -1.0, 2), &grid).unwrap();
        let b = nonzero_mode_decay_bound_check(&f(-3, 1.0, -2), &grid).unwrap();
        assert!(a.constant.is_finite());
        assert_eq!(a.constant, b.constant);
        assert!(nonzero_mode_decay_bound_check(&f(0, 1.0, 1), &grid).is_err());
    }

    #[test]
    fn orr_peak_is_one_plus_eta_squared_squared() {
        for eta in [3.0, 10.0, 42.0] {
            let fr = f(1, eta, 0);
            let ratio = v_hat_symbol(eta, &fr).v2 / v_hat_symbol(0.0, &fr).v2;
            let expect = (1.0 + eta * eta).powi(2);
            assert!((ratio - expect).abs() / expect < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn damping_nonnegative_and_integral_monotone(
            k in -6i64..6, eta in -30.0f64..30.0, a in -6i64..6,
            t0 in 0.0f64..20.0, d1 in 0.0f64..20.0, d2 in 0.0f64..20.0,
        ) {
            let fr = f(k, eta, a);
            prop_assert!(damping_coeff(t0, &fr) >= 0.0);
            if k != 0 {
                let i1 = damping_integral(t0, t0 + d1, &fr).unwrap();
                let i2 = damping_integral(t0, t0 + d1 + d2, &fr).unwrap();
                prop_assert!(i1 >= 0.0);
                prop_assert!(i2 >= i1 - 1e-15);
            }
        }

        #[test]
        fn semigroup_law(eta in -10.0f64..10.0, a in 1i64..6, s in 0.0f64..50.0, t in 0.0f64..50.0) {
            let st = semigroup(s + t, eta, a).unwrap();
            let prod = semigroup(s, eta, a).unwrap() * semigroup(t, eta, a).unwrap();
            let x = zero_mode_rate(eta, a) * (s + t);
            prop_assert!((st - prod).abs() <= 8.0 * f64::EPSILON * (1.0 + x) * st.max(prod));
        }

        #[test]
        fn moving_velocity_is_divergence_free(k in -8i64..8, eta in -20.0f64..20.0, a in -8i64..8, t in 0.0f64..50.0) {
            let fr = f(k, eta, a);
            let u = u_moving_symbol(t, &fr);
            let div = k as f64 * u.v1 + eta * u.v2 + a as f64 * u.v3;
            let scale = (k.abs() as f64 + eta.abs() + a.abs() as f64) * u.norm();
            prop_assert!(div.abs() <= 1e-12 * scale.max(1e-300));
        }
    }
}
