//! Per-output diagnostics: velocity norms, the norm ladder, CK terms.
//!
//! Gevrey-weighted quantities reach `e^{700}` and beyond at the top of the
//! ladder, so every norm and CK term is reported as its natural logarithm
//! (`-inf` for an empty sum). Velocity norms are plain values.

use num_complex::Complex64;

use super::{SimState, Solver};
use crate::freq::{Frequency, Mode};
use crate::report::fmt_f64;
use crate::symbols::v_hat_symbol;
use crate::weights::{lambda_dot, lambda_t, ln_norm_weighted, NormSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticRow {
    pub t: f64,
    /// `t <= 10`, where the weighted quantities are only indicative.
    pub early: bool,
    pub u1_l2: f64,
    pub u3_l2: f64,
    pub u2_zero_l2: f64,
    pub u2_nonzero_l2: f64,
    /// `ln ||<t>^{-3/2} theta||_{sigma_1}`.
    pub ln_en1: f64,
    /// `ln ||B theta_0||_{sigma_1 - 2}`.
    pub ln_en0_1: f64,
    /// `ln ||<t>^{-1/2} theta||_{G^{lambda, sigma_3}}`.
    pub ln_en3: f64,
    /// `ln ||theta||_{G^{lambda, sigma_5}}`.
    pub ln_en5: f64,
    /// `ln ||<t>^m P_{alpha != 0} theta_0||_{G^{lambda, sigma}}` at
    /// `(sigma_2, 3/2)`, `(sigma_4, 5/2)`, `(sigma_6, 3)`.
    pub ln_zero_s2: f64,
    pub ln_zero_s4: f64,
    pub ln_zero_s6: f64,
    pub ln_ck_lambda: f64,
    pub ln_ck_w: f64,
    pub ln_ck_lambda_b0: f64,
    pub ln_ck_w_b0: f64,
    /// `ln sup_eta e^{lambda |eta|^s} <eta>^{sigma_7} |theta(0, eta, 0)|`.
    pub ln_en7: f64,
    /// Real part of the mean mode.
    pub mean: f64,
    /// `max |Im theta(x)| / max |theta(x)|` on the grid.
    pub reality: f64,
}

impl DiagnosticRow {
    pub const HEADER: [&'static str; 21] = [
        "t",
        "early",
        "u1_l2",
        "u3_l2",
        "u2_zero_l2",
        "u2_nonzero_l2",
        "ln_en1",
        "ln_en0_1",
        "ln_en3",
        "ln_en5",
        "ln_zero_s2",
        "ln_zero_s4",
        "ln_zero_s6",
        "ln_ck_lambda",
        "ln_ck_w",
        "ln_ck_lambda_b0",
        "ln_ck_w_b0",
        "ln_en7",
        "mean",
        "reality",
        "min_zero_rate",
    ];

    /// CSV cells; `min_zero_rate` is a lattice property supplied by the caller.
    pub fn cells(&self, min_zero_rate: f64) -> Vec<String> {
        let mut v = vec![fmt_f64(self.t), (self.early as u8).to_string()];
        v.extend(
            [
                self.u1_l2,
                self.u3_l2,
                self.u2_zero_l2,
                self.u2_nonzero_l2,
                self.ln_en1,
                self.ln_en0_1,
                self.ln_en3,
                self.ln_en5,
                self.ln_zero_s2,
                self.ln_zero_s4,
                self.ln_zero_s6,
                self.ln_ck_lambda,
                self.ln_ck_w,
                self.ln_ck_lambda_b0,
                self.ln_ck_w_b0,
                self.ln_en7,
                self.mean,
                self.reality,
                min_zero_rate,
            ]
            .iter()
            .map(|&x| fmt_f64(x)),
        );
        v
    }
}

fn zero_only(m: Mode, _: &Frequency) -> f64 {
    if m.k == 0 {
        0.0
    } else {
        f64::NEG_INFINITY
    }
}

impl Solver {
    pub fn diagnostics(&self, state: &SimState) -> DiagnosticRow {
        let t = state.t;
        let p = &self.cfg.weights;
        let ex = self.exec;
        let bank = &self.bank;
        let field = &state.theta;
        let c = &field.coeffs;
        let freqs = &self.freqs;
        let de = self.cfg.lattice.delta_eta();
        let n = c.len();

        let vel = |pick: &(dyn Fn(&Frequency, f64, f64, f64) -> f64 + Sync)| -> f64 {
            (de * ex.sum(n, |i| {
                let f = &freqs[i];
                let v = v_hat_symbol(t, f);
                let a = c[i].norm_sqr();
                pick(f, v.v1, v.v2, v.v3).powi(2) * a
            }))
            .sqrt()
        };
        let u1_l2 = vel(&|_, v1, _, _| v1);
        let u3_l2 = vel(&|_, _, _, v3| v3);
        let u2_zero_l2 = vel(&|f, _, v2, _| if f.k == 0 { v2 } else { 0.0 });
        let u2_nonzero_l2 = vel(&|f, _, v2, _| if f.k != 0 { v2 } else { 0.0 });

        let lam = lambda_t(t, p);
        let ln_bt = (1.0 + t * t).sqrt().ln();
        let sg = p.sigma;
        let spec = |sigma: f64, use_j: bool, use_b: bool| NormSpec {
            sigma,
            lambda: lam,
            t,
            use_j,
            use_b,
        };
        let norm = |s: NormSpec, x: &(dyn Fn(Mode, &Frequency) -> f64 + Sync)| ln_norm_weighted(field, bank, &s, x, ex);
        let all = |_: Mode, _: &Frequency| 0.0;
        let zero_nz_alpha = |m: Mode, _: &Frequency| {
            if m.k == 0 && m.alpha != 0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        };
        let half_s = 0.5 * p.s;
        let grad = |_: Mode, f: &Frequency| half_s * f.euclid().ln();
        let grad_zero = |m: Mode, f: &Frequency| if m.k == 0 { half_s * f.euclid().ln() } else { f64::NEG_INFINITY };
        let dw = |_: Mode, f: &Frequency| {
            let d = bank.dt_ln_w(t, f);
            if d > 0.0 {
                0.5 * d.ln()
            } else {
                f64::NEG_INFINITY
            }
        };
        let dw_zero = |m: Mode, f: &Frequency| if m.k == 0 { dw(m, f) } else { f64::NEG_INFINITY };
        let ln_ldot = (-lambda_dot(t, p)).ln();

        let ln_en1 = norm(spec(sg[0], true, false), &all) - 1.5 * ln_bt;
        let ln_en0_1 = norm(spec(sg[0] - 2.0, true, true), &zero_only);
        let ln_en3 = norm(spec(sg[2], false, false), &all) - 0.5 * ln_bt;
        let ln_en5 = norm(spec(sg[4], false, false), &all);
        let ln_zero_s2 = norm(spec(sg[1], false, false), &zero_nz_alpha) + 1.5 * ln_bt;
        let ln_zero_s4 = norm(spec(sg[3], false, false), &zero_nz_alpha) + 2.5 * ln_bt;
        let ln_zero_s6 = norm(spec(sg[5], false, false), &zero_nz_alpha) + 3.0 * ln_bt;
        let ln_ck_lambda = ln_ldot - 3.0 * ln_bt + 2.0 * norm(spec(sg[0], true, false), &grad);
        let ln_ck_w = -3.0 * ln_bt + 2.0 * norm(spec(sg[0], true, false), &dw);
        let ln_ck_lambda_b0 = ln_ldot + 2.0 * norm(spec(sg[0] - 2.0, true, true), &grad_zero);
        let ln_ck_w_b0 = 2.0 * norm(spec(sg[0] - 2.0, true, true), &dw_zero);

        let ln_en7 = ex.max(n, |i| {
            let f = &freqs[i];
            if f.k != 0 || f.alpha != 0 || (c[i].re == 0.0 && c[i].im == 0.0) {
                return f64::NEG_INFINITY;
            }
            lam * f.eta.abs().powf(p.s) + sg[6] * (1.0 + f.eta * f.eta).sqrt().ln() + c[i].norm().ln()
        });

        let mut grid = c.clone();
        self.fft.inverse(&mut grid, ex);
        let big = ex.max(n, |i| grid[i].norm());
        let imag = ex.max(n, |i| grid[i].im.abs());
        let reality = if big > 0.0 { imag / big } else { 0.0 };

        DiagnosticRow {
            t,
            early: t <= 10.0,
            u1_l2,
            u3_l2,
            u2_zero_l2,
            u2_nonzero_l2,
            ln_en1,
            ln_en0_1,
            ln_en3,
            ln_en5,
            ln_zero_s2,
            ln_zero_s4,
            ln_zero_s6,
            ln_ck_lambda,
            ln_ck_w,
            ln_ck_lambda_b0,
            ln_ck_w_b0,
            ln_en7,
            mean: c[0].re,
            reality,
        }
    }
}

/// `||theta(t) - theta(t')||` in the unweighted Delta-eta `l^2` norm.
pub fn l2_distance(a: &[Complex64], b: &[Complex64], delta_eta: f64) -> f64 {
    (delta_eta * a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>()).sqrt()
}
