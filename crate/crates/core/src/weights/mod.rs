//! Time-dependent Fourier multiplier.
//!
//! For `|iota| > 1` the weights `w_NR(t, iota)` and `w_R(t, iota)` are
//! built backward in time from `t = 2|iota|`, one critical interval
//! `[t_l, t_{l-1}]` at a time. Every interval splits at `|iota|/l` into a
//! right half, where the weight loses a factor `(l^2/|iota|)^C*`, and a left
//! half, where it loses `(l^2/|iota|)^{1+C*}`. Below `t_n`,
//! `n = E(sqrt|iota|)`, the weight is frozen.
//!
//! Values are kept as `ln w`: at `iota = 1e4`, `C* = 2` the weight at
//! `t = 0` is about `e^-1000`.

mod sweeps;

pub use sweeps::{
    ratio_lemma_sweep, ratio_lemma_sweep_seeded, total_growth_check, Lemma, SweepReport,
    TotalGrowthReport,
};

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::freq::{Frequency, Lattice, Mode, SpectralField};

/// Constants of the weight construction and the norm ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeightParams {
    pub c_star: f64,
    /// Gevrey index, in `(1/2, 1]`.
    pub s: f64,
    pub lambda_inf: f64,
    pub delta_tilde: f64,
    /// Decay exponent of `lambda(t)`.
    pub a: f64,
    /// `sigma_1 > ... > sigma_7`.
    pub sigma: [f64; 7],
}

impl Default for WeightParams {
    fn default() -> Self {
        WeightParams {
            c_star: 1.0,
            s: 0.75,
            lambda_inf: 0.1,
            delta_tilde: 0.05,
            a: 0.1,
            sigma: [212.0, 182.0, 152.0, 122.0, 92.0, 62.0, 32.0],
        }
    }
}

impl WeightParams {
    pub fn with_c_star(mut self, c: f64) -> Self {
        self.c_star = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} = {v} must be positive")))
            }
        };
        pos("c_star", self.c_star)?;
        pos("lambda_inf", self.lambda_inf)?;
        pos("delta_tilde", self.delta_tilde)?;
        pos("a", self.a)?;
        if !(self.s > 0.5 && self.s <= 1.0) {
            return Err(Error::invalid(format!("s = {} must lie in (1/2, 1]", self.s)));
        }
        let cap = (self.s / 4.0).min(self.s - 0.5);
        if self.a >= cap {
            return Err(Error::invalid(format!(
                "a = {} must be below min(s/4, s - 1/2) = {cap}",
                self.a
            )));
        }
        for i in 0..6 {
            if self.sigma[i] - self.sigma[i + 1] < 30.0 {
                return Err(Error::invalid(format!(
                    "sigma ladder needs gaps >= 30, got sigma{} = {} and sigma{} = {}",
                    i + 1,
                    self.sigma[i],
                    i + 2,
                    self.sigma[i + 1]
                )));
            }
        }
        if self.sigma[6] < 2.0 {
            return Err(Error::invalid("sigma7 must be >= 2"));
        }
        Ok(())
    }

    /// `mu = 4(1 + 2 C*)`.
    pub fn mu(&self) -> f64 {
        4.0 * (1.0 + 2.0 * self.c_star)
    }
}

/// `lambda(t) = lambda_inf + delta_tilde / (1+t)^a`.
pub fn lambda_t(t: f64, p: &WeightParams) -> f64 {
    p.lambda_inf + p.delta_tilde / (1.0 + t).powf(p.a)
}

/// `d lambda / dt`, always negative.
pub fn lambda_dot(t: f64, p: &WeightParams) -> f64 {
    -p.a * p.delta_tilde * (1.0 + t).powf(-p.a - 1.0)
}

/// `B(eta, alpha) = sqrt(1 + |eta| + alpha^2)`.
pub fn b_multiplier(eta: f64, alpha: i64) -> f64 {
    (1.0 + eta.abs() + (alpha * alpha) as f64).sqrt()
}

/// Where a time falls relative to the critical intervals of one `iota`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    /// `t > 2|iota|`, or `|iota| <= 1`: weight 1.
    Above,
    /// `(|iota|/l, t_{l-1}]`.
    Right(usize),
    /// `(t_l, |iota|/l]`.
    Left(usize),
    /// `t <= t_n`: frozen.
    Frozen,
}

/// Critical times and per-interval coefficients for one `|iota|`.
#[derive(Debug, Clone)]
pub struct IntervalTable {
    iota: f64,
    c_star: f64,
    /// `t_0 = 2|iota|, t_1, ..., t_n`.
    times: Vec<f64>,
    /// Indexed by `l = 1..=n`; slot 0 unused.
    a: Vec<f64>,
    b: Vec<f64>,
    resonant: Vec<bool>,
    /// `ln w_NR` at `t_l`.
    ln_end: Vec<f64>,
    /// `ln w_NR` at `|iota|/l`.
    ln_mid: Vec<f64>,
}

/// Critical-interval table for `iota_val`; empty when `|iota| <= 1`.
pub fn critical_times(iota_val: f64, c_star: f64) -> IntervalTable {
    IntervalTable::new(iota_val, c_star)
}

impl IntervalTable {
    pub fn new(iota_val: f64, c_star: f64) -> Self {
        let i = iota_val.abs();
        let mut tab = IntervalTable {
            iota: i,
            c_star,
            times: Vec::new(),
            a: vec![0.0],
            b: vec![0.0],
            resonant: vec![false],
            ln_end: vec![0.0],
            ln_mid: vec![0.0],
        };
        if i <= 1.0 {
            return tab;
        }
        let n = i.sqrt().floor() as usize;
        tab.times.push(2.0 * i);
        for l in 1..=n {
            let lf = l as f64;
            tab.times.push(i / lf - i / (2.0 * lf * (lf + 1.0)));
            let shrink = 1.0 - lf * lf / i;
            tab.a.push(2.0 * (lf + 1.0) / lf * shrink);
            tab.b.push(if l == 1 {
                1.0 - 1.0 / i
            } else {
                2.0 * (lf - 1.0) / lf * shrink
            });
            tab.resonant.push(2.0 * i.sqrt() <= tab.times[l]);
        }
        for l in 1..=n {
            let lf = l as f64;
            let mid = c_star * (lf * lf / i).ln() + tab.ln_end[l - 1];
            tab.ln_mid.push(mid);
            let end = -(1.0 + c_star) * (1.0 + tab.a[l] * (i / lf - tab.times[l])).ln() + mid;
            tab.ln_end.push(end);
        }
        tab
    }

    pub fn iota_abs(&self) -> f64 {
        self.iota
    }

    /// `n = E(sqrt|iota|)`; zero for an empty table.
    pub fn len(&self) -> usize {
        self.times.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `t_l` for `l = 0..=n`.
    pub fn t(&self, l: usize) -> f64 {
        self.times[l]
    }

    pub fn a(&self, l: usize) -> f64 {
        self.a[l]
    }

    pub fn b(&self, l: usize) -> f64 {
        self.b[l]
    }

    pub fn is_resonant(&self, l: usize) -> bool {
        l >= 1 && l < self.resonant.len() && self.resonant[l]
    }

    /// Every breakpoint of the piecewise definition, decreasing.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v = Vec::new();
        for l in 1..=self.len() {
            v.push(self.times[l - 1]);
            v.push(self.iota / l as f64);
        }
        if let Some(&last) = self.times.last() {
            v.push(last);
        }
        v
    }

    pub fn locate(&self, t: f64) -> Piece {
        let n = self.len();
        if n == 0 || t > self.times[0] {
            return Piece::Above;
        }
        if t <= self.times[n] {
            return Piece::Frozen;
        }
        // first l with t_l < t; times are strictly decreasing
        let l = self.times.partition_point(|&tl| tl >= t);
        if t <= self.iota / l as f64 {
            Piece::Left(l)
        } else {
            Piece::Right(l)
        }
    }

    /// `(lo, hi]` of a piece, used for snapped differences.
    fn piece_bounds(&self, p: Piece) -> (f64, f64) {
        match p {
            Piece::Right(l) => (self.iota / l as f64, self.times[l - 1]),
            Piece::Left(l) => (self.times[l], self.iota / l as f64),
            Piece::Above | Piece::Frozen => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn ln_nr_in(&self, t: f64, p: Piece) -> f64 {
        let i = self.iota;
        let c = self.c_star;
        match p {
            Piece::Above => 0.0,
            Piece::Frozen => self.ln_end[self.len()],
            Piece::Right(l) => {
                let lf = l as f64;
                c * (lf * lf / i * (1.0 + self.b[l] * (t - i / lf).abs())).ln() + self.ln_end[l - 1]
            }
            Piece::Left(l) => {
                let lf = l as f64;
                -(1.0 + c) * (1.0 + self.a[l] * (t - i / lf).abs()).ln() + self.ln_mid[l]
            }
        }
    }

    fn ln_resonant_factor(&self, t: f64, p: Piece) -> f64 {
        let i = self.iota;
        match p {
            Piece::Right(l) if self.resonant[l] => {
                let lf = l as f64;
                (lf * lf / i * (1.0 + self.b[l] * (t - i / lf).abs())).ln()
            }
            Piece::Left(l) if self.resonant[l] => {
                let lf = l as f64;
                (lf * lf / i * (1.0 + self.a[l] * (t - i / lf).abs())).ln()
            }
            _ => 0.0,
        }
    }

    /// `ln w_NR(t, iota)`.
    pub fn ln_w_nr(&self, t: f64) -> f64 {
        self.ln_nr_in(t, self.locate(t))
    }

    /// `ln w_R(t, iota)`; equal to `ln w_NR` outside resonant intervals.
    pub fn ln_w_r(&self, t: f64) -> f64 {
        let p = self.locate(t);
        self.ln_nr_in(t, p) + self.ln_resonant_factor(t, p)
    }

    /// Whether `t` lies in the resonant interval `I_{k, iota}`.
    ///
    /// `iota_sign` is the sign of the (signed) `iota` the table was built
    /// from; the interval exists only for `k iota > 0`.
    pub fn in_resonant_interval(&self, t: f64, k: i64, iota_sign: f64) -> bool {
        let ka = k.unsigned_abs() as usize;
        if ka == 0 || ka > self.len() || (k as f64) * iota_sign <= 0.0 || !self.resonant[ka] {
            return false;
        }
        matches!(self.locate(t), Piece::Left(l) | Piece::Right(l) if l == ka)
    }

    /// `ln w_k(t)` for a frequency with x-wavenumber `k`.
    pub fn ln_w_k(&self, t: f64, k: i64, iota_sign: f64) -> f64 {
        let p = self.locate(t);
        let base = self.ln_nr_in(t, p);
        if self.in_resonant_interval(t, k, iota_sign) {
            base + self.ln_resonant_factor(t, p)
        } else {
            base
        }
    }

    /// `d/dt ln w_k` by a backward difference of step `1e-4 max(1, t)`,
    /// shortened so that it never leaves the piece containing `t`.
    pub fn dt_ln_w_k(&self, t: f64, k: i64, iota_sign: f64) -> f64 {
        let p = self.locate(t);
        if matches!(p, Piece::Above | Piece::Frozen) {
            return 0.0;
        }
        let (lo, _) = self.piece_bounds(p);
        let mut h = 1e-4 * t.max(1.0);
        if t - h <= lo {
            h = 0.5 * (t - lo);
        }
        if h <= 0.0 {
            return 0.0;
        }
        (self.ln_w_k(t, k, iota_sign) - self.ln_w_k(t - h, k, iota_sign)) / h
    }

    /// Largest relative jump of `w_NR` or `w_R` across any breakpoint,
    /// comparing the closed forms of the two adjacent pieces at the
    /// breakpoint itself.
    pub fn continuity_defect(&self) -> f64 {
        let n = self.len();
        let mut worst = 0.0f64;
        let mut jump = |x: f64, y: f64| worst = worst.max(((x - y).exp() - 1.0).abs());
        for l in 1..=n {
            let hi = self.times[l - 1];
            let mid = self.iota / l as f64;
            let lo = self.times[l];
            let r = Piece::Right(l);
            let lf = Piece::Left(l);
            // upper end of the interval
            let above_nr = if l == 1 { 0.0 } else { self.ln_nr_in(hi, Piece::Left(l - 1)) };
            let above_r = if l == 1 {
                0.0
            } else {
                above_nr + self.ln_resonant_factor(hi, Piece::Left(l - 1))
            };
            jump(self.ln_nr_in(hi, r), above_nr);
            jump(self.ln_nr_in(hi, r) + self.ln_resonant_factor(hi, r), above_r);
            // split point
            jump(self.ln_nr_in(mid, r), self.ln_nr_in(mid, lf));
            jump(
                self.ln_nr_in(mid, r) + self.ln_resonant_factor(mid, r),
                self.ln_nr_in(mid, lf) + self.ln_resonant_factor(mid, lf),
            );
            // lower end
            let below = if l == n { Piece::Frozen } else { Piece::Right(l + 1) };
            jump(self.ln_nr_in(lo, lf), self.ln_nr_in(lo, below));
            jump(
                self.ln_nr_in(lo, lf) + self.ln_resonant_factor(lo, lf),
                self.ln_nr_in(lo, below) + self.ln_resonant_factor(lo, below),
            );
        }
        worst
    }
}

/// `w_NR(t, iota)`.
pub fn w_nr(t: f64, iota_val: f64, p: &WeightParams) -> f64 {
    IntervalTable::new(iota_val, p.c_star).ln_w_nr(t).exp()
}

/// `w_R(t, iota)`.
pub fn w_r(t: f64, iota_val: f64, p: &WeightParams) -> f64 {
    IntervalTable::new(iota_val, p.c_star).ln_w_r(t).exp()
}

/// `w_k(t, iota(f))`: `w_R` on `I_{k, iota(f)}`, `w_NR` elsewhere.
pub fn w_k(t: f64, k: i64, f: &Frequency, p: &WeightParams) -> f64 {
    let i = f.iota();
    IntervalTable::new(i, p.c_star).ln_w_k(t, k, i.signum()).exp()
}

/// `ln A^sigma_k(t, f)` with `J_k = 1 / w_k`.
pub fn ln_a_multiplier(sigma: f64, t: f64, f: &Frequency, p: &WeightParams) -> f64 {
    let i = f.iota();
    let ln_w = IntervalTable::new(i, p.c_star).ln_w_k(t, f.k, i.signum());
    lambda_t(t, p) * f.l1_norm().powf(p.s) + sigma * f.bracket().ln() - ln_w
}

/// `A^sigma_k(t, f) = e^{lambda(t) |f|^s} <f>^sigma J_k(t, f)`.
pub fn a_multiplier(sigma: f64, t: f64, f: &Frequency, p: &WeightParams) -> f64 {
    ln_a_multiplier(sigma, t, f, p).exp()
}

/// One interval table per distinct `|iota|` of a lattice.
#[derive(Debug, Clone)]
pub struct WeightBank {
    params: WeightParams,
    tables: Vec<IntervalTable>,
    index: HashMap<u64, usize>,
    empty: IntervalTable,
}

impl WeightBank {
    pub fn new(params: WeightParams) -> Self {
        WeightBank {
            params,
            tables: Vec::new(),
            index: HashMap::new(),
            empty: IntervalTable::new(0.0, params.c_star),
        }
    }

    pub fn for_lattice(params: WeightParams, lattice: &Lattice) -> Self {
        let mut bank = WeightBank::new(params);
        for idx in 0..lattice.len() {
            bank.insert(lattice.frequency(idx).iota());
        }
        bank
    }

    pub fn params(&self) -> &WeightParams {
        &self.params
    }

    pub fn insert(&mut self, iota_val: f64) {
        let i = iota_val.abs();
        if i <= 1.0 {
            return;
        }
        let key = i.to_bits();
        if !self.index.contains_key(&key) {
            self.index.insert(key, self.tables.len());
            self.tables.push(IntervalTable::new(i, self.params.c_star));
        }
    }

    /// Table for `|iota|`. Values not seen at construction fall back to
    /// the empty table only when `|iota| <= 1`; otherwise this panics, as
    /// it indicates a bank built for another lattice.
    pub fn table(&self, iota_val: f64) -> &IntervalTable {
        let i = iota_val.abs();
        if i <= 1.0 {
            return &self.empty;
        }
        match self.index.get(&i.to_bits()) {
            Some(&j) => &self.tables[j],
            None => panic!("no weight table for |iota| = {i}"),
        }
    }

    pub fn ln_w(&self, t: f64, f: &Frequency) -> f64 {
        let i = f.iota();
        self.table(i).ln_w_k(t, f.k, i.signum())
    }

    pub fn dt_ln_w(&self, t: f64, f: &Frequency) -> f64 {
        let i = f.iota();
        self.table(i).dt_ln_w_k(t, f.k, i.signum())
    }
}

/// Which factors of the multiplier enter a norm.
#[derive(Debug, Clone, Copy)]
pub struct NormSpec {
    pub sigma: f64,
    /// Gevrey radius; usually `lambda_t(t)`.
    pub lambda: f64,
    /// Time at which `J` is evaluated.
    pub t: f64,
    pub use_j: bool,
    pub use_b: bool,
}

impl NormSpec {
    #[inline]
    pub fn ln_multiplier(&self, f: &Frequency, bank: &WeightBank) -> f64 {
        let mut m = self.sigma * f.bracket().ln();
        if self.lambda != 0.0 {
            m += self.lambda * f.l1_norm().powf(bank.params.s);
        }
        if self.use_j {
            m -= bank.ln_w(self.t, f);
        }
        if self.use_b {
            m += b_multiplier(f.eta, f.alpha).ln();
        }
        m
    }
}

/// `ln sqrt(d_eta sum |A c e^{extra}|^2)`, where `extra(mode, f)` is an
/// additional log-multiplier on each amplitude (`-inf` drops the mode).
/// Returns `-inf` when nothing contributes.
pub fn ln_norm_weighted<X>(field: &SpectralField, bank: &WeightBank, spec: &NormSpec, extra: X, exec: Exec) -> f64
where
    X: Fn(Mode, &Frequency) -> f64 + Sync + Send,
{
    let l = field.lattice;
    let lse = exec.log_sum_exp(l.len(), |i| {
        let c = field.coeffs[i];
        if c.re == 0.0 && c.im == 0.0 {
            return f64::NEG_INFINITY;
        }
        let m = l.mode(i);
        let f = l.mode_frequency(m);
        let x = extra(m, &f);
        if x == f64::NEG_INFINITY {
            return x;
        }
        2.0 * (spec.ln_multiplier(&f, bank) + c.norm().ln() + x)
    });
    0.5 * (l.delta_eta().ln() + lse)
}

/// `ln` of [`gevrey_norm`].
pub fn gevrey_ln_norm(field: &SpectralField, sigma: f64, t: f64, p: &WeightParams, use_j: bool, use_b: bool) -> f64 {
    let bank = if use_j {
        WeightBank::for_lattice(*p, &field.lattice)
    } else {
        WeightBank::new(*p)
    };
    let spec = NormSpec {
        sigma,
        lambda: lambda_t(t, p),
        t,
        use_j,
        use_b,
    };
    ln_norm_weighted(field, &bank, &spec, |_, _| 0.0, Exec::default())
}

/// `sqrt(d_eta sum |A^sigma (B) c|^2)`, with `J` dropped when `use_j` is
/// false. Overflows to `inf` for large `sigma`; prefer [`gevrey_ln_norm`].
pub fn gevrey_norm(field: &SpectralField, sigma: f64, t: f64, p: &WeightParams, use_j: bool, use_b: bool) -> f64 {
    gevrey_ln_norm(field, sigma, t, p, use_j, use_b).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(a.abs())
    }

    #[test]
    fn table_for_ten() {
        let tab = critical_times(10.0, 1.0);
        assert_eq!(tab.len(), 3);
        assert_eq!(tab.t(0), 20.0);
        assert!(close(tab.t(1), 7.5, 1e-15));
        assert!(close(tab.t(2), 4.0 + 1.0 / 6.0, 1e-14));
        assert!(close(tab.t(3), 2.0 + 11.0 / 12.0, 1e-14));
        assert!(close(tab.b(1), 0.9, 1e-15));
        assert!(close(tab.a(1), 3.6, 1e-15));
        assert!(tab.is_resonant(1));
        assert!(!tab.is_resonant(2));
        assert!(!tab.is_resonant(3));
        assert!(critical_times(1.0, 1.0).is_empty());
        let neg = critical_times(-10.0, 1.0);
        assert_eq!(neg.breakpoints(), tab.breakpoints());
    }

    #[test]
    fn spot_values() {
        let p = WeightParams::default();
        assert_eq!(w_nr(25.0, 10.0, &p), 1.0);
        assert!(close(w_nr(10.0, 10.0, &p), 0.1, 1e-14));
        assert!(close(w_nr(7.5, 10.0, &p), 1e-3, 1e-13));
        assert!(close(w_r(10.0, 10.0, &p), 0.01, 1e-14));
        assert_eq!(w_r(25.0, 10.0, &p), 1.0);
    }

    #[test]
    fn full_growth_at_ten() {
        let p = WeightParams::default();
        let direct = 10f64.powi(3) * 2.5f64.powi(3) * (10.0f64 / 9.0).powi(3);
        let inv = 1.0 / w_nr(0.0, 10.0, &p);
        assert!(close(inv, direct, 1e-12), "{inv}");
        assert!(close(inv, 2.143e4, 1e-3));
    }

    #[test]
    fn w_k_selects_resonant_weight() {
        let p = WeightParams::default();
        let f = Frequency::new(1, 10.0, 0);
        assert!(close(w_k(8.0, 1, &f, &p), w_r(8.0, 10.0, &p), 1e-15));
        assert!(w_k(8.0, 1, &f, &p) < w_nr(8.0, 10.0, &p));
        // k = 0 never resonates
        let f0 = Frequency::new(0, 10.0, 0);
        for t in [2.0, 5.0, 8.0, 12.0] {
            assert_eq!(w_k(t, 0, &f0, &p), w_nr(t, 10.0, &p));
        }
        // opposite signs of k and iota do not resonate
        let fm = Frequency::new(-1, 10.0, 0);
        assert_eq!(w_k(8.0, -1, &fm, &p), w_nr(8.0, 10.0, &p));
        assert_eq!(w_k(20.0, 1, &f, &p), 1.0);
        assert_eq!(w_k(30.0, 1, &f, &p), 1.0);
    }

    #[test]
    fn ties_go_to_the_earlier_piece() {
        let tab = critical_times(10.0, 1.0);
        assert_eq!(tab.locate(20.0), Piece::Right(1));
        assert_eq!(tab.locate(10.0), Piece::Left(1));
        assert_eq!(tab.locate(tab.t(1)), Piece::Right(2));
        assert_eq!(tab.locate(tab.t(3)), Piece::Frozen);
    }

    #[test]
    fn continuity_at_breakpoints() {
        for c in [0.5, 1.0, 2.0] {
            for i in [1.5, 4.0, 10.0, 17.3, 99.0, 100.0, 2500.0, 1e4] {
                let d = critical_times(i, c).continuity_defect();
                assert!(d <= 1e-12, "iota {i} C {c}: {d}");
            }
        }
    }

    #[test]
    fn resonant_ratio_on_right_half() {
        let tab = critical_times(400.0, 1.0);
        for l in 1..=tab.len() {
            if !tab.is_resonant(l) {
                continue;
            }
            let mid = 400.0 / l as f64;
            let t = 0.5 * (mid + tab.t(l - 1));
            let ratio = (tab.ln_w_r(t) - tab.ln_w_nr(t)).exp();
            let expect = (l * l) as f64 / 400.0 * (1.0 + tab.b(l) * (t - mid));
            assert!(close(ratio, expect, 1e-13));
            assert!(ratio <= 1.0);
        }
    }

    #[test]
    fn lambda_examples() {
        let p = WeightParams::default();
        assert!(close(lambda_t(0.0, &p), 0.15, 1e-15));
        assert!(close(lambda_t(10.0, &p), 0.1 + 0.05 / 11f64.powf(0.1), 1e-15));
        assert!(close(lambda_t(10.0, &p), 0.13934, 1e-4));
        assert!((lambda_t(1e300, &p) - 0.1).abs() < 1e-20);
        assert!(lambda_dot(3.0, &p) < 0.0);
    }

    #[test]
    fn b_examples() {
        assert_eq!(b_multiplier(0.0, 0), 1.0);
        assert_eq!(b_multiplier(4.0, 0), 5f64.sqrt());
        assert_eq!(b_multiplier(0.0, 2), 5f64.sqrt());
    }

    #[test]
    fn a_multiplier_examples() {
        let p = WeightParams::default();
        assert_eq!(a_multiplier(5.0, 3.0, &Frequency::ZERO, &p), 1.0);
        let f = Frequency::new(2, 3.0, 1);
        let t = 7.0;
        let expect = (lambda_t(t, &p) * f.l1_norm().powf(0.75)).exp() * f.bracket().powf(4.0);
        assert!(close(a_multiplier(4.0, t, &f, &p), expect, 1e-13));
    }

    #[test]
    fn validate_rejects_bad_params() {
        assert!(WeightParams::default().validate().is_ok());
        let mut p = WeightParams::default();
        p.a = 0.3;
        assert!(p.validate().is_err());
        let mut p = WeightParams::default();
        p.sigma[3] = p.sigma[2] - 10.0;
        assert!(p.validate().is_err());
        let mut p = WeightParams::default();
        p.s = 0.5;
        assert!(p.validate().is_err());
        assert_eq!(WeightParams::default().mu(), 12.0);
    }

    fn unit_lattice() -> Lattice {
        Lattice::new(8, 8, 8, 2.0 * PI).unwrap()
    }

    #[test]
    fn gevrey_norm_examples() {
        let p = WeightParams {
            s: 1.0,
            lambda_inf: 0.1,
            ..WeightParams::default()
        };
        let l = unit_lattice();
        let zero = SpectralField::zeros(l);
        assert_eq!(gevrey_norm(&zero, 2.0, 1e300, &p, true, false), 0.0);

        let mut one = SpectralField::zeros(l);
        one.coeffs[l.index_of(Mode { k: 0, j: 0, alpha: 1 }).unwrap()] = Complex64::new(1.0, 0.0);
        let n = gevrey_norm(&one, 2.0, 1e300, &p, false, false);
        assert!(close(n, 2.0 * 0.1f64.exp(), 1e-14), "{n}");
        assert!(close(n, 2.21034, 1e-5));

        let mut two = one.clone();
        two.coeffs[l.index_of(Mode { k: 1, j: 2, alpha: 0 }).unwrap()] = Complex64::new(0.0, 0.5);
        let mut other = SpectralField::zeros(l);
        other.coeffs[l.index_of(Mode { k: 1, j: 2, alpha: 0 }).unwrap()] = Complex64::new(0.0, 0.5);
        let a = gevrey_norm(&one, 3.0, 2.0, &p, true, true);
        let b = gevrey_norm(&other, 3.0, 2.0, &p, true, true);
        let ab = gevrey_norm(&two, 3.0, 2.0, &p, true, true);
        assert!(close(ab, (a * a + b * b).sqrt(), 1e-14));
    }

    #[test]
    fn huge_sigma_stays_finite_in_log_space() {
        let l = Lattice::default();
        let mut f = SpectralField::zeros(l);
        f.set_mode(Mode { k: 10, j: 60, alpha: 10 }, Complex64::new(1e-3, 0.0)).unwrap();
        let p = WeightParams::default();
        let ln = gevrey_ln_norm(&f, 300.0, 0.0, &p, true, false);
        assert!(ln.is_finite() && ln > 700.0);
    }

    proptest! {
        #[test]
        fn weights_monotone_and_bounded(i in 1.01f64..3000.0, c in 0.25f64..3.0, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
            let tab = critical_times(i, c);
            let span = 2.2 * i;
            let (lo, hi) = if t1 < t2 { (t1 * span, t2 * span) } else { (t2 * span, t1 * span) };
            prop_assert!(tab.ln_w_nr(lo) <= tab.ln_w_nr(hi) + 1e-12);
            prop_assert!(tab.ln_w_r(lo) <= tab.ln_w_r(hi) + 1e-12);
            prop_assert!(tab.ln_w_nr(hi) <= 1e-15);
            prop_assert!(tab.ln_w_r(hi) <= tab.ln_w_nr(hi) + 1e-15);
            prop_assert!(tab.dt_ln_w_k(hi, 1, 1.0) >= -1e-9);
        }

        #[test]
        fn weights_even_under_joint_sign_flip(k in -12i64..12, eta in -150.0f64..150.0, a in -12i64..12, t in 0.0f64..320.0) {
            let p = WeightParams::default();
            let f = Frequency::new(k, eta, a);
            prop_assert_eq!(w_k(t, k, &f, &p), w_k(t, -k, &(-f), &p));
            let i = f.iota();
            prop_assert_eq!(w_nr(t, i, &p), w_nr(t, -i, &p));
            prop_assert_eq!(w_r(t, i, &p), w_r(t, -i, &p));
            // J >= 1
            prop_assert!(w_k(t, k, &f, &p) <= 1.0);
        }

        #[test]
        fn unweighted_norm_nonincreasing_in_t(seed in 0u64..200, t in 0.0f64..50.0, dt in 0.0f64..50.0) {
            use rand::{Rng, SeedableRng};
            let l = Lattice::new(8, 16, 8, 4.0 * PI).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut f = SpectralField::zeros(l);
            for c in f.coeffs.iter_mut() {
                *c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
            f.symmetrize();
            let p = WeightParams::default();
            let a = gevrey_ln_norm(&f, 30.0, t, &p, false, false);
            let b = gevrey_ln_norm(&f, 30.0, t + dt, &p, false, false);
            prop_assert!(b <= a + 1e-12);
        }
    }
}
