//! Numeric probes of the weight lemmas: total growth at `t = 0` and the
//! randomized ratio sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

use super::{IntervalTable, WeightParams};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::freq::Frequency;

/// Outcome of [`total_growth_check`].
#[derive(Debug, Clone)]
pub struct TotalGrowthReport {
    pub c_star: f64,
    pub iota_max: f64,
    pub samples: usize,
    /// Smallest `K` with `1/w(0, iota) <= K e^{(mu/2) sqrt(iota)}` on the grid.
    pub constant: f64,
    pub worst_iota: f64,
}

impl TotalGrowthReport {
    pub fn passes(&self, k: f64) -> bool {
        self.constant.is_finite() && self.constant <= k
    }
}

/// Sweeps `iota` over a log grid in `(1, iota_max]`, augmented with every
/// perfect square (where `E(sqrt iota)` steps and the ratio peaks).
pub fn total_growth_check(iota_max: f64, p: &WeightParams) -> Result<TotalGrowthReport> {
    if !(iota_max > 1.0) {
        return Err(Error::precondition("total_growth_check needs iota_max > 1"));
    }
    let mut grid: Vec<f64> = (0..=4000)
        .map(|i| (iota_max.ln() * i as f64 / 4000.0).exp())
        .filter(|&x| x > 1.0)
        .collect();
    let mut n = 2.0f64;
    while n * n <= iota_max {
        grid.push(n * n);
        n += 1.0;
    }
    grid.push(iota_max);
    let half_mu = 0.5 * p.mu();
    // iota <= 1: ratio exactly 1
    let (mut worst, mut at) = (0.0f64, 1.0f64);
    for &i in &grid {
        let ln_inv = -IntervalTable::new(i, p.c_star).ln_w_nr(0.0);
        let v = ln_inv - half_mu * i.sqrt();
        if v > worst {
            worst = v;
            at = i;
        }
    }
    Ok(TotalGrowthReport {
        c_star: p.c_star,
        iota_max,
        samples: grid.len() + 1,
        constant: worst.exp(),
        worst_iota: at,
    })
}

/// Which ratio inequality a sweep probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma {
    /// `w_NR(t, i1)/w_NR(t, i2) <= e^{mu |i1-i2|^{1/2}}`.
    RNr,
    /// `J_k/J_l` for `t > 10` on nearby pairs.
    RatioJ,
    /// `|J_k/J_l - 1|` for `t <= min sqrt|iota| / 2`.
    ShortTime,
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lemma::RNr => "rNR",
            Lemma::RatioJ => "ratioJ",
            Lemma::ShortTime => "shortTime",
        })
    }
}

impl FromStr for Lemma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Lemma> {
        match s {
            "rNR" | "rnr" => Ok(Lemma::RNr),
            "ratioJ" | "ratioj" => Ok(Lemma::RatioJ),
            "shortTime" | "shorttime" => Ok(Lemma::ShortTime),
            _ => Err(Error::invalid(format!("unknown lemma '{s}' (rNR, ratioJ, shortTime)"))),
        }
    }
}

/// Empirical supremum of left side over right side.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub lemma: Lemma,
    pub c_star: f64,
    /// Admissible samples that entered the supremum.
    pub samples: usize,
    /// Draws rejected by the lemma's precondition.
    pub skipped: usize,
    pub empirical_constant: f64,
    pub worst_tuple: String,
}

impl SweepReport {
    pub const CSV_HEADER: &'static str = "lemma,samples,empirical_constant,worst_tuple";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.10e},\"{}\"",
            self.lemma, self.samples, self.empirical_constant, self.worst_tuple
        )
    }
}

const CHUNK: usize = 1024;

/// [`ratio_lemma_sweep_seeded`] with seed 0 on the default executor.
pub fn ratio_lemma_sweep(lemma: Lemma, sample_count: usize, p: &WeightParams) -> SweepReport {
    ratio_lemma_sweep_seeded(lemma, sample_count, p, 0, Exec::default())
}

/// Draws are generated in fixed chunks, each with its own ChaCha stream,
/// so the report does not depend on the executor.
pub fn ratio_lemma_sweep_seeded(lemma: Lemma, sample_count: usize, p: &WeightParams, seed: u64, exec: Exec) -> SweepReport {
    let chunks = sample_count.div_ceil(CHUNK);
    let partial = exec.map(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let n = CHUNK.min(sample_count - c * CHUNK);
        let mut best = (f64::NEG_INFINITY, String::new());
        let mut skipped = 0usize;
        for _ in 0..n {
            match draw(lemma, &mut rng, p) {
                Some((v, tuple)) => {
                    if v > best.0 || best.1.is_empty() {
                        best = (v, tuple);
                    }
                }
                None => skipped += 1,
            }
        }
        (best, skipped)
    });
    let mut best = (f64::NEG_INFINITY, String::new());
    let mut skipped = 0;
    for ((v, tuple), s) in partial {
        skipped += s;
        if v > best.0 || (best.1.is_empty() && !tuple.is_empty()) {
            best = (v, tuple);
        }
    }
    SweepReport {
        lemma,
        c_star: p.c_star,
        samples: sample_count - skipped,
        skipped,
        empirical_constant: best.0.exp(),
        worst_tuple: best.1,
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

fn signed(rng: &mut ChaCha8Rng, x: f64) -> f64 {
    if rng.random_bool(0.5) {
        x
    } else {
        -x
    }
}

/// A frequency and a neighbour within `3/16` of its l1 norm.
fn near_pair(rng: &mut ChaCha8Rng, kmax: i64, eta_max: f64) -> (Frequency, Frequency) {
    let f2 = Frequency::new(
        rng.random_range(-kmax..=kmax),
        rng.random_range(-eta_max..eta_max),
        rng.random_range(-kmax..=kmax),
    );
    let bound = 3.0 / 16.0 * f2.l1_norm();
    let cap = (bound.floor() as i64).min(3);
    let mut dk = rng.random_range(-cap..=cap);
    let mut da = rng.random_range(-cap..=cap);
    if (dk.abs() + da.abs()) as f64 > bound {
        da = 0;
    }
    if dk.abs() as f64 > bound {
        dk = 0;
    }
    let rest = bound - (dk.abs() + da.abs()) as f64;
    let de = if rest > 0.0 { rng.random_range(-rest..=rest) } else { 0.0 };
    let f1 = Frequency::new(f2.k + dk, f2.eta + de, f2.alpha + da);
    (f1, f2)
}

fn ln_w_k(f: &Frequency, t: f64, p: &WeightParams) -> (f64, IntervalTable) {
    let i = f.iota();
    let tab = IntervalTable::new(i, p.c_star);
    (tab.ln_w_k(t, f.k, i.signum()), tab)
}

fn fmt_f(f: &Frequency) -> String {
    format!("({} {:.6} {})", f.k, f.eta, f.alpha)
}

/// `ln(lhs / rhs)` for one draw, or `None` when inadmissible.
fn draw(lemma: Lemma, rng: &mut ChaCha8Rng, p: &WeightParams) -> Option<(f64, String)> {
    let mu = p.mu();
    match lemma {
        Lemma::RNr => {
            let m1 = log_uniform(rng, 0.5, 5000.0);
            let i1 = signed(rng, m1);
            let gap = if rng.random_bool(0.5) {
                log_uniform(rng, 1e-4, 1.0)
            } else {
                log_uniform(rng, 1.0, 200.0)
            };
            let i2 = i1 + signed(rng, gap);
            let t = rng.random_range(0.0..2.2 * i1.abs().max(i2.abs()));
            let w1 = IntervalTable::new(i1, p.c_star).ln_w_nr(t);
            let w2 = IntervalTable::new(i2, p.c_star).ln_w_nr(t);
            let v = w1 - w2 - mu * (i1 - i2).abs().sqrt();
            Some((v, format!("t={t:.6};iota1={i1:.6};iota2={i2:.6}")))
        }
        Lemma::RatioJ => {
            let (f1, f2) = near_pair(rng, 20, 600.0);
            let (i1, i2) = (f1.iota(), f2.iota());
            let t = 10.0 + rng.random_range(0.0..2.2 * i1.abs().max(i2.abs()).max(1.0));
            if t <= 10.0 {
                return None;
            }
            let (lw1, t1) = ln_w_k(&f1, t, p);
            let (lw2, t2) = ln_w_k(&f2, t, p);
            let (k, l) = (f1.k, f2.k);
            let in1 = t1.in_resonant_interval(t, k, i1.signum());
            let in2 = t2.in_resonant_interval(t, l, i2.signum());
            let ln_factor = if in1 && !in2 && k != l {
                let kf = k as f64;
                (i1.abs() / (kf * kf * (1.0 + (t - i1 / kf).abs()))).ln()
            } else if !in1 && in2 {
                let lf = l as f64;
                (lf * lf * (1.0 + (t - i2 / lf).abs()) / i2.abs()).ln()
            } else {
                0.0
            };
            let d = (f1 - f2).l1_norm();
            // J_k / J_l = w_l / w_k
            let v = lw2 - lw1 - ln_factor - 2.0 * mu * d.sqrt();
            Some((v, format!("t={t:.6};f1={};f2={}", fmt_f(&f1), fmt_f(&f2))))
        }
        Lemma::ShortTime => {
            let (f1, f2) = near_pair(rng, 20, 5000.0);
            let (i1, i2) = (f1.iota().abs(), f2.iota().abs());
            let limit = 0.5 * i1.sqrt().min(i2.sqrt());
            let t = rng.random_range(0.0..0.6 * i2.sqrt().max(1e-9));
            if t > limit {
                return None;
            }
            let (lw1, _) = ln_w_k(&f1, t, p);
            let (lw2, _) = ln_w_k(&f2, t, p);
            let x = lw2 - lw1;
            // ln |e^x - 1|
            let ln_lhs = if x == 0.0 {
                f64::NEG_INFINITY
            } else if x > 30.0 {
                x + (-(-x).exp()).ln_1p()
            } else {
                x.exp_m1().abs().ln()
            };
            let dfreq = f1 - f2;
            let ln_rhs = dfreq.bracket().ln() - (i1.sqrt() + i2.sqrt()).ln() + 3.0 * mu * dfreq.l1_norm().sqrt();
            Some((ln_lhs - ln_rhs, format!("t={t:.6};f1={};f2={}", fmt_f(&f1), fmt_f(&f2))))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_growth_at_ten_is_far_below_bound() {
        let p = WeightParams::default();
        let inv = (-IntervalTable::new(10.0, 1.0).ln_w_nr(0.0)).exp();
        assert!(inv < (6.0 * 10f64.sqrt()).exp());
        let r = total_growth_check(10.0, &p).unwrap();
        assert!(r.passes(10.0), "{r:?}");
        assert!(total_growth_check(1.0, &p).is_err());
    }

    #[test]
    fn identical_pair_has_unit_ratio() {
        let p = WeightParams::default();
        for t in [0.0, 3.0, 9.0, 40.0] {
            let tab = IntervalTable::new(37.5, p.c_star);
            assert_eq!(tab.ln_w_nr(t) - tab.ln_w_nr(t), 0.0);
        }
    }

    #[test]
    fn sweep_is_finite_and_executor_independent() {
        let p = WeightParams::default();
        for lemma in [Lemma::RNr, Lemma::RatioJ, Lemma::ShortTime] {
            let a = ratio_lemma_sweep_seeded(lemma, 5000, &p, 3, Exec::Sequential);
            let b = ratio_lemma_sweep_seeded(lemma, 5000, &p, 3, Exec::Parallel);
            assert!(a.empirical_constant.is_finite(), "{a:?}");
            assert_eq!(a.empirical_constant.to_bits(), b.empirical_constant.to_bits());
            assert_eq!(a.worst_tuple, b.worst_tuple);
            assert_eq!(a.samples + a.skipped, 5000);
        }
    }

    #[test]
    fn short_time_skips_inadmissible_draws() {
        let r = ratio_lemma_sweep(Lemma::ShortTime, 4000, &WeightParams::default());
        assert!(r.skipped > 0);
        assert!(r.samples > 0);
    }

    #[test]
    fn lemma_names_roundtrip() {
        for l in [Lemma::RNr, Lemma::RatioJ, Lemma::ShortTime] {
            assert_eq!(l.to_string().parse::<Lemma>().unwrap(), l);
        }
        assert!("nope".parse::<Lemma>().is_err());
    }
}
