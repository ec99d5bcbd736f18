use anyhow::Result;
use clap::{Args, Subcommand};
use serde::Serialize;
use strata_core::fit::{log_grid, loglog_regression};
use strata_core::report::{fmt_f64, CsvTable, ToyRow};
use strata_core::symbols::zero_mode_rate;
use strata_core::toy::{liftup_envelope, liftup_growth, orr_toy_integrate, semigroup_bound_check, zero_mode_decay_bound};
use strata_core::Exec;

use super::parse_list;
use crate::config::ConfigError;
use crate::output::Output;
use crate::Global;

#[derive(Subcommand, Debug)]
pub enum ToyCommand {
    /// Resonant exchange across one critical interval, swept over eta.
    Orr(OrrArgs),
    /// Forced decay of one damped zero mode.
    Zeromode(ZeroModeArgs),
    /// Lift-up envelope over a frequency grid.
    Liftup(LiftupArgs),
    /// Uniform constants of the zero-mode semigroup integral.
    Semigroup(SemigroupArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct OrrArgs {
    #[arg(long, default_value_t = 1)]
    pub k: i64,
    /// Coupling strength of the pair.
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 10.0)]
    pub eta_min: f64,
    #[arg(long, default_value_t = 1e4)]
    pub eta_max: f64,
    #[arg(long, default_value_t = 24)]
    pub points: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ZeroModeArgs {
    #[arg(long, default_value_t = 2.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 1)]
    pub alpha: i64,
    /// End time; defaults to 60 decay times.
    #[arg(long)]
    pub t_max: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct LiftupArgs {
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta_min: f64,
    #[arg(long, default_value_t = 100.0)]
    pub eta_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub eta_step: f64,
    #[arg(long, default_value_t = 10)]
    pub alpha_max: i64,
    #[arg(long, default_value_t = 10.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 1e3)]
    pub t_max: f64,
    #[arg(long, default_value_t = 60)]
    pub points: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct SemigroupArgs {
    /// Comma-separated exponents m.
    #[arg(long, default_value = "0,1.5,2.5,3")]
    pub m: String,
    /// Comma-separated eta values of the grid.
    #[arg(long, default_value = "2,4,6,8,10,12,14,16,18,20")]
    pub eta: String,
    #[arg(long, default_value_t = 10)]
    pub alpha_max: i64,
}

pub fn run(g: &Global, c: ToyCommand) -> Result<()> {
    match c {
        ToyCommand::Orr(a) => orr(g, &a),
        ToyCommand::Zeromode(a) => zeromode(g, &a),
        ToyCommand::Liftup(a) => liftup(g, &a),
        ToyCommand::Semigroup(a) => semigroup(g, &a),
    }
}

fn write_summary(out: &mut Output, name: &str, row: ToyRow) -> Result<()> {
    let mut t = CsvTable::new(ToyRow::HEADER);
    t.push(row.cells());
    out.write_csv(name, &mut t)
}

fn orr(g: &Global, a: &OrrArgs) -> Result<()> {
    if a.points < 2 || !(a.eta_min > 0.0 && a.eta_max > a.eta_min) {
        return Err(ConfigError("need 0 < eta-min < eta-max and at least 2 points".into()).into());
    }
    let mut out = Output::start(&g.out, "toy_orr", g.seed, a, g.quiet)?;
    let mut table = CsvTable::new(["k", "eta", "kappa", "r_end", "nr_end"]);
    let mut series = Vec::new();
    for eta in log_grid(a.eta_min, a.eta_max, a.points) {
        let eta = eta * (a.k.signum() as f64);
        let (r, nr) = orr_toy_integrate(a.k, eta, a.kappa)?;
        table.push(vec![a.k.to_string(), fmt_f64(eta), fmt_f64(a.kappa), fmt_f64(r), fmt_f64(nr)]);
        series.push((eta.abs(), r.abs().max(nr.abs())));
    }
    out.write_csv("toy_orr.csv", &mut table)?;
    out.write_plot("toy_orr.csv", "eta", &["r_end", "nr_end"], true)?;
    let fit = loglog_regression(&series, (a.eta_min, a.eta_max)).ok();
    out.say(match &fit {
        Some(f) => format!("orr: amplification ~ eta^{:.4} (r2 = {:.5})", f.exponent, f.r2),
        None => "orr: not enough points for a fit".to_string(),
    });
    write_summary(
        &mut out,
        "toy_orr_summary.csv",
        ToyRow {
            model: "orr".into(),
            params: format!("k={} kappa={}", a.k, a.kappa),
            fitted_exponent: fit.as_ref().map(|f| f.exponent),
            r2: fit.as_ref().map(|f| f.r2),
            constant: series.iter().map(|s| s.1).reduce(f64::max),
        },
    )?;
    out.finish("ok")
}

fn zeromode(g: &Global, a: &ZeroModeArgs) -> Result<()> {
    if a.alpha == 0 {
        return Err(ConfigError("--alpha must be nonzero".into()).into());
    }
    let sigma = zero_mode_rate(a.eta, a.alpha);
    let t_max = a.t_max.unwrap_or(60.0 / sigma);
    let mut out = Output::start(&g.out, "toy_zeromode", g.seed, a, g.quiet)?;
    let r = zero_mode_decay_bound(a.eta, a.alpha, t_max)?;
    let mut table = CsvTable::new(["t", "theta", "weighted"]);
    for &(t, v) in &r.series {
        table.push_f64(&[t, v, (1.0 + t * t).powf(1.5) * v.abs()]);
    }
    out.write_csv("toy_zeromode.csv", &mut table)?;
    out.write_plot("toy_zeromode.csv", "t", &["theta", "weighted"], true)?;
    out.say(format!(
        "zeromode: sigma = {:.6e}, sup <t>^3|theta| = {:.6e} at t = {:.4e}, C = {:.6}",
        r.sigma, r.sup_weighted, r.argmax_t, r.constant
    ));
    write_summary(
        &mut out,
        "toy_zeromode_summary.csv",
        ToyRow {
            model: "zeromode".into(),
            params: format!("eta={} alpha={} t_max={t_max}", a.eta, a.alpha),
            fitted_exponent: None,
            r2: None,
            constant: Some(r.constant),
        },
    )?;
    out.finish("ok")
}

fn liftup(g: &Global, a: &LiftupArgs) -> Result<()> {
    if !(a.eta_step > 0.0 && a.eta_max >= a.eta_min && a.alpha_max >= 1 && a.t_max > a.t_min && a.t_min > 0.0) {
        return Err(ConfigError("invalid lift-up grid".into()).into());
    }
    let n_eta = ((a.eta_max - a.eta_min) / a.eta_step).round() as usize;
    let grid: Vec<(f64, i64)> = (0..=n_eta)
        .flat_map(|i| (1..=a.alpha_max).map(move |al| (a.eta_min + a.eta_step * i as f64, al)))
        .collect();
    let t = log_grid(a.t_min, a.t_max, a.points);
    let mut out = Output::start(&g.out, "toy_liftup", g.seed, a, g.quiet)?;
    let env = liftup_envelope(a.epsilon, &grid, &t, Exec::Parallel);
    let mut table = CsvTable::new(["t", "envelope"]);
    for &(t, v) in &env {
        table.push_f64(&[t, v]);
    }
    out.write_csv("toy_liftup.csv", &mut table)?;
    out.write_plot("toy_liftup.csv", "t", &["envelope"], true)?;
    let fit = liftup_growth(a.epsilon, &grid, &t)?;
    out.say(format!("liftup: envelope ~ t^{:.4} (r2 = {:.5})", fit.exponent, fit.r2));
    write_summary(
        &mut out,
        "toy_liftup_summary.csv",
        ToyRow {
            model: "liftup".into(),
            params: format!(
                "epsilon={} eta=[{},{}] step={} alpha<={} t=[{},{}]",
                a.epsilon, a.eta_min, a.eta_max, a.eta_step, a.alpha_max, a.t_min, a.t_max
            ),
            fitted_exponent: Some(fit.exponent),
            r2: Some(fit.r2),
            constant: Some(fit.intercept.exp()),
        },
    )?;
    out.finish("ok")
}

fn semigroup(g: &Global, a: &SemigroupArgs) -> Result<()> {
    let ms = parse_list(&a.m)?;
    let etas = parse_list(&a.eta)?;
    if a.alpha_max < 1 {
        return Err(ConfigError("--alpha-max must be at least 1".into()).into());
    }
    let grid: Vec<(f64, i64)> = etas.iter().flat_map(|&e| (1..=a.alpha_max).map(move |al| (e, al))).collect();
    let mut out = Output::start(&g.out, "toy_semigroup", g.seed, a, g.quiet)?;
    let mut per = CsvTable::new(["m", "eta", "alpha", "value"]);
    let mut summary = CsvTable::new(ToyRow::HEADER);
    for &m in &ms {
        let r = semigroup_bound_check(&grid, m)?;
        for &(eta, al, v) in &r.per_frequency {
            per.push(vec![fmt_f64(m), fmt_f64(eta), al.to_string(), fmt_f64(v)]);
        }
        out.say(format!("semigroup m = {m}: C = {:.6e}, spread = {:.3e}", r.constant, r.spread));
        summary.push(
            ToyRow {
                model: "semigroup".into(),
                params: format!("m={m} spread={}", fmt_f64(r.spread)),
                fitted_exponent: None,
                r2: None,
                constant: Some(r.constant),
            }
            .cells(),
        );
    }
    out.write_csv("toy_semigroup.csv", &mut per)?;
    out.write_csv("toy_semigroup_summary.csv", &mut summary)?;
    out.finish("ok")
}
