use anyhow::Result;
use clap::{Args, Subcommand};
use serde::Serialize;
use strata_core::report::{fmt_f64, CsvTable};
use strata_core::weights::{critical_times, ratio_lemma_sweep_seeded, total_growth_check, Lemma, SweepReport};
use strata_core::{Exec, WeightParams};

use super::parse_list;
use crate::config::ConfigError;
use crate::output::Output;
use crate::Global;

#[derive(Subcommand, Debug)]
pub enum WeightsCommand {
    /// Critical intervals and the weight at every breakpoint for one iota.
    Table(TableArgs),
    /// Worst constant K in 1/w(0, iota) <= K e^{(mu/2) sqrt(iota)}.
    Totalgrowth(TotalGrowthArgs),
    /// Randomized sweeps of the weight ratio inequalities.
    Ratios(RatiosArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct TableArgs {
    #[arg(long, default_value_t = 10.0)]
    pub iota: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c_star: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct TotalGrowthArgs {
    #[arg(long, default_value_t = 1e4)]
    pub iota_max: f64,
    /// Comma-separated values of C*.
    #[arg(long, default_value = "0.5,1,2")]
    pub c_star: String,
    /// Pass threshold for K.
    #[arg(long, default_value_t = 10.0)]
    pub k_max: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct RatiosArgs {
    /// rNR, ratioJ, shortTime or all.
    #[arg(long, default_value = "all")]
    pub lemma: String,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1.0)]
    pub c_star: f64,
}

pub fn run(g: &Global, c: WeightsCommand) -> Result<()> {
    match c {
        WeightsCommand::Table(a) => table(g, &a),
        WeightsCommand::Totalgrowth(a) => totalgrowth(g, &a),
        WeightsCommand::Ratios(a) => ratios(g, &a),
    }
}

fn params(c_star: f64) -> Result<WeightParams> {
    let p = WeightParams::default().with_c_star(c_star);
    p.validate()?;
    Ok(p)
}

fn table(g: &Global, a: &TableArgs) -> Result<()> {
    params(a.c_star)?;
    let tab = critical_times(a.iota, a.c_star);
    let mut out = Output::start(&g.out, "weights_table", g.seed, a, g.quiet)?;

    let mut intervals = CsvTable::new(["l", "t_l", "a_l", "b_l", "resonant"]);
    for l in 1..=tab.len() {
        intervals.push(vec![
            l.to_string(),
            fmt_f64(tab.t(l)),
            fmt_f64(tab.a(l)),
            fmt_f64(tab.b(l)),
            (tab.is_resonant(l) as u8).to_string(),
        ]);
    }
    out.write_csv("weights_intervals.csv", &mut intervals)?;

    let mut points = CsvTable::new(["t", "piece", "w_nr", "w_r"]);
    for t in tab.breakpoints() {
        let w_nr = tab.ln_w_nr(t).exp();
        let w_r = tab.ln_w_r(t).exp();
        let piece = format!("{:?}", tab.locate(t));
        out.say(format!("t = {t:>12.6}  {piece:<10}  w_NR = {w_nr:.12e}  w_R = {w_r:.12e}"));
        points.push(vec![fmt_f64(t), piece, fmt_f64(w_nr), fmt_f64(w_r)]);
    }
    out.write_csv("weights_table.csv", &mut points)?;
    out.say(format!("continuity defect {:.3e}", tab.continuity_defect()));
    out.finish("ok")
}

fn totalgrowth(g: &Global, a: &TotalGrowthArgs) -> Result<()> {
    let cs = parse_list(&a.c_star)?;
    let mut out = Output::start(&g.out, "weights_totalgrowth", g.seed, a, g.quiet)?;
    let mut t = CsvTable::new(["c_star", "mu", "iota_max", "samples", "constant", "worst_iota", "passes"]);
    for c in cs {
        let p = params(c)?;
        let r = total_growth_check(a.iota_max, &p)?;
        out.say(format!(
            "C* = {c}: K = {:.6} at iota = {} ({})",
            r.constant,
            r.worst_iota,
            if r.passes(a.k_max) { "pass" } else { "FAIL" }
        ));
        t.push(vec![
            fmt_f64(c),
            fmt_f64(p.mu()),
            fmt_f64(a.iota_max),
            r.samples.to_string(),
            fmt_f64(r.constant),
            fmt_f64(r.worst_iota),
            (r.passes(a.k_max) as u8).to_string(),
        ]);
    }
    out.write_csv("weights_totalgrowth.csv", &mut t)?;
    out.finish("ok")
}

fn ratios(g: &Global, a: &RatiosArgs) -> Result<()> {
    let lemmas: Vec<Lemma> = if a.lemma == "all" {
        vec![Lemma::RNr, Lemma::RatioJ, Lemma::ShortTime]
    } else {
        vec![a.lemma.parse().map_err(|e: strata_core::Error| ConfigError(e.to_string()))?]
    };
    if a.samples == 0 {
        return Err(ConfigError("--samples must be positive".into()).into());
    }
    let p = params(a.c_star)?;
    let seed = g.seed.unwrap_or(0);
    let mut out = Output::start(&g.out, "weights_ratios", Some(seed), a, g.quiet)?;
    let header: Vec<&str> = SweepReport::CSV_HEADER.split(',').collect();
    let mut t = CsvTable::new(header);
    for lemma in lemmas {
        let r = ratio_lemma_sweep_seeded(lemma, a.samples, &p, seed, Exec::Parallel);
        out.say(format!(
            "{lemma}: {} samples ({} skipped), empirical constant {:.6e}, worst {}",
            r.samples, r.skipped, r.empirical_constant, r.worst_tuple
        ));
        t.push(vec![
            lemma.to_string(),
            r.samples.to_string(),
            format!("{:.10e}", r.empirical_constant),
            format!("\"{}\"", r.worst_tuple),
        ]);
    }
    out.write_csv("weights_ratios.csv", &mut t)?;
    out.finish("ok")
}
