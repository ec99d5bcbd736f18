use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;
use strata_core::fit::fit_loglog_slope;
use strata_core::report::{CsvTable, ToyRow};

use super::parse_list;
use crate::config::ConfigError;
use crate::output::Output;
use crate::Global;

#[derive(Args, Debug, Serialize)]
pub struct FitArgs {
    /// CSV written by another subcommand.
    pub csv: PathBuf,
    /// Column to fit.
    #[arg(long)]
    pub column: String,
    /// Abscissa column.
    #[arg(long, default_value = "t")]
    pub x: String,
    /// Fit window `LO,HI` on the abscissa.
    #[arg(long)]
    pub window: String,
    /// The column already holds natural logarithms (the `ln_*` diagnostics).
    #[arg(long)]
    pub log_values: bool,
}

/// `(x, y)` pairs from a CSV, skipping `#` lines.
pub fn read_series(text: &str, x: &str, column: &str, log_values: bool) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header: Vec<&str> = lines.next().context("empty CSV")?.split(',').collect();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| ConfigError(format!("column '{name}' not found; have {}", header.join(", "))))
    };
    let (ix, iy) = (find(x)?, find(column)?);
    let mut raw = Vec::new();
    for (n, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        let get = |i: usize| -> Result<f64> {
            let c = cells.get(i).with_context(|| format!("row {} is short", n + 1))?;
            c.trim().parse::<f64>().with_context(|| format!("row {}: cannot parse '{c}'", n + 1))
        };
        raw.push((get(ix)?, get(iy)?));
    }
    if !log_values {
        return Ok(raw);
    }
    // shift before exponentiating; only the intercept changes
    let top = raw.iter().map(|p| p.1).filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    Ok(raw.into_iter().map(|(x, v)| (x, (v - top).exp())).collect())
}

pub fn run(g: &Global, a: &FitArgs) -> Result<()> {
    let w = parse_list(&a.window)?;
    if w.len() != 2 || !(w[0] < w[1]) {
        return Err(ConfigError(format!("--window needs LO,HI with LO < HI, got '{}'", a.window)).into());
    }
    let text = std::fs::read_to_string(&a.csv).map_err(|e| ConfigError(format!("cannot read {}: {e}", a.csv.display())))?;
    let series = read_series(&text, &a.x, &a.column, a.log_values)?;
    let mut out = Output::start(&g.out, "fit", g.seed, a, g.quiet)?;
    let fit = fit_loglog_slope(&series, (w[0], w[1]));
    let row = ToyRow {
        model: "fit".into(),
        params: format!("{} column={} window=[{},{}]", a.csv.display(), a.column, w[0], w[1]),
        fitted_exponent: fit.as_ref().ok().map(|f| f.exponent),
        r2: fit.as_ref().ok().map(|f| f.r2),
        constant: None,
    };
    let mut t = CsvTable::new(ToyRow::HEADER);
    t.push(row.cells());
    out.write_csv("fit.csv", &mut t)?;
    match fit {
        Ok(f) => {
            out.say(format!(
                "{} ~ {}^{:.6} (r2 = {:.6}, {} points in [{}, {}])",
                a.column, a.x, f.exponent, f.r2, f.points, w[0], w[1]
            ));
            out.finish("ok")
        }
        Err(e) => {
            out.finish("rejected")?;
            Err(e.into())
        }
    }
}
