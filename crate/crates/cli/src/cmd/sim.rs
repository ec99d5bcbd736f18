use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use strata_core::report::{fmt_f64, CsvTable};
use strata_core::sim::checkpoint::{checkpoint_load, checkpoint_save};
use strata_core::sim::{DiagnosticRow, RunMode, SimState, Solver};
use strata_core::Exec;

use crate::config::{ConfigError, FileConfig};
use crate::output::Output;
use crate::Global;

#[derive(Args, Debug)]
pub struct SimArgs {
    /// Configuration file; built-in defaults when omitted.
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct NonlinearArgs {
    #[command(flatten)]
    pub sim: SimArgs,

    /// Continue from a checkpoint written by an earlier run.
    #[arg(long)]
    pub resume: Option<PathBuf>,
}

pub fn linear(g: &Global, a: &SimArgs) -> Result<()> {
    execute(g, a, RunMode::Linear, None)
}

pub fn nonlinear(g: &Global, a: &NonlinearArgs) -> Result<()> {
    execute(g, &a.sim, RunMode::Nonlinear, a.resume.as_deref())
}

fn io_err(e: anyhow::Error) -> strata_core::Error {
    strata_core::Error::Io(std::io::Error::other(format!("{e:#}")))
}

fn execute(g: &Global, a: &SimArgs, mode: RunMode, resume: Option<&std::path::Path>) -> Result<()> {
    let mut fc = FileConfig::load(a.config.as_deref())?;
    if let Some(seed) = g.seed {
        fc.init.seed = seed;
    }
    let cfg = fc.sim_config(mode);
    let solver = Solver::new(cfg.clone(), Exec::Parallel)?;
    let mut state = match resume {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| ConfigError(format!("cannot read checkpoint {}: {e}", path.display())))?;
            let s = checkpoint_load(&bytes)?;
            if s.theta.lattice != cfg.lattice {
                return Err(ConfigError(format!(
                    "checkpoint lattice {:?} does not match the configured {:?}",
                    s.theta.lattice, cfg.lattice
                ))
                .into());
            }
            s
        }
        None => solver.init_field()?,
    };

    let stem = match mode {
        RunMode::Linear => "linear",
        RunMode::Nonlinear => "nonlinear",
    };
    let mut out = Output::start(&g.out, stem, Some(cfg.init.seed), &fc, g.quiet)?;
    let csv = format!("{stem}.csv");
    out.register(&csv)?;

    let rate = solver.lattice().min_zero_mode_rate(cfg.dealias);
    let ck_every = if mode == RunMode::Nonlinear { fc.run.checkpoint_every } else { 0.0 };
    let mut next_ck = if ck_every > 0.0 { ((state.t / ck_every).floor() + 1.0) * ck_every } else { f64::INFINITY };
    let mut table = CsvTable::new(DiagnosticRow::HEADER);
    let mut last: Option<DiagnosticRow> = None;
    let result = solver.run(&mut state, |st, r| {
        table.push(r.cells(rate));
        if table.rows.len() % 10 == 1 {
            out.say(format!("t = {:>9.3}  |U2_nz| = {:.4e}  ln E5 = {:.4}", r.t, r.u2_nonzero_l2, r.ln_en5));
        }
        if st.t >= next_ck - 1e-9 * ck_every {
            out.write_bytes(&format!("{stem}_t{:010.3}.stcv", st.t), &checkpoint_save(st))
                .map_err(io_err)?;
            next_ck += ck_every;
        }
        last = Some(r.clone());
        Ok(())
    });

    out.write_csv(&csv, &mut table)?;
    out.write_plot(&csv, "t", &["u1_l2", "u3_l2", "u2_zero_l2", "u2_nonzero_l2"], true)?;
    if mode == RunMode::Nonlinear {
        out.write_bytes(&format!("{stem}_final.stcv"), &checkpoint_save(&state))?;
    }
    match result {
        Ok(()) => {
            if let Some(r) = last {
                out.say(summary(&state, &r));
            }
            out.finish("ok")
        }
        Err(e) => {
            out.finish("aborted")?;
            Err(e).context(format!("{stem} run stopped; last finite state kept"))
        }
    }
}

fn summary(s: &SimState, r: &DiagnosticRow) -> String {
    format!(
        "finished at t = {}: |U1| = {}, |U2_nz| = {}, |U2_0| = {}, mean = {}, reality = {}",
        fmt_f64(s.t),
        fmt_f64(r.u1_l2),
        fmt_f64(r.u2_nonzero_l2),
        fmt_f64(r.u2_zero_l2),
        fmt_f64(r.mean),
        fmt_f64(r.reality)
    )
}
