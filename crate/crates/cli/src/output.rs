//! Output directory handling: the run manifest, CSV files that point back
//! to it, and plot scripts that read those CSVs by relative path.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use strata_core::report::CsvTable;
use strata_core::sim::checkpoint::write_atomic;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub code_version: String,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub started_unix: f64,
    pub finished_unix: Option<f64>,
    pub status: String,
    pub outputs: Vec<String>,
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

pub struct Output {
    dir: PathBuf,
    stem: String,
    quiet: bool,
    manifest: RunManifest,
}

impl Output {
    /// Creates the directory and writes the initial manifest.
    pub fn start<C: Serialize>(dir: &Path, stem: &str, seed: Option<u64>, config: &C, quiet: bool) -> Result<Output> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        let out = Output {
            dir: dir.to_path_buf(),
            stem: stem.to_string(),
            quiet,
            manifest: RunManifest {
                command: stem.to_string(),
                code_version: env!("CARGO_PKG_VERSION").to_string(),
                seed,
                config: serde_json::to_value(config)?,
                started_unix: now(),
                finished_unix: None,
                status: "running".into(),
                outputs: Vec::new(),
            },
        };
        out.write_manifest()?;
        Ok(out)
    }

    pub fn manifest_name(&self) -> String {
        format!("{}.manifest.json", self.stem)
    }

    /// Prints unless `--quiet`.
    pub fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }

    fn write_manifest(&self) -> Result<()> {
        let json = serde_json::to_string_pretty(&self.manifest)?;
        let path = self.dir.join(self.manifest_name());
        write_atomic(&path, json.as_bytes()).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    /// Registers an output file; the manifest is rewritten so it lists every
    /// file before that file is written.
    pub fn register(&mut self, name: &str) -> Result<PathBuf> {
        if !self.manifest.outputs.iter().any(|n| n == name) {
            self.manifest.outputs.push(name.to_string());
            self.write_manifest()?;
        }
        Ok(self.dir.join(name))
    }

    pub fn write_csv(&mut self, name: &str, table: &mut CsvTable) -> Result<()> {
        table.manifest = Some(self.manifest_name());
        let path = self.register(name)?;
        write_atomic(&path, table.to_string().as_bytes()).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.register(name)?;
        write_atomic(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    /// Writes `<csv stem>.plot.py`, plotting `ys` against `x` from `csv`.
    pub fn write_plot(&mut self, csv: &str, x: &str, ys: &[&str], loglog: bool) -> Result<()> {
        let name = format!("{}.plot.py", csv.trim_end_matches(".csv"));
        let script = plot_script(csv, x, ys, loglog);
        self.write_bytes(&name, script.as_bytes())
    }

    pub fn finish(mut self, status: &str) -> Result<()> {
        self.manifest.status = status.to_string();
        self.manifest.finished_unix = Some(now());
        self.write_manifest()
    }
}

fn plot_script(csv: &str, x: &str, ys: &[&str], loglog: bool) -> String {
    let cols = ys.iter().map(|c| format!("{c:?}")).collect::<Vec<_>>().join(", ");
    let scale = if loglog {
        "ax.set_xscale(\"log\")\nax.set_yscale(\"log\")\n"
    } else {
        ""
    };
    format!(
        r##"#!/usr/bin/env python3
import csv
import os
import sys

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(here, {csv:?})) as f:
    rows = list(csv.reader(line for line in f if not line.startswith("#")))
header, data = rows[0], rows[1:]
x = [float(r[header.index({x:?})]) for r in data]

fig, ax = plt.subplots()
for name in [{cols}]:
    y = [abs(float(r[header.index(name)])) for r in data]
    ax.plot(x, y, label=name)
{scale}ax.set_xlabel({x:?})
ax.legend()
out = os.path.join(here, {png:?})
fig.savefig(out, dpi=150)
if "--show" in sys.argv:
    plt.show()
"##,
        png = format!("{}.png", csv.trim_end_matches(".csv")),
    )
}
