//! Plain CSV output. Floats are written in a fixed exponent format so that
//! identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::io::{self, Write};

/// Fixed-precision float formatting used by every CSV writer.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.12e}")
    }
}

/// In-memory CSV table with an optional `# manifest: <file>` preamble.
#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    pub manifest: Option<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        CsvTable {
            manifest: None,
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_f64(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| fmt_f64(v)).collect());
    }

    pub fn to_string(&self) -> String {
        let mut s = String::new();
        if let Some(m) = &self.manifest {
            let _ = writeln!(s, "# manifest: {m}");
        }
        s.push_str(&self.header.join(","));
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_string().as_bytes())
    }
}

/// One summary line of a toy-model experiment.
#[derive(Debug, Clone)]
pub struct ToyRow {
    pub model: String,
    pub params: String,
    pub fitted_exponent: Option<f64>,
    pub r2: Option<f64>,
    pub constant: Option<f64>,
}

impl ToyRow {
    pub const HEADER: [&'static str; 5] = ["model", "params", "fitted_exponent", "r2", "constant"];

    pub fn cells(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        vec![
            self.model.clone(),
            format!("\"{}\"", self.params),
            opt(self.fitted_exponent),
            opt(self.r2),
            opt(self.constant),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_layout() {
        let mut t = CsvTable::new(["t", "v"]);
        t.manifest = Some("run.json".into());
        t.push_f64(&[1.0, f64::NEG_INFINITY]);
        assert_eq!(t.to_string(), "# manifest: run.json\nt,v\n1.000000000000e0,-inf\n");
    }

    #[test]
    fn toy_row_blanks() {
        let r = ToyRow {
            model: "orr".into(),
            params: "k=1".into(),
            fitted_exponent: Some(0.5),
            r2: None,
            constant: None,
        };
        assert_eq!(r.cells()[3], "");
        assert_eq!(r.cells()[1], "\"k=1\"");
    }
}
