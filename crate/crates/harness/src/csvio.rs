//! CSV output. Numbers are written with 17 significant digits so that files
//! read back to the same `f64` values.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use drg_core::RunRecord;

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn create(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating directory {}", dir.display()))?;
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

/// Columns `t, x0..x{n-1}, H, dH`.
pub fn write_trajectory(path: &Path, rec: &RunRecord) -> Result<()> {
    let mut w = create(path)?;
    let n = rec.states.first().map_or(0, |s| s.len());
    let mut header = vec!["t".to_string()];
    header.extend((0..n).map(|i| format!("x{i}")));
    header.extend(["H".to_string(), "dH".to_string()]);
    w.write_record(&header)?;
    let errors = rec.energy_errors();
    for (k, state) in rec.states.iter().enumerate() {
        let mut row = vec![fmt_num(rec.times[k])];
        row.extend(state.coords().iter().map(|&x| fmt_num(x)));
        row.push(fmt_num(rec.energies[k]));
        row.push(fmt_num(errors[k]));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderRow {
    pub h: f64,
    /// NaN when the run at this step size failed.
    pub err_ambient: f64,
    pub err_riemannian: f64,
}

/// Columns `h, err_ambient, err_riemannian` and a final `# slope=<value>`.
pub fn write_order(path: &Path, rows: &[OrderRow], slope: f64) -> Result<()> {
    let mut w = create(path)?;
    w.write_record(["h", "err_ambient", "err_riemannian"])?;
    for r in rows {
        w.write_record([fmt_num(r.h), fmt_num(r.err_ambient), fmt_num(r.err_riemannian)])?;
    }
    let mut inner = w.into_inner().map_err(|e| anyhow::anyhow!("{}", e.error()))?;
    writeln!(inner, "# slope={}", fmt_num(slope))?;
    inner.flush()?;
    Ok(())
}

/// Columns `t, <label>...`, one energy-error series per method.
pub fn write_drift(path: &Path, times: &[f64], columns: &[(String, Vec<f64>)]) -> Result<()> {
    let mut w = create(path)?;
    let mut header = vec!["t".to_string()];
    header.extend(columns.iter().map(|(l, _)| l.clone()));
    w.write_record(&header)?;
    for (k, t) in times.iter().enumerate() {
        let mut row = vec![fmt_num(*t)];
        row.extend(columns.iter().map(|(_, c)| fmt_num(c[k])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// A numeric CSV read back: header and rows, `#` lines skipped.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn read_table(path: &Path) -> Result<Table> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().with_context(|| format!("bad number `{f}`")))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}

/// The value of the `# slope=` line of an order-study file.
pub fn read_slope(path: &Path) -> Result<f64> {
    let text = std::fs::read_to_string(path)?;
    let line = text
        .lines()
        .find_map(|l| l.strip_prefix("# slope="))
        .with_context(|| format!("no slope line in {}", path.display()))?;
    Ok(line.trim().parse()?)
}
