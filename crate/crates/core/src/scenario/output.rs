//! File emission: trajectory CSV, JSON reports, JSON Lines event logs and
//! Poincaré section tables.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::diagnostics::PoincareSection;
use crate::error::{Error, Result};
use crate::halfplane::restricted3_h0;
use crate::integrate::events::Event;
use crate::trajectory::Trajectory;

/// 17 significant digits, enough to reload every `f64` bit for bit.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        }
    }
    let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

/// Header `t, <state components>, <invariants>`, one row per sample.
pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let mut header = vec!["t".to_string()];
    header.extend(traj.state_names.iter().cloned());
    header.extend(traj.invariant_names.iter().cloned());
    w.write_record(&header)?;
    for ((t, y), inv) in traj.times.iter().zip(&traj.states).zip(&traj.invariants) {
        let row = std::iter::once(*t).chain(y.iter().copied()).chain(inv.iter().copied());
        w.write_record(row.map(fmt_f64))?;
    }
    w.flush()?;
    Ok(())
}

/// A numeric CSV table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

pub fn read_csv_table(path: &Path) -> Result<Table> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.trim().parse::<f64>().map_err(|_| {
                    Error::Validation(format!("{}: row {}: `{s}` is not a number", path.display(), k + 1))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// One JSON object per line.
pub fn write_events_jsonl(path: &Path, events: &[Event]) -> Result<()> {
    let mut w = create(path)?;
    for e in events {
        serde_json::to_writer(&mut w, e).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub const SECTION_HEADER: [&str; 8] = ["epsilon", "orbit", "k", "t", "x", "y", "H0", "dH0"];

/// Section points of several orbits, with `H₀` and its deviation from the
/// orbit's starting value on every row.
pub fn write_section_csv(path: &Path, sections: &[(usize, PoincareSection)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(SECTION_HEADER)?;
    for (orbit, sec) in sections {
        let st = sec.initial;
        let h_init = restricted3_h0(st.x, st.y, st.omega0)?;
        for (k, p) in sec.points.iter().enumerate() {
            let h = restricted3_h0(p[0], p[1], st.omega0)?;
            w.write_record([
                fmt_f64(st.epsilon),
                orbit.to_string(),
                (k + 1).to_string(),
                fmt_f64((k + 1) as f64 * sec.period),
                fmt_f64(p[0]),
                fmt_f64(p[1]),
                fmt_f64(h),
                fmt_f64(h - h_init),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, std::f64::consts::PI * 1e10, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
