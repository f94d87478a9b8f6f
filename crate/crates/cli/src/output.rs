use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use noisemoments::ticks::format_f64;
use noisemoments::{Estimate, Flag};
use serde::Serialize;

use crate::Failure;

/// One line of a per-lag table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub j: usize,
    pub estimate: f64,
    pub variance: f64,
    pub z: Option<f64>,
    pub p_two: Option<f64>,
    pub p_one: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub flags: Vec<Flag>,
}

impl Row {
    pub fn new(j: usize, e: &Estimate) -> Self {
        Row {
            j,
            estimate: e.point,
            variance: e.variance_est,
            z: e.z,
            p_two: e.p_two_sided,
            p_one: e.p_one_sided,
            ci_lo: e.ci.map(|c| c.0),
            ci_hi: e.ci.map(|c| c.1),
            flags: e.flags.clone(),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.flags
            .iter()
            .any(|f| matches!(f, Flag::NonPositiveVariance | Flag::EmptySum))
    }
}

fn cell(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format_f64(v),
        _ => String::new(),
    }
}

pub const TABLE_HEADER: &str = "j,estimate,variance,z,p_two,p_one,ci_lo,ci_hi,flags";

pub fn write_table(path: &Path, rows: &[Row]) -> Result<(), Failure> {
    let mut w = BufWriter::new(create(path)?);
    writeln!(w, "{TABLE_HEADER}")?;
    for r in rows {
        let flags: Vec<&str> = r.flags.iter().map(|f| f.as_str()).collect();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.j,
            cell(Some(r.estimate)),
            cell(Some(r.variance)),
            cell(r.z),
            cell(r.p_two),
            cell(r.p_one),
            cell(r.ci_lo),
            cell(r.ci_hi),
            flags.join("|")
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn create(path: &Path) -> Result<File, Failure> {
    File::create(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut w = BufWriter::new(create(path)?);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Failure::Data(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
