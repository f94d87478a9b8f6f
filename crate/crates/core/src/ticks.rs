//! `time,price` tick files.
//!
//! Input has a header `time,price` (raw prices, mapped to natural logs) or
//! `time,logprice` (already logged). Times are fractions of the trading day.
//! Rows sharing a timestamp collapse to the last one. Output always writes
//! `time,logprice` with 17 significant digits so values survive a round trip.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};
use crate::series::ObservationSeries;

/// An ingested tick file.
#[derive(Clone, Debug, PartialEq)]
pub struct TickData {
    pub series: ObservationSeries,
    /// Rows dropped because a later row had the same timestamp.
    pub duplicates: usize,
}

/// Scientific notation with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// Parse ticks from a reader. `price_is_log` marks the price column as
/// already logged even under a `price` header.
pub fn read_ticks<R: Read>(reader: R, price_is_log: bool) -> Result<TickData> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| parse_err(1, e))?.clone();
    let names: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    let is_log = match names.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["time", "price"] => price_is_log,
        ["time", "logprice"] => true,
        [] | [""] => return Err(Error::EmptyInput),
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header time,price or time,logprice, found {:?}", headers.as_slice()),
            })
        }
    };

    let mut times: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut duplicates = 0;
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e)
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let t = parse_number(&record[0], line, "time")?;
        let p = parse_number(&record[1], line, "price")?;
        let y = if is_log {
            p
        } else if p > 0.0 {
            p.ln()
        } else {
            return Err(Error::Parse {
                line,
                message: format!("price {p} must be positive to take logs"),
            });
        };
        match times.last() {
            Some(&last) if last == t => {
                *values.last_mut().unwrap() = y;
                duplicates += 1;
            }
            Some(&last) if t < last => {
                return Err(Error::Parse {
                    line,
                    message: format!("time {t} precedes previous time {last}"),
                })
            }
            _ => {
                times.push(t);
                values.push(y);
            }
        }
    }
    if times.is_empty() {
        return Err(Error::EmptyInput);
    }
    if duplicates > 0 {
        warn!("collapsed {duplicates} duplicate timestamps to their last price");
    }
    let series = ObservationSeries::new(times, values)?;
    Ok(TickData { series, duplicates })
}

fn parse_err(line: u64, e: impl std::fmt::Display) -> Error {
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

fn parse_number(field: &str, line: u64, what: &str) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Error::Parse {
            line,
            message: format!("cannot parse {what} {field:?}"),
        }),
    }
}

pub fn read_ticks_path(path: impl AsRef<Path>, price_is_log: bool) -> Result<TickData> {
    let file = File::open(path.as_ref()).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    read_ticks(file, price_is_log)
}

/// Write `time,logprice` rows.
pub fn write_ticks<W: Write>(series: &ObservationSeries, writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "time,logprice").map_err(io_err)?;
    for (t, y) in series.times().iter().zip(series.values()) {
        writeln!(w, "{},{}", format_f64(*t), format_f64(*y)).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn write_ticks_path(series: &ObservationSeries, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path.as_ref()).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    write_ticks(series, file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_prices_as_logs() {
        let d = read_ticks("time,price\n0.0,100\n0.5,101\n1.0,100\n".as_bytes(), false).unwrap();
        assert_eq!(d.series.len(), 3);
        assert_eq!(d.duplicates, 0);
        assert_eq!(d.series.values(), &[100f64.ln(), 101f64.ln(), 100f64.ln()]);
        assert_eq!(d.series.times(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn duplicates_keep_last() {
        let d = read_ticks("time,price\n0.0,100\n0.5,101\n0.5,102\n0.9,100\n".as_bytes(), false).unwrap();
        assert_eq!(d.duplicates, 1);
        assert_eq!(d.series.times(), &[0.0, 0.5, 0.9]);
        assert_eq!(d.series.values()[1], 102f64.ln());
    }

    #[test]
    fn logprice_header_and_flag() {
        let d = read_ticks("time,logprice\n0,4.6\n1,4.7\n".as_bytes(), false).unwrap();
        assert_eq!(d.series.values(), &[4.6, 4.7]);
        let d = read_ticks("time,price\n0,4.6\n1,4.7\n".as_bytes(), true).unwrap();
        assert_eq!(d.series.values(), &[4.6, 4.7]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = read_ticks("time,price\n0,100\n0.5,abc\n".as_bytes(), false).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        let e = read_ticks("time,price\n0.5,100\n0.2,100\n".as_bytes(), false).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        let e = read_ticks("time,price\n0,-1\n".as_bytes(), false).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e:?}");
        let e = read_ticks("time,volume\n0,1\n".as_bytes(), false).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }), "{e:?}");
    }

    #[test]
    fn empty_input() {
        assert_eq!(read_ticks("".as_bytes(), false).unwrap_err(), Error::EmptyInput);
        assert_eq!(read_ticks("time,price\n".as_bytes(), false).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn round_trip_is_exact() {
        let times: Vec<f64> = (0..50).map(|i| (i as f64 / 50.0).powf(1.3)).collect();
        let values: Vec<f64> = (0..50).map(|i| 4.6 + (i as f64 * 0.7).sin() * 1e-4).collect();
        let s = ObservationSeries::new(times, values).unwrap();
        let mut buf = Vec::new();
        write_ticks(&s, &mut buf).unwrap();
        let back = read_ticks(buf.as_slice(), false).unwrap();
        assert_eq!(back.series, s);
    }
}
