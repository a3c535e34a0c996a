//! Machine-readable output: JSON-lines records, `key=value` text and CSV.
//!
//! CSV schemas (column order is part of the format):
//!
//! | table  | columns                                          |
//! |--------|--------------------------------------------------|
//! | tails  | `r,empirical,bound,radius_valid,stderr`          |
//! | couple | `step,pair,d_H`                                  |
//! | power  | `tau,stat_reject_rate,gate_reject_rate,reps`     |

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::dynamics::HammingTraceRow;
use crate::error::{Error, Result};

/// One row of the coupling trace; `pair` is `i-j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoupleCsvRow {
    pub step: u64,
    pub pair: String,
    #[serde(rename = "d_H")]
    pub d_h: usize,
}

pub fn couple_rows(trace: &[HammingTraceRow]) -> Vec<CoupleCsvRow> {
    trace
        .iter()
        .map(|r| CoupleCsvRow {
            step: r.step,
            pair: format!("{}-{}", r.i, r.j),
            d_h: r.distance,
        })
        .collect()
}

pub fn write_csv_to<T: Serialize, W: Write>(rows: &[T], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv<T: Serialize>(rows: &[T], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(rows, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

/// One compact JSON object per line.
pub fn write_records_to<T: Serialize, W: Write>(records: &[T], mut out: W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_records<T: Serialize>(records: &[T], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_records_to(records, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn read_records<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let path = path.as_ref();
    let label = path.display().to_string();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::parse(&label, i + 1, e.to_string()))?);
    }
    Ok(out)
}

/// `key=value` lines for the top-level fields of `record`, sorted by key.
/// Nested values are written as compact JSON.
pub fn key_value_text<T: Serialize>(record: &T) -> String {
    let value = serde_json::to_value(record).expect("report types serialize");
    match value {
        serde_json::Value::Object(map) => map
            .iter()
            .map(|(k, v)| match v {
                serde_json::Value::String(s) => format!("{k}={s}\n"),
                other => format!("{k}={other}\n"),
            })
            .collect(),
        other => format!("value={other}\n"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statistics::TailRow;
    use crate::testing::PowerRow;

    fn header<T: Serialize>(row: T) -> String {
        let mut buf = Vec::new();
        write_csv_to(&[row], &mut buf).unwrap();
        String::from_utf8(buf).unwrap().lines().next().unwrap().to_string()
    }

    #[test]
    fn csv_headers() {
        let tail = TailRow {
            r: 1.0,
            empirical: 0.5,
            bound: 1.0,
            radius_valid: false,
            stderr: 0.1,
        };
        assert_eq!(header(tail), "r,empirical,bound,radius_valid,stderr");
        let power = PowerRow {
            tau: 0.1,
            stat_reject_rate: 0.5,
            gate_reject_rate: 0.0,
            reps: 10,
        };
        assert_eq!(header(power), "tau,stat_reject_rate,gate_reject_rate,reps");
        let couple = couple_rows(&[HammingTraceRow {
            step: 3,
            i: 0,
            j: 2,
            distance: 4,
        }]);
        assert_eq!(header(couple[0].clone()), "step,pair,d_H");
        let mut buf = Vec::new();
        write_csv_to(&couple, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "step,pair,d_H\n3,0-2,4\n");
    }

    #[test]
    fn records_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        let rows = vec![
            PowerRow {
                tau: 0.25,
                stat_reject_rate: 0.1 + 0.2,
                gate_reject_rate: 0.0,
                reps: 3,
            },
            PowerRow {
                tau: 1.0,
                stat_reject_rate: 1.0,
                gate_reject_rate: 1.0,
                reps: 3,
            },
        ];
        write_records(&rows, &path).unwrap();
        let back: Vec<PowerRow> = read_records(&path).unwrap();
        assert_eq!(back, rows);
        let first = std::fs::read(&path).unwrap();
        write_records(&rows, &path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), first);
    }

    #[test]
    fn key_value_lines() {
        let row = PowerRow {
            tau: 0.5,
            stat_reject_rate: 1.0,
            gate_reject_rate: 0.25,
            reps: 4,
        };
        assert_eq!(
            key_value_text(&row),
            "gate_reject_rate=0.25\nreps=4\nstat_reject_rate=1.0\ntau=0.5\n"
        );
    }

    #[test]
    fn io_errors_name_the_path() {
        let err = write_csv::<PowerRow>(&[], "/nonexistent-dir/x.csv").unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
