//! Trajectory CSV: `epoch,split,loss,entropy,trace,n_points,provenance`,
//! one row per measurement, floats at full precision, `\n` newlines.

use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::{MeasurementRecord, TrajectoryRecord};
use crate::io::format_f64;
use crate::spectral::{CollectiveVariables, Provenance, Split};

pub const HEADER: &str = "epoch,split,loss,entropy,trace,n_points,provenance";

pub fn trajectory_to_csv(record: &TrajectoryRecord) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in &record.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.epoch,
            r.split,
            format_f64(r.loss),
            format_f64(r.cv.entropy),
            format_f64(r.cv.trace),
            r.cv.n_points,
            r.cv.provenance,
        ));
    }
    out
}

pub fn emit_trajectory_csv(record: &TrajectoryRecord, path: &Path) -> Result<()> {
    std::fs::write(path, trajectory_to_csv(record))?;
    Ok(())
}

fn parse_provenance(text: &str) -> Result<Provenance> {
    if text == "exact" {
        return Ok(Provenance::Exact);
    }
    let inner = text
        .strip_prefix("subsampled(")
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Format {
            offset: 0,
            message: format!("bad provenance `{text}`"),
        })?;
    let (m, s) = inner.split_once(',').ok_or_else(|| Error::Format {
        offset: 0,
        message: format!("bad provenance `{text}`"),
    })?;
    Ok(Provenance::Subsampled {
        m: m.trim().parse().map_err(|_| Error::Format {
            offset: 0,
            message: format!("bad provenance `{text}`"),
        })?,
        s: s.trim().parse().map_err(|_| Error::Format {
            offset: 0,
            message: format!("bad provenance `{text}`"),
        })?,
    })
}

/// Read back an emitted trajectory CSV (measurement rows only; the
/// config snapshot is not part of the CSV format).
pub fn parse_trajectory_csv(text: &str) -> Result<Vec<MeasurementRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == HEADER => {}
        other => {
            return Err(Error::Format {
                offset: 0,
                message: format!("bad csv header `{}`", other.unwrap_or("")),
            })
        }
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        // provenance may itself contain a comma: subsampled(m,s)
        if fields.len() < 7 {
            return Err(Error::Format {
                offset: i + 1,
                message: format!("expected 7 csv fields, got {}", fields.len()),
            });
        }
        let bad = |what: &str| Error::Format {
            offset: i + 1,
            message: format!("bad {what} in csv row"),
        };
        let epoch: usize = fields[0].parse().map_err(|_| bad("epoch"))?;
        let split = match fields[1] {
            "train" => Split::Train,
            "test" => Split::Test,
            _ => return Err(bad("split")),
        };
        let loss: f64 = fields[2].parse().map_err(|_| bad("loss"))?;
        let entropy: f64 = fields[3].parse().map_err(|_| bad("entropy"))?;
        let trace: f64 = fields[4].parse().map_err(|_| bad("trace"))?;
        let n_points: usize = fields[5].parse().map_err(|_| bad("n_points"))?;
        let provenance = parse_provenance(&fields[6..].join(","))?;
        records.push(MeasurementRecord {
            epoch,
            split,
            loss,
            cv: CollectiveVariables {
                entropy,
                trace,
                n_points,
                provenance,
                split,
                epoch,
            },
        });
    }
    Ok(records)
}
