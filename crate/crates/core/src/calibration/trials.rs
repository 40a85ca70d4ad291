//! Trial CSV ingestion and emission.
//!
//! Schema: header `time_s,stroke_mm,force_n,deflection_deg`, one sample per
//! row, `.` as decimal separator, LF or CRLF line endings. Deflection is
//! converted to radians on load and back to degrees on write.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TRIAL_HEADER: [&str; 4] = ["time_s", "stroke_mm", "force_n", "deflection_deg"];

/// One bench sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// Seconds since the start of the trial.
    pub time: f64,
    /// Tendon stroke at the actuator, mm.
    pub stroke: f64,
    /// Tendon tension, N.
    pub tension: f64,
    /// Joint deflection, radians.
    pub deflection: f64,
}

/// Parses trial CSV text. An empty document yields no records.
pub fn parse_trials(text: &str) -> Result<Vec<TrialRecord>> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let header = reader.headers()?.clone();
    if header.iter().ne(TRIAL_HEADER.iter().copied()) {
        return Err(Error::TrialRow {
            row: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                TRIAL_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut out: Vec<TrialRecord> = Vec::new();
    for result in reader.records() {
        let record = result?;
        let row = record.position().map_or(0, |p| p.line());
        if record.len() != TRIAL_HEADER.len() {
            return Err(Error::TrialRow {
                row,
                message: format!("expected 4 columns, found {}", record.len()),
            });
        }
        let mut values = [0.0; 4];
        for (col, (field, name)) in record.iter().zip(TRIAL_HEADER).enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::TrialRow {
                row,
                message: format!(
                    "column {} ({name}): cannot parse `{field}` as a number",
                    col + 1
                ),
            })?;
            if !v.is_finite() {
                return Err(Error::TrialRow {
                    row,
                    message: format!("column {} ({name}): value must be finite", col + 1),
                });
            }
            values[col] = v;
        }
        let [time, stroke, tension, deflection_deg] = values;
        if tension < 0.0 {
            return Err(Error::TrialRow {
                row,
                message: format!("column 3 (force_n): negative tension {tension}"),
            });
        }
        if let Some(prev) = out.last() {
            if time <= prev.time {
                return Err(Error::TrialRow {
                    row,
                    message: format!(
                        "column 1 (time_s): time {time} does not increase past {}",
                        prev.time
                    ),
                });
            }
        }
        out.push(TrialRecord {
            time,
            stroke,
            tension,
            deflection: deflection_deg.to_radians(),
        });
    }
    Ok(out)
}

pub fn load_trials(path: impl AsRef<Path>) -> Result<Vec<TrialRecord>> {
    parse_trials(&fs::read_to_string(path)?)
}

/// Writes records in the trial schema. Values use the shortest decimal form
/// that reads back to the same `f64`.
pub fn write_trials<W: Write>(mut out: W, records: &[TrialRecord]) -> Result<()> {
    writeln!(out, "{}", TRIAL_HEADER.join(","))?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{}",
            r.time,
            r.stroke,
            r.tension,
            r.deflection.to_degrees()
        )?;
    }
    Ok(())
}

pub fn trials_to_csv(records: &[TrialRecord]) -> String {
    let mut buf = Vec::new();
    write_trials(&mut buf, records).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("csv output is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_well_formed() {
        let text =
            "time_s,stroke_mm,force_n,deflection_deg\n0,0,0,0\n0.1,0.5,0.2,10\n0.2,1.0,0.4,20\n";
        let recs = parse_trials(text).unwrap();
        assert_eq!(recs.len(), 3);
        assert_eq!(recs[1].stroke, 0.5);
        assert!((recs[2].deflection - 20f64.to_radians()).abs() < 1e-15);
    }

    #[test]
    fn accepts_crlf() {
        let text = "time_s,stroke_mm,force_n,deflection_deg\r\n0,0,0,0\r\n1,1,1,1\r\n";
        assert_eq!(parse_trials(text).unwrap().len(), 2);
    }

    #[test]
    fn empty_file_is_empty_list() {
        assert!(parse_trials("").unwrap().is_empty());
        assert!(parse_trials("time_s,stroke_mm,force_n,deflection_deg\n")
            .unwrap()
            .is_empty());
    }

    #[test]
    fn negative_tension_names_row() {
        let text = "time_s,stroke_mm,force_n,deflection_deg\n0,0,0,0\n1,1,-0.5,3\n";
        match parse_trials(text).unwrap_err() {
            Error::TrialRow { row, message } => {
                assert_eq!(row, 3);
                assert!(message.contains("force_n"), "{message}");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn non_increasing_time_rejected() {
        let text = "time_s,stroke_mm,force_n,deflection_deg\n0,0,0,0\n0,1,0,3\n";
        assert!(matches!(
            parse_trials(text),
            Err(Error::TrialRow { row: 3, .. })
        ));
    }

    #[test]
    fn bad_cell_names_column() {
        let text = "time_s,stroke_mm,force_n,deflection_deg\n0,abc,0,0\n";
        match parse_trials(text).unwrap_err() {
            Error::TrialRow { row, message } => {
                assert_eq!(row, 2);
                assert!(message.contains("column 2"), "{message}");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn wrong_header_rejected() {
        let text = "t,stroke_mm,force_n,deflection_deg\n0,0,0,0\n";
        assert!(matches!(
            parse_trials(text),
            Err(Error::TrialRow { row: 1, .. })
        ));
    }

    #[test]
    fn short_row_rejected() {
        let text = "time_s,stroke_mm,force_n,deflection_deg\n0,0,0\n";
        assert!(parse_trials(text).unwrap_err().is_input_error());
    }
}
