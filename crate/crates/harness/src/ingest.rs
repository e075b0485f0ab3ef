//! Reading intraday CSV files into one increment series per day.
//!
//! Each row carries a day key, a time stamp and the two observed coordinates.
//! Rows of a day must be contiguous and increasing in time. Every day is put on
//! the unit horizon, so `Δ = 1/n` for a day with `n` increments.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use cojump::IncrementSeries;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Levels,
    LogLevels,
    Returns,
}

impl InputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "levels" => Some(InputFormat::Levels),
            "log-levels" => Some(InputFormat::LogLevels),
            "returns" => Some(InputFormat::Returns),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Columns {
    pub day: String,
    pub time: String,
    pub x1: String,
    pub x2: String,
}

impl Default for Columns {
    fn default() -> Self {
        Self { day: "day".into(), time: "time".into(), x1: "x1".into(), x2: "x2".into() }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("missing column {0:?}")]
    MissingColumn(String),

    #[error("row {row}: {message}")]
    Parse { row: u64, message: String },

    #[error("day {day}, row {row}: spacing {spacing} deviates from the modal spacing {expected} by more than 1%")]
    Gap { day: String, row: u64, spacing: f64, expected: f64 },

    #[error("no data rows")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DayData {
    pub label: String,
    pub times: Vec<f64>,
    pub series: IncrementSeries<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RejectedDay {
    pub label: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ingested {
    pub days: Vec<DayData>,
    pub rejected: Vec<RejectedDay>,
}

struct RawDay {
    label: String,
    rows: Vec<u64>,
    times: Vec<f64>,
    values: Vec<[f64; 2]>,
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize, IngestError> {
    headers.iter().position(|h| h.trim() == name).ok_or_else(|| IngestError::MissingColumn(name.into()))
}

fn number(record: &csv::StringRecord, idx: usize, row: u64, name: &str) -> Result<f64, IngestError> {
    let raw = record.get(idx).unwrap_or("").trim();
    let v: f64 = raw
        .parse()
        .map_err(|_| IngestError::Parse { row, message: format!("column {name}: cannot parse {raw:?} as a number") })?;
    if !v.is_finite() {
        return Err(IngestError::Parse { row, message: format!("column {name}: non-finite value") });
    }
    Ok(v)
}

/// Most frequent value after rounding to 9 significant digits; ties go to the smallest.
fn modal(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut counts: BTreeMap<String, (usize, f64)> = BTreeMap::new();
    for v in values {
        counts.entry(format!("{v:.8e}")).or_insert((0, v)).0 += 1;
    }
    counts.into_values().max_by(|a, b| a.0.cmp(&b.0).then(b.1.total_cmp(&a.1))).map(|(_, v)| v)
}

pub fn read_days<R: Read>(input: R, format: InputFormat, columns: &Columns) -> Result<Ingested, IngestError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers().map_err(|e| IngestError::Parse { row: 1, message: e.to_string() })?.clone();
    let (ci_day, ci_time) = (column(&headers, &columns.day)?, column(&headers, &columns.time)?);
    let (ci_x1, ci_x2) = (column(&headers, &columns.x1)?, column(&headers, &columns.x2)?);

    let mut raw: Vec<RawDay> = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| IngestError::Parse {
            row: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let row = record.position().map(|p| p.line()).unwrap_or(0);
        let day = record.get(ci_day).unwrap_or("").trim().to_string();
        if day.is_empty() {
            return Err(IngestError::Parse { row, message: format!("empty {} value", columns.day) });
        }
        let t = number(&record, ci_time, row, &columns.time)?;
        let x = [number(&record, ci_x1, row, &columns.x1)?, number(&record, ci_x2, row, &columns.x2)?];
        if format == InputFormat::LogLevels && (x[0] <= 0.0 || x[1] <= 0.0) {
            return Err(IngestError::Parse { row, message: "log-levels need positive values".into() });
        }
        match raw.last_mut() {
            Some(d) if d.label == day => {
                if t <= *d.times.last().unwrap() {
                    return Err(IngestError::Parse { row, message: format!("time {t} is not increasing") });
                }
                d.rows.push(row);
                d.times.push(t);
                d.values.push(x);
            }
            _ => {
                if raw.iter().any(|d| d.label == day) {
                    return Err(IngestError::Parse { row, message: format!("rows of day {day} are not contiguous") });
                }
                raw.push(RawDay { label: day, rows: vec![row], times: vec![t], values: vec![x] });
            }
        }
    }
    if raw.is_empty() {
        return Err(IngestError::Empty);
    }

    let expected_rows = modal(raw.iter().map(|d| d.times.len() as f64)).unwrap() as usize;
    let spacing = modal(raw.iter().flat_map(|d| d.times.windows(2).map(|w| w[1] - w[0])));
    let mut out = Ingested::default();
    for d in raw {
        if d.times.len() < expected_rows {
            out.rejected.push(RejectedDay {
                label: d.label,
                reason: format!("missing rows: {} of {expected_rows}", d.times.len()),
            });
            continue;
        }
        if let Some(h) = spacing {
            for (i, w) in d.times.windows(2).enumerate() {
                let s = w[1] - w[0];
                if (s - h).abs() > 0.01 * h {
                    return Err(IngestError::Gap { day: d.label, row: d.rows[i + 1], spacing: s, expected: h });
                }
            }
        }
        let increments: Vec<[f64; 2]> = match format {
            InputFormat::Returns => d.values.clone(),
            InputFormat::Levels => d.values.windows(2).map(|w| [w[1][0] - w[0][0], w[1][1] - w[0][1]]).collect(),
            InputFormat::LogLevels => d
                .values
                .windows(2)
                .map(|w| [w[1][0].ln() - w[0][0].ln(), w[1][1].ln() - w[0][1].ln()])
                .collect(),
        };
        if increments.is_empty() {
            out.rejected.push(RejectedDay { label: d.label, reason: "no increments".into() });
            continue;
        }
        let series = IncrementSeries::from_increments(1.0, increments)
            .map_err(|e| IngestError::Parse { row: d.rows[0], message: e.to_string() })?;
        out.days.push(DayData { label: d.label, times: d.times, series });
    }
    Ok(out)
}

pub fn ingest_csv(path: &Path, format: InputFormat, columns: &Columns) -> Result<Ingested, IngestError> {
    let file = std::fs::File::open(path).map_err(|e| IngestError::Io { path: path.into(), source: e })?;
    read_days(std::io::BufReader::new(file), format, columns)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str, format: InputFormat) -> Result<Ingested, IngestError> {
        read_days(text.as_bytes(), format, &Columns::default())
    }

    #[test]
    fn level_and_log_level_differences() {
        let text = "day,time,x1,x2\nd1,0,100,50\nd1,5,101,51\nd1,10,100.5,49\n";
        let lv = read(text, InputFormat::Levels).unwrap();
        assert_eq!(lv.days.len(), 1);
        let inc = lv.days[0].series.increments();
        assert_eq!(inc.iter().map(|x| x[0]).collect::<Vec<_>>(), vec![1.0, -0.5]);
        assert_eq!(lv.days[0].series.delta(), 0.5);

        let lg = read(text, InputFormat::LogLevels).unwrap();
        let inc = lg.days[0].series.increments();
        assert!((inc[0][0] - (101f64.ln() - 100f64.ln())).abs() < 1e-15);
        assert!((inc[1][1] - (49f64.ln() - 51f64.ln())).abs() < 1e-15);

        let rt = read(text, InputFormat::Returns).unwrap();
        assert_eq!(rt.days[0].series.len(), 3);
    }

    #[test]
    fn parse_error_reports_row() {
        let text = "day,time,x1,x2\nd1,0,1,1\nd1,1,oops,1\n";
        match read(text, InputFormat::Levels) {
            Err(IngestError::Parse { row, .. }) => assert_eq!(row, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(read("day,time,x1\n", InputFormat::Levels), Err(IngestError::MissingColumn(_))));
        assert!(matches!(read("day,time,x1,x2\n", InputFormat::Levels), Err(IngestError::Empty)));
        let split = "day,time,x1,x2\na,0,1,1\nb,0,1,1\na,1,1,1\n";
        assert!(matches!(read(split, InputFormat::Levels), Err(IngestError::Parse { row: 4, .. })));
    }

    #[test]
    fn gaps_and_missing_rows() {
        let mut text = String::from("day,time,x1,x2\n");
        for d in ["a", "b"] {
            for i in 0..5 {
                text.push_str(&format!("{d},{},1,1\n", i * 60));
            }
        }
        text.push_str("c,0,1,1\nc,60,1,1\nc,120,1,1\n");
        let got = read(&text, InputFormat::Levels).unwrap();
        assert_eq!(got.days.len(), 2);
        assert_eq!(got.rejected.len(), 1);
        assert_eq!(got.rejected[0].label, "c");

        // within 1% of the modal spacing is accepted, beyond is a gap
        let ok = text.replace("b,120,", "b,120.5,");
        assert!(read(&ok, InputFormat::Levels).is_ok());
        let bad = text.replace("b,120,", "b,125,");
        match read(&bad, InputFormat::Levels) {
            Err(IngestError::Gap { day, row, .. }) => assert_eq!((day.as_str(), row), ("b", 9)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn format_names() {
        assert_eq!(InputFormat::parse("LOG_LEVELS"), Some(InputFormat::LogLevels));
        assert_eq!(InputFormat::parse("returns"), Some(InputFormat::Returns));
        assert_eq!(InputFormat::parse("prices"), None);
    }
}
