//! CSV ingestion and export.
//!
//! Files need a header row, ISO-8601 dates and `.` as the decimal point.
//! Empty cells and `NA`/`NaN` count as missing.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{mid_rate, DatedSeries, QuoteSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingPolicy {
    #[default]
    Reject,
    /// Drop every row with a missing value in a requested column.
    Drop,
}

/// Column names for rate files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateColumns {
    pub date: String,
    pub buy: String,
    pub sell: String,
    /// Used when the buy/sell pair is absent.
    pub level: String,
}

impl Default for RateColumns {
    fn default() -> Self {
        Self {
            date: "date".into(),
            buy: "buy".into(),
            sell: "sell".into(),
            level: "rate".into(),
        }
    }
}

/// A date column plus numeric columns, row-aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub dates: Vec<NaiveDate>,
    pub columns: Vec<Vec<f64>>,
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

/// Label for series read from `path`: the file stem.
pub fn stem_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| display(path))
}

fn is_missing(field: &str) -> bool {
    matches!(field, "" | "NA" | "na" | "NaN" | "nan" | "null")
}

pub fn headers(path: &Path) -> Result<Vec<String>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    Ok(reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect())
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Csv {
            path: display(path),
            line,
            message: format!("{kind:?}"),
        },
    }
}

/// Reads `date_column` and `columns` from a CSV file.
pub fn read_columns(path: &Path, date_column: &str, columns: &[&str], missing: MissingPolicy) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let find = |name: &str| {
        header.iter().position(|h| h == name).ok_or_else(|| Error::MissingColumn {
            path: display(path),
            column: name.to_string(),
            available: header.join(", "),
        })
    };
    let date_idx = find(date_column)?;
    let idx: Vec<usize> = columns.iter().map(|c| find(c)).collect::<Result<_>>()?;

    let mut dates = Vec::new();
    let mut values = vec![Vec::new(); columns.len()];
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let err = |message: String| Error::Csv {
            path: display(path),
            line,
            message,
        };
        let date_field = record.get(date_idx).unwrap_or("");
        let date: NaiveDate = date_field
            .parse()
            .map_err(|_| err(format!("cannot parse date `{date_field}` (expected YYYY-MM-DD)")))?;
        let mut row = Vec::with_capacity(idx.len());
        let mut skip = false;
        for (&i, name) in idx.iter().zip(columns) {
            let field = record.get(i).unwrap_or("");
            if is_missing(field) {
                match missing {
                    MissingPolicy::Reject => {
                        return Err(err(format!(
                            "missing value in column `{name}` (use --drop-missing to drop such rows)"
                        )))
                    }
                    MissingPolicy::Drop => {
                        skip = true;
                        break;
                    }
                }
            }
            let v: f64 = field
                .parse()
                .map_err(|_| err(format!("cannot parse `{field}` in column `{name}` as a number")))?;
            if !v.is_finite() {
                return Err(err(format!("non-finite value in column `{name}`")));
            }
            row.push(v);
        }
        if skip {
            continue;
        }
        if let Some(prev) = dates.last() {
            if date <= *prev {
                return Err(err(format!("date {date} does not follow {prev}; rows must be in increasing date order")));
            }
        }
        dates.push(date);
        for (col, v) in values.iter_mut().zip(row) {
            col.push(v);
        }
    }
    if dates.is_empty() {
        return Err(Error::Csv {
            path: display(path),
            line: 1,
            message: "no data rows".into(),
        });
    }
    Ok(Table { dates, columns: values })
}

pub fn load_series(path: &Path, date_column: &str, column: &str, missing: MissingPolicy) -> Result<DatedSeries> {
    let mut t = read_columns(path, date_column, &[column], missing)?;
    DatedSeries::new(stem_label(path), t.dates, t.columns.remove(0))
}

pub fn load_quotes(path: &Path, cols: &RateColumns, missing: MissingPolicy) -> Result<QuoteSeries> {
    let mut t = read_columns(path, &cols.date, &[&cols.buy, &cols.sell], missing)?;
    let sell = t.columns.pop().expect("two columns");
    let buy = t.columns.pop().expect("two columns");
    QuoteSeries::new(stem_label(path), t.dates, buy, sell)
}

/// Nominal rate series: the buy/sell midpoint when both columns exist,
/// otherwise the level column.
pub fn load_rates(path: &Path, cols: &RateColumns, missing: MissingPolicy) -> Result<DatedSeries> {
    let header = headers(path)?;
    let has = |c: &str| header.iter().any(|h| h == c);
    if has(&cols.buy) && has(&cols.sell) {
        mid_rate(&load_quotes(path, cols, missing)?)
    } else if has(&cols.level) {
        load_series(path, &cols.date, &cols.level, missing)
    } else {
        Err(Error::MissingColumn {
            path: display(path),
            column: format!("{}/{} or {}", cols.buy, cols.sell, cols.level),
            available: header.join(", "),
        })
    }
}

/// Writes `date,<names...>` with shortest round-trip number formatting.
pub fn write_columns(path: &Path, names: &[&str], dates: &[NaiveDate], columns: &[&[f64]]) -> Result<()> {
    if columns.len() != names.len() || columns.iter().any(|c| c.len() != dates.len()) {
        return Err(Error::invalid("column names, dates and values must line up"));
    }
    let mut out = std::io::BufWriter::new(File::create(path)?);
    writeln!(out, "date,{}", names.join(","))?;
    for (i, d) in dates.iter().enumerate() {
        write!(out, "{d}")?;
        for c in columns {
            write!(out, ",{}", c[i])?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn file(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn quotes_become_mid_rates() {
        let dir = tempfile::tempdir().unwrap();
        let p = file(&dir, "usd.csv", "date,buy,sell\n2020-03-09,84.90,84.95\n2020-03-10,0.77,0.79\n");
        let s = load_rates(&p, &RateColumns::default(), MissingPolicy::Reject).unwrap();
        assert_eq!(s.label(), "usd");
        assert!((s.values()[0] - 84.925).abs() < 1e-12);
        assert!((s.values()[1] - 0.78).abs() < 1e-12);
    }

    #[test]
    fn level_column_fallback() {
        let dir = tempfile::tempdir().unwrap();
        let p = file(&dir, "eur.csv", "date,rate\n2020-03-09,1.5\n2020-03-10,1.6\n");
        let s = load_rates(&p, &RateColumns::default(), MissingPolicy::Reject).unwrap();
        assert_eq!(s.values(), &[1.5, 1.6]);
    }

    #[test]
    fn missing_column_lists_available() {
        let dir = tempfile::tempdir().unwrap();
        let p = file(&dir, "x.csv", "date,open,close\n2020-03-09,1,2\n");
        let e = load_series(&p, "date", "cases", MissingPolicy::Reject).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("cases") && msg.contains("date, open, close"), "{msg}");
        assert!(load_rates(&p, &RateColumns::default(), MissingPolicy::Reject).is_err());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let p = file(&dir, "c.csv", "date,cases\n2020-03-09,1\n2020-03-10,abc\n");
        match load_series(&p, "date", "cases", MissingPolicy::Reject) {
            Err(Error::Csv { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("abc"));
            }
            other => panic!("{other:?}"),
        }
        let p = file(&dir, "d.csv", "date,cases\n09/03/2020,1\n");
        assert!(matches!(load_series(&p, "date", "cases", MissingPolicy::Reject), Err(Error::Csv { line: 2, .. })));
        let p = file(&dir, "e.csv", "date,cases\n2020-03-10,1\n2020-03-09,2\n");
        assert!(matches!(load_series(&p, "date", "cases", MissingPolicy::Reject), Err(Error::Csv { line: 3, .. })));
    }

    #[test]
    fn missing_values_rejected_or_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let p = file(&dir, "c.csv", "date,cases\n2020-03-09,1\n2020-03-10,\n2020-03-11,NA\n2020-03-12,4\n");
        assert!(matches!(load_series(&p, "date", "cases", MissingPolicy::Reject), Err(Error::Csv { line: 3, .. })));
        let s = load_series(&p, "date", "cases", MissingPolicy::Drop).unwrap();
        assert_eq!(s.values(), &[1.0, 4.0]);
        assert_eq!(s.dates()[1], "2020-03-12".parse::<NaiveDate>().unwrap());
    }

    #[test]
    fn write_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.csv");
        let dates = crate::timeseries::daily_dates("2021-01-01".parse().unwrap(), 3);
        let a = [0.1, 1.0 / 3.0, -7.4321e-7];
        let b = [1e300, 2.5, f64::MIN_POSITIVE];
        write_columns(&p, &["a", "b"], &dates, &[&a, &b]).unwrap();
        let t = read_columns(&p, "date", &["b", "a"], MissingPolicy::Reject).unwrap();
        assert_eq!(t.dates, dates);
        assert_eq!(t.columns[0], b);
        assert_eq!(t.columns[1], a);
    }
}
