//! Tabular reports rendered as aligned text, long-format CSV or JSON.
//!
//! All three renderings print numbers through [`format_number`] (JSON uses
//! the shortest round-trip form), so a value parses to the same `f64`
//! whichever format it is read from.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub tables: Vec<Table>,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub label: String,
    pub cells: Vec<Cell>,
}

mod nullable {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// Non-finite numbers serialize as JSON `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Cell {
    Number {
        #[serde(with = "nullable")]
        value: f64,
    },
    Text {
        text: String,
    },
    /// Test statistic with its p-value.
    Stat {
        #[serde(with = "nullable")]
        value: f64,
        #[serde(with = "nullable")]
        p_value: f64,
    },
    /// Coefficient with standard error, z-statistic and p-value.
    Estimate {
        #[serde(with = "nullable")]
        value: f64,
        #[serde(with = "nullable")]
        std_error: f64,
        #[serde(with = "nullable")]
        z: f64,
        #[serde(with = "nullable")]
        p_value: f64,
    },
    Empty,
}

impl Cell {
    pub fn number(value: f64) -> Self {
        Cell::Number { value }
    }

    pub fn text(text: impl Into<String>) -> Self {
        Cell::Text { text: text.into() }
    }

    pub fn stat(value: f64, p_value: f64) -> Self {
        Cell::Stat { value, p_value }
    }

    pub fn estimate(value: f64, std_error: f64, z: f64, p_value: f64) -> Self {
        Cell::Estimate {
            value,
            std_error,
            z,
            p_value,
        }
    }

    /// Main numeric value, if any.
    pub fn value(&self) -> Option<f64> {
        match self {
            Cell::Number { value } | Cell::Stat { value, .. } | Cell::Estimate { value, .. } => Some(*value),
            _ => None,
        }
    }

    fn display(&self) -> String {
        match self {
            Cell::Number { value } => format_number(*value),
            Cell::Text { text } => text.clone(),
            Cell::Stat { value, p_value } => format!("{} ({})", format_number(*value), format_number(*p_value)),
            Cell::Estimate { value, z, p_value, .. } => format!(
                "{} (z={}, p={})",
                format_number(*value),
                format_number(*z),
                format_number(*p_value)
            ),
            Cell::Empty => String::new(),
        }
    }
}

impl Table {
    pub fn new(title: impl Into<String>, columns: Vec<String>) -> Self {
        Self {
            title: title.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, label: impl Into<String>, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(Row {
            label: label.into(),
            cells,
        });
    }

    pub fn row(&self, label: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// Cell at `(row label, column name)`.
    pub fn cell(&self, row: &str, column: &str) -> Option<&Cell> {
        let j = self.columns.iter().position(|c| c == column)?;
        self.row(row)?.cells.get(j)
    }
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            tables: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn table(&self, title: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.title == title)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => self.to_text(),
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, t) in self.tables.iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.cells.iter().map(Cell::display).collect()).collect();
            let label_w = t.rows.iter().map(|r| r.label.chars().count()).max().unwrap_or(0);
            let widths: Vec<usize> = t
                .columns
                .iter()
                .enumerate()
                .map(|(j, c)| cells.iter().map(|r| r[j].chars().count()).chain([c.chars().count()]).max().unwrap_or(0))
                .collect();
            let total = label_w + widths.iter().map(|w| w + 2).sum::<usize>();
            let _ = writeln!(out, "{}", t.title);
            let _ = writeln!(out, "{}", "=".repeat(total.max(t.title.chars().count())));
            let _ = write!(out, "{:label_w$}", "");
            for (c, w) in t.columns.iter().zip(&widths) {
                let _ = write!(out, "  {c:>w$}");
            }
            out.push('\n');
            let _ = writeln!(out, "{}", "-".repeat(total));
            for (r, row) in t.rows.iter().zip(&cells) {
                let _ = write!(out, "{:label_w$}", r.label);
                for (c, w) in row.iter().zip(&widths) {
                    let _ = write!(out, "  {c:>w$}");
                }
                out.push('\n');
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }

    /// One line per cell: `table,row,column,value,std_error,z,p_value,text`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fmt = |v: f64| format_number(v);
        w.write_record(["table", "row", "column", "value", "std_error", "z", "p_value", "text"])
            .expect("in-memory write");
        for t in &self.tables {
            for r in &t.rows {
                for (c, cell) in t.columns.iter().zip(&r.cells) {
                    let rest: [String; 5] = match cell {
                        Cell::Number { value } => [fmt(*value), "".into(), "".into(), "".into(), "".into()],
                        Cell::Text { text } => ["".into(), "".into(), "".into(), "".into(), text.clone()],
                        Cell::Stat { value, p_value } => [fmt(*value), "".into(), "".into(), fmt(*p_value), "".into()],
                        Cell::Estimate {
                            value,
                            std_error,
                            z,
                            p_value,
                        } => [fmt(*value), fmt(*std_error), fmt(*z), fmt(*p_value), "".into()],
                        Cell::Empty => Default::default(),
                    };
                    let mut rec = vec![t.title.clone(), r.label.clone(), c.clone()];
                    rec.extend(rest);
                    w.write_record(&rec).expect("in-memory write");
                }
            }
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Shortest round-trip decimal; scientific with a two-digit exponent below
/// 1e-4 in magnitude (and at or above 1e15). `NA` for non-finite values.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "NA".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let s = format!("{x:E}");
    let (mantissa, exp) = s.split_once('E').expect("exponent present");
    let (sign, digits) = match exp.strip_prefix('-') {
        Some(d) => ("-", d),
        None => ("+", exp),
    };
    format!("{mantissa}E{sign}{digits:0>2}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(7.4321e-7), "7.4321E-07");
        assert_eq!(format_number(-2.76e-11), "-2.76E-11");
        assert_eq!(format_number(1.5e-120), "1.5E-120");
        assert_eq!(format_number(0.4910), "0.491");
        assert_eq!(format_number(7336.95), "7336.95");
        assert_eq!(format_number(1e-4), "0.0001");
        assert_eq!(format_number(2e20), "2E+20");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(212.0), "212");
        assert_eq!(format_number(f64::NAN), "NA");
    }

    proptest! {
        #[test]
        fn formatting_round_trips(x in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
            let back: f64 = format_number(x).parse().unwrap();
            prop_assert!(back == x || (x == 0.0 && back == 0.0));
        }
    }

    fn sample() -> Report {
        let mut t = Table::new("Fit", vec!["usd".into(), "eur".into()]);
        t.push("alpha1", vec![Cell::estimate(5.86e-9, 1e-9, 5.86, 4.6e-9), Cell::estimate(-0.3, 0.1, -3.0, 0.0027)]);
        t.push("Serial correlation", vec![Cell::text("No"), Cell::text("Yes")]);
        t.push("LB(10)", vec![Cell::stat(12.5, 0.25), Cell::stat(f64::NAN, f64::NAN)]);
        t.push("Observations", vec![Cell::number(212.0), Cell::Empty]);
        let mut r = Report::new("fit");
        r.tables.push(t);
        r.notes.push("example".into());
        r
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back.tables[0].cell("alpha1", "usd"), r.tables[0].cell("alpha1", "usd"));
        assert!(back.tables[0].cell("LB(10)", "eur").unwrap().value().unwrap().is_nan());
        assert_eq!(back.tables[0].rows.len(), 4);
    }

    #[test]
    fn text_and_csv_contain_formatted_values() {
        let r = sample();
        let text = r.to_text();
        assert!(text.contains("5.86E-09 (z=5.86, p=4.6E-09)"));
        assert!(text.contains("12.5 (0.25)"));
        let csv = r.to_csv();
        assert!(csv.lines().any(|l| l == "Fit,alpha1,usd,5.86E-09,1E-09,5.86,4.6E-09,"));
        assert!(csv.lines().any(|l| l == "Fit,Serial correlation,eur,,,,,Yes"));
        assert_eq!(csv.lines().count(), 1 + 8);
    }
}
