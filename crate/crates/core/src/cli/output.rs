//! Rows, verification reports and their CSV/JSON renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::ValueEnum;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Int(i64),
    Text(String),
    Flag(bool),
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Num(v) => format!("{v:.16e}"),
            Field::Int(v) => v.to_string(),
            Field::Text(s) => csv_text(s),
            Field::Flag(b) => b.to_string(),
        }
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Field::Num(v) => ser.serialize_f64(*v),
            Field::Int(v) => ser.serialize_i64(*v),
            Field::Text(s) => ser.serialize_str(s),
            Field::Flag(b) => ser.serialize_bool(*b),
        }
    }
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Num(v)
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as i64)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Text(v.to_string())
    }
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One output row with ordered columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(pub Vec<(String, Field)>);

impl Record {
    pub fn push(&mut self, key: &str, value: impl Into<Field>) {
        self.0.push((key.to_string(), value.into()));
    }

    pub fn has(&self, key: &str) -> bool {
        self.0.iter().any(|(k, _)| k == key)
    }
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = ser.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// Machine-readable outcome of one verification check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub params: BTreeMap<String, Field>,
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub rhs_re: f64,
    pub rhs_im: f64,
    pub gap: f64,
    pub tail_estimate: f64,
    pub pass: bool,
}

impl Report {
    pub fn new(
        command: &str,
        params: BTreeMap<String, Field>,
        lhs: Complex64,
        rhs: Complex64,
        gap: f64,
        tail: f64,
        tol: f64,
    ) -> Self {
        Self {
            command: command.to_string(),
            params,
            lhs_re: lhs.re,
            lhs_im: lhs.im,
            rhs_re: rhs.re,
            rhs_im: rhs.im,
            gap,
            tail_estimate: tail,
            pass: gap < tol,
        }
    }

    /// Failed check for a computation that raised a numerical error.
    pub fn failed(command: &str, mut params: BTreeMap<String, Field>, err: &crate::LameError) -> Self {
        params.insert("error".into(), Field::Text(err.to_string()));
        let nan = Complex64::new(f64::NAN, f64::NAN);
        Self::new(command, params, nan, nan, f64::NAN, f64::NAN, 0.0)
    }

    fn record(&self) -> Record {
        let mut r = Record::default();
        r.push("command", self.command.as_str());
        for (k, v) in &self.params {
            r.0.push((k.clone(), v.clone()));
        }
        r.push("lhs_re", self.lhs_re);
        r.push("lhs_im", self.lhs_im);
        r.push("rhs_re", self.rhs_re);
        r.push("rhs_im", self.rhs_im);
        r.push("gap", self.gap);
        r.push("tail_estimate", self.tail_estimate);
        r.push("pass", Field::Flag(self.pass));
        r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Table(Vec<Record>),
    Reports(Vec<Report>),
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match (self, format) {
            (Output::Table(rows), Format::Csv) => render_csv(rows),
            (Output::Reports(reps), Format::Csv) => render_csv(&reps.iter().map(Report::record).collect::<Vec<_>>()),
            (Output::Table(rows), Format::Json) => json(rows),
            (Output::Reports(reps), Format::Json) => json(reps),
        }
    }

    /// Summary line for verification output; `None` for plain tables.
    pub fn summary(&self, label: &str) -> Option<String> {
        let Output::Reports(reps) = self else { return None };
        let passed = reps.iter().filter(|r| r.pass).count();
        let max_gap = reps
            .iter()
            .map(|r| r.gap)
            .fold(0.0, |m: f64, g| if g.is_nan() { f64::NAN } else { m.max(g) });
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        Some(format!(
            "{verdict} {label}: {passed}/{} checks, max gap {max_gap:.3e}",
            reps.len()
        ))
    }

    pub fn passed(&self) -> bool {
        match self {
            Output::Table(_) => true,
            Output::Reports(reps) => !reps.is_empty() && reps.iter().all(|r| r.pass),
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("records serialize");
    s.push('\n');
    s
}

/// Header from the union of column names in first-seen order; missing cells are empty.
fn render_csv(rows: &[Record]) -> String {
    let mut cols: Vec<&str> = Vec::new();
    for r in rows {
        for (k, _) in &r.0 {
            if !cols.contains(&k.as_str()) {
                cols.push(k);
            }
        }
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}",
        cols.iter().map(|c| csv_text(c)).collect::<Vec<_>>().join(",")
    );
    for r in rows {
        let cells: Vec<String> = cols
            .iter()
            .map(|c| {
                r.0.iter()
                    .find(|(k, _)| k == c)
                    .map(|(_, v)| v.csv())
                    .unwrap_or_default()
            })
            .collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}
