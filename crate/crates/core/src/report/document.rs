//! Machine-readable report: one JSON schema, with CSV and Markdown renderings.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const REPORT_VERSION: &str = "1";

pub type Row = IndexMap<String, String>;

/// Builds a row from `(key, value)` pairs, dropping empty values.
pub fn row<K: ToString, V: ToString>(cells: impl IntoIterator<Item = (K, V)>) -> Row {
    cells
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .filter(|(_, v)| !v.is_empty())
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertions {
    pub passed: u64,
    pub failed: u64,
    pub skipped: u64,
}

/// Exact quantities are decimal strings (`num/den` when not integral); any
/// float appears only under a key ending in `approx6`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub version: String,
    pub command: String,
    pub params: IndexMap<String, String>,
    pub rows: Vec<Row>,
    pub assertions: Assertions,
    pub exact_values: IndexMap<String, String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Markdown),
            _ => Err(Error::invalid(format!("unknown format {s:?}; expected json, csv or md"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Markdown => "md",
        })
    }
}

impl ReportDocument {
    pub fn new(command: impl Into<String>) -> Self {
        ReportDocument {
            version: REPORT_VERSION.into(),
            command: command.into(),
            params: IndexMap::new(),
            rows: Vec::new(),
            assertions: Assertions::default(),
            exact_values: IndexMap::new(),
        }
    }

    pub fn param(&mut self, key: impl ToString, value: impl ToString) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn exact(&mut self, key: impl ToString, value: impl ToString) -> &mut Self {
        self.exact_values.insert(key.to_string(), value.to_string());
        self
    }

    /// Counts one assertion.
    pub fn check(&mut self, ok: bool) -> bool {
        if ok {
            self.assertions.passed += 1;
        } else {
            self.assertions.failed += 1;
        }
        ok
    }

    pub fn passed(&self) -> bool {
        self.assertions.failed == 0
    }

    /// Appends another document's rows, assertions and exact values.
    pub fn absorb(&mut self, other: ReportDocument) {
        self.rows.extend(other.rows);
        self.assertions.passed += other.assertions.passed;
        self.assertions.failed += other.assertions.failed;
        self.assertions.skipped += other.assertions.skipped;
        self.exact_values.extend(other.exact_values);
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Report(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Report(e.to_string()))
    }

    /// Column order: keys in order of first appearance across rows.
    pub fn columns(&self) -> Vec<String> {
        let mut cols: IndexMap<&str, ()> = IndexMap::new();
        for r in &self.rows {
            for k in r.keys() {
                cols.insert(k, ());
            }
        }
        cols.keys().map(|k| k.to_string()).collect()
    }

    /// Header row then one line per row; absent cells are empty.
    pub fn to_csv(&self) -> Result<String> {
        let cols = self.columns();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&cols).map_err(|e| Error::Report(e.to_string()))?;
        for r in &self.rows {
            let line: Vec<&str> = cols.iter().map(|c| r.get(c).map(String::as_str).unwrap_or("")).collect();
            w.write_record(&line).map_err(|e| Error::Report(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Report(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Report(e.to_string()))
    }

    /// Inverse of [`Self::to_csv`] on rows; empty cells are dropped.
    pub fn rows_from_csv(text: &str) -> Result<Vec<Row>> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> =
            r.headers().map_err(|e| Error::Report(e.to_string()))?.iter().map(String::from).collect();
        r.records()
            .map(|rec| {
                let rec = rec.map_err(|e| Error::Report(e.to_string()))?;
                Ok(row(header.iter().zip(rec.iter())))
            })
            .collect()
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("# {}\n\n", self.command);
        if !self.params.is_empty() {
            for (k, v) in &self.params {
                out.push_str(&format!("- {k}: `{v}`\n"));
            }
            out.push('\n');
        }
        let a = self.assertions;
        out.push_str(&format!("**assertions**: {} passed, {} failed, {} skipped\n\n", a.passed, a.failed, a.skipped));
        let cols = self.columns();
        if !cols.is_empty() {
            out.push_str(&format!("| {} |\n", cols.join(" | ")));
            out.push_str(&format!("|{}\n", " --- |".repeat(cols.len())));
            for r in &self.rows {
                let cells: Vec<String> =
                    cols.iter().map(|c| r.get(c).map(|v| v.replace('|', "\\|")).unwrap_or_default()).collect();
                out.push_str(&format!("| {} |\n", cells.join(" | ")));
            }
            out.push('\n');
        }
        if !self.exact_values.is_empty() {
            out.push_str("## exact values\n\n");
            for (k, v) in &self.exact_values {
                out.push_str(&format!("- {k} = `{v}`\n"));
            }
        }
        out
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
            Format::Markdown => Ok(self.to_markdown()),
        }
    }
}
