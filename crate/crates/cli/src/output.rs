use std::fmt::Write as _;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};
use yamabe_core::exactnum::CERTIFICATE_DIGITS;
use yamabe_core::CertifiedInterval;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputConfig {
    pub format: Format,
    pub precision_bits: u32,
    pub sig_digits: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            format: Format::Table,
            precision_bits: 256,
            sig_digits: 10,
        }
    }
}

/// A table cell. CSV and JSON render the same text for every variant, so the
/// two formats carry identical numbers.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    /// Decimal string from a certified value.
    Dec(String),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => v.to_string(),
            Cell::Dec(s) | Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    pub fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Dec(s) | Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Tabular {
    /// `(json key, display header)`.
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Tabular {
    pub fn new(columns: &[(&str, &str)]) -> Self {
        Self {
            columns: columns
                .iter()
                .map(|(k, h)| (k.to_string(), h.to_string()))
                .collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|(_, h)| h.as_str()))
            .expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|((k, _), c)| (k.clone(), c.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    /// Space-padded columns, numbers right-aligned.
    pub fn to_aligned(&self) -> String {
        let texts: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::text).collect())
            .collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, (_, h))| {
                texts
                    .iter()
                    .map(|r| r[i].chars().count())
                    .chain([h.chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        let line = |out: &mut String, cells: Vec<(String, bool)>| {
            let parts: Vec<String> = cells
                .into_iter()
                .zip(&widths)
                .map(|((s, right), &w)| {
                    if right {
                        format!("{s:>w$}")
                    } else {
                        format!("{s:<w$}")
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(
            &mut out,
            self.columns.iter().map(|(_, h)| (h.clone(), false)).collect(),
        );
        let rule: Vec<(String, bool)> = widths.iter().map(|&w| ("-".repeat(w), false)).collect();
        line(&mut out, rule);
        for (row, text) in self.rows.iter().zip(texts) {
            let cells = row
                .iter()
                .zip(text)
                .map(|(c, s)| {
                    let right = matches!(c, Cell::Int(_) | Cell::Float(_) | Cell::Dec(_));
                    (s, right)
                })
                .collect();
            line(&mut out, cells);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub id: String,
    pub lo: String,
    pub hi: String,
    pub precision_bits: u32,
}

impl Certificate {
    pub fn new(id: impl Into<String>, v: &CertifiedInterval, sig_digits: usize) -> Self {
        let c = v.certificate(sig_digits.max(CERTIFICATE_DIGITS));
        Self {
            id: id.into(),
            lo: c.lo,
            hi: c.hi,
            precision_bits: c.precision_bits,
        }
    }
}

/// Everything a command produces before formatting.
#[derive(Clone, Debug)]
pub struct CommandOutput {
    pub command: String,
    pub params: Value,
    /// Rows for the CSV and table formats.
    pub tabular: Tabular,
    /// JSON `results`; defaults to the rows of `tabular`.
    pub results: Option<Value>,
    pub certificates: Vec<Certificate>,
    /// Replaces the aligned table in the table format.
    pub human: Option<String>,
    /// Lines appended after the table in the table format.
    pub footer: Vec<String>,
    /// Messages for standard error.
    pub diagnostics: Vec<String>,
    pub code: i32,
}

impl CommandOutput {
    pub fn new(command: &str, params: Value, tabular: Tabular) -> Self {
        Self {
            command: command.into(),
            params,
            tabular,
            results: None,
            certificates: Vec::new(),
            human: None,
            footer: Vec::new(),
            diagnostics: Vec::new(),
            code: 0,
        }
    }

    pub fn json(&self) -> Value {
        json!({
            "command": self.command,
            "params": self.params,
            "results": self.results.clone().unwrap_or_else(|| self.tabular.to_json()),
            "certificates": self.certificates,
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.tabular.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json()).expect("serializable");
                s.push('\n');
                s
            }
            Format::Table => {
                let mut s = self
                    .human
                    .clone()
                    .unwrap_or_else(|| self.tabular.to_aligned());
                for f in &self.footer {
                    s.push_str(f);
                    s.push('\n');
                }
                s
            }
        }
    }
}

/// `v` with `digits` significant digits, without an exponent for moderate sizes.
pub fn sig(v: f64, digits: usize) -> String {
    if !v.is_finite() || v == 0.0 {
        return v.to_string();
    }
    let e = v.abs().log10().floor() as i32;
    if (-4..15).contains(&e) {
        let decimals = (digits as i32 - 1 - e).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{:.*e}", digits.saturating_sub(1), v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Tabular {
        let mut t = Tabular::new(&[("n", "n"), ("v", "Lambda_{n,2}"), ("w", "w")]);
        t.push(vec![Cell::Int(7), Cell::Dec("74.50435028".into()), Cell::Empty]);
        t.push(vec![Cell::Int(8), Cell::Dec("92.2427837".into()), Cell::Float(0.5)]);
        t
    }

    #[test]
    fn csv_quotes_commas() {
        let csv = sample().to_csv();
        assert_eq!(
            csv,
            "n,\"Lambda_{n,2}\",w\n7,74.50435028,\n8,92.2427837,0.5\n"
        );
    }

    #[test]
    fn json_rows_match_csv_cells() {
        let t = sample();
        let j = t.to_json();
        assert_eq!(j[0]["v"], "74.50435028");
        assert_eq!(j[0]["w"], Value::Null);
        assert_eq!(j[1]["w"], 0.5);
        assert_eq!(j[1]["n"], 8);
    }

    #[test]
    fn aligned_layout() {
        let s = sample().to_aligned();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "n  Lambda_{n,2}  w");
        assert_eq!(lines[2], "7   74.50435028");
        assert_eq!(lines[3], "8    92.2427837  0.5");
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig(1.0, 4), "1.000");
        assert_eq!(sig(-2.4999, 3), "-2.50");
        assert_eq!(sig(1.5e-7, 3), "1.50e-7");
        assert_eq!(sig(0.0, 3), "0");
    }
}
