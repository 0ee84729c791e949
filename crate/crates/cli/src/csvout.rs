//! Minimal CSV: fixed documented headers, comma separation, no quoting.
//! No emitted field ever contains a comma, quote, or newline, so a plain
//! split is a faithful reader. Floats use Rust's shortest-roundtrip
//! display, so written values reparse bit-exactly.

use anyhow::{bail, Context, Result};

pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Table {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        debug_assert!(row.iter().all(|f| !f.contains([',', '"', '\n'])), "unquotable field");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out.into_bytes()
    }

    /// Space-aligned rendering for terminal output.
    pub fn to_aligned(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for row in &self.rows {
            for (w, field) in widths.iter_mut().zip(row) {
                *w = (*w).max(field.len());
            }
        }
        let mut out = String::new();
        let mut emit = |fields: &mut dyn Iterator<Item = &str>| {
            for (i, (field, w)) in fields.zip(&widths).enumerate() {
                if i > 0 {
                    out.push_str("  ");
                }
                out.push_str(field);
                out.extend(std::iter::repeat_n(' ', w - field.len()));
            }
            while out.ends_with(' ') {
                out.pop();
            }
            out.push('\n');
        };
        emit(&mut self.header.iter().copied());
        for row in &self.rows {
            emit(&mut row.iter().map(String::as_str));
        }
        out
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("missing CSV column {name:?}"))
    }
}

pub fn parse_csv(text: &str) -> Result<Csv> {
    let mut lines = text.lines();
    let header: Vec<String> =
        lines.next().context("empty CSV")?.split(',').map(str::to_owned).collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let row: Vec<String> = line.split(',').map(str::to_owned).collect();
        if row.len() != header.len() {
            bail!("CSV row {}: {} fields, header has {}", i + 2, row.len(), header.len());
        }
        rows.push(row);
    }
    Ok(Csv { header, rows })
}
