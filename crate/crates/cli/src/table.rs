//! Report tables written as CSV with a Markdown sidecar.

use anyhow::Result;
use revisio_core::stats::{Stars, TestResult};

use crate::output::{Manifest, OutDir};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem under the output directory.
    pub name: String,
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(name: &str, title: &str, header: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            title: title.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory csv");
        for r in &self.rows {
            w.write_record(r).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 cells")
    }

    pub fn to_markdown(&self) -> String {
        let esc = |c: &String| c.replace('|', "\\|");
        let mut out = format!("## {}\n\n", self.title);
        out.push_str(&format!("| {} |\n", self.header.iter().map(esc).collect::<Vec<_>>().join(" | ")));
        out.push_str(&format!("|{}\n", " --- |".repeat(self.header.len())));
        for r in &self.rows {
            out.push_str(&format!("| {} |\n", r.iter().map(esc).collect::<Vec<_>>().join(" | ")));
        }
        if !self.notes.is_empty() {
            out.push('\n');
            for n in &self.notes {
                out.push_str(&format!("- {n}\n"));
            }
        }
        out
    }

    pub fn write(&self, out: &OutDir, manifest: &mut Manifest) -> Result<()> {
        out.write(manifest, &format!("{}.csv", self.name), self.to_csv())?;
        out.write(manifest, &format!("{}.md", self.name), self.to_markdown())
    }
}

pub fn fixed(v: f64, digits: usize) -> String {
    format!("{v:.digits$}")
}

pub fn opt_fixed(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "NA".to_string(), |x| fixed(x, digits))
}

/// Signed value with a star suffix, as in `+3.313***`.
pub fn signed_starred(v: f64, digits: usize, stars: Stars) -> String {
    format!("{v:+.digits$}{}", stars.suffix())
}

pub fn starred(v: f64, digits: usize, stars: Stars) -> String {
    format!("{v:.digits$}{}", stars.suffix())
}

/// Star label of an optional test; `NA` when the test could not run.
pub fn stars_of(t: &Option<TestResult>) -> String {
    t.as_ref().map_or_else(|| "NA".to_string(), |t| t.stars.as_str().to_string())
}

pub fn p_of(t: &Option<TestResult>) -> String {
    t.as_ref().map_or_else(|| "NA".to_string(), |t| format!("{:.6}", t.p_value))
}
