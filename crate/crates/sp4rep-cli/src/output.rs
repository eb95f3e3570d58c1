//! Record types and their JSON-lines / CSV renderings.
//!
//! CSV column orders are fixed by the `*_COLUMNS` constants. Every record carries the full
//! effective configuration (JSON: an object under `config`; CSV: a flat `key=value` string).

use std::io::Write;

use serde::Serialize;
use sp4rep::fockbasis::SpinIndex;
use sp4rep::C64;

use crate::config::{CliConfig, Format};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Complex {
    fn from(z: C64) -> Self {
        Complex { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexRecord {
    pub l: i32,
    pub k: i32,
    pub j_x2: i32,
    pub m_x2: i32,
}

impl From<&SpinIndex> for IndexRecord {
    fn from(i: &SpinIndex) -> Self {
        IndexRecord { l: i.l, k: i.k, j_x2: i.j.twice(), m_x2: i.m.twice() }
    }
}

pub const ELEMENT_COLUMNS: [&str; 14] = [
    "l_in", "k_in", "j_x2_in", "m_x2_in", "l_out", "k_out", "j_x2_out", "m_x2_out", "value_re", "value_im",
    "tail_estimate", "l_max_used", "route", "config",
];

#[derive(Debug, Clone, Serialize)]
pub struct ElementRecord<'a> {
    pub command: &'static str,
    #[serde(rename = "in")]
    pub in_idx: IndexRecord,
    #[serde(rename = "out")]
    pub out_idx: IndexRecord,
    pub value_re: f64,
    pub value_im: f64,
    pub value: Complex,
    pub tail_estimate: f64,
    pub l_max_used: i32,
    pub route: &'static str,
    pub config: &'a CliConfig,
}

impl ElementRecord<'_> {
    fn row(&self) -> Vec<String> {
        let (i, o) = (self.in_idx, self.out_idx);
        vec![
            i.l.to_string(),
            i.k.to_string(),
            i.j_x2.to_string(),
            i.m_x2.to_string(),
            o.l.to_string(),
            o.k.to_string(),
            o.j_x2.to_string(),
            o.m_x2.to_string(),
            num(self.value_re),
            num(self.value_im),
            num(self.tail_estimate),
            self.l_max_used.to_string(),
            self.route.to_string(),
            self.config.to_flat(),
        ]
    }
}

pub const CHARACTER_COLUMNS: [&str; 11] = [
    "l", "partial_re", "partial_im", "level_re", "level_im", "mu_re", "mu_im", "nu_re", "nu_im", "verdict", "config",
];

#[derive(Debug, Clone, Serialize)]
pub struct CharacterRecord<'a> {
    pub command: &'static str,
    pub mu: Complex,
    pub nu: Complex,
    /// `S_L` for `L = 0..=l_max_used`.
    pub partial_sums: Vec<Complex>,
    pub level_traces: Vec<Complex>,
    pub tail_estimate: f64,
    pub l_max_used: i32,
    pub abel_t: f64,
    pub route: &'static str,
    pub verdict: &'static str,
    pub config: &'a CliConfig,
}

pub const VERIFY_COLUMNS: [&str; 8] = ["suite", "check", "residual", "threshold", "passed", "known_deviation", "detail", "config"];

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord<'a> {
    pub command: &'static str,
    pub suite: String,
    pub check: String,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
    pub known_deviation: bool,
    pub detail: Option<String>,
    pub config: &'a CliConfig,
}

impl CheckRecord<'_> {
    fn row(&self) -> Vec<String> {
        vec![
            self.suite.clone(),
            self.check.clone(),
            num(self.residual),
            num(self.threshold),
            self.passed.to_string(),
            self.known_deviation.to_string(),
            self.detail.clone().unwrap_or_default(),
            self.config.to_flat(),
        ]
    }
}

/// Shortest round-trip rendering, so CSV is as lossless as JSON.
fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Writes one kind of record in the configured format.
pub struct Sink<W: Write> {
    format: Format,
    json: Option<W>,
    csv: Option<csv::Writer<W>>,
}

impl<W: Write> Sink<W> {
    pub fn new(format: Format, out: W, columns: &[&str]) -> Result<Self, CliError> {
        Ok(match format {
            Format::Json => Sink { format, json: Some(out), csv: None },
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(columns)?;
                Sink { format, json: None, csv: Some(w) }
            }
        })
    }

    fn json_line<T: Serialize>(&mut self, rec: &T) -> Result<(), CliError> {
        let w = self.json.as_mut().expect("json sink");
        serde_json::to_writer(&mut *w, rec)?;
        w.write_all(b"\n")?;
        Ok(())
    }

    fn csv_row(&mut self, row: Vec<String>) -> Result<(), CliError> {
        self.csv.as_mut().expect("csv sink").write_record(row)?;
        Ok(())
    }

    pub fn element(&mut self, rec: &ElementRecord) -> Result<(), CliError> {
        match self.format {
            Format::Json => self.json_line(rec),
            Format::Csv => self.csv_row(rec.row()),
        }
    }

    /// JSON: a single line holding the whole record. CSV: one row per degree.
    pub fn character(&mut self, rec: &CharacterRecord) -> Result<(), CliError> {
        match self.format {
            Format::Json => self.json_line(rec),
            Format::Csv => {
                for (l, (p, t)) in rec.partial_sums.iter().zip(&rec.level_traces).enumerate() {
                    self.csv_row(vec![
                        l.to_string(),
                        num(p.re),
                        num(p.im),
                        num(t.re),
                        num(t.im),
                        num(rec.mu.re),
                        num(rec.mu.im),
                        num(rec.nu.re),
                        num(rec.nu.im),
                        rec.verdict.to_string(),
                        rec.config.to_flat(),
                    ])?;
                }
                Ok(())
            }
        }
    }

    pub fn check(&mut self, rec: &CheckRecord) -> Result<(), CliError> {
        match self.format {
            Format::Json => self.json_line(rec),
            Format::Csv => self.csv_row(rec.row()),
        }
    }

    pub fn finish(self) -> Result<(), CliError> {
        if let Some(mut w) = self.json {
            w.flush()?;
        }
        if let Some(mut w) = self.csv {
            w.flush()?;
        }
        Ok(())
    }
}
