//! CSV and JSON output for every report type.
//!
//! CSV floats are written with 18 significant digits (`{:.17e}`); exact
//! rationals appear as `p/q` next to a decimal column. JSON is an array of
//! objects whose keys are the struct field names.

use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{AbtReport, ComparisonRow, TVReport};
use crate::exact_dist::DistributionRow;
use crate::verify::CheckResult;
use crate::{Error, Mode, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Validation(format!("unknown format '{s}' (expected csv or json)"))),
        }
    }
}

/// `{:.17e}`: 18 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.17e}")
    } else {
        v.to_string()
    }
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// A record type with a fixed CSV layout.
pub trait Tabular {
    fn header() -> &'static [&'static str];
    fn record(&self) -> Vec<String>;
}

/// Header plus one line per row, or a JSON array.
pub fn serialize<T: Tabular + Serialize>(rows: &[T], format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
            w.write_record(T::header())?;
            for row in rows {
                w.write_record(row.record())?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeCountRecord {
    pub d: usize,
    pub count: String,
}

impl Tabular for PrimeCountRecord {
    fn header() -> &'static [&'static str] {
        &["d", "count"]
    }

    fn record(&self) -> Vec<String> {
        vec![self.d.to_string(), self.count.clone()]
    }
}

/// One `P(X = k)` of a distribution row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistRecord {
    pub kind: String,
    pub q: Option<u64>,
    pub n: usize,
    pub k: usize,
    pub mode: Mode,
    pub p: f64,
    /// `p/q` in exact mode.
    pub p_exact: Option<String>,
}

impl DistRecord {
    pub fn from_row<T: Scalar + ToString>(row: &DistributionRow<T>) -> Vec<DistRecord> {
        let kind = match row.label() {
            crate::Label::CycleCount => "cycles",
            crate::Label::OmegaCount => "omega",
        };
        row.mass()
            .iter()
            .enumerate()
            .map(|(i, p)| DistRecord {
                kind: kind.to_string(),
                q: row.q(),
                n: row.n(),
                k: i + 1,
                mode: T::MODE,
                p: p.to_f64(),
                p_exact: (T::MODE == Mode::Exact).then(|| p.to_string()),
            })
            .collect()
    }
}

impl Tabular for DistRecord {
    fn header() -> &'static [&'static str] {
        &["kind", "q", "n", "k", "mode", "p", "p_exact"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.kind.clone(),
            self.q.map(|q| q.to_string()).unwrap_or_default(),
            self.n.to_string(),
            self.k.to_string(),
            self.mode.to_string(),
            fmt_f64(self.p),
            self.p_exact.clone().unwrap_or_default(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HqRecord {
    pub q: u64,
    pub x: f64,
    pub tol: f64,
    pub hq: f64,
}

impl Tabular for HqRecord {
    fn header() -> &'static [&'static str] {
        &["q", "x", "tol", "hq"]
    }

    fn record(&self) -> Vec<String> {
        vec![self.q.to_string(), fmt_f64(self.x), fmt_f64(self.tol), fmt_f64(self.hq)]
    }
}

/// The three main terms at one `(n, k)`; the `h_q` ones are absent when `r ≥ q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainTermRecord {
    pub n: usize,
    pub k: usize,
    pub q: u64,
    pub r: f64,
    pub p_cycles: f64,
    pub hwang: f64,
    pub warlimont: Option<f64>,
    pub new: Option<f64>,
}

impl Tabular for MainTermRecord {
    fn header() -> &'static [&'static str] {
        &["n", "k", "q", "r", "p_cycles", "hwang", "warlimont", "new"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.k.to_string(),
            self.q.to_string(),
            fmt_f64(self.r),
            fmt_f64(self.p_cycles),
            fmt_f64(self.hwang),
            opt_f64(self.warlimont),
            opt_f64(self.new),
        ]
    }
}

impl Tabular for ComparisonRow {
    fn header() -> &'static [&'static str] {
        &[
            "n", "q", "k", "r", "p_omega", "p_cycles", "ratio", "hq_r", "residual", "normalized", "envelope",
        ]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.q.to_string(),
            self.k.to_string(),
            fmt_f64(self.r),
            fmt_f64(self.p_omega),
            fmt_f64(self.p_cycles),
            fmt_f64(self.ratio),
            opt_f64(self.hq_r),
            opt_f64(self.residual),
            opt_f64(self.normalized),
            opt_f64(self.envelope),
        ]
    }
}

impl Tabular for TVReport {
    fn header() -> &'static [&'static str] {
        &["n", "q", "mode", "d_tv", "d_tv_exact", "scaled", "s1", "s2", "s3"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.q.to_string(),
            self.mode.to_string(),
            fmt_f64(self.d_tv),
            self.d_tv_exact.clone().unwrap_or_default(),
            fmt_f64(self.scaled),
            fmt_f64(self.s1),
            fmt_f64(self.s2),
            fmt_f64(self.s3),
        ]
    }
}

/// The interval split behind a [`TVReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionRecord {
    pub q: u64,
    pub n: usize,
    pub mode: Mode,
    /// Last `k` of `I_1` and of `I_2`.
    pub i1_end: usize,
    pub i2_end: usize,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub d_tv: f64,
}

impl DecompositionRecord {
    pub fn from_report(r: &TVReport) -> DecompositionRecord {
        let iv = crate::analysis::interval_bounds(r.q, r.n);
        DecompositionRecord {
            q: r.q,
            n: r.n,
            mode: r.mode,
            i1_end: iv.i1_end,
            i2_end: iv.i2_end,
            s1: r.s1,
            s2: r.s2,
            s3: r.s3,
            d_tv: r.d_tv,
        }
    }
}

impl Tabular for DecompositionRecord {
    fn header() -> &'static [&'static str] {
        &["q", "n", "mode", "i1_end", "i2_end", "s1", "s2", "s3", "d_tv"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.q.to_string(),
            self.n.to_string(),
            self.mode.to_string(),
            self.i1_end.to_string(),
            self.i2_end.to_string(),
            fmt_f64(self.s1),
            fmt_f64(self.s2),
            fmt_f64(self.s3),
            fmt_f64(self.d_tv),
        ]
    }
}

/// Flattened [`AbtReport`]: one line per `k`, the supremum repeated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbtRecord {
    pub q: u64,
    pub n: usize,
    pub mode: Mode,
    pub k: usize,
    pub ratio: f64,
    pub value: f64,
    pub supremum: f64,
}

impl AbtRecord {
    pub fn from_report(rep: &AbtReport) -> Vec<AbtRecord> {
        rep.rows
            .iter()
            .map(|r| AbtRecord {
                q: rep.q,
                n: rep.n,
                mode: rep.mode,
                k: r.k,
                ratio: r.ratio,
                value: r.value,
                supremum: rep.supremum,
            })
            .collect()
    }
}

impl Tabular for AbtRecord {
    fn header() -> &'static [&'static str] {
        &["q", "n", "mode", "k", "ratio", "value", "supremum"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.q.to_string(),
            self.n.to_string(),
            self.mode.to_string(),
            self.k.to_string(),
            fmt_f64(self.ratio),
            fmt_f64(self.value),
            fmt_f64(self.supremum),
        ]
    }
}

impl Tabular for CheckResult {
    fn header() -> &'static [&'static str] {
        &["id", "name", "passed", "detail"]
    }

    fn record(&self) -> Vec<String> {
        vec![self.id.clone(), self.name.clone(), self.passed.to_string(), self.detail.clone()]
    }
}
