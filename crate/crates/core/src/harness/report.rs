use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::HarnessError;
use crate::metrics::{Measure, SummaryStats};
use crate::stats::{Decision, HypothesisOutcome};

pub const ROW_HEADER: &str = "model,level,arrival_scale,measure,mean,sd,median,n";
pub const HYPOTHESIS_HEADER: &str = "hypothesis,p_value,alpha,decision";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub model: String,
    pub level: usize,
    pub arrival_scale: f64,
    pub measure: Measure,
    pub stats: SummaryStats,
}

/// Summary rows, one per (model, level, measure), plus any hypothesis tests.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub hypotheses: Vec<HypothesisOutcome>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReportParseError {
    #[error("missing or wrong header")]
    Header,
    #[error("line {line}: {reason}")]
    Line { line: usize, reason: String },
    #[error("json: {0}")]
    Json(String),
}

/// `%g`-style formatting with six significant digits.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (5 - exp) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn round6(x: f64) -> f64 {
    format_sig6(x).parse().expect("formatted float parses")
}

#[derive(Serialize, Deserialize)]
struct FlatRow {
    model: String,
    level: usize,
    arrival_scale: f64,
    measure: Measure,
    mean: f64,
    sd: f64,
    median: f64,
    n: usize,
}

#[derive(Serialize, Deserialize)]
struct FlatReport {
    rows: Vec<FlatRow>,
    #[serde(default)]
    hypotheses: Vec<HypothesisOutcome>,
}

impl ExperimentReport {
    /// The report as written to disk: every real value kept to six
    /// significant digits.
    pub fn rounded(&self) -> Self {
        Self {
            rows: self
                .rows
                .iter()
                .map(|r| ReportRow {
                    arrival_scale: round6(r.arrival_scale),
                    stats: SummaryStats {
                        n: r.stats.n,
                        mean: round6(r.stats.mean),
                        sd: round6(r.stats.sd),
                        median: round6(r.stats.median),
                    },
                    ..r.clone()
                })
                .collect(),
            hypotheses: self
                .hypotheses
                .iter()
                .map(|h| HypothesisOutcome {
                    p_value: round6(h.p_value),
                    alpha: round6(h.alpha),
                    ..h.clone()
                })
                .collect(),
        }
    }

    pub fn row(&self, model: &str, level: usize, measure: Measure) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.model == model && r.level == level && r.measure == measure)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(ROW_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.model,
                r.level,
                format_sig6(r.arrival_scale),
                r.measure.name(),
                format_sig6(r.stats.mean),
                format_sig6(r.stats.sd),
                format_sig6(r.stats.median),
                r.stats.n
            );
        }
        if !self.hypotheses.is_empty() {
            out.push_str(HYPOTHESIS_HEADER);
            out.push('\n');
            for h in &self.hypotheses {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    h.hypothesis,
                    format_sig6(h.p_value),
                    format_sig6(h.alpha),
                    h.decision.as_str()
                );
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let r = self.rounded();
        let flat = FlatReport {
            rows: r
                .rows
                .into_iter()
                .map(|row| FlatRow {
                    model: row.model,
                    level: row.level,
                    arrival_scale: row.arrival_scale,
                    measure: row.measure,
                    mean: row.stats.mean,
                    sd: row.stats.sd,
                    median: row.stats.median,
                    n: row.stats.n,
                })
                .collect(),
            hypotheses: r.hypotheses,
        };
        let mut s = serde_json::to_string_pretty(&flat).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Json => self.to_json(),
        }
    }

    pub fn from_csv(text: &str) -> Result<Self, ReportParseError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h == ROW_HEADER => {}
            _ => return Err(ReportParseError::Header),
        }
        let mut report = Self::default();
        let mut in_hypotheses = false;
        for (i, line) in lines {
            let line_no = i + 1;
            let bad = |reason: &str| ReportParseError::Line {
                line: line_no,
                reason: reason.to_string(),
            };
            if line == HYPOTHESIS_HEADER {
                in_hypotheses = true;
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
            if in_hypotheses {
                if f.len() != 4 {
                    return Err(bad("expected 4 fields"));
                }
                report.hypotheses.push(HypothesisOutcome {
                    hypothesis: f[0].to_string(),
                    p_value: num(f[1])?,
                    alpha: num(f[2])?,
                    decision: Decision::from_name(f[3]).ok_or_else(|| bad("bad decision"))?,
                });
            } else {
                if f.len() != 8 {
                    return Err(bad("expected 8 fields"));
                }
                report.rows.push(ReportRow {
                    model: f[0].to_string(),
                    level: f[1].parse().map_err(|_| bad("bad level"))?,
                    arrival_scale: num(f[2])?,
                    measure: Measure::from_name(f[3]).ok_or_else(|| bad("unknown measure"))?,
                    stats: SummaryStats {
                        mean: num(f[4])?,
                        sd: num(f[5])?,
                        median: num(f[6])?,
                        n: f[7].parse().map_err(|_| bad("bad count"))?,
                    },
                });
            }
        }
        Ok(report)
    }

    pub fn from_json(text: &str) -> Result<Self, ReportParseError> {
        let flat: FlatReport =
            serde_json::from_str(text).map_err(|e| ReportParseError::Json(e.to_string()))?;
        Ok(Self {
            rows: flat
                .rows
                .into_iter()
                .map(|r| ReportRow {
                    model: r.model,
                    level: r.level,
                    arrival_scale: r.arrival_scale,
                    measure: r.measure,
                    stats: SummaryStats {
                        n: r.n,
                        mean: r.mean,
                        sd: r.sd,
                        median: r.median,
                    },
                })
                .collect(),
            hypotheses: flat.hypotheses,
        })
    }
}

/// Writes the rendered report to any sink.
pub fn write_report(
    report: &ExperimentReport,
    format: ReportFormat,
    sink: &mut impl std::io::Write,
) -> std::io::Result<()> {
    sink.write_all(report.render(format).as_bytes())
}

pub fn emit_report(
    report: &ExperimentReport,
    format: ReportFormat,
    path: &Path,
) -> Result<(), HarnessError> {
    std::fs::write(path, report.render(format)).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}
