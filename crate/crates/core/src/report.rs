//! Metric reports: a flat list of `(metric, sequence, value)` rows plus an
//! echo of the configuration that produced them.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::metrics::{aggregate, MetricFamilies, SequenceMetrics};

/// Label of the pooled row.
pub const AGGREGATE_LABEL: &str = "ALL";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Tsv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "tsv" => Ok(ReportFormat::Tsv),
            other => Err(format!("unknown report format `{other}` (expected text or tsv)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub metric: String,
    pub sequence: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricReport {
    pub config: Vec<(String, String)>,
    pub rows: Vec<ReportRow>,
}

fn family_rows(m: &SequenceMetrics, families: MetricFamilies) -> Vec<(&'static str, f64)> {
    let mut out = Vec::new();
    if let (true, Some(c)) = (families.mota, &m.clear) {
        out.extend([
            ("MOTA", c.mota),
            ("MOTP", c.motp),
            ("IDSW", c.idsw as f64),
            ("FP", c.fp as f64),
            ("FN", c.fn_ as f64),
        ]);
    }
    if let (true, Some(i)) = (families.idf1, &m.idf1) {
        out.extend([("IDF1", i.idf1), ("IDP", i.idp), ("IDR", i.idr)]);
    }
    if let Some(h) = &m.hota {
        if families.hota || families.tgrhota {
            out.push(("DetA", h.det_a));
        }
        if families.hota {
            out.extend([("AssA", h.ass_a), ("AssPr", h.ass_pr), ("AssRe", h.ass_re), ("HOTA", h.hota)]);
        }
        if families.tgrhota {
            out.extend([("AssA'", h.ass_a_prime), ("TGRHOTA", h.tgrhota)]);
        }
    }
    out
}

impl MetricReport {
    pub fn new(config: Vec<(String, String)>) -> Self {
        Self { config, rows: Vec::new() }
    }

    /// One block of rows per sequence, followed by the pooled `ALL` block.
    pub fn from_sequences(
        config: Vec<(String, String)>,
        families: MetricFamilies,
        sequences: &[(String, SequenceMetrics)],
    ) -> Self {
        let mut report = Self::new(config);
        for (name, m) in sequences {
            report.push_metrics(name, m, families);
        }
        let all = aggregate(&sequences.iter().map(|(_, m)| m).collect::<Vec<_>>());
        report.push_metrics(AGGREGATE_LABEL, &all, families);
        if sequences.iter().any(|(_, m)| m.hota.as_ref().is_some_and(|h| h.tp_prime_degenerate)) && families.tgrhota {
            report.config.push(("warning".into(), "TP' empty at some threshold; AssA' reported as 0 there".into()));
        }
        report
    }

    pub fn push_metrics(&mut self, sequence: &str, m: &SequenceMetrics, families: MetricFamilies) {
        for (metric, value) in family_rows(m, families) {
            self.push(metric, sequence, value);
        }
    }

    pub fn push(&mut self, metric: &str, sequence: &str, value: f64) {
        self.rows.push(ReportRow { metric: metric.into(), sequence: sequence.into(), value });
    }

    pub fn value(&self, metric: &str, sequence: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.metric == metric && r.sequence == sequence).map(|r| r.value)
    }

    /// `# key=value` config lines, then `metric<TAB>sequence<TAB>value`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.config {
            let _ = writeln!(out, "# {k}={v}");
        }
        for r in &self.rows {
            let _ = writeln!(out, "{}\t{}\t{:.6}", r.metric, r.sequence, r.value);
        }
        out
    }

    pub fn parse_tsv(text: &str, path: &Path) -> Result<Self> {
        let mut report = Self::default();
        for (i, line) in text.lines().enumerate() {
            let err = |message: &str| Error::Parse { path: path.to_path_buf(), line: i + 1, message: message.into() };
            if line.trim().is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# ") {
                let (k, v) = rest.split_once('=').ok_or_else(|| err("config line without `=`"))?;
                report.config.push((k.into(), v.into()));
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(err("expected metric, sequence and value separated by tabs"));
            }
            let value: f64 = fields[2].trim().parse().map_err(|_| err("bad value"))?;
            report.push(fields[0].trim(), fields[1].trim(), value);
        }
        Ok(report)
    }

    /// Configuration lines, then one row per sequence and one column per
    /// metric, in first-seen order.
    pub fn to_text(&self) -> String {
        let mut metrics: Vec<&str> = Vec::new();
        let mut sequences: Vec<&str> = Vec::new();
        let mut cells: BTreeMap<(&str, &str), f64> = BTreeMap::new();
        for r in &self.rows {
            if !metrics.contains(&r.metric.as_str()) {
                metrics.push(&r.metric);
            }
            if !sequences.contains(&r.sequence.as_str()) {
                sequences.push(&r.sequence);
            }
            cells.insert((&r.sequence, &r.metric), r.value);
        }
        let mut out = String::new();
        for (k, v) in &self.config {
            let _ = writeln!(out, "{k:<16} {v}");
        }
        if !self.config.is_empty() {
            out.push('\n');
        }
        let first = sequences.iter().map(|s| s.len()).chain(["sequence".len()]).max().unwrap_or(0);
        let widths: Vec<usize> = metrics.iter().map(|m| m.len().max(10)).collect();
        let _ = write!(out, "{:<first$}", "sequence");
        for (m, w) in metrics.iter().zip(&widths) {
            let _ = write!(out, "  {m:>w$}");
        }
        out.push('\n');
        for s in &sequences {
            let _ = write!(out, "{s:<first$}");
            for (m, w) in metrics.iter().zip(&widths) {
                match cells.get(&(*s, *m)) {
                    Some(v) => {
                        let _ = write!(out, "  {v:>w$.6}");
                    }
                    None => {
                        let _ = write!(out, "  {:>w$}", "-");
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn write_report(report: &MetricReport, path: &Path, format: ReportFormat) -> Result<()> {
    let text = match format {
        ReportFormat::Text => report.to_text(),
        ReportFormat::Tsv => report.to_tsv(),
    };
    write_atomic(path, text.as_bytes())
}
