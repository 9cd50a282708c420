//! Structured pass/fail records for the verification checks.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::grid::fmt_float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

impl CheckStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Inconclusive => "inconclusive",
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, CheckStatus::Pass)
    }
}

/// A named check outcome with its measured quantities. The measured map is
/// ordered, so serialization is deterministic.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub check_name: String,
    pub status: CheckStatus,
    pub measured: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub narrative: String,
}

impl VerificationReport {
    pub fn new(check_name: impl Into<String>, status: CheckStatus, tolerance: f64) -> Self {
        Self {
            check_name: check_name.into(),
            status,
            measured: BTreeMap::new(),
            tolerance,
            narrative: String::new(),
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: f64) -> Self {
        self.measured.insert(key.into(), value);
        self
    }

    pub fn with_narrative(mut self, text: impl Into<String>) -> Self {
        self.narrative = text.into();
        self
    }

    pub fn record(&mut self, key: impl Into<String>, value: f64) {
        self.measured.insert(key.into(), value);
    }

    pub fn csv_header() -> &'static str {
        "check_name,status,tolerance,measured,narrative"
    }

    /// One CSV row: measured quantities joined as `key=value` pairs in key
    /// order, narrative quoted.
    pub fn to_csv_row(&self) -> String {
        let measured = self
            .measured
            .iter()
            .map(|(k, v)| format!("{k}={}", fmt_float(*v)))
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "{},{},{},{},\"{}\"",
            self.check_name,
            self.status.as_str(),
            fmt_float(self.tolerance),
            measured,
            self.narrative.replace('"', "\"\"")
        )
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{}: {} (tolerance {:.3e})",
            self.check_name,
            self.status.as_str().to_uppercase(),
            self.tolerance
        );
        for (k, v) in &self.measured {
            let _ = writeln!(out, "  {k} = {v:.6e}");
        }
        if !self.narrative.is_empty() {
            let _ = writeln!(out, "  {}", self.narrative);
        }
        out
    }
}
