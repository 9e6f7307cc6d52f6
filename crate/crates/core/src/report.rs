use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::methods::MethodConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Entropy,
    Fluctuation,
    Bic,
    Flatspot,
    Mrf,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Entropy,
        Method::Fluctuation,
        Method::Bic,
        Method::Flatspot,
        Method::Mrf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Entropy => "entropy",
            Method::Fluctuation => "fluctuation",
            Method::Bic => "bic",
            Method::Flatspot => "flatspot",
            Method::Mrf => "mrf",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown method '{s}'"))
    }
}

/// One candidate order (or range) and the test applied to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub candidate: usize,
    pub statistic: f64,
    /// `None` for score-minimizing methods that have no threshold.
    pub threshold: Option<f64>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

/// The chosen order together with everything needed to audit the choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub method: Method,
    /// First candidate that passed, or `sample_size` when none did.
    pub chosen_order: usize,
    /// True when no candidate passed and `chosen_order` is the sentinel.
    pub sentinel: bool,
    pub sample_size: usize,
    pub config: MethodConfig,
    pub per_candidate: Vec<CandidateRecord>,
    #[serde(default)]
    pub diagnostics: BTreeMap<String, f64>,
    /// Labels of the dense symbols when the input was textual.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbols: Option<Vec<String>>,
}

impl EstimationReport {
    /// Builds a report whose chosen order is the first passing candidate.
    pub fn from_candidates(
        method: Method,
        sample_size: usize,
        config: MethodConfig,
        per_candidate: Vec<CandidateRecord>,
    ) -> Self {
        let first = per_candidate.iter().find(|c| c.passed).map(|c| c.candidate);
        EstimationReport {
            method,
            chosen_order: first.unwrap_or(sample_size),
            sentinel: first.is_none(),
            sample_size,
            config,
            per_candidate,
            diagnostics: BTreeMap::new(),
            symbols: None,
        }
    }

    pub fn with_diagnostic(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_owned(), value);
        self
    }

    /// Checks that the chosen order is the first passing candidate or the
    /// sentinel.
    pub fn is_consistent(&self) -> bool {
        match self.per_candidate.iter().find(|c| c.passed) {
            Some(c) => !self.sentinel && self.chosen_order == c.candidate,
            None => self.sentinel && self.chosen_order == self.sample_size,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only finite numbers")
    }

    pub fn from_json(s: &str) -> crate::Result<Self> {
        serde_json::from_str(s).map_err(|e| crate::Error::Parse(e.to_string()))
    }
}
