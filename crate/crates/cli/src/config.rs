//! Optional JSON configuration file.
//!
//! Every field is optional; command-line flags override config values,
//! which override built-in defaults. See the repository README for the
//! full schema.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    /// Label window, e.g. `"1910:1952"`.
    pub label_window: Option<String>,
    pub topics: Option<TopicsSection>,
    pub prior: Option<PriorSection>,
    pub fit: Option<FitSection>,
    /// Posterior draw count for `fit`.
    pub draws: Option<usize>,
    pub eval: Option<EvalSection>,
    pub report: Option<ReportSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopicsSection {
    pub k: Option<usize>,
    pub iterations: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub min_doc_count: Option<usize>,
    pub max_doc_fraction: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSection {
    pub df: Option<f64>,
    pub scale: Option<f64>,
    pub intercept_scale: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    pub repeats: Option<usize>,
    pub permutations: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportSection {
    pub term: Option<i32>,
    /// Entry window, e.g. `"2015:2025"`.
    pub window: Option<String>,
    pub top_n: Option<usize>,
    pub as_of_year: Option<i32>,
    pub score_threshold: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", p.display()))
            }
        }
    }

    pub fn topics(&self) -> TopicsSection {
        self.topics.clone().unwrap_or_default()
    }

    pub fn prior(&self) -> PriorSection {
        self.prior.clone().unwrap_or_default()
    }

    pub fn fit(&self) -> FitSection {
        self.fit.clone().unwrap_or_default()
    }

    pub fn eval(&self) -> EvalSection {
        self.eval.clone().unwrap_or_default()
    }

    pub fn report(&self) -> ReportSection {
        self.report.clone().unwrap_or_default()
    }
}
