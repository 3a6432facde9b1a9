//! Application reports over a ranking: public-domain-day lists for a
//! copyright term and entry window, commons-gap lists (works already in
//! the public domain but lacking digital editions), and overlooked-article
//! lists (high scores without bibliographic identifiers).
//!
//! Works enter the public domain on January 1 after the p.m.a. term
//! expires, so the entry year is `death_year + term + 1`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{edition_matches, Catalog, IdentifierTag, YearRange};
use crate::ranking::RankingTable;

/// Report parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportConfig {
    /// Copyright term in years post mortem auctoris (e.g. 50 or 70).
    pub pma_term_years: i32,
    /// Public-domain entry window for pd-day reports, inclusive.
    pub pd_window: YearRange,
    /// Keep at most this many rows (0 = unlimited).
    pub top_n: usize,
    /// Reference year for commons-gap reports: works whose entry year is
    /// at or before this year are already in the public domain.
    pub as_of_year: i32,
    /// Minimum score for overlooked reports.
    pub score_threshold: f64,
    /// Identifiers that must all be absent for overlooked reports.
    pub missing_identifiers: Vec<IdentifierTag>,
}

impl ReportConfig {
    pub fn new(term: i32, window: YearRange) -> Result<Self> {
        if term <= 0 {
            return Err(Error::InvalidInput(format!(
                "p.m.a. term must be positive, got {term}"
            )));
        }
        Ok(ReportConfig {
            pma_term_years: term,
            pd_window: window,
            top_n: 0,
            as_of_year: window.end,
            score_threshold: 0.0,
            missing_identifiers: IdentifierTag::ALL.to_vec(),
        })
    }
}

/// One report row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdDayRow {
    pub person_id: String,
    pub title: String,
    pub death_year: i32,
    pub views_per_day: Option<f64>,
    pub expected_rank: f64,
    pub score: f64,
}

/// Report rows, best expected rank first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdDayList {
    pub rows: Vec<PdDayRow>,
    /// Persons that satisfied the predicate except for a missing death year.
    pub excluded_missing_death: usize,
}

impl PdDayList {
    /// TSV export; scores are displayed rounded to the nearest integer.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "person_id\ttitle\tdeath_year\tviews_per_day\texpected_rank\tscore"
        )?;
        for r in &self.rows {
            let views = r.views_per_day.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}",
                r.person_id,
                r.title,
                r.death_year,
                views,
                r.expected_rank,
                r.score.round() as i64
            )?;
        }
        Ok(())
    }

    pub fn save_tsv(&self, path: &Path) -> Result<()> {
        let file = BufWriter::new(File::create(path)?);
        self.write_tsv(file)
    }
}

/// The year works enter the public domain: January 1 after the term ends.
pub fn pd_entry_year(death_year: i32, term: i32) -> i32 {
    death_year + term + 1
}

/// Walk ranking entries in rank order, keep persons passing `predicate`
/// (which sees the person's death year where present), and truncate.
fn filtered_rows<F>(
    ranking: &RankingTable,
    catalog: &Catalog,
    top_n: usize,
    needs_death_year: bool,
    predicate: F,
) -> Result<PdDayList>
where
    F: Fn(&crate::ingest::PersonRecord) -> bool,
{
    let mut rows = Vec::new();
    let mut excluded_missing_death = 0usize;
    for entry in &ranking.entries {
        let person = catalog.get(&entry.person_id).ok_or_else(|| {
            Error::IdMismatch(format!("{} not present in the catalog", entry.person_id))
        })?;
        if needs_death_year && person.death_year().is_none() {
            excluded_missing_death += 1;
            continue;
        }
        if !predicate(person) {
            continue;
        }
        rows.push(PdDayRow {
            person_id: person.person_id.clone(),
            title: person.title.clone(),
            death_year: person.death_year().unwrap_or_default(),
            views_per_day: person.views_per_day,
            expected_rank: entry.expected_rank,
            score: entry.score,
        });
        if top_n > 0 && rows.len() == top_n {
            break;
        }
    }
    Ok(PdDayList {
        rows,
        excluded_missing_death,
    })
}

/// Persons whose works enter the public domain inside the configured
/// window, best-ranked first.
pub fn pd_day_report(
    ranking: &RankingTable,
    catalog: &Catalog,
    config: &ReportConfig,
) -> Result<PdDayList> {
    let term = config.pma_term_years;
    let window = config.pd_window;
    filtered_rows(ranking, catalog, config.top_n, true, |person| {
        person
            .death_year()
            .is_some_and(|y| window.contains(pd_entry_year(y, term)))
    })
}

/// Persons already in the public domain (entry year at or before the
/// as-of year) whose works have no matched digital edition.
pub fn commons_gap_report(
    ranking: &RankingTable,
    catalog: &Catalog,
    config: &ReportConfig,
) -> Result<PdDayList> {
    let matched = edition_matches(catalog)?;
    let term = config.pma_term_years;
    let as_of = config.as_of_year;
    filtered_rows(ranking, catalog, config.top_n, true, |person| {
        person
            .death_year()
            .is_some_and(|y| pd_entry_year(y, term) <= as_of)
            && !matched.contains(&person.person_id)
    })
}

/// Persons at or above the score threshold whose identifier set misses
/// every configured identifier.
pub fn overlooked_report(
    ranking: &RankingTable,
    catalog: &Catalog,
    config: &ReportConfig,
) -> Result<PdDayList> {
    let threshold = config.score_threshold;
    let blocked = config.missing_identifiers.clone();
    let scores: std::collections::HashMap<&str, f64> = ranking
        .entries
        .iter()
        .map(|e| (e.person_id.as_str(), e.score))
        .collect();
    filtered_rows(ranking, catalog, config.top_n, false, |person| {
        scores
            .get(person.person_id.as_str())
            .is_some_and(|&s| s >= threshold)
            && blocked.iter().all(|tag| !person.identifiers.contains(tag))
    })
}
