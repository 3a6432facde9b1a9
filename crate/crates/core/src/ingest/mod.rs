//! Corpus ingestion: person records, edition catalogs, label assignment.
//!
//! Three inputs feed the pipeline:
//!
//! * person files — JSON Lines (one object per person) or TSV with a header
//!   row; field names are documented on [`PersonRecord`];
//! * edition files — headerless 4-column TSV
//!   (`author_name`, `death_year`, `collection`, `title`), UTF-8, no quoting;
//! * override files — 2-column TSV (`person_id`, `true`/`false`) carrying
//!   manual corrections to the automatic name matching.
//!
//! MediaWiki export XML fixtures are handled by [`dump`].

pub mod dump;
pub mod normalize;
pub mod stem;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use normalize::normalize_name;

/// Bibliographic identifier tags recognized on biographical records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IdentifierTag {
    #[serde(rename = "BNF")]
    Bnf,
    #[serde(rename = "GND")]
    Gnd,
    #[serde(rename = "ISNI")]
    Isni,
    #[serde(rename = "LCCN")]
    Lccn,
    #[serde(rename = "NLA")]
    Nla,
    #[serde(rename = "SELIBR")]
    Selibr,
    #[serde(rename = "ULAN")]
    Ulan,
    #[serde(rename = "VIAF")]
    Viaf,
}

impl IdentifierTag {
    pub const ALL: [IdentifierTag; 8] = [
        IdentifierTag::Bnf,
        IdentifierTag::Gnd,
        IdentifierTag::Isni,
        IdentifierTag::Lccn,
        IdentifierTag::Nla,
        IdentifierTag::Selibr,
        IdentifierTag::Ulan,
        IdentifierTag::Viaf,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            IdentifierTag::Bnf => "BNF",
            IdentifierTag::Gnd => "GND",
            IdentifierTag::Isni => "ISNI",
            IdentifierTag::Lccn => "LCCN",
            IdentifierTag::Nla => "NLA",
            IdentifierTag::Selibr => "SELIBR",
            IdentifierTag::Ulan => "ULAN",
            IdentifierTag::Viaf => "VIAF",
        }
    }
}

impl fmt::Display for IdentifierTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentifierTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_uppercase().as_str() {
            "BNF" => Ok(IdentifierTag::Bnf),
            "GND" => Ok(IdentifierTag::Gnd),
            "ISNI" => Ok(IdentifierTag::Isni),
            "LCCN" => Ok(IdentifierTag::Lccn),
            "NLA" => Ok(IdentifierTag::Nla),
            "SELIBR" => Ok(IdentifierTag::Selibr),
            "ULAN" => Ok(IdentifierTag::Ulan),
            "VIAF" => Ok(IdentifierTag::Viaf),
            other => Err(format!("unknown identifier tag {other:?}")),
        }
    }
}

/// A death date with optional month/day precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeathDate {
    pub year: i32,
    pub month: Option<u8>,
    pub day: Option<u8>,
}

impl DeathDate {
    pub fn year_only(year: i32) -> Self {
        DeathDate {
            year,
            month: None,
            day: None,
        }
    }
}

/// An inclusive year range, e.g. the label window 1910..=1952.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearRange {
    pub start: i32,
    pub end: i32,
}

impl YearRange {
    pub fn new(start: i32, end: i32) -> Result<Self> {
        if start > end {
            return Err(Error::InvalidInput(format!(
                "year range start {start} after end {end}"
            )));
        }
        Ok(YearRange { start, end })
    }

    /// The default label window.
    pub fn label_window() -> Self {
        YearRange {
            start: 1910,
            end: 1952,
        }
    }

    pub fn contains(&self, year: i32) -> bool {
        self.start <= year && year <= self.end
    }
}

impl fmt::Display for YearRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start, self.end)
    }
}

impl FromStr for YearRange {
    type Err = Error;

    /// Parses `"1910:1952"` (also accepts `-` as the separator).
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .or_else(|| s.split_once('-'))
            .ok_or_else(|| Error::InvalidInput(format!("bad year range {s:?}")))?;
        let start = a
            .trim()
            .parse::<i32>()
            .map_err(|e| Error::InvalidInput(format!("bad year range {s:?}: {e}")))?;
        let end = b
            .trim()
            .parse::<i32>()
            .map_err(|e| Error::InvalidInput(format!("bad year range {s:?}: {e}")))?;
        YearRange::new(start, end)
    }
}

/// One biographical subject with article metrics and an optional label.
///
/// JSONL field names (TSV columns carry the same names in the header row):
///
/// | field | type |
/// |---|---|
/// | `person_id` | string, unique within a catalog |
/// | `title` | display name |
/// | `birth_year` | integer, optional |
/// | `death_year`, `death_month`, `death_day` | integers, optional (month/day require the year) |
/// | `identifiers` | array of tags from `BNF GND ISNI LCCN NLA SELIBR ULAN VIAF` (TSV: comma-separated) |
/// | `article_length_bytes`, `article_age_days`, `days_since_last_revision` | nonnegative integers |
/// | `revisions_per_day` | nonnegative real |
/// | `views_per_day` | nonnegative real, optional |
/// | `category_count`, `translation_count`, `redirect_count` | nonnegative integers |
/// | `translation_flags` | array of 10 booleans (TSV: 10-character `0`/`1` string) |
/// | `good_article`, `featured_article`, `protected` | booleans (TSV: `0`/`1`) |
/// | `tokens` | array of stemmed word tokens (TSV: space-separated) |
/// | `has_digital_edition` | boolean, optional (TSV: `0`/`1`/empty) |
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PersonRecordWire", into = "PersonRecordWire")]
pub struct PersonRecord {
    pub person_id: String,
    pub title: String,
    pub birth_year: Option<i32>,
    pub death_date: Option<DeathDate>,
    pub identifiers: BTreeSet<IdentifierTag>,
    pub article_length_bytes: u64,
    pub article_age_days: u64,
    pub days_since_last_revision: u64,
    pub revisions_per_day: f64,
    pub views_per_day: Option<f64>,
    pub category_count: u32,
    pub translation_count: u32,
    pub redirect_count: u32,
    pub translation_flags: [bool; 10],
    pub good_article: bool,
    pub featured_article: bool,
    pub protected: bool,
    pub tokens: Vec<String>,
    pub has_digital_edition: Option<bool>,
}

impl PersonRecord {
    /// A record with the given id/title and all metrics zeroed.
    pub fn blank(person_id: impl Into<String>, title: impl Into<String>) -> Self {
        PersonRecord {
            person_id: person_id.into(),
            title: title.into(),
            birth_year: None,
            death_date: None,
            identifiers: BTreeSet::new(),
            article_length_bytes: 0,
            article_age_days: 0,
            days_since_last_revision: 0,
            revisions_per_day: 0.0,
            views_per_day: None,
            category_count: 0,
            translation_count: 0,
            redirect_count: 0,
            translation_flags: [false; 10],
            good_article: false,
            featured_article: false,
            protected: false,
            tokens: Vec::new(),
            has_digital_edition: None,
        }
    }

    pub fn death_year(&self) -> Option<i32> {
        self.death_date.map(|d| d.year)
    }

    /// Inclusion rule applied when parsing raw dumps: a record needs a birth
    /// date, a death date, or a bibliographic identifier; deaths before the
    /// year 1000 additionally need an identifier.
    pub fn passes_inclusion_rule(&self) -> bool {
        let has_any =
            self.birth_year.is_some() || self.death_date.is_some() || !self.identifiers.is_empty();
        if !has_any {
            return false;
        }
        match self.death_year() {
            Some(y) if y < 1000 => !self.identifiers.is_empty(),
            _ => true,
        }
    }
}

/// Flat wire form shared by JSONL and the wire-level validation.
#[derive(Debug, Serialize, Deserialize)]
struct PersonRecordWire {
    person_id: String,
    title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    birth_year: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    death_year: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    death_month: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    death_day: Option<u8>,
    #[serde(default)]
    identifiers: Vec<String>,
    article_length_bytes: u64,
    article_age_days: u64,
    days_since_last_revision: u64,
    revisions_per_day: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    views_per_day: Option<f64>,
    category_count: u32,
    translation_count: u32,
    redirect_count: u32,
    translation_flags: Vec<bool>,
    good_article: bool,
    featured_article: bool,
    protected: bool,
    #[serde(default)]
    tokens: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    has_digital_edition: Option<bool>,
}

impl TryFrom<PersonRecordWire> for PersonRecord {
    type Error = String;

    fn try_from(w: PersonRecordWire) -> std::result::Result<Self, String> {
        if w.person_id.is_empty() {
            return Err("person_id must be nonempty".into());
        }
        let death_date = match (w.death_year, w.death_month, w.death_day) {
            (None, None, None) => None,
            (None, _, _) => return Err("death_month/death_day without death_year".into()),
            (Some(year), month, day) => {
                if let Some(m) = month {
                    if !(1..=12).contains(&m) {
                        return Err(format!("death_month {m} out of range"));
                    }
                } else if day.is_some() {
                    return Err("death_day without death_month".into());
                }
                if let Some(d) = day {
                    if !(1..=31).contains(&d) {
                        return Err(format!("death_day {d} out of range"));
                    }
                }
                Some(DeathDate { year, month, day })
            }
        };
        let mut identifiers = BTreeSet::new();
        for tag in &w.identifiers {
            identifiers.insert(IdentifierTag::from_str(tag)?);
        }
        if !w.revisions_per_day.is_finite() || w.revisions_per_day < 0.0 {
            return Err(format!(
                "revisions_per_day must be finite and nonnegative, got {}",
                w.revisions_per_day
            ));
        }
        if let Some(v) = w.views_per_day {
            if !v.is_finite() || v < 0.0 {
                return Err(format!(
                    "views_per_day must be finite and nonnegative, got {v}"
                ));
            }
        }
        if w.translation_flags.len() != 10 {
            return Err(format!(
                "translation_flags must have exactly 10 entries, got {}",
                w.translation_flags.len()
            ));
        }
        let mut translation_flags = [false; 10];
        translation_flags.copy_from_slice(&w.translation_flags);
        Ok(PersonRecord {
            person_id: w.person_id,
            title: w.title,
            birth_year: w.birth_year,
            death_date,
            identifiers,
            article_length_bytes: w.article_length_bytes,
            article_age_days: w.article_age_days,
            days_since_last_revision: w.days_since_last_revision,
            revisions_per_day: w.revisions_per_day,
            views_per_day: w.views_per_day,
            category_count: w.category_count,
            translation_count: w.translation_count,
            redirect_count: w.redirect_count,
            translation_flags,
            good_article: w.good_article,
            featured_article: w.featured_article,
            protected: w.protected,
            tokens: w.tokens,
            has_digital_edition: w.has_digital_edition,
        })
    }
}

impl From<PersonRecord> for PersonRecordWire {
    fn from(r: PersonRecord) -> Self {
        PersonRecordWire {
            person_id: r.person_id,
            title: r.title,
            birth_year: r.birth_year,
            death_year: r.death_date.map(|d| d.year),
            death_month: r.death_date.and_then(|d| d.month),
            death_day: r.death_date.and_then(|d| d.day),
            identifiers: r.identifiers.iter().map(|t| t.to_string()).collect(),
            article_length_bytes: r.article_length_bytes,
            article_age_days: r.article_age_days,
            days_since_last_revision: r.days_since_last_revision,
            revisions_per_day: r.revisions_per_day,
            views_per_day: r.views_per_day,
            category_count: r.category_count,
            translation_count: r.translation_count,
            redirect_count: r.redirect_count,
            translation_flags: r.translation_flags.to_vec(),
            good_article: r.good_article,
            featured_article: r.featured_article,
            protected: r.protected,
            tokens: r.tokens,
            has_digital_edition: r.has_digital_edition,
        }
    }
}

/// One digital edition from the edition catalog export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditionRecord {
    pub author_name: String,
    pub author_death_year: Option<i32>,
    pub source_collection: String,
    pub work_title: String,
}

/// Manual correction applied after automatic matching.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchOverride {
    pub person_id: String,
    pub forced_label: bool,
}

/// Person records plus edition catalog plus overrides.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(try_from = "CatalogWire", into = "CatalogWire")]
pub struct Catalog {
    persons: Vec<PersonRecord>,
    index: HashMap<String, usize>,
    pub editions: Vec<EditionRecord>,
    pub overrides: Vec<MatchOverride>,
}

#[derive(Serialize, Deserialize)]
struct CatalogWire {
    persons: Vec<PersonRecord>,
    editions: Vec<EditionRecord>,
    overrides: Vec<MatchOverride>,
}

impl TryFrom<CatalogWire> for Catalog {
    type Error = Error;

    fn try_from(w: CatalogWire) -> Result<Self> {
        Catalog::from_parts(w.persons, w.editions, w.overrides)
    }
}

impl From<Catalog> for CatalogWire {
    fn from(c: Catalog) -> Self {
        CatalogWire {
            persons: c.persons,
            editions: c.editions,
            overrides: c.overrides,
        }
    }
}

impl Catalog {
    pub fn from_parts(
        persons: Vec<PersonRecord>,
        editions: Vec<EditionRecord>,
        overrides: Vec<MatchOverride>,
    ) -> Result<Self> {
        let mut index = HashMap::with_capacity(persons.len());
        for (i, p) in persons.iter().enumerate() {
            if index.insert(p.person_id.clone(), i).is_some() {
                return Err(Error::DuplicateId(p.person_id.clone()));
            }
        }
        Ok(Catalog {
            persons,
            index,
            editions,
            overrides,
        })
    }

    pub fn persons(&self) -> &[PersonRecord] {
        &self.persons
    }

    pub fn get(&self, person_id: &str) -> Option<&PersonRecord> {
        self.index.get(person_id).map(|&i| &self.persons[i])
    }

    pub fn len(&self) -> usize {
        self.persons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.persons.is_empty()
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let file = BufWriter::new(File::create(path)?);
        serde_json::to_writer(file, self)?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let file = BufReader::new(File::open(path)?);
        Ok(serde_json::from_reader(file)?)
    }
}

/// Person file formats accepted by [`load_persons`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PersonFileFormat {
    Jsonl,
    Tsv,
}

/// Load person records from a JSONL or TSV file, in file order.
///
/// Unknown fields are ignored; a missing required field or a duplicate
/// `person_id` is an error naming the offending row.
pub fn load_persons(path: &Path, format: PersonFileFormat) -> Result<Vec<PersonRecord>> {
    let records = match format {
        PersonFileFormat::Jsonl => load_persons_jsonl(path)?,
        PersonFileFormat::Tsv => load_persons_tsv(path)?,
    };
    let mut seen = HashSet::with_capacity(records.len());
    for r in &records {
        if !seen.insert(r.person_id.as_str()) {
            return Err(Error::DuplicateId(r.person_id.clone()));
        }
    }
    Ok(records)
}

fn load_persons_jsonl(path: &Path) -> Result<Vec<PersonRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: PersonRecord = serde_json::from_str(&line).map_err(|e| Error::BadRecord {
            row: i as u64 + 1,
            message: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}

/// TSV row shape; converted through the same validation as the JSONL path.
#[derive(Debug, Deserialize)]
struct PersonRowTsv {
    person_id: String,
    title: String,
    #[serde(default)]
    birth_year: Option<i32>,
    #[serde(default)]
    death_year: Option<i32>,
    #[serde(default)]
    death_month: Option<u8>,
    #[serde(default)]
    death_day: Option<u8>,
    #[serde(default)]
    identifiers: String,
    article_length_bytes: u64,
    article_age_days: u64,
    days_since_last_revision: u64,
    revisions_per_day: f64,
    #[serde(default)]
    views_per_day: Option<f64>,
    category_count: u32,
    translation_count: u32,
    redirect_count: u32,
    translation_flags: String,
    good_article: u8,
    featured_article: u8,
    protected: u8,
    #[serde(default)]
    tokens: String,
    #[serde(default)]
    has_digital_edition: Option<u8>,
}

fn load_persons_tsv(path: &Path) -> Result<Vec<PersonRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .from_path(path)?;
    let mut records = Vec::new();
    for (i, row) in reader.deserialize::<PersonRowTsv>().enumerate() {
        let row_no = i as u64 + 2; // header is line 1
        let row = row.map_err(|e| Error::BadRecord {
            row: row_no,
            message: e.to_string(),
        })?;
        let flags: Vec<bool> = row
            .translation_flags
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::BadRecord {
                    row: row_no,
                    message: format!("translation_flags character {other:?}"),
                }),
            })
            .collect::<Result<_>>()?;
        let wire = PersonRecordWire {
            person_id: row.person_id,
            title: row.title,
            birth_year: row.birth_year,
            death_year: row.death_year,
            death_month: row.death_month,
            death_day: row.death_day,
            identifiers: row
                .identifiers
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from)
                .collect(),
            article_length_bytes: row.article_length_bytes,
            article_age_days: row.article_age_days,
            days_since_last_revision: row.days_since_last_revision,
            revisions_per_day: row.revisions_per_day,
            views_per_day: row.views_per_day,
            category_count: row.category_count,
            translation_count: row.translation_count,
            redirect_count: row.redirect_count,
            translation_flags: flags,
            good_article: row.good_article != 0,
            featured_article: row.featured_article != 0,
            protected: row.protected != 0,
            tokens: row.tokens.split_whitespace().map(String::from).collect(),
            has_digital_edition: row.has_digital_edition.map(|v| v != 0),
        };
        records.push(
            PersonRecord::try_from(wire).map_err(|message| Error::BadRecord {
                row: row_no,
                message,
            })?,
        );
    }
    Ok(records)
}

/// Write person records as JSON Lines.
pub fn save_persons_jsonl(records: &[PersonRecord], path: &Path) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut file, r)?;
        file.write_all(b"\n")?;
    }
    Ok(())
}

/// Load the edition catalog: headerless 4-column TSV
/// (`author_name`, `death_year`, `collection`, `title`), no quoting.
/// A blank `death_year` means the catalog carries no year for the author.
pub fn load_editions(path: &Path) -> Result<Vec<EditionRecord>> {
    let display = path.display().to_string();
    let reader = BufReader::new(File::open(path)?);
    let mut editions = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i as u64 + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::MalformedRow {
                path: display,
                line: line_no,
                message: format!("expected 4 tab-separated fields, got {}", fields.len()),
            });
        }
        let author_name = fields[0].trim();
        if author_name.is_empty() {
            return Err(Error::MalformedRow {
                path: display,
                line: line_no,
                message: "author_name is empty".into(),
            });
        }
        let year_field = fields[1].trim();
        let author_death_year = if year_field.is_empty() {
            None
        } else {
            Some(year_field.parse::<i32>().map_err(|_| Error::MalformedRow {
                path: display.clone(),
                line: line_no,
                message: format!("death_year {year_field:?} is not a year"),
            })?)
        };
        editions.push(EditionRecord {
            author_name: author_name.to_string(),
            author_death_year,
            source_collection: fields[2].trim().to_string(),
            work_title: fields[3].trim().to_string(),
        });
    }
    Ok(editions)
}

/// Load overrides: 2-column TSV (`person_id`, `true`/`false`; `1`/`0` accepted).
pub fn load_overrides(path: &Path) -> Result<Vec<MatchOverride>> {
    let display = path.display().to_string();
    let reader = BufReader::new(File::open(path)?);
    let mut overrides = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i as u64 + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::MalformedRow {
                path: display,
                line: line_no,
                message: format!("expected 2 tab-separated fields, got {}", fields.len()),
            });
        }
        let forced_label = match fields[1].trim().to_ascii_lowercase().as_str() {
            "true" | "1" => true,
            "false" | "0" => false,
            other => {
                return Err(Error::MalformedRow {
                    path: display,
                    line: line_no,
                    message: format!("label {other:?} is not true/false"),
                })
            }
        };
        overrides.push(MatchOverride {
            person_id: fields[0].trim().to_string(),
            forced_label,
        });
    }
    Ok(overrides)
}

/// Person ids whose normalized name matches at least one edition record
/// (death years must agree when the edition carries one), with overrides
/// applied last. Matching is window-independent; labeling restricts it.
pub fn edition_matches(catalog: &Catalog) -> Result<HashSet<String>> {
    let mut by_name: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, e) in catalog.editions.iter().enumerate() {
        by_name
            .entry(normalize_name(&e.author_name))
            .or_default()
            .push(i);
    }
    let mut matched = HashSet::new();
    for p in &catalog.persons {
        let key = normalize_name(&p.title);
        let Some(candidates) = by_name.get(&key) else {
            continue;
        };
        let death_year = p.death_year();
        let hit =
            candidates.iter().any(
                |&i| match (catalog.editions[i].author_death_year, death_year) {
                    (None, _) => true,
                    (Some(ey), Some(py)) => ey == py,
                    (Some(_), None) => false,
                },
            );
        if hit {
            matched.insert(p.person_id.clone());
        }
    }
    for ov in &catalog.overrides {
        if catalog.get(&ov.person_id).is_none() {
            return Err(Error::UnknownPerson(ov.person_id.clone()));
        }
        if ov.forced_label {
            matched.insert(ov.person_id.clone());
        } else {
            matched.remove(&ov.person_id);
        }
    }
    Ok(matched)
}

/// Assign `has_digital_edition` labels to every person whose death year
/// falls in `window`; persons outside the window are left untouched.
/// Overrides are applied last and win everywhere.
pub fn match_and_label(mut catalog: Catalog, window: &YearRange) -> Result<Catalog> {
    let mut by_name: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, e) in catalog.editions.iter().enumerate() {
        by_name
            .entry(normalize_name(&e.author_name))
            .or_default()
            .push(i);
    }
    for p in &mut catalog.persons {
        let Some(death_year) = p.death_date.map(|d| d.year) else {
            continue;
        };
        if !window.contains(death_year) {
            continue;
        }
        let key = normalize_name(&p.title);
        let hit = by_name.get(&key).is_some_and(|candidates| {
            candidates.iter().any(|&i| {
                catalog.editions[i]
                    .author_death_year
                    .is_none_or(|ey| ey == death_year)
            })
        });
        p.has_digital_edition = Some(hit);
    }
    let overrides = catalog.overrides.clone();
    for ov in &overrides {
        let Some(&i) = catalog.index.get(&ov.person_id) else {
            return Err(Error::UnknownPerson(ov.person_id.clone()));
        };
        catalog.persons[i].has_digital_edition = Some(ov.forced_label);
    }
    Ok(catalog)
}

/// Label coverage for one death-year bin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageBin {
    pub range: YearRange,
    pub labeled: usize,
    pub positives: usize,
    /// `100 × positives / labeled`, rounded to one decimal; absent when the
    /// bin contains no labeled persons.
    pub percent: Option<f64>,
}

/// Percentage of labeled persons with at least one digital edition, per bin.
pub fn label_coverage_stats(catalog: &Catalog, bins: &[YearRange]) -> Vec<CoverageBin> {
    bins.iter()
        .map(|range| {
            let mut labeled = 0usize;
            let mut positives = 0usize;
            for p in &catalog.persons {
                let Some(year) = p.death_year() else { continue };
                if !range.contains(year) {
                    continue;
                }
                if let Some(label) = p.has_digital_edition {
                    labeled += 1;
                    if label {
                        positives += 1;
                    }
                }
            }
            let percent =
                (labeled > 0).then(|| (1000.0 * positives as f64 / labeled as f64).round() / 10.0);
            CoverageBin {
                range: *range,
                labeled,
                positives,
                percent,
            }
        })
        .collect()
}
