//! Design-matrix assembly, standardization, and age interactions.
//!
//! The [`FeatureRegistry`] fixes the ordered set of base columns extracted
//! from person records and topic weights. Base columns are standardized to
//! mean zero / unit standard deviation, then every non-anchor column is
//! multiplied by the standardized article-age column and the products are
//! standardized with their own scaler entries. [`FeaturePipeline`] bundles
//! the registry with the two fitted scalers so held-out rows are always
//! transformed with training statistics, and stamps transformed matrices
//! with a hash that prediction verifies.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::{IdentifierTag, PersonRecord};

/// Name of the article-age column; the default interaction anchor.
pub const AGE_COLUMN: &str = "age_days";
/// Name of the VIAF indicator column (used by the evaluation baselines).
pub const VIAF_COLUMN: &str = "has_viaf";

/// Scalar transform applied to a raw field value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transform {
    Identity,
    Log1p,
    Indicator,
}

/// Where a base column's raw value comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FeatureSource {
    ArticleLengthBytes,
    ArticleAgeDays,
    DaysSinceLastRevision,
    RevisionsPerDay,
    ViewsPerDay,
    ViewsMissing,
    CategoryCount,
    TranslationCount,
    RedirectCount,
    TranslationFlag(usize),
    Identifier(IdentifierTag),
    GoodArticle,
    FeaturedArticle,
    Protected,
    DeathDecade { start: i32, end: i32 },
    TopicWeight(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureDescriptor {
    pub name: String,
    pub source: FeatureSource,
    pub transform: Transform,
}

/// Ordered, named base-feature set; serialized alongside every model fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRegistry {
    topic_count: usize,
    features: Vec<FeatureDescriptor>,
}

impl FeatureRegistry {
    /// The standard registry: article metrics, translation and identifier
    /// indicators, quality flags, death-decade indicators for 1910–1952,
    /// and `topic_count` topic-weight columns.
    pub fn standard(topic_count: usize) -> Self {
        let mut features = vec![
            FeatureDescriptor {
                name: "length_log".into(),
                source: FeatureSource::ArticleLengthBytes,
                transform: Transform::Log1p,
            },
            FeatureDescriptor {
                name: AGE_COLUMN.into(),
                source: FeatureSource::ArticleAgeDays,
                transform: Transform::Identity,
            },
            FeatureDescriptor {
                name: "days_since_last_revision".into(),
                source: FeatureSource::DaysSinceLastRevision,
                transform: Transform::Identity,
            },
            FeatureDescriptor {
                name: "revisions_per_day".into(),
                source: FeatureSource::RevisionsPerDay,
                transform: Transform::Identity,
            },
            FeatureDescriptor {
                name: "views_per_day".into(),
                source: FeatureSource::ViewsPerDay,
                transform: Transform::Identity,
            },
            FeatureDescriptor {
                name: "views_missing".into(),
                source: FeatureSource::ViewsMissing,
                transform: Transform::Indicator,
            },
            FeatureDescriptor {
                name: "category_count".into(),
                source: FeatureSource::CategoryCount,
                transform: Transform::Identity,
            },
            FeatureDescriptor {
                name: "translation_count".into(),
                source: FeatureSource::TranslationCount,
                transform: Transform::Identity,
            },
            FeatureDescriptor {
                name: "redirect_count".into(),
                source: FeatureSource::RedirectCount,
                transform: Transform::Identity,
            },
        ];
        for i in 0..10 {
            features.push(FeatureDescriptor {
                name: format!("translation_top_{}", i + 1),
                source: FeatureSource::TranslationFlag(i),
                transform: Transform::Indicator,
            });
        }
        for tag in [
            IdentifierTag::Gnd,
            IdentifierTag::Isni,
            IdentifierTag::Lccn,
            IdentifierTag::Viaf,
        ] {
            features.push(FeatureDescriptor {
                name: format!("has_{}", tag.as_str().to_lowercase()),
                source: FeatureSource::Identifier(tag),
                transform: Transform::Indicator,
            });
        }
        features.push(FeatureDescriptor {
            name: "good_article".into(),
            source: FeatureSource::GoodArticle,
            transform: Transform::Indicator,
        });
        features.push(FeatureDescriptor {
            name: "featured_article".into(),
            source: FeatureSource::FeaturedArticle,
            transform: Transform::Indicator,
        });
        features.push(FeatureDescriptor {
            name: "protected".into(),
            source: FeatureSource::Protected,
            transform: Transform::Indicator,
        });
        for (name, start, end) in [
            ("died_1910s", 1910, 1919),
            ("died_1920s", 1920, 1929),
            ("died_1930s", 1930, 1939),
            ("died_1940s", 1940, 1949),
            ("died_1950_52", 1950, 1952),
        ] {
            features.push(FeatureDescriptor {
                name: name.into(),
                source: FeatureSource::DeathDecade { start, end },
                transform: Transform::Indicator,
            });
        }
        let width = (topic_count.max(1) as f64).log10().ceil().max(3.0) as usize;
        for t in 0..topic_count {
            features.push(FeatureDescriptor {
                name: format!("topic_{t:0width$}"),
                source: FeatureSource::TopicWeight(t),
                transform: Transform::Identity,
            });
        }
        FeatureRegistry {
            topic_count,
            features,
        }
    }

    pub fn topic_count(&self) -> usize {
        self.topic_count
    }

    pub fn features(&self) -> &[FeatureDescriptor] {
        &self.features
    }

    pub fn names(&self) -> Vec<String> {
        self.features.iter().map(|f| f.name.clone()).collect()
    }
}

/// Dense design matrix with named columns and per-row optional labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    columns: Vec<String>,
    row_ids: Vec<String>,
    values: Vec<f64>,
    labels: Vec<Option<bool>>,
    pipeline_hash: Option<String>,
}

impl FeatureMatrix {
    pub fn new(
        columns: Vec<String>,
        row_ids: Vec<String>,
        values: Vec<f64>,
        labels: Vec<Option<bool>>,
    ) -> Result<Self> {
        if values.len() != columns.len() * row_ids.len() {
            return Err(Error::LengthMismatch {
                expected: columns.len() * row_ids.len(),
                got: values.len(),
            });
        }
        if labels.len() != row_ids.len() {
            return Err(Error::LengthMismatch {
                expected: row_ids.len(),
                got: labels.len(),
            });
        }
        let unique: HashSet<&String> = columns.iter().collect();
        if unique.len() != columns.len() {
            return Err(Error::ColumnMismatch("duplicate column names".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value at flat index {i}"
            )));
        }
        Ok(FeatureMatrix {
            columns,
            row_ids,
            values,
            labels,
            pipeline_hash: None,
        })
    }

    /// Convenience constructor for tests and synthetic data: row ids are
    /// generated, labels empty.
    pub fn from_rows(columns: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let row_ids = (0..rows.len()).map(|i| format!("row{i}")).collect();
        let mut values = Vec::with_capacity(rows.len() * columns.len());
        for row in rows {
            if row.len() != columns.len() {
                return Err(Error::LengthMismatch {
                    expected: columns.len(),
                    got: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        let labels = vec![None; rows.len()];
        FeatureMatrix::new(columns, row_ids, values, labels)
    }

    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.columns.len()..(i + 1) * self.columns.len()]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.columns.len() + col]
    }

    pub fn labels(&self) -> &[Option<bool>] {
        &self.labels
    }

    pub fn set_labels(&mut self, labels: Vec<Option<bool>>) -> Result<()> {
        if labels.len() != self.row_ids.len() {
            return Err(Error::LengthMismatch {
                expected: self.row_ids.len(),
                got: labels.len(),
            });
        }
        self.labels = labels;
        Ok(())
    }

    pub fn pipeline_hash(&self) -> Option<&str> {
        self.pipeline_hash.as_deref()
    }

    pub fn set_pipeline_hash(&mut self, hash: Option<String>) {
        self.pipeline_hash = hash;
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, index: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|r| self.get(r, index)).collect()
    }

    /// New matrix with the given columns, in the given order.
    pub fn select_columns(&self, names: &[String]) -> Result<FeatureMatrix> {
        let indices: Vec<usize> = names
            .iter()
            .map(|n| {
                self.column_index(n)
                    .ok_or_else(|| Error::ColumnMismatch(format!("unknown column {n:?}")))
            })
            .collect::<Result<_>>()?;
        let mut values = Vec::with_capacity(self.n_rows() * indices.len());
        for r in 0..self.n_rows() {
            for &c in &indices {
                values.push(self.get(r, c));
            }
        }
        Ok(FeatureMatrix {
            columns: names.to_vec(),
            row_ids: self.row_ids.clone(),
            values,
            labels: self.labels.clone(),
            pipeline_hash: None,
        })
    }

    /// New matrix with the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<FeatureMatrix> {
        let mut values = Vec::with_capacity(rows.len() * self.n_cols());
        let mut row_ids = Vec::with_capacity(rows.len());
        let mut labels = Vec::with_capacity(rows.len());
        for &r in rows {
            if r >= self.n_rows() {
                return Err(Error::InvalidInput(format!("row index {r} out of range")));
            }
            values.extend_from_slice(self.row(r));
            row_ids.push(self.row_ids[r].clone());
            labels.push(self.labels[r]);
        }
        Ok(FeatureMatrix {
            columns: self.columns.clone(),
            row_ids,
            values,
            labels,
            pipeline_hash: self.pipeline_hash.clone(),
        })
    }

    /// Indices of rows that carry a label.
    pub fn labeled_rows(&self) -> Vec<usize> {
        (0..self.n_rows())
            .filter(|&r| self.labels[r].is_some())
            .collect()
    }

    /// Labels of the given rows as 0/1 values; rows must all be labeled.
    pub fn label_vector(&self, rows: &[usize]) -> Result<Vec<f64>> {
        rows.iter()
            .map(|&r| {
                self.labels[r]
                    .map(|b| if b { 1.0 } else { 0.0 })
                    .ok_or_else(|| {
                        Error::InvalidInput(format!("row {r} ({}) is unlabeled", self.row_ids[r]))
                    })
            })
            .collect()
    }

    /// Write as TSV: `person_id`, one column per feature, `label` last
    /// (`1`/`0`/empty). Floats use the shortest round-tripping form.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "person_id")?;
        for c in &self.columns {
            write!(w, "\t{c}")?;
        }
        writeln!(w, "\tlabel")?;
        for r in 0..self.n_rows() {
            write!(w, "{}", self.row_ids[r])?;
            for v in self.row(r) {
                write!(w, "\t{v}")?;
            }
            match self.labels[r] {
                Some(true) => writeln!(w, "\t1")?,
                Some(false) => writeln!(w, "\t0")?,
                None => writeln!(w, "\t")?,
            }
        }
        Ok(())
    }

    pub fn save_tsv(&self, path: &Path) -> Result<()> {
        let file = BufWriter::new(File::create(path)?);
        self.write_tsv(file)
    }

    pub fn load_tsv(path: &Path) -> Result<FeatureMatrix> {
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .quoting(false)
            .flexible(false)
            .from_reader(BufReader::new(File::open(path)?));
        let headers = reader.headers()?.clone();
        if headers.is_empty() || &headers[0] != "person_id" {
            return Err(Error::ColumnMismatch(
                "first column must be person_id".into(),
            ));
        }
        let n = headers.len();
        if n < 2 || &headers[n - 1] != "label" {
            return Err(Error::ColumnMismatch("last column must be label".into()));
        }
        let columns: Vec<String> = headers
            .iter()
            .skip(1)
            .take(n - 2)
            .map(String::from)
            .collect();
        let mut row_ids = Vec::new();
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() != n {
                return Err(Error::BadRecord {
                    row: i as u64 + 2,
                    message: format!("expected {n} fields, got {}", record.len()),
                });
            }
            row_ids.push(record[0].to_string());
            for f in 1..n - 1 {
                let v: f64 = record[f].parse().map_err(|_| Error::BadRecord {
                    row: i as u64 + 2,
                    message: format!("bad number {:?} in column {}", &record[f], &headers[f]),
                })?;
                values.push(v);
            }
            labels.push(match record[n - 1].trim() {
                "" => None,
                "1" => Some(true),
                "0" => Some(false),
                other => {
                    return Err(Error::BadRecord {
                        row: i as u64 + 2,
                        message: format!("bad label {other:?}"),
                    })
                }
            });
        }
        FeatureMatrix::new(columns, row_ids, values, labels)
    }
}

fn raw_value(p: &PersonRecord, weights: &[f64], source: &FeatureSource) -> f64 {
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    match source {
        FeatureSource::ArticleLengthBytes => p.article_length_bytes as f64,
        FeatureSource::ArticleAgeDays => p.article_age_days as f64,
        FeatureSource::DaysSinceLastRevision => p.days_since_last_revision as f64,
        FeatureSource::RevisionsPerDay => p.revisions_per_day,
        FeatureSource::ViewsPerDay => p.views_per_day.unwrap_or(0.0),
        FeatureSource::ViewsMissing => flag(p.views_per_day.is_none()),
        FeatureSource::CategoryCount => f64::from(p.category_count),
        FeatureSource::TranslationCount => f64::from(p.translation_count),
        FeatureSource::RedirectCount => f64::from(p.redirect_count),
        FeatureSource::TranslationFlag(i) => flag(p.translation_flags[*i]),
        FeatureSource::Identifier(tag) => flag(p.identifiers.contains(tag)),
        FeatureSource::GoodArticle => flag(p.good_article),
        FeatureSource::FeaturedArticle => flag(p.featured_article),
        FeatureSource::Protected => flag(p.protected),
        FeatureSource::DeathDecade { start, end } => {
            flag(p.death_year().is_some_and(|y| *start <= y && y <= *end))
        }
        FeatureSource::TopicWeight(i) => weights[*i],
    }
}

/// Assemble the raw (unstandardized) base matrix: one row per person, one
/// column per registry descriptor, labels copied from the records.
pub fn assemble_base(
    persons: &[PersonRecord],
    weights: &[Vec<f64>],
    registry: &FeatureRegistry,
) -> Result<FeatureMatrix> {
    if weights.len() != persons.len() {
        return Err(Error::LengthMismatch {
            expected: persons.len(),
            got: weights.len(),
        });
    }
    for w in weights {
        if w.len() != registry.topic_count {
            return Err(Error::LengthMismatch {
                expected: registry.topic_count,
                got: w.len(),
            });
        }
    }
    let columns = registry.names();
    let mut values = Vec::with_capacity(persons.len() * columns.len());
    let mut row_ids = Vec::with_capacity(persons.len());
    let mut labels = Vec::with_capacity(persons.len());
    for (p, w) in persons.iter().zip(weights) {
        row_ids.push(p.person_id.clone());
        labels.push(p.has_digital_edition);
        for desc in &registry.features {
            let raw = raw_value(p, w, &desc.source);
            let v = match desc.transform {
                Transform::Identity | Transform::Indicator => raw,
                Transform::Log1p => raw.ln_1p(),
            };
            values.push(v);
        }
    }
    FeatureMatrix::new(columns, row_ids, values, labels)
}

/// Per-column standardization statistics.
///
/// Constant columns (population sd below `1e-12·(1+|mean|)`) are flagged
/// and recorded with sd 0; [`apply_scaler`] passes them through untouched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    columns: Vec<String>,
    means: Vec<f64>,
    sds: Vec<f64>,
    constant: Vec<bool>,
}

impl Scaler {
    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.means[i]
    }

    pub fn sd(&self, i: usize) -> f64 {
        self.sds[i]
    }

    pub fn is_constant(&self, i: usize) -> bool {
        self.constant[i]
    }
}

/// Record column means and population standard deviations.
pub fn fit_scaler(matrix: &FeatureMatrix) -> Result<Scaler> {
    let n = matrix.n_rows();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 rows to fit a scaler, got {n}"
        )));
    }
    let cols = matrix.n_cols();
    let mut means = vec![0.0; cols];
    for r in 0..n {
        for (c, m) in means.iter_mut().enumerate() {
            *m += matrix.get(r, c);
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }
    let mut sds = vec![0.0; cols];
    for r in 0..n {
        for (c, s) in sds.iter_mut().enumerate() {
            let d = matrix.get(r, c) - means[c];
            *s += d * d;
        }
    }
    let mut constant = vec![false; cols];
    for c in 0..cols {
        let sd = (sds[c] / n as f64).sqrt();
        if sd < 1e-12 * (1.0 + means[c].abs()) {
            constant[c] = true;
            sds[c] = 0.0;
        } else {
            sds[c] = sd;
        }
    }
    Ok(Scaler {
        columns: matrix.columns.clone(),
        means,
        sds,
        constant,
    })
}

/// `(x − mean) / sd` per non-constant column, using the scaler's recorded
/// statistics (never re-fit; held-out rows must be scaled with training
/// statistics). Columns must match the scaler exactly and in order.
pub fn apply_scaler(matrix: &FeatureMatrix, scaler: &Scaler) -> Result<FeatureMatrix> {
    if matrix.columns != scaler.columns {
        return Err(Error::ColumnMismatch(format!(
            "matrix columns {:?} do not match scaler columns {:?}",
            matrix.columns, scaler.columns
        )));
    }
    let mut out = matrix.clone();
    out.pipeline_hash = None;
    let cols = matrix.n_cols();
    for r in 0..matrix.n_rows() {
        for c in 0..cols {
            if !scaler.constant[c] {
                let i = r * cols + c;
                out.values[i] = (out.values[i] - scaler.means[c]) / scaler.sds[c];
            }
        }
    }
    Ok(out)
}

/// Scale only the columns named by `scaler`, leaving the rest untouched.
fn scale_named_columns(matrix: &FeatureMatrix, scaler: &Scaler) -> Result<FeatureMatrix> {
    let mut out = matrix.clone();
    out.pipeline_hash = None;
    let cols = matrix.n_cols();
    for (sc, name) in scaler.columns.iter().enumerate() {
        let c = matrix
            .column_index(name)
            .ok_or_else(|| Error::ColumnMismatch(format!("unknown column {name:?}")))?;
        if scaler.constant[sc] {
            continue;
        }
        for r in 0..matrix.n_rows() {
            let i = r * cols + c;
            out.values[i] = (out.values[i] - scaler.means[sc]) / scaler.sds[sc];
        }
    }
    Ok(out)
}

fn interaction_name(column: &str) -> String {
    format!("age×{column}")
}

/// Append raw interaction columns `anchor · c` for every column `c` other
/// than the anchor, in column order. No standardization is applied here.
pub fn interaction_products(matrix: &FeatureMatrix, anchor: &str) -> Result<FeatureMatrix> {
    let a = matrix
        .column_index(anchor)
        .ok_or_else(|| Error::ColumnMismatch(format!("anchor column {anchor:?} missing")))?;
    let others: Vec<usize> = (0..matrix.n_cols()).filter(|&c| c != a).collect();
    let mut columns = matrix.columns.clone();
    for &c in &others {
        columns.push(interaction_name(&matrix.columns[c]));
    }
    let new_cols = columns.len();
    let mut values = Vec::with_capacity(matrix.n_rows() * new_cols);
    for r in 0..matrix.n_rows() {
        values.extend_from_slice(matrix.row(r));
        let age = matrix.get(r, a);
        for &c in &others {
            values.push(age * matrix.get(r, c));
        }
    }
    FeatureMatrix::new(
        columns,
        matrix.row_ids.clone(),
        values,
        matrix.labels.clone(),
    )
}

/// Append age-interaction columns and standardize them with a scaler fit on
/// this matrix. Returns the augmented matrix and the interaction scaler
/// (reuse it on held-out rows via [`add_interactions_scaled`]).
pub fn add_interactions(matrix: &FeatureMatrix, anchor: &str) -> Result<(FeatureMatrix, Scaler)> {
    let with_products = interaction_products(matrix, anchor)?;
    let product_names: Vec<String> = with_products.columns[matrix.n_cols()..].to_vec();
    let products = with_products.select_columns(&product_names)?;
    let scaler = fit_scaler(&products)?;
    let scaled = scale_named_columns(&with_products, &scaler)?;
    Ok((scaled, scaler))
}

/// Append age-interaction columns standardized with an existing scaler.
pub fn add_interactions_scaled(
    matrix: &FeatureMatrix,
    anchor: &str,
    scaler: &Scaler,
) -> Result<FeatureMatrix> {
    let with_products = interaction_products(matrix, anchor)?;
    let product_names: Vec<String> = with_products.columns[matrix.n_cols()..].to_vec();
    if product_names != scaler.columns {
        return Err(Error::ColumnMismatch(
            "interaction scaler does not cover the product columns".into(),
        ));
    }
    scale_named_columns(&with_products, scaler)
}

/// Registry + fitted scalers: the full base→standardized→interactions
/// transform, reusable on held-out rows with training statistics only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturePipeline {
    registry: FeatureRegistry,
    anchor: String,
    base_scaler: Scaler,
    interaction_scaler: Scaler,
}

impl FeaturePipeline {
    /// Fit scalers on `base` (raw base matrix, typically the labeled
    /// training rows).
    pub fn fit(registry: FeatureRegistry, base: &FeatureMatrix, anchor: &str) -> Result<Self> {
        let expected = registry.names();
        if base.columns != expected {
            return Err(Error::ColumnMismatch(
                "base matrix columns do not match the registry".into(),
            ));
        }
        let base_scaler = fit_scaler(base)?;
        let standardized = apply_scaler(base, &base_scaler)?;
        let (_, interaction_scaler) = add_interactions(&standardized, anchor)?;
        Ok(FeaturePipeline {
            registry,
            anchor: anchor.to_string(),
            base_scaler,
            interaction_scaler,
        })
    }

    /// Transform a raw base matrix with the stored statistics and stamp the
    /// result with this pipeline's hash.
    pub fn transform(&self, base: &FeatureMatrix) -> Result<FeatureMatrix> {
        let standardized = apply_scaler(base, &self.base_scaler)?;
        let mut out =
            add_interactions_scaled(&standardized, &self.anchor, &self.interaction_scaler)?;
        out.pipeline_hash = Some(self.hash());
        Ok(out)
    }

    pub fn registry(&self) -> &FeatureRegistry {
        &self.registry
    }

    pub fn anchor(&self) -> &str {
        &self.anchor
    }

    /// Column names of a transformed matrix: base columns followed by the
    /// interaction columns in base order.
    pub fn output_columns(&self) -> Vec<String> {
        let mut names = self.registry.names();
        let base = names.clone();
        for c in &base {
            if c != &self.anchor {
                names.push(interaction_name(c));
            }
        }
        names
    }

    /// Content hash over registry, anchor, and both scalers.
    pub fn hash(&self) -> String {
        let body = serde_json::to_string(self).expect("pipeline serialization");
        let digest = Sha256::digest(body.as_bytes());
        hex::encode(&digest[..16])
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
