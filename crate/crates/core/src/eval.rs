//! Evaluation: repeated half-holdout cross-validation against baselines,
//! and pairwise-loss comparison of rankings with permutation confidence.
//!
//! The CV protocol splits the labeled ids into two halves per repeat; both
//! directions are evaluated (fit on A predict B, then fit on B predict A).
//! Standardization statistics and interaction scalers come from the
//! training half only, and held-out predictions use the MAP point
//! estimate with an explicit probability clamp at the evaluation boundary.

use std::collections::{HashMap, HashSet};
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{
    add_interactions, add_interactions_scaled, apply_scaler, fit_scaler, FeatureMatrix, AGE_COLUMN,
    VIAF_COLUMN,
};
use crate::model::{fit_map, predict_prob, FitOptions, PriorSpec};

/// Probability clamp applied at the cross-validation boundary.
pub const PROBABILITY_CLAMP: f64 = 1e-12;

/// Clamp into `[ε, 1−ε]` before scoring log loss.
pub fn clamp_probability(p: f64) -> f64 {
    p.clamp(PROBABILITY_CLAMP, 1.0 - PROBABILITY_CLAMP)
}

/// Total and mean binary cross-entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLoss {
    pub total: f64,
    pub mean: f64,
    pub count: usize,
}

/// `−Σ [yₙ ln p̂ₙ + (1−yₙ) ln(1−p̂ₙ)]`, plus the mean over observations.
///
/// A probability of exactly 0 or 1 paired with the opposing label is an
/// error; callers clamp explicitly (see [`clamp_probability`]).
pub fn log_loss(labels: &[f64], probabilities: &[f64]) -> Result<LogLoss> {
    if labels.len() != probabilities.len() {
        return Err(Error::LengthMismatch {
            expected: labels.len(),
            got: probabilities.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::InvalidInput("empty input".into()));
    }
    let mut total = 0.0;
    for (&y, &p) in labels.iter().zip(probabilities) {
        if y != 0.0 && y != 1.0 {
            return Err(Error::NonBinaryLabel(y));
        }
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidInput(format!(
                "probability {p} outside [0, 1]"
            )));
        }
        if (p == 0.0 && y == 1.0) || (p == 1.0 && y == 0.0) {
            return Err(Error::DegenerateProbability { prob: p, label: y });
        }
        total -= if y == 1.0 { p.ln() } else { (1.0 - p).ln() };
    }
    Ok(LogLoss {
        total,
        mean: total / labels.len() as f64,
        count: labels.len(),
    })
}

/// Per-repeat partition of the labeled ids into two halves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvPlan {
    pub halves: Vec<(Vec<String>, Vec<String>)>,
    pub seed: u64,
}

impl CvPlan {
    pub fn repeats(&self) -> usize {
        self.halves.len()
    }
}

/// Seeded shuffles into halves whose sizes differ by at most one.
/// Requires at least 4 labeled ids with both classes present.
pub fn make_cv_plan(labeled: &[(String, bool)], repeats: usize, seed: u64) -> Result<CvPlan> {
    if labeled.len() < 4 {
        return Err(Error::InvalidInput(format!(
            "need at least 4 labeled ids, got {}",
            labeled.len()
        )));
    }
    if repeats == 0 {
        return Err(Error::InvalidInput("need at least 1 repeat".into()));
    }
    let unique: HashSet<&str> = labeled.iter().map(|(id, _)| id.as_str()).collect();
    if unique.len() != labeled.len() {
        return Err(Error::InvalidInput("duplicate labeled ids".into()));
    }
    let positives = labeled.iter().filter(|(_, y)| *y).count();
    if positives == 0 || positives == labeled.len() {
        return Err(Error::DegenerateLabels(u8::from(positives > 0)));
    }
    let mut ids: Vec<String> = labeled.iter().map(|(id, _)| id.clone()).collect();
    ids.sort_unstable(); // input order must not leak into the plan
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut halves = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        ids.shuffle(&mut rng);
        let mid = ids.len() / 2;
        halves.push((ids[..mid].to_vec(), ids[mid..].to_vec()));
    }
    Ok(CvPlan { halves, seed })
}

/// The models compared in cross-validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CvModel {
    /// Every base column plus all age interactions.
    Full,
    /// Article age alone.
    AgeOnly,
    /// Article age, the VIAF indicator, and their interaction.
    AgeViafInteraction,
}

impl CvModel {
    pub fn name(&self) -> &'static str {
        match self {
            CvModel::Full => "full",
            CvModel::AgeOnly => "age_only",
            CvModel::AgeViafInteraction => "age_viaf_interaction",
        }
    }

    pub const ALL: [CvModel; 3] = [CvModel::Full, CvModel::AgeOnly, CvModel::AgeViafInteraction];
}

/// Cross-validation settings.
#[derive(Debug, Clone)]
pub struct CvConfig {
    pub anchor: String,
    pub viaf_column: String,
    pub prior: PriorSpec,
    pub fit: FitOptions,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            anchor: AGE_COLUMN.to_string(),
            viaf_column: VIAF_COLUMN.to_string(),
            prior: PriorSpec::default(),
            fit: FitOptions::default(),
        }
    }
}

/// One (repeat, half, model) evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvOutcome {
    pub repeat: usize,
    pub half: usize,
    pub model: String,
    pub n_train: usize,
    pub n_heldout: usize,
    pub converged: bool,
    pub loss: LogLoss,
}

/// A (repeat, half) skipped because its training half had one class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedHalf {
    pub repeat: usize,
    pub half: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    pub model: String,
    pub fits: usize,
    pub mean_loss: f64,
    pub sd_loss: f64,
}

/// Per-repeat, per-model held-out losses plus summary rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub outcomes: Vec<CvOutcome>,
    pub skipped: Vec<SkippedHalf>,
    pub summaries: Vec<ModelSummary>,
}

impl EvalReport {
    /// Mean held-out log loss of one model in one repeat (both halves).
    pub fn repeat_mean_loss(&self, repeat: usize, model: CvModel) -> Option<f64> {
        let losses: Vec<f64> = self
            .outcomes
            .iter()
            .filter(|o| o.repeat == repeat && o.model == model.name())
            .map(|o| o.loss.mean)
            .collect();
        if losses.is_empty() {
            None
        } else {
            Some(losses.iter().sum::<f64>() / losses.len() as f64)
        }
    }

    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "repeat\thalf\tmodel\tn_train\tn_heldout\tconverged\tlog_loss_total\tlog_loss_mean"
        )?;
        for o in &self.outcomes {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                o.repeat,
                o.half,
                o.model,
                o.n_train,
                o.n_heldout,
                o.converged,
                o.loss.total,
                o.loss.mean
            )?;
        }
        Ok(())
    }

    pub fn write_summary<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "model\tfits\tmean_loss\tsd_loss")?;
        for s in &self.summaries {
            writeln!(w, "{}\t{}\t{}\t{}", s.model, s.fits, s.mean_loss, s.sd_loss)?;
        }
        for s in &self.skipped {
            writeln!(
                w,
                "# skipped repeat {} half {}: {}",
                s.repeat, s.half, s.reason
            )?;
        }
        Ok(())
    }
}

/// Column selection + interaction policy for one CV model.
fn model_columns(
    model: CvModel,
    base: &FeatureMatrix,
    config: &CvConfig,
) -> Result<(Vec<String>, bool)> {
    match model {
        CvModel::Full => (base.column_index(&config.anchor).is_some())
            .then(|| (base.columns().to_vec(), true))
            .ok_or_else(|| Error::ColumnMismatch(format!("anchor {:?} missing", config.anchor))),
        CvModel::AgeOnly => Ok((vec![config.anchor.clone()], false)),
        CvModel::AgeViafInteraction => Ok((
            vec![config.anchor.clone(), config.viaf_column.clone()],
            true,
        )),
    }
}

/// Run the protocol: for every repeat and both halves, fit each model on
/// the training half (scalers fit there only) and score held-out log loss
/// with clamped point-estimate predictions. Training halves with a single
/// class are skipped and flagged.
pub fn run_cv(
    base: &FeatureMatrix,
    plan: &CvPlan,
    models: &[CvModel],
    config: &CvConfig,
) -> Result<EvalReport> {
    let row_of: HashMap<&str, usize> = base
        .row_ids()
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let resolve = |ids: &[String]| -> Result<Vec<usize>> {
        ids.iter()
            .map(|id| {
                row_of
                    .get(id.as_str())
                    .copied()
                    .ok_or_else(|| Error::IdMismatch(format!("{id} not in the feature matrix")))
            })
            .collect()
    };

    let mut outcomes = Vec::new();
    let mut skipped = Vec::new();
    for (repeat, (a, b)) in plan.halves.iter().enumerate() {
        for (half, (train_ids, test_ids)) in [(a, b), (b, a)].into_iter().enumerate() {
            let train_rows = resolve(train_ids)?;
            let test_rows = resolve(test_ids)?;
            let train_labels = base.label_vector(&train_rows)?;
            let positives = train_labels.iter().filter(|&&y| y == 1.0).count();
            if positives == 0 || positives == train_labels.len() {
                skipped.push(SkippedHalf {
                    repeat,
                    half,
                    reason: format!(
                        "training half has a single class ({} of {} positive)",
                        positives,
                        train_labels.len()
                    ),
                });
                continue;
            }
            let test_labels = base.label_vector(&test_rows)?;
            for &model in models {
                let (columns, with_interactions) = model_columns(model, base, config)?;
                let train = base.select_rows(&train_rows)?.select_columns(&columns)?;
                let test = base.select_rows(&test_rows)?.select_columns(&columns)?;

                let scaler = fit_scaler(&train)?;
                let train_std = apply_scaler(&train, &scaler)?;
                let test_std = apply_scaler(&test, &scaler)?;
                let (train_final, test_final) = if with_interactions {
                    let (train_aug, inter_scaler) = add_interactions(&train_std, &config.anchor)?;
                    let test_aug =
                        add_interactions_scaled(&test_std, &config.anchor, &inter_scaler)?;
                    (train_aug, test_aug)
                } else {
                    (train_std, test_std)
                };

                let fit = fit_map(&train_final, &train_labels, &config.prior, &config.fit)?;
                let probs: Vec<f64> = (0..test_final.n_rows())
                    .map(|i| {
                        predict_prob(&fit.coefficients, test_final.row(i)).map(clamp_probability)
                    })
                    .collect::<Result<_>>()?;
                let loss = log_loss(&test_labels, &probs)?;
                outcomes.push(CvOutcome {
                    repeat,
                    half,
                    model: model.name().to_string(),
                    n_train: train_rows.len(),
                    n_heldout: test_rows.len(),
                    converged: fit.converged,
                    loss,
                });
            }
        }
    }

    let mut summaries = Vec::new();
    for &model in models {
        let losses: Vec<f64> = outcomes
            .iter()
            .filter(|o| o.model == model.name())
            .map(|o| o.loss.mean)
            .collect();
        if losses.is_empty() {
            continue;
        }
        let mean = losses.iter().sum::<f64>() / losses.len() as f64;
        let var = losses.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / losses.len() as f64;
        summaries.push(ModelSummary {
            model: model.name().to_string(),
            fits: losses.len(),
            mean_loss: mean,
            sd_loss: var.sqrt(),
        });
    }
    Ok(EvalReport {
        outcomes,
        skipped,
        summaries,
    })
}

/// Result of a permutation comparison against a reference ranking.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairwiseResult {
    /// Normalized discordance of the candidate against the reference.
    pub observed: f64,
    pub permutations: usize,
    /// `(#{random rankings at least as discordant} + 1) / (M + 1)`:
    /// high values mean the candidate beats random orderings.
    pub confidence: f64,
}

fn rank_map<'a>(ranking: &'a [(String, f64)], side: &str) -> Result<HashMap<&'a str, f64>> {
    let mut map = HashMap::with_capacity(ranking.len());
    for (id, rank) in ranking {
        if !rank.is_finite() {
            return Err(Error::InvalidInput(format!(
                "{side} rank for {id} not finite"
            )));
        }
        if map.insert(id.as_str(), *rank).is_some() {
            return Err(Error::IdMismatch(format!(
                "duplicate id {id} in {side} ranking"
            )));
        }
    }
    Ok(map)
}

/// Fraction of unordered id pairs the candidate orders against the
/// reference. Pairs tied in the reference are skipped; candidate ties
/// count one half.
pub fn pairwise_loss(candidate: &[(String, f64)], reference: &[(String, f64)]) -> Result<f64> {
    let cand = rank_map(candidate, "candidate")?;
    let refr = rank_map(reference, "reference")?;
    if cand.len() != refr.len() {
        return Err(Error::IdMismatch(format!(
            "candidate has {} ids, reference {}",
            cand.len(),
            refr.len()
        )));
    }
    if cand.len() < 2 {
        return Err(Error::InvalidInput("need at least 2 ids".into()));
    }
    let mut ids: Vec<&str> = Vec::with_capacity(cand.len());
    for id in cand.keys() {
        if !refr.contains_key(id) {
            return Err(Error::IdMismatch(format!("{id} missing from reference")));
        }
        ids.push(id);
    }
    ids.sort_unstable();

    let mut discordance = 0.0;
    let mut pairs = 0usize;
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            let r = refr[ids[i]] - refr[ids[j]];
            if r == 0.0 {
                continue; // reference has no opinion on this pair
            }
            pairs += 1;
            let c = cand[ids[i]] - cand[ids[j]];
            if c == 0.0 {
                discordance += 0.5;
            } else if (r < 0.0) != (c < 0.0) {
                discordance += 1.0;
            }
        }
    }
    if pairs == 0 {
        return Err(Error::InvalidInput(
            "reference ranking is entirely tied".into(),
        ));
    }
    Ok(discordance / pairs as f64)
}

/// Compare the observed discordance with `m` uniformly random total
/// orderings of the same ids. Deterministic under `seed`.
pub fn permutation_confidence(
    candidate: &[(String, f64)],
    reference: &[(String, f64)],
    m: usize,
    seed: u64,
) -> Result<PairwiseResult> {
    if m < 100 {
        return Err(Error::InvalidInput(format!(
            "need at least 100 permutations, got {m}"
        )));
    }
    let observed = pairwise_loss(candidate, reference)?;
    let mut ids: Vec<String> = candidate.iter().map(|(id, _)| id.clone()).collect();
    ids.sort_unstable();
    let mut ranks: Vec<f64> = (1..=ids.len()).map(|r| r as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut at_least_as_discordant = 0usize;
    for _ in 0..m {
        ranks.shuffle(&mut rng);
        let random: Vec<(String, f64)> = ids.iter().cloned().zip(ranks.iter().copied()).collect();
        if pairwise_loss(&random, reference)? >= observed {
            at_least_as_discordant += 1;
        }
    }
    Ok(PairwiseResult {
        observed,
        permutations: m,
        confidence: (at_least_as_discordant + 1) as f64 / (m + 1) as f64,
    })
}

/// Sanity helper for tests and calibration: a uniformly random ranking of
/// the given ids.
pub fn random_ranking(ids: &[String], seed: u64) -> Vec<(String, f64)> {
    let mut ranks: Vec<f64> = (1..=ids.len()).map(|r| r as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ranks.shuffle(&mut rng);
    ids.iter().cloned().zip(ranks).collect()
}

/// Read a reference ranking file: TSV with a header row and two columns,
/// `name` (or `person_id`) and `reference_rank`.
pub fn load_reference_ranking(path: &std::path::Path) -> Result<Vec<(String, f64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.len() != 2 {
        return Err(Error::ColumnMismatch(format!(
            "reference ranking needs 2 columns, got {}",
            headers.len()
        )));
    }
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let rank: f64 = record[1].parse().map_err(|_| Error::BadRecord {
            row: i as u64 + 2,
            message: format!("bad rank {:?}", &record[1]),
        })?;
        out.push((record[0].to_string(), rank));
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
