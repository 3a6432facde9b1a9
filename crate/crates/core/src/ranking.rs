//! Expected rank and score over the scored population.
//!
//! Per posterior draw, every person gets a predicted probability and a rank
//! (1 = highest probability, midranks on ties). The expected rank is the
//! mean rank across draws; the score is 100 times the expected quantile,
//! with the quantile of rank r in a population of N taken at the midpoint
//! `(N − r + 0.5)/N` so scores never reach exactly 0 or 100.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::ingest::Catalog;
use crate::model::{predict_prob, PosteriorDraws};

/// One person's ranking outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingEntry {
    pub person_id: String,
    pub mean_probability: f64,
    pub expected_rank: f64,
    /// 100 × expected quantile; stored at full precision, displayed rounded.
    pub score: f64,
}

/// Where a ranking came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub model_hash: Option<String>,
    pub data_hash: Option<String>,
}

/// Ranking over the whole population, best expected rank first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingTable {
    pub entries: Vec<RankingEntry>,
    pub population: usize,
    /// Number of posterior draws behind the expectation (0 when the table
    /// was reloaded from a TSV that does not carry it).
    pub draw_count: usize,
    pub provenance: Provenance,
}

/// Predicted probability per draw and person: an S×N matrix.
///
/// When both the draws and the matrix carry a feature-pipeline hash, the
/// hashes must agree; predicting through a mismatched pipeline is refused.
pub fn predictive_probs(draws: &PosteriorDraws, matrix: &FeatureMatrix) -> Result<Vec<Vec<f64>>> {
    if let (Some(expected), Some(got)) = (draws.pipeline_hash.as_deref(), matrix.pipeline_hash()) {
        if expected != got {
            return Err(Error::PipelineMismatch {
                expected: expected.to_string(),
                got: got.to_string(),
            });
        }
    }
    let n = matrix.n_rows();
    let mut out = Vec::with_capacity(draws.draws.len());
    for beta in &draws.draws {
        let mut row = Vec::with_capacity(n);
        for i in 0..n {
            row.push(predict_prob(beta, matrix.row(i))?);
        }
        out.push(row);
    }
    Ok(out)
}

/// Ranks for one draw: 1 = highest probability; ties get the midrank
/// (average of the positions they occupy).
pub fn ranks_per_draw(probabilities: &[f64]) -> Result<Vec<f64>> {
    if let Some(i) = probabilities.iter().position(|p| !p.is_finite()) {
        return Err(Error::NonFiniteProbability(i));
    }
    let n = probabilities.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        probabilities[b]
            .partial_cmp(&probabilities[a])
            .expect("finite probabilities")
    });
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && probabilities[order[end]] == probabilities[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end (1-based) share the midrank.
        let midrank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = midrank;
        }
        start = end;
    }
    Ok(ranks)
}

/// Aggregate per-draw ranks into the final table, sorted by expected rank
/// ascending with ties broken by `person_id`.
pub fn expected_rank_and_score(
    probabilities: &[Vec<f64>],
    ids: &[String],
    provenance: Provenance,
) -> Result<RankingTable> {
    if probabilities.is_empty() {
        return Err(Error::InvalidInput("no draws".into()));
    }
    let n = ids.len();
    for (s, row) in probabilities.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidInput(format!(
                "draw {s} has {} probabilities for {n} ids",
                row.len()
            )));
        }
    }
    let draw_count = probabilities.len();
    let mut rank_sum = vec![0.0; n];
    let mut quantile_sum = vec![0.0; n];
    let mut prob_sum = vec![0.0; n];
    for row in probabilities {
        let ranks = ranks_per_draw(row)?;
        for i in 0..n {
            rank_sum[i] += ranks[i];
            quantile_sum[i] += (n as f64 - ranks[i] + 0.5) / n as f64;
            prob_sum[i] += row[i];
        }
    }
    let s = draw_count as f64;
    let mut entries: Vec<RankingEntry> = (0..n)
        .map(|i| RankingEntry {
            person_id: ids[i].clone(),
            mean_probability: prob_sum[i] / s,
            expected_rank: rank_sum[i] / s,
            score: 100.0 * quantile_sum[i] / s,
        })
        .collect();
    entries.sort_by(|a, b| {
        a.expected_rank
            .partial_cmp(&b.expected_rank)
            .expect("finite ranks")
            .then_with(|| a.person_id.cmp(&b.person_id))
    });
    Ok(RankingTable {
        entries,
        population: n,
        draw_count,
        provenance,
    })
}

impl RankingTable {
    pub fn get(&self, person_id: &str) -> Option<&RankingEntry> {
        self.entries.iter().find(|e| e.person_id == person_id)
    }

    /// Write the table as TSV, joining title, death year, and views from
    /// the catalog. Scores and ranks are stored at full precision.
    pub fn write_tsv<W: Write>(&self, catalog: &Catalog, mut w: W) -> Result<()> {
        writeln!(
            w,
            "person_id\ttitle\tdeath_year\tviews\tmean_probability\texpected_rank\tscore"
        )?;
        for e in &self.entries {
            let person = catalog.get(&e.person_id).ok_or_else(|| {
                Error::IdMismatch(format!("{} not present in the catalog", e.person_id))
            })?;
            let death = person
                .death_year()
                .map(|y| y.to_string())
                .unwrap_or_default();
            let views = person
                .views_per_day
                .map(|v| v.to_string())
                .unwrap_or_default();
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                e.person_id,
                person.title,
                death,
                views,
                e.mean_probability,
                e.expected_rank,
                e.score
            )?;
        }
        Ok(())
    }

    pub fn save_tsv(&self, catalog: &Catalog, path: &Path) -> Result<()> {
        let file = BufWriter::new(File::create(path)?);
        self.write_tsv(catalog, file)
    }

    /// Reload a table from its TSV export. The draw count is not stored in
    /// the TSV and is reported as 0; entry order is taken from the file.
    pub fn load_tsv(path: &Path) -> Result<RankingTable> {
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .quoting(false)
            .from_reader(BufReader::new(File::open(path)?));
        let headers = reader.headers()?.clone();
        let col = |name: &str| -> Result<usize> {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::ColumnMismatch(format!("missing column {name:?}")))
        };
        let id_col = col("person_id")?;
        let prob_col = col("mean_probability")?;
        let rank_col = col("expected_rank")?;
        let score_col = col("score")?;
        let mut entries = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let parse = |c: usize| -> Result<f64> {
                record[c].parse().map_err(|_| Error::BadRecord {
                    row: i as u64 + 2,
                    message: format!("bad number {:?}", &record[c]),
                })
            };
            entries.push(RankingEntry {
                person_id: record[id_col].to_string(),
                mean_probability: parse(prob_col)?,
                expected_rank: parse(rank_col)?,
                score: parse(score_col)?,
            });
        }
        let population = entries.len();
        Ok(RankingTable {
            entries,
            population,
            draw_count: 0,
            provenance: Provenance::default(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DrawMethod, PosteriorDraws};

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i:03}")).collect()
    }

    /// Counting oracle: rank = (#strictly greater) + (#ties incl. self + 1)/2.
    fn counting_rank_oracle(probs: &[f64]) -> Vec<f64> {
        probs
            .iter()
            .map(|&p| {
                let greater = probs.iter().filter(|&&q| q > p).count();
                let ties = probs.iter().filter(|&&q| q == p).count();
                greater as f64 + (ties as f64 + 1.0) / 2.0
            })
            .collect()
    }

    #[test]
    fn distinct_probabilities_rank_descending() {
        assert_eq!(
            ranks_per_draw(&[0.9, 0.5, 0.1]).unwrap(),
            vec![1.0, 2.0, 3.0]
        );
    }

    #[test]
    fn ties_get_midranks() {
        assert_eq!(
            ranks_per_draw(&[0.7, 0.7, 0.1]).unwrap(),
            vec![1.5, 1.5, 3.0]
        );
    }

    #[test]
    fn nan_probability_is_an_error() {
        assert!(matches!(
            ranks_per_draw(&[0.1, f64::NAN]),
            Err(Error::NonFiniteProbability(1))
        ));
    }

    #[test]
    fn matches_counting_oracle_on_random_vectors() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let n = rng.random_range(1..60);
            // Coarse grid so ties actually occur.
            let probs: Vec<f64> = (0..n)
                .map(|_| rng.random_range(0..8) as f64 / 8.0)
                .collect();
            let ranks = ranks_per_draw(&probs).unwrap();
            assert_eq!(ranks, counting_rank_oracle(&probs));
            let total: f64 = ranks.iter().sum();
            assert!((total - (n * (n + 1)) as f64 / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn two_person_scores_match_hand_formula() {
        let table =
            expected_rank_and_score(&[vec![0.9, 0.1]], &ids(2), Provenance::default()).unwrap();
        assert_eq!(table.entries[0].expected_rank, 1.0);
        assert_eq!(table.entries[0].score, 75.0);
        assert_eq!(table.entries[1].expected_rank, 2.0);
        assert_eq!(table.entries[1].score, 25.0);
    }

    #[test]
    fn degenerate_posterior_equals_single_draw() {
        let probs = vec![0.3, 0.9, 0.5, 0.2];
        let repeated = vec![probs.clone(); 6];
        let single =
            expected_rank_and_score(std::slice::from_ref(&probs), &ids(4), Provenance::default())
                .unwrap();
        let many = expected_rank_and_score(&repeated, &ids(4), Provenance::default()).unwrap();
        for (a, b) in single.entries.iter().zip(&many.entries) {
            assert_eq!(a.person_id, b.person_id);
            assert_eq!(a.expected_rank, b.expected_rank);
            assert_eq!(a.score, b.score);
        }
    }

    #[test]
    fn single_draw_ordering_follows_probability() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let probs: Vec<f64> = (0..30).map(|_| rng.random::<f64>()).collect();
        let table = expected_rank_and_score(
            std::slice::from_ref(&probs),
            &ids(30),
            Provenance::default(),
        )
        .unwrap();
        // Expected rank strictly decreasing in probability for S=1.
        for pair in table.entries.windows(2) {
            let pa: f64 = probs[pair[0].person_id[1..].parse::<usize>().unwrap()];
            let pb: f64 = probs[pair[1].person_id[1..].parse::<usize>().unwrap()];
            assert!(pa > pb);
            assert!(pair[0].score > pair[1].score);
        }
    }

    #[test]
    fn rank_and_negative_quantile_orderings_agree() {
        // The score is an affine decreasing function of the expected rank,
        // so table order must be weakly decreasing in score; equal expected
        // ranks may differ in score by accumulated rounding only.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let draws: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..25).map(|_| rng.random::<f64>()).collect())
            .collect();
        let table = expected_rank_and_score(&draws, &ids(25), Provenance::default()).unwrap();
        for pair in table.entries.windows(2) {
            assert!(
                pair[0].score >= pair[1].score - 1e-9,
                "score order diverged: {:?} then {:?}",
                pair[0],
                pair[1]
            );
            if pair[0].expected_rank < pair[1].expected_rank - 1e-12 {
                assert!(pair[0].score > pair[1].score - 1e-9);
            }
        }
    }

    #[test]
    fn bounds_hold_for_every_entry() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(15);
        let draws: Vec<Vec<f64>> = (0..7)
            .map(|_| (0..40).map(|_| rng.random::<f64>()).collect())
            .collect();
        let table = expected_rank_and_score(&draws, &ids(40), Provenance::default()).unwrap();
        for e in &table.entries {
            assert!(e.expected_rank >= 1.0 && e.expected_rank <= 40.0);
            assert!(e.score > 0.0 && e.score < 100.0);
        }
        let ranks_sum: f64 = table.entries.iter().map(|e| e.expected_rank).sum();
        assert!((ranks_sum - (40.0 * 41.0) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn predictive_probs_with_point_estimate_matches_hand_values() {
        let m = FeatureMatrix::from_rows(
            vec!["a".into(), "b".into()],
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
        )
        .unwrap();
        let draws = PosteriorDraws {
            draws: vec![vec![1.0, -1.0, 0.5]],
            method: DrawMethod::External,
            seed: 0,
            pipeline_hash: None,
        };
        let probs = predictive_probs(&draws, &m).unwrap();
        let sigmoid = |z: f64| 1.0 / (1.0 + (-z).exp());
        assert!((probs[0][0] - sigmoid(1.5)).abs() < 1e-15);
        assert!((probs[0][1] - sigmoid(-0.5)).abs() < 1e-15);
        assert!((probs[0][2] - sigmoid(0.5)).abs() < 1e-15);
    }

    #[test]
    fn identical_rows_get_identical_probabilities() {
        let m =
            FeatureMatrix::from_rows(vec!["a".into()], &[vec![0.3], vec![0.3], vec![0.3]]).unwrap();
        let draws = PosteriorDraws {
            draws: vec![vec![0.7, -0.1], vec![-0.4, 0.2]],
            method: DrawMethod::External,
            seed: 0,
            pipeline_hash: None,
        };
        let probs = predictive_probs(&draws, &m).unwrap();
        for row in &probs {
            assert!(row.iter().all(|&p| p == row[0]));
        }
    }

    #[test]
    fn pipeline_hash_mismatch_is_refused() {
        let mut m = FeatureMatrix::from_rows(vec!["a".into()], &[vec![0.3]]).unwrap();
        m.set_pipeline_hash(Some("aaa".into()));
        let draws = PosteriorDraws {
            draws: vec![vec![0.7, -0.1]],
            method: DrawMethod::External,
            seed: 0,
            pipeline_hash: Some("bbb".into()),
        };
        assert!(matches!(
            predictive_probs(&draws, &m),
            Err(Error::PipelineMismatch { .. })
        ));
    }

    #[test]
    fn monotone_transforms_preserve_single_draw_ranks() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let n = rng.random_range(2..50);
            let probs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let base = ranks_per_draw(&probs).unwrap();
            let scaled: Vec<f64> = probs.iter().map(|p| 0.2 + 3.0 * p).collect();
            let exped: Vec<f64> = probs.iter().map(|p| p.exp()).collect();
            assert_eq!(base, ranks_per_draw(&scaled).unwrap());
            assert_eq!(base, ranks_per_draw(&exped).unwrap());
        }
    }
}
