//! Fixed-K latent topic inference with collapsed Gibbs sampling.
//!
//! Documents are token sequences (already stemmed, see
//! [`crate::ingest::stem`]). A fit runs full Gibbs sweeps over all token
//! assignments with the collapsed conditional
//!
//! ```text
//! p(z = k) ∝ (doc_topic_count + α) · (topic_word_count + β) / (topic_total + V·β)
//! ```
//!
//! using a seeded ChaCha8 stream, so identical corpus, configuration, and
//! seed reproduce identical counts bit for bit. Per-document topic weights
//! are the smoothed proportions `(count + α) / (len + K·α)`; unseen
//! documents are folded in with deterministic fixed-point passes over the
//! document's assignments only, keeping model counts frozen.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vocabulary pruning policy applied before fitting.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VocabOptions {
    /// Drop tokens appearing in fewer than this many documents.
    pub min_doc_count: usize,
    /// Drop tokens appearing in more than this fraction of documents.
    pub max_doc_fraction: f64,
}

impl Default for VocabOptions {
    fn default() -> Self {
        VocabOptions {
            min_doc_count: 3,
            max_doc_fraction: 0.5,
        }
    }
}

impl VocabOptions {
    /// Keep everything; useful for tiny corpora and tests.
    pub fn keep_all() -> Self {
        VocabOptions {
            min_doc_count: 1,
            max_doc_fraction: 1.0,
        }
    }
}

/// Fitted topic model: vocabulary, hyperparameters, counts, assignments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TopicModelWire", into = "TopicModelWire")]
pub struct TopicModelState {
    k: usize,
    alpha: f64,
    beta: f64,
    vocabulary: Vec<String>,
    vocab_index: HashMap<String, usize>,
    doc_tokens: Vec<Vec<u32>>,
    assignments: Vec<Vec<u32>>,
    topic_word_counts: Vec<u32>,
    doc_topic_counts: Vec<u32>,
    topic_totals: Vec<u32>,
    rng_seed: u64,
}

#[derive(Serialize, Deserialize)]
struct TopicModelWire {
    k: usize,
    alpha: f64,
    beta: f64,
    vocabulary: Vec<String>,
    doc_tokens: Vec<Vec<u32>>,
    assignments: Vec<Vec<u32>>,
    topic_word_counts: Vec<u32>,
    doc_topic_counts: Vec<u32>,
    topic_totals: Vec<u32>,
    rng_seed: u64,
}

impl TryFrom<TopicModelWire> for TopicModelState {
    type Error = Error;

    fn try_from(w: TopicModelWire) -> Result<Self> {
        let vocab_index = w
            .vocabulary
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        let state = TopicModelState {
            k: w.k,
            alpha: w.alpha,
            beta: w.beta,
            vocabulary: w.vocabulary,
            vocab_index,
            doc_tokens: w.doc_tokens,
            assignments: w.assignments,
            topic_word_counts: w.topic_word_counts,
            doc_topic_counts: w.doc_topic_counts,
            topic_totals: w.topic_totals,
            rng_seed: w.rng_seed,
        };
        state.check_counts()?;
        Ok(state)
    }
}

impl From<TopicModelState> for TopicModelWire {
    fn from(s: TopicModelState) -> Self {
        TopicModelWire {
            k: s.k,
            alpha: s.alpha,
            beta: s.beta,
            vocabulary: s.vocabulary,
            doc_tokens: s.doc_tokens,
            assignments: s.assignments,
            topic_word_counts: s.topic_word_counts,
            doc_topic_counts: s.doc_topic_counts,
            topic_totals: s.topic_totals,
            rng_seed: s.rng_seed,
        }
    }
}

/// One topic's highest-probability words.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicSummary {
    pub topic_id: usize,
    pub top_words: Vec<TopWord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopWord {
    pub word: String,
    pub probability: f64,
}

/// Fit a topic model with default vocabulary pruning.
pub fn fit_topics(
    corpus: &[Vec<String>],
    k: usize,
    iterations: usize,
    alpha: f64,
    beta: f64,
    seed: u64,
) -> Result<TopicModelState> {
    fit_topics_with_options(
        corpus,
        k,
        iterations,
        alpha,
        beta,
        seed,
        &VocabOptions::default(),
    )
}

/// Fit a topic model with an explicit pruning policy.
pub fn fit_topics_with_options(
    corpus: &[Vec<String>],
    k: usize,
    iterations: usize,
    alpha: f64,
    beta: f64,
    seed: u64,
    vocab: &VocabOptions,
) -> Result<TopicModelState> {
    if iterations == 0 {
        return Err(Error::InvalidInput("iterations must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = init_state(corpus, k, alpha, beta, seed, vocab, None, &mut rng)?;
    for _ in 0..iterations {
        state.sweep(&mut rng);
        debug_assert!(state.check_counts().is_ok());
    }
    Ok(state)
}

/// Fit from forced initial assignments (one topic index per kept token).
/// `iterations` may be zero, in which case the state is exactly the counts
/// implied by the initialization.
#[allow(clippy::too_many_arguments)]
pub fn fit_topics_forced_init(
    corpus: &[Vec<String>],
    k: usize,
    iterations: usize,
    alpha: f64,
    beta: f64,
    seed: u64,
    vocab: &VocabOptions,
    init: &[Vec<u32>],
) -> Result<TopicModelState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = init_state(corpus, k, alpha, beta, seed, vocab, Some(init), &mut rng)?;
    for _ in 0..iterations {
        state.sweep(&mut rng);
        debug_assert!(state.check_counts().is_ok());
    }
    Ok(state)
}

#[allow(clippy::too_many_arguments)]
fn init_state(
    corpus: &[Vec<String>],
    k: usize,
    alpha: f64,
    beta: f64,
    seed: u64,
    vocab: &VocabOptions,
    forced: Option<&[Vec<u32>]>,
    rng: &mut ChaCha8Rng,
) -> Result<TopicModelState> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if k < 2 {
        return Err(Error::BadTopicCount(k));
    }
    let positive = |v: f64| v.is_finite() && v > 0.0;
    if !positive(alpha) || !positive(beta) {
        return Err(Error::InvalidInput(format!(
            "smoothing must be positive, got alpha={alpha} beta={beta}"
        )));
    }

    // Document frequencies, then a lexicographically ordered vocabulary so
    // token ids do not depend on hash iteration order.
    let mut doc_freq: HashMap<&str, usize> = HashMap::new();
    for doc in corpus {
        let mut seen: Vec<&str> = doc.iter().map(String::as_str).collect();
        seen.sort_unstable();
        seen.dedup();
        for t in seen {
            *doc_freq.entry(t).or_insert(0) += 1;
        }
    }
    let d = corpus.len();
    let max_df = vocab.max_doc_fraction * d as f64;
    let mut kept: Vec<&str> = doc_freq
        .iter()
        .filter(|(_, &df)| df >= vocab.min_doc_count && df as f64 <= max_df)
        .map(|(&t, _)| t)
        .collect();
    kept.sort_unstable();
    let vocabulary: Vec<String> = kept.iter().map(|t| t.to_string()).collect();
    let vocab_index: HashMap<String, usize> = vocabulary
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();

    let mut doc_tokens = Vec::with_capacity(d);
    for (i, doc) in corpus.iter().enumerate() {
        let ids: Vec<u32> = doc
            .iter()
            .filter_map(|t| vocab_index.get(t).map(|&w| w as u32))
            .collect();
        if ids.is_empty() {
            return Err(Error::EmptyDocument(i));
        }
        doc_tokens.push(ids);
    }

    let v = vocabulary.len();
    let mut state = TopicModelState {
        k,
        alpha,
        beta,
        vocabulary,
        vocab_index,
        doc_tokens,
        assignments: Vec::new(),
        topic_word_counts: vec![0; k * v],
        doc_topic_counts: vec![0; d * k],
        topic_totals: vec![0; k],
        rng_seed: seed,
    };

    let mut assignments = Vec::with_capacity(d);
    for (doc_idx, tokens) in state.doc_tokens.iter().enumerate() {
        let mut doc_assign = Vec::with_capacity(tokens.len());
        for (pos, &w) in tokens.iter().enumerate() {
            let topic = match forced {
                Some(init) => {
                    let z = *init
                        .get(doc_idx)
                        .and_then(|row| row.get(pos))
                        .ok_or_else(|| {
                            Error::InvalidInput(format!(
                                "forced initialization missing assignment for doc {doc_idx} position {pos}"
                            ))
                        })?;
                    if z as usize >= k {
                        return Err(Error::InvalidInput(format!(
                            "forced assignment {z} out of range for K={k}"
                        )));
                    }
                    z as usize
                }
                None => rng.random_range(0..k),
            };
            doc_assign.push(topic as u32);
            state.topic_word_counts[topic * v + w as usize] += 1;
            state.doc_topic_counts[doc_idx * k + topic] += 1;
            state.topic_totals[topic] += 1;
        }
        assignments.push(doc_assign);
    }
    state.assignments = assignments;
    Ok(state)
}

impl TopicModelState {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn seed(&self) -> u64 {
        self.rng_seed
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn doc_count(&self) -> usize {
        self.doc_tokens.len()
    }

    pub fn doc_length(&self, doc: usize) -> usize {
        self.doc_tokens[doc].len()
    }

    pub fn topic_word_count(&self, topic: usize, word: usize) -> u32 {
        self.topic_word_counts[topic * self.vocabulary.len() + word]
    }

    pub fn doc_topic_count(&self, doc: usize, topic: usize) -> u32 {
        self.doc_topic_counts[doc * self.k + topic]
    }

    pub fn topic_total(&self, topic: usize) -> u32 {
        self.topic_totals[topic]
    }

    /// Verify the count-consistency invariants.
    pub fn check_counts(&self) -> Result<()> {
        let v = self.vocabulary.len();
        for (d, tokens) in self.doc_tokens.iter().enumerate() {
            let row_sum: u32 = self.doc_topic_counts[d * self.k..(d + 1) * self.k]
                .iter()
                .sum();
            if row_sum as usize != tokens.len() {
                return Err(Error::InvalidInput(format!(
                    "doc {d}: topic counts sum to {row_sum}, document length {}",
                    tokens.len()
                )));
            }
        }
        let mut total_tokens = 0u64;
        for k in 0..self.k {
            let row_sum: u32 = self.topic_word_counts[k * v..(k + 1) * v].iter().sum();
            if row_sum != self.topic_totals[k] {
                return Err(Error::InvalidInput(format!(
                    "topic {k}: word counts sum to {row_sum}, total {}",
                    self.topic_totals[k]
                )));
            }
            total_tokens += u64::from(row_sum);
        }
        let corpus_tokens: u64 = self.doc_tokens.iter().map(|t| t.len() as u64).sum();
        if total_tokens != corpus_tokens {
            return Err(Error::InvalidInput(format!(
                "topic totals {total_tokens} disagree with corpus size {corpus_tokens}"
            )));
        }
        for doc in &self.assignments {
            if doc.iter().any(|&z| z as usize >= self.k) {
                return Err(Error::InvalidInput("assignment out of range".into()));
            }
        }
        Ok(())
    }

    /// One full Gibbs sweep over every token assignment.
    fn sweep(&mut self, rng: &mut ChaCha8Rng) {
        let v = self.vocabulary.len();
        let v_beta = v as f64 * self.beta;
        let mut weights = vec![0.0f64; self.k];
        for d in 0..self.doc_tokens.len() {
            for pos in 0..self.doc_tokens[d].len() {
                let w = self.doc_tokens[d][pos] as usize;
                let old = self.assignments[d][pos] as usize;
                self.topic_word_counts[old * v + w] -= 1;
                self.doc_topic_counts[d * self.k + old] -= 1;
                self.topic_totals[old] -= 1;

                let mut total = 0.0;
                for (k, wk) in weights.iter_mut().enumerate() {
                    let value = (f64::from(self.doc_topic_counts[d * self.k + k]) + self.alpha)
                        * (f64::from(self.topic_word_counts[k * v + w]) + self.beta)
                        / (f64::from(self.topic_totals[k]) + v_beta);
                    *wk = value;
                    total += value;
                }
                let mut target = rng.random::<f64>() * total;
                let mut new = self.k - 1;
                for (k, &wk) in weights.iter().enumerate() {
                    target -= wk;
                    if target < 0.0 {
                        new = k;
                        break;
                    }
                }

                self.assignments[d][pos] = new as u32;
                self.topic_word_counts[new * v + w] += 1;
                self.doc_topic_counts[d * self.k + new] += 1;
                self.topic_totals[new] += 1;
            }
        }
    }

    /// Smoothed topic weights for an in-model document.
    pub fn document_weights(&self, doc: usize) -> Result<Vec<f64>> {
        if doc >= self.doc_tokens.len() {
            return Err(Error::InvalidInput(format!(
                "document index {doc} out of range ({} documents)",
                self.doc_tokens.len()
            )));
        }
        let len = self.doc_tokens[doc].len() as f64;
        let denom = len + self.k as f64 * self.alpha;
        Ok((0..self.k)
            .map(|k| (f64::from(self.doc_topic_counts[doc * self.k + k]) + self.alpha) / denom)
            .collect())
    }

    /// Fold in an unseen token sequence with model counts frozen.
    ///
    /// Assignments start at each token's most likely topic and are updated
    /// by fixed-point passes over the collapsed conditional (argmax, lowest
    /// index on ties) until they stop changing. Deterministic. Tokens
    /// outside the vocabulary are ignored; a document with no known tokens
    /// gets the uniform vector `1/K`.
    pub fn infer_weights(&self, tokens: &[String]) -> Vec<f64> {
        let ids: Vec<usize> = tokens
            .iter()
            .filter_map(|t| self.vocab_index.get(t).copied())
            .collect();
        if ids.is_empty() {
            return vec![1.0 / self.k as f64; self.k];
        }
        let v = self.vocabulary.len();
        let v_beta = v as f64 * self.beta;
        let phi = |k: usize, w: usize| {
            (f64::from(self.topic_word_counts[k * v + w]) + self.beta)
                / (f64::from(self.topic_totals[k]) + v_beta)
        };

        let argmax = |scores: &dyn Fn(usize) -> f64| -> usize {
            let mut best = 0;
            let mut best_score = scores(0);
            for k in 1..self.k {
                let s = scores(k);
                if s > best_score {
                    best = k;
                    best_score = s;
                }
            }
            best
        };

        let mut assign: Vec<usize> = ids.iter().map(|&w| argmax(&|k| phi(k, w))).collect();
        let mut counts = vec![0u32; self.k];
        for &z in &assign {
            counts[z] += 1;
        }
        const MAX_PASSES: usize = 50;
        for _ in 0..MAX_PASSES {
            let mut changed = false;
            for (i, &w) in ids.iter().enumerate() {
                let old = assign[i];
                counts[old] -= 1;
                let best = argmax(&|k| (f64::from(counts[k]) + self.alpha) * phi(k, w));
                counts[best] += 1;
                assign[i] = best;
                changed |= best != old;
            }
            if !changed {
                break;
            }
        }
        let denom = ids.len() as f64 + self.k as f64 * self.alpha;
        counts
            .into_iter()
            .map(|c| (f64::from(c) + self.alpha) / denom)
            .collect()
    }

    /// The `n` highest-probability words of a topic under
    /// `(count + β) / (total + V·β)`, ties broken lexicographically.
    /// `n` larger than the vocabulary returns the full vocabulary.
    pub fn top_words(&self, topic_id: usize, n: usize) -> Result<TopicSummary> {
        if topic_id >= self.k {
            return Err(Error::TopicOutOfRange {
                topic_id,
                k: self.k,
            });
        }
        let v = self.vocabulary.len();
        let v_beta = v as f64 * self.beta;
        let denom = f64::from(self.topic_totals[topic_id]) + v_beta;
        let mut scored: Vec<(f64, &str)> = (0..v)
            .map(|w| {
                (
                    (f64::from(self.topic_word_counts[topic_id * v + w]) + self.beta) / denom,
                    self.vocabulary[w].as_str(),
                )
            })
            .collect();
        scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then_with(|| a.1.cmp(b.1)));
        scored.truncate(n);
        Ok(TopicSummary {
            topic_id,
            top_words: scored
                .into_iter()
                .map(|(probability, word)| TopWord {
                    word: word.to_string(),
                    probability,
                })
                .collect(),
        })
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

/// Topic weights for an arbitrary token sequence (fold-in path).
pub fn doc_topic_weights(state: &TopicModelState, tokens: &[String]) -> Vec<f64> {
    state.infer_weights(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two disjoint vocabularies; documents draw exclusively from one theme.
    fn two_theme_corpus(docs_per_theme: usize, tokens_per_doc: usize) -> Vec<Vec<String>> {
        let theme_a: Vec<String> = (0..8).map(|i| format!("alpha{i}")).collect();
        let theme_b: Vec<String> = (0..8).map(|i| format!("bravo{i}")).collect();
        let mut corpus = Vec::new();
        for d in 0..docs_per_theme * 2 {
            let theme = if d % 2 == 0 { &theme_a } else { &theme_b };
            let doc: Vec<String> = (0..tokens_per_doc)
                .map(|t| theme[(d * 3 + t * 7) % theme.len()].clone())
                .collect();
            corpus.push(doc);
        }
        corpus
    }

    #[test]
    fn two_theme_corpus_separates() {
        let corpus = two_theme_corpus(20, 24);
        let state =
            fit_topics_with_options(&corpus, 2, 200, 0.1, 0.01, 7, &VocabOptions::keep_all())
                .unwrap();
        for d in 0..corpus.len() {
            let weights = state.document_weights(d).unwrap();
            let dominant = weights.iter().cloned().fold(f64::MIN, f64::max);
            assert!(
                dominant >= 0.9,
                "doc {d} dominant weight {dominant} below 0.9 ({weights:?})"
            );
        }
        // Documents of the same theme agree on their dominant topic.
        let argmax = |w: &[f64]| {
            w.iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0
        };
        let a_topic = argmax(&state.document_weights(0).unwrap());
        let b_topic = argmax(&state.document_weights(1).unwrap());
        assert_ne!(a_topic, b_topic);
        for d in 0..corpus.len() {
            let expect = if d % 2 == 0 { a_topic } else { b_topic };
            assert_eq!(argmax(&state.document_weights(d).unwrap()), expect);
        }
    }

    #[test]
    fn k_below_two_is_an_error() {
        let corpus = two_theme_corpus(3, 6);
        match fit_topics_with_options(&corpus, 1, 10, 0.1, 0.01, 1, &VocabOptions::keep_all()) {
            Err(Error::BadTopicCount(1)) => {}
            other => panic!("expected BadTopicCount, got {other:?}"),
        }
    }

    #[test]
    fn empty_corpus_is_an_error() {
        match fit_topics(&[], 2, 10, 0.1, 0.01, 1) {
            Err(Error::EmptyCorpus) => {}
            other => panic!("expected EmptyCorpus, got {other:?}"),
        }
    }

    #[test]
    fn zero_iterations_is_an_error() {
        let corpus = two_theme_corpus(3, 6);
        assert!(matches!(
            fit_topics_with_options(&corpus, 2, 0, 0.1, 0.01, 1, &VocabOptions::keep_all()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn same_seed_reproduces_bitwise() {
        let corpus = two_theme_corpus(6, 12);
        let opts = VocabOptions::keep_all();
        let a = fit_topics_with_options(&corpus, 3, 25, 0.1, 0.01, 99, &opts).unwrap();
        let b = fit_topics_with_options(&corpus, 3, 25, 0.1, 0.01, 99, &opts).unwrap();
        assert_eq!(a.topic_word_counts, b.topic_word_counts);
        assert_eq!(a.doc_topic_counts, b.doc_topic_counts);
        assert_eq!(a.assignments, b.assignments);
    }

    #[test]
    fn counts_stay_consistent_across_sweep_horizons() {
        let corpus = two_theme_corpus(5, 10);
        for iterations in 1..=8 {
            let state = fit_topics_with_options(
                &corpus,
                3,
                iterations,
                0.1,
                0.01,
                11,
                &VocabOptions::keep_all(),
            )
            .unwrap();
            state.check_counts().unwrap();
        }
    }

    #[test]
    fn vocabulary_pruning_drops_rare_and_ubiquitous_tokens() {
        // "rare" appears in 1 doc, "stop" in all 4; "kept" (3 docs) and
        // "wordy" (2 docs) survive.
        let corpus = vec![
            vec!["stop", "kept", "rare"],
            vec!["stop", "kept"],
            vec!["stop", "kept", "wordy"],
            vec!["stop", "wordy", "wordy"],
        ]
        .into_iter()
        .map(|d| d.into_iter().map(String::from).collect())
        .collect::<Vec<Vec<String>>>();
        let opts = VocabOptions {
            min_doc_count: 2,
            max_doc_fraction: 0.9,
        };
        let state = fit_topics_with_options(&corpus, 2, 5, 0.1, 0.01, 1, &opts).unwrap();
        assert_eq!(
            state.vocabulary(),
            ["kept".to_string(), "wordy".to_string()]
        );
    }

    #[test]
    fn document_empty_after_pruning_is_an_error() {
        let corpus: Vec<Vec<String>> = vec![
            vec!["shared".into(), "common".into()],
            vec!["shared".into(), "common".into()],
            vec!["lonely".into()],
        ];
        let opts = VocabOptions {
            min_doc_count: 2,
            max_doc_fraction: 1.0,
        };
        match fit_topics_with_options(&corpus, 2, 5, 0.1, 0.01, 1, &opts) {
            Err(Error::EmptyDocument(2)) => {}
            other => panic!("expected EmptyDocument(2), got {other:?}"),
        }
    }

    #[test]
    fn unknown_only_document_gets_uniform_weights() {
        let corpus = two_theme_corpus(4, 8);
        let state =
            fit_topics_with_options(&corpus, 2, 20, 0.1, 0.01, 5, &VocabOptions::keep_all())
                .unwrap();
        let weights = state.infer_weights(&["zzz".to_string(), "qqq".to_string()]);
        assert_eq!(weights, vec![0.5, 0.5]);
    }

    #[test]
    fn single_token_document_weights_match_formula() {
        // K=2, alpha=0.1, one token assigned topic 0: (1.1/1.2, 0.1/1.2).
        let corpus: Vec<Vec<String>> = vec![vec!["solo".into()], vec!["solo".into(), "duo".into()]];
        let state = fit_topics_forced_init(
            &corpus,
            2,
            0,
            0.1,
            0.01,
            1,
            &VocabOptions::keep_all(),
            &[vec![0], vec![0, 1]],
        )
        .unwrap();
        let w = state.document_weights(0).unwrap();
        assert!((w[0] - 1.1 / 1.2).abs() < 1e-15);
        assert!((w[1] - 0.1 / 1.2).abs() < 1e-15);
    }

    #[test]
    fn held_out_theme_document_folds_in_strongly() {
        let corpus = two_theme_corpus(20, 24);
        let state =
            fit_topics_with_options(&corpus, 2, 200, 0.1, 0.01, 7, &VocabOptions::keep_all())
                .unwrap();
        let held_out: Vec<String> = (0..6).map(|i| format!("alpha{i}")).collect();
        let weights = state.infer_weights(&held_out);
        let dominant = weights.iter().cloned().fold(f64::MIN, f64::max);
        assert!(dominant >= 0.9, "fold-in weights {weights:?}");
        let sum: f64 = weights.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weights_sum_to_one_with_smoothing_floor() {
        let corpus = two_theme_corpus(6, 9);
        let state =
            fit_topics_with_options(&corpus, 4, 30, 0.1, 0.01, 3, &VocabOptions::keep_all())
                .unwrap();
        for d in 0..corpus.len() {
            let w = state.document_weights(d).unwrap();
            let sum: f64 = w.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            let floor = 0.1 / (state.doc_length(d) as f64 + 4.0 * 0.1);
            assert!(w.iter().all(|&x| x >= floor - 1e-15));
        }
    }

    #[test]
    fn top_words_come_from_the_right_theme() {
        let corpus = two_theme_corpus(20, 24);
        let state =
            fit_topics_with_options(&corpus, 2, 200, 0.1, 0.01, 7, &VocabOptions::keep_all())
                .unwrap();
        let doc0 = state.document_weights(0).unwrap();
        let a_topic = if doc0[0] > doc0[1] { 0 } else { 1 };
        let summary = state.top_words(a_topic, 5).unwrap();
        for tw in &summary.top_words {
            assert!(
                tw.word.starts_with("alpha"),
                "unexpected top word {} for the alpha theme",
                tw.word
            );
        }
        let probs: Vec<f64> = summary.top_words.iter().map(|t| t.probability).collect();
        assert!(probs.windows(2).all(|p| p[0] >= p[1]));
        assert!(probs.iter().all(|&p| p > 0.0 && p <= 1.0));
    }

    #[test]
    fn top_words_clamps_to_vocabulary_size() {
        let corpus = two_theme_corpus(4, 8);
        let state =
            fit_topics_with_options(&corpus, 2, 10, 0.1, 0.01, 2, &VocabOptions::keep_all())
                .unwrap();
        let summary = state.top_words(0, 10_000).unwrap();
        assert_eq!(summary.top_words.len(), state.vocabulary().len());
    }

    #[test]
    fn top_words_out_of_range_topic_is_an_error() {
        let corpus = two_theme_corpus(4, 8);
        let state =
            fit_topics_with_options(&corpus, 2, 10, 0.1, 0.01, 2, &VocabOptions::keep_all())
                .unwrap();
        assert!(matches!(
            state.top_words(2, 3),
            Err(Error::TopicOutOfRange { topic_id: 2, k: 2 })
        ));
    }

    #[test]
    fn forced_init_permutation_permutes_counts_exactly() {
        let corpus = two_theme_corpus(5, 10);
        let opts = VocabOptions::keep_all();
        let k = 3usize;
        // Arbitrary deterministic init.
        let init: Vec<Vec<u32>> = corpus
            .iter()
            .enumerate()
            .map(|(d, doc)| {
                (0..doc.len())
                    .map(|p| ((d * 5 + p * 2) % k) as u32)
                    .collect()
            })
            .collect();
        let perm = [2u32, 0, 1]; // topic z -> perm[z]
        let permuted: Vec<Vec<u32>> = init
            .iter()
            .map(|row| row.iter().map(|&z| perm[z as usize]).collect())
            .collect();

        let base = fit_topics_forced_init(&corpus, k, 0, 0.1, 0.01, 1, &opts, &init).unwrap();
        let moved = fit_topics_forced_init(&corpus, k, 0, 0.1, 0.01, 1, &opts, &permuted).unwrap();
        for (topic, &mapped) in perm.iter().enumerate() {
            let target = mapped as usize;
            assert_eq!(base.topic_total(topic), moved.topic_total(target));
            for w in 0..base.vocabulary().len() {
                assert_eq!(
                    base.topic_word_count(topic, w),
                    moved.topic_word_count(target, w)
                );
            }
            for d in 0..corpus.len() {
                assert_eq!(
                    base.doc_topic_count(d, topic),
                    moved.doc_topic_count(d, target)
                );
            }
        }
    }

    #[test]
    fn permuted_init_lands_in_permuted_mode_on_separated_corpus() {
        let corpus = two_theme_corpus(20, 24);
        let opts = VocabOptions::keep_all();
        // Seed the sampler from a theme-aligned init and its swap.
        let init: Vec<Vec<u32>> = corpus
            .iter()
            .enumerate()
            .map(|(d, doc)| vec![(d % 2) as u32; doc.len()])
            .collect();
        let swapped: Vec<Vec<u32>> = init
            .iter()
            .map(|row| row.iter().map(|&z| 1 - z).collect())
            .collect();
        let base = fit_topics_forced_init(&corpus, 2, 50, 0.1, 0.01, 13, &opts, &init).unwrap();
        let moved = fit_topics_forced_init(&corpus, 2, 50, 0.1, 0.01, 13, &opts, &swapped).unwrap();
        for d in 0..corpus.len() {
            let wb = base.document_weights(d).unwrap();
            let wm = moved.document_weights(d).unwrap();
            let dom_b = if wb[0] > wb[1] { 0 } else { 1 };
            let dom_m = if wm[0] > wm[1] { 0 } else { 1 };
            assert_eq!(dom_b, 1 - dom_m, "doc {d} dominant topics not swapped");
        }
    }

    #[test]
    fn state_json_round_trip() {
        let corpus = two_theme_corpus(4, 8);
        let state =
            fit_topics_with_options(&corpus, 2, 10, 0.1, 0.01, 2, &VocabOptions::keep_all())
                .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        state.save_json(f.path()).unwrap();
        let reloaded = TopicModelState::load_json(f.path()).unwrap();
        assert_eq!(state, reloaded);
    }
}
