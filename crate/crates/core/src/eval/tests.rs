use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::*;

mod loss {
    use super::*;

    #[test]
    fn matches_direct_formula_evaluation() {
        let loss = log_loss(&[1.0, 0.0], &[0.8, 0.2]).unwrap();
        assert_abs_diff_eq!(loss.total, 0.4462871026284194, epsilon = 1e-12);
        assert_abs_diff_eq!(loss.total, 0.44629, epsilon = 1e-5);
        assert_abs_diff_eq!(loss.mean, 0.4462871026284194 / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn coin_flip_probabilities_give_n_ln2() {
        let n = 37;
        let labels: Vec<f64> = (0..n).map(|i| f64::from(i % 2 == 0)).collect();
        let probs = vec![0.5; n];
        let loss = log_loss(&labels, &probs).unwrap();
        assert_abs_diff_eq!(
            loss.total,
            n as f64 * std::f64::consts::LN_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn perfect_clamped_predictions_cost_almost_nothing() {
        let labels = [1.0, 0.0, 1.0];
        let probs: Vec<f64> = labels.iter().map(|&y| clamp_probability(y)).collect();
        let loss = log_loss(&labels, &probs).unwrap();
        assert!(loss.total < 1e-10);
    }

    #[test]
    fn hard_zero_or_one_against_the_label_is_an_error() {
        assert!(matches!(
            log_loss(&[1.0], &[0.0]),
            Err(Error::DegenerateProbability { .. })
        ));
        assert!(matches!(
            log_loss(&[0.0], &[1.0]),
            Err(Error::DegenerateProbability { .. })
        ));
        // Agreeing hard probabilities are fine (0·ln0 never occurs).
        assert_eq!(log_loss(&[1.0], &[1.0]).unwrap().total, 0.0);
    }

    #[test]
    fn rejects_non_binary_labels_and_bad_probabilities() {
        assert!(matches!(
            log_loss(&[0.25], &[0.5]),
            Err(Error::NonBinaryLabel(_))
        ));
        assert!(log_loss(&[1.0], &[1.5]).is_err());
        assert!(log_loss(&[1.0], &[f64::NAN]).is_err());
        assert!(log_loss(&[1.0, 0.0], &[0.5]).is_err());
    }

    proptest! {
        #[test]
        fn permutation_invariant_and_additive(
            pairs in prop::collection::vec((any::<bool>(), 0.01f64..0.99), 2..40),
            split in any::<prop::sample::Index>(),
        ) {
            let labels: Vec<f64> = pairs.iter().map(|(y, _)| f64::from(*y)).collect();
            let probs: Vec<f64> = pairs.iter().map(|(_, p)| *p).collect();
            let base = log_loss(&labels, &probs).unwrap();

            // Permutation invariance of the total.
            let mut shuffled: Vec<(f64, f64)> =
                labels.iter().copied().zip(probs.iter().copied()).collect();
            shuffled.reverse();
            shuffled.rotate_left(pairs.len() / 3);
            let (l2, p2): (Vec<f64>, Vec<f64>) = shuffled.into_iter().unzip();
            let permuted = log_loss(&l2, &p2).unwrap();
            prop_assert!((base.total - permuted.total).abs() < 1e-10);

            // Additivity over a disjoint split.
            let k = 1 + split.index(pairs.len() - 1);
            if k < pairs.len() {
                let a = log_loss(&labels[..k], &probs[..k]).unwrap();
                let b = log_loss(&labels[k..], &probs[k..]).unwrap();
                prop_assert!((base.total - (a.total + b.total)).abs() < 1e-10);
            }
        }
    }
}

mod plan {
    use super::*;

    fn labeled(n: usize) -> Vec<(String, bool)> {
        (0..n).map(|i| (format!("id{i:02}"), i % 3 == 0)).collect()
    }

    #[test]
    fn halves_partition_with_near_equal_sizes() {
        for n in [10usize, 11] {
            let plan = make_cv_plan(&labeled(n), 3, 4).unwrap();
            assert_eq!(plan.repeats(), 3);
            for (a, b) in &plan.halves {
                assert!((a.len() as i64 - b.len() as i64).abs() <= 1);
                let mut all: Vec<&String> = a.iter().chain(b.iter()).collect();
                all.sort_unstable();
                all.dedup();
                assert_eq!(all.len(), n, "halves must partition the ids exactly");
            }
        }
    }

    #[test]
    fn same_seed_gives_identical_plans() {
        let a = make_cv_plan(&labeled(10), 3, 99).unwrap();
        let b = make_cv_plan(&labeled(10), 3, 99).unwrap();
        assert_eq!(a, b);
        let c = make_cv_plan(&labeled(10), 3, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn partitions_differ_across_repeats() {
        let plan = make_cv_plan(&labeled(10), 3, 4).unwrap();
        let mut sorted: Vec<Vec<String>> = plan
            .halves
            .iter()
            .map(|(a, _)| {
                let mut v = a.clone();
                v.sort_unstable();
                v
            })
            .collect();
        sorted.dedup();
        assert!(sorted.len() > 1, "repeated shuffles should differ");
    }

    #[test]
    fn input_order_does_not_change_the_plan() {
        let mut reversed = labeled(10);
        reversed.reverse();
        assert_eq!(
            make_cv_plan(&labeled(10), 2, 7).unwrap(),
            make_cv_plan(&reversed, 2, 7).unwrap()
        );
    }

    #[test]
    fn single_class_or_tiny_input_is_rejected() {
        let all_true: Vec<(String, bool)> = (0..8).map(|i| (format!("x{i}"), true)).collect();
        assert!(matches!(
            make_cv_plan(&all_true, 2, 1),
            Err(Error::DegenerateLabels(1))
        ));
        assert!(make_cv_plan(&labeled(3), 2, 1).is_err());
    }
}

/// Raw base matrix with informative columns and a weak age signal.
fn synthetic_base(n: usize, informative: bool, seed: u64) -> FeatureMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns = vec![
        AGE_COLUMN.to_string(),
        VIAF_COLUMN.to_string(),
        "f1".to_string(),
        "f2".to_string(),
    ];
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let age: f64 = rng.random_range(100.0..4500.0);
        let viaf = f64::from(rng.random::<f64>() < 0.4);
        let f1: f64 = rng.sample(StandardNormal);
        let f2: f64 = rng.sample(StandardNormal);
        let z = if informative {
            1.8 * f1 - 1.2 * f2 + 0.3
        } else {
            -0.6
        };
        let y = rng.random::<f64>() < 1.0 / (1.0 + (-z).exp());
        rows.push(vec![age, viaf, f1, f2]);
        labels.push(Some(y));
    }
    let mut m = FeatureMatrix::from_rows(columns, &rows).unwrap();
    m.set_labels(labels).unwrap();
    m
}

fn plan_for(base: &FeatureMatrix, repeats: usize, seed: u64) -> CvPlan {
    let labeled: Vec<(String, bool)> = base
        .row_ids()
        .iter()
        .zip(base.labels())
        .map(|(id, l)| (id.clone(), l.unwrap()))
        .collect();
    make_cv_plan(&labeled, repeats, seed).unwrap()
}

mod cv {
    use super::*;

    #[test]
    fn one_repeat_evaluates_both_halves_per_model() {
        let base = synthetic_base(60, true, 5);
        let plan = plan_for(&base, 1, 11);
        let report = run_cv(&base, &plan, &CvModel::ALL, &CvConfig::default()).unwrap();
        for model in CvModel::ALL {
            let fits = report
                .outcomes
                .iter()
                .filter(|o| o.model == model.name())
                .count();
            assert_eq!(fits, 2, "{}", model.name());
        }
        assert!(report.skipped.is_empty());
    }

    #[test]
    fn informative_features_beat_the_age_baseline() {
        let base = synthetic_base(320, true, 42);
        let plan = plan_for(&base, 5, 7);
        let report = run_cv(
            &base,
            &plan,
            &[CvModel::Full, CvModel::AgeOnly],
            &CvConfig::default(),
        )
        .unwrap();
        let mut wins = 0;
        for r in 0..5 {
            let full = report.repeat_mean_loss(r, CvModel::Full).unwrap();
            let age = report.repeat_mean_loss(r, CvModel::AgeOnly).unwrap();
            if full < age {
                wins += 1;
            }
        }
        assert!(wins >= 4, "full model won only {wins}/5 repeats");
    }

    #[test]
    fn uninformative_features_score_near_the_base_rate() {
        let base = synthetic_base(320, false, 43);
        let positives = base.labels().iter().filter(|l| l.unwrap()).count() as f64;
        let rate = positives / base.n_rows() as f64;
        let entropy = -(rate * rate.ln() + (1.0 - rate) * (1.0 - rate).ln());
        let plan = plan_for(&base, 4, 9);
        let report = run_cv(&base, &plan, &CvModel::ALL, &CvConfig::default()).unwrap();
        for s in &report.summaries {
            assert!(
                (s.mean_loss - entropy).abs() < 0.15,
                "{} mean loss {} vs base-rate entropy {entropy}",
                s.model,
                s.mean_loss
            );
        }
    }

    #[test]
    fn single_class_training_half_is_skipped_and_flagged() {
        // One positive in eight: whichever half lacks it cannot train.
        let columns = vec![AGE_COLUMN.to_string(), VIAF_COLUMN.to_string()];
        let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64, f64::from(i % 2)]).collect();
        let mut base = FeatureMatrix::from_rows(columns, &rows).unwrap();
        base.set_labels((0..8).map(|i| Some(i == 0)).collect())
            .unwrap();
        let plan = plan_for(&base, 3, 1);
        let report = run_cv(&base, &plan, &[CvModel::AgeOnly], &CvConfig::default()).unwrap();
        assert_eq!(
            report.skipped.len(),
            3,
            "one direction per repeat must skip"
        );
        assert_eq!(report.outcomes.len(), 3);
        for s in &report.skipped {
            assert!(s.reason.contains("single class"));
        }
    }

    #[test]
    fn unknown_plan_id_is_an_error() {
        let base = synthetic_base(20, true, 5);
        let mut plan = plan_for(&base, 1, 2);
        plan.halves[0].0[0] = "ghost".to_string();
        assert!(matches!(
            run_cv(&base, &plan, &[CvModel::AgeOnly], &CvConfig::default()),
            Err(Error::IdMismatch(_))
        ));
    }

    #[test]
    fn report_tsv_has_one_row_per_outcome() {
        let base = synthetic_base(40, true, 3);
        let plan = plan_for(&base, 2, 13);
        let report = run_cv(&base, &plan, &CvModel::ALL, &CvConfig::default()).unwrap();
        let mut buf = Vec::new();
        report.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + report.outcomes.len());
        let mut summary = Vec::new();
        report.write_summary(&mut summary).unwrap();
        assert!(String::from_utf8(summary).unwrap().contains("full"));
    }
}

mod pairwise {
    use super::*;

    fn ranking(pairs: &[(&str, f64)]) -> Vec<(String, f64)> {
        pairs.iter().map(|(id, r)| (id.to_string(), *r)).collect()
    }

    #[test]
    fn identical_rankings_have_zero_loss() {
        let r = ranking(&[("a", 1.0), ("b", 2.0), ("c", 3.0)]);
        assert_eq!(pairwise_loss(&r, &r).unwrap(), 0.0);
    }

    #[test]
    fn reversed_rankings_have_unit_loss() {
        let r = ranking(&[("a", 1.0), ("b", 2.0), ("c", 3.0)]);
        let rev = ranking(&[("a", 3.0), ("b", 2.0), ("c", 1.0)]);
        assert_eq!(pairwise_loss(&rev, &r).unwrap(), 1.0);
    }

    #[test]
    fn four_element_case_matches_pair_enumeration() {
        // Reference: b, a, d, c. Candidate: a, b, c, d.
        // Discordant pairs: (a,b) and (c,d) — 2 of 6.
        let candidate = ranking(&[("a", 1.0), ("b", 2.0), ("c", 3.0), ("d", 4.0)]);
        let reference = ranking(&[("a", 2.0), ("b", 1.0), ("c", 4.0), ("d", 3.0)]);
        assert_abs_diff_eq!(
            pairwise_loss(&candidate, &reference).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn reference_ties_are_skipped_and_candidate_ties_count_half() {
        // Reference ties (a,b): only pairs (a,c) and (b,c) count.
        let reference = ranking(&[("a", 1.0), ("b", 1.0), ("c", 2.0)]);
        let candidate = ranking(&[("a", 1.0), ("b", 2.0), ("c", 3.0)]);
        assert_eq!(pairwise_loss(&candidate, &reference).unwrap(), 0.0);
        // Candidate ties (a,c) but agrees on (b,c): half credit on one of
        // the two scored pairs.
        let tied = ranking(&[("a", 1.0), ("b", 0.5), ("c", 1.0)]);
        assert_abs_diff_eq!(
            pairwise_loss(&tied, &reference).unwrap(),
            0.25,
            epsilon = 1e-15
        );
        // Tie on (a,c) plus discordance on (b,c): (0.5 + 1.0) / 2.
        let tied_and_wrong = ranking(&[("a", 1.0), ("b", 2.0), ("c", 1.0)]);
        assert_abs_diff_eq!(
            pairwise_loss(&tied_and_wrong, &reference).unwrap(),
            0.75,
            epsilon = 1e-15
        );
    }

    #[test]
    fn id_mismatch_is_an_error() {
        let a = ranking(&[("a", 1.0), ("b", 2.0)]);
        let b = ranking(&[("a", 1.0), ("z", 2.0)]);
        assert!(matches!(pairwise_loss(&a, &b), Err(Error::IdMismatch(_))));
    }

    proptest! {
        #[test]
        fn relabeling_ids_never_changes_the_loss(
            ranks in prop::collection::vec((1u8..40, 1u8..40), 2..25),
        ) {
            let candidate: Vec<(String, f64)> = ranks
                .iter()
                .enumerate()
                .map(|(i, (c, _))| (format!("id{i}"), f64::from(*c)))
                .collect();
            let reference: Vec<(String, f64)> = ranks
                .iter()
                .enumerate()
                .map(|(i, (_, r))| (format!("id{i}"), f64::from(*r)))
                .collect();
            let relabel = |v: &[(String, f64)]| -> Vec<(String, f64)> {
                v.iter()
                    .map(|(id, r)| (format!("zz-{id}-xx"), *r))
                    .collect()
            };
            match pairwise_loss(&candidate, &reference) {
                Ok(loss) => {
                    let relabeled =
                        pairwise_loss(&relabel(&candidate), &relabel(&reference)).unwrap();
                    prop_assert!((loss - relabeled).abs() < 1e-15);
                    prop_assert!((0.0..=1.0).contains(&loss));
                }
                Err(_) => {
                    // Entirely tied reference; relabeling must agree.
                    prop_assert!(
                        pairwise_loss(&relabel(&candidate), &relabel(&reference)).is_err()
                    );
                }
            }
        }
    }

    #[test]
    fn candidate_equal_to_reference_beats_random_with_high_confidence() {
        let reference: Vec<(String, f64)> = (0..20)
            .map(|i| (format!("pm{i:02}"), (i + 1) as f64))
            .collect();
        let result = permutation_confidence(&reference, &reference, 1000, 5).unwrap();
        assert_eq!(result.observed, 0.0);
        assert!(result.confidence > 0.99, "confidence {}", result.confidence);
    }

    #[test]
    fn permutation_confidence_is_deterministic_under_seed() {
        let reference: Vec<(String, f64)> =
            (0..12).map(|i| (format!("p{i}"), (i + 1) as f64)).collect();
        let candidate = random_ranking(
            &reference
                .iter()
                .map(|(id, _)| id.clone())
                .collect::<Vec<_>>(),
            3,
        );
        let a = permutation_confidence(&candidate, &reference, 500, 7).unwrap();
        let b = permutation_confidence(&candidate, &reference, 500, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_candidates_get_roughly_uniform_confidence() {
        let ids: Vec<String> = (0..15).map(|i| format!("p{i:02}")).collect();
        let reference: Vec<(String, f64)> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), (i + 1) as f64))
            .collect();
        let mut confidences = Vec::new();
        for seed in 0..60 {
            let candidate = random_ranking(&ids, 1000 + seed);
            let r = permutation_confidence(&candidate, &reference, 200, seed).unwrap();
            confidences.push(r.confidence);
        }
        let mean: f64 = confidences.iter().sum::<f64>() / confidences.len() as f64;
        assert!((0.35..=0.65).contains(&mean), "mean confidence {mean}");
        assert!(confidences.iter().any(|&c| c < 0.25));
        assert!(confidences.iter().any(|&c| c > 0.75));
    }

    #[test]
    fn two_ids_give_coarse_grid_results() {
        let reference = ranking(&[("a", 1.0), ("b", 2.0)]);
        let agree = ranking(&[("a", 1.0), ("b", 2.0)]);
        let disagree = ranking(&[("a", 2.0), ("b", 1.0)]);
        assert_eq!(pairwise_loss(&agree, &reference).unwrap(), 0.0);
        assert_eq!(pairwise_loss(&disagree, &reference).unwrap(), 1.0);
        let r = permutation_confidence(&agree, &reference, 100, 1).unwrap();
        assert!((0.0..=1.0).contains(&r.confidence));
    }

    #[test]
    fn too_few_permutations_is_an_error() {
        let r = ranking(&[("a", 1.0), ("b", 2.0)]);
        assert!(permutation_confidence(&r, &r, 99, 1).is_err());
    }
}
