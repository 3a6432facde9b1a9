//! Shared helpers for integration tests: fixture paths and synthetic data.
#![allow(dead_code)] // each test binary uses a different subset

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use pdrank_core::features::FeatureMatrix;
use pdrank_core::ingest::{
    Catalog, DeathDate, EditionRecord, IdentifierTag, MatchOverride, PersonRecord,
};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

/// X ~ N(0,1), y ~ Bernoulli(logit⁻¹(Xβ* + intercept)).
pub fn synth_logistic(
    n: usize,
    slopes: &[f64],
    intercept: f64,
    seed: u64,
) -> (FeatureMatrix, Vec<f64>) {
    let p = slopes.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..p)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let z: f64 = intercept + row.iter().zip(slopes).map(|(x, b)| x * b).sum::<f64>();
        let prob = 1.0 / (1.0 + (-z).exp());
        labels.push(if rng.random::<f64>() < prob { 1.0 } else { 0.0 });
        rows.push(row);
    }
    let columns = (0..p).map(|j| format!("x{j}")).collect();
    (FeatureMatrix::from_rows(columns, &rows).unwrap(), labels)
}

const FIRSTS: [&str; 25] = [
    "Alma", "Bela", "Cora", "Dinah", "Edgar", "Fanny", "Gregor", "Hilda", "Ivo", "Jonas", "Katya",
    "Lionel", "Mara", "Nils", "Olga", "Pavel", "Quinn", "Rosa", "Stefan", "Tilda", "Ursula",
    "Viktor", "Wanda", "Xenia", "Yuri",
];
const LASTS: [&str; 20] = [
    "Adler",
    "Brandt",
    "Castell",
    "Dorn",
    "Ekberg",
    "Falk",
    "Grieg",
    "Holst",
    "Ivanov",
    "Jansen",
    "Keller",
    "Lindqvist",
    "Moreau",
    "Novak",
    "Ortiz",
    "Petrov",
    "Quist",
    "Rossi",
    "Strand",
    "Tamm",
];

const WRITER: [&str; 12] = [
    "book",
    "writer",
    "novel",
    "fiction",
    "stori",
    "novelist",
    "author",
    "publish",
    "poem",
    "literatur",
    "essay",
    "write",
];
const PAINTER: [&str; 12] = [
    "painter", "paint", "art", "artist", "museum", "portrait", "galleri", "exhibit", "sculptor",
    "sculptur", "canva", "brush",
];
const SCHOLAR: [&str; 12] = [
    "historian",
    "univers",
    "languag",
    "histori",
    "studi",
    "translat",
    "scholar",
    "professor",
    "lectur",
    "archiv",
    "journal",
    "research",
];
const COMMON: [&str; 8] = ["the", "of", "and", "in", "was", "place", "name", "on"];

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// A deterministic 500-person corpus whose edition matches correlate with
/// article metrics and the writer theme, so the fitted model has real
/// signal. Includes the public-domain-day boundary deaths 1963, 1964,
/// 1974, and 1975.
pub fn synthetic_corpus(seed: u64) -> Catalog {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut persons = Vec::with_capacity(500);
    let mut editions = Vec::new();

    let boundary_deaths = [1963, 1964, 1974, 1975];
    for i in 0..500usize {
        let title = format!("{} {}", FIRSTS[i % 25], LASTS[(i / 25) % 20]);
        let person_id = format!("{}_{}", title.to_lowercase().replace(' ', "_"), i);
        let mut p = PersonRecord::blank(person_id, title.clone());

        let theme = i % 3;
        let vocab: &[&str] = match theme {
            0 => &WRITER,
            1 => &PAINTER,
            _ => &SCHOLAR,
        };
        p.tokens = (0..32)
            .map(|_| {
                if rng.random::<f64>() < 0.62 {
                    vocab[rng.random_range(0..vocab.len())].to_string()
                } else {
                    COMMON[rng.random_range(0..COMMON.len())].to_string()
                }
            })
            .collect();

        // 440 in-window deaths, boundary deaths, a few missing.
        let death_year = if i < 440 {
            Some(1910 + (i % 43) as i32)
        } else if i < 444 {
            Some(boundary_deaths[i - 440])
        } else if i < 490 {
            Some(1953 + (i % 20) as i32)
        } else {
            None
        };
        p.death_date = death_year.map(DeathDate::year_only);
        p.birth_year = death_year.map(|y| y - 60 - (i % 15) as i32);

        p.views_per_day = if i % 29 == 0 {
            None
        } else {
            Some((rng.random::<f64>() * 2500.0).round())
        };
        p.article_length_bytes = rng.random_range(2_000..90_000);
        p.article_age_days = rng.random_range(1_200..4_700);
        p.days_since_last_revision = rng.random_range(0..500);
        p.revisions_per_day = (rng.random::<f64>() * 1.8 * 100.0).round() / 100.0;
        p.category_count = rng.random_range(1..35);
        p.translation_count = rng.random_range(0..120);
        p.redirect_count = rng.random_range(0..45);
        for f in 0..10 {
            p.translation_flags[f] = rng.random::<f64>() < 0.3;
        }
        p.good_article = rng.random::<f64>() < 0.08;
        if rng.random::<f64>() < 0.55 {
            p.identifiers.insert(IdentifierTag::Viaf);
        }
        if rng.random::<f64>() < 0.3 {
            p.identifiers.insert(IdentifierTag::Gnd);
        }
        if rng.random::<f64>() < 0.2 {
            p.identifiers.insert(IdentifierTag::Lccn);
        }

        // Digital editions favor widely read writer-theme subjects.
        let views = p.views_per_day.unwrap_or(0.0);
        let z = -4.2
            + 1.2 * f64::from(theme == 0)
            + 0.9 * (views / 2500.0)
            + 0.7 * ((p.article_length_bytes as f64).ln_1p() - 10.0)
            + 0.5 * f64::from(p.identifiers.contains(&IdentifierTag::Viaf));
        if rng.random::<f64>() < sigmoid(z) {
            if let Some(y) = death_year {
                editions.push(EditionRecord {
                    author_name: title,
                    author_death_year: Some(y),
                    source_collection: "Gutenberg".to_string(),
                    work_title: format!("Collected Works {i}"),
                });
            }
        }
        persons.push(p);
    }

    let overrides = vec![MatchOverride {
        person_id: persons[7].person_id.clone(),
        forced_label: false,
    }];
    Catalog::from_parts(persons, editions, overrides).unwrap()
}
