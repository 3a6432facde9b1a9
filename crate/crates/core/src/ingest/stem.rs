//! Tokenization and stemming.
//!
//! One tokenizer is used everywhere a raw text becomes a token stream, so
//! that topic inference sees the same forms at fit and fold-in time. Tokens
//! are maximal runs of Unicode letters, lowercased, then stemmed with the
//! Snowball English stemmer (a fixed suffix-stripping algorithm; e.g.
//! `categories` → `categori`, `library` → `librari`). Non-English scripts
//! pass through the stemmer unchanged.

use rust_stemmers::{Algorithm, Stemmer};

/// Stem a single lowercase token.
pub fn stem(token: &str) -> String {
    let stemmer = Stemmer::create(Algorithm::English);
    stemmer.stem(token).into_owned()
}

/// Tokenize raw text into lowercased, stemmed word tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let stemmer = Stemmer::create(Algorithm::English);
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphabetic() {
            current.extend(c.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(stemmer.stem(&current).into_owned());
            current.clear();
        }
    }
    if !current.is_empty() {
        tokens.push(stemmer.stem(&current).into_owned());
    }
    tokens
}
