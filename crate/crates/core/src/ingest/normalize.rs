//! Author-name normalization for edition matching.
//!
//! Matching between biographical records and edition catalogs is done on
//! normalized names: case-folded, diacritics stripped, parenthetical
//! disambiguators (e.g. `"(novelist)"`) dropped, whitespace collapsed.
//! Residual mismatches are handled by the override file, not by fuzzier
//! matching.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Normalize a personal name for matching.
pub fn normalize_name(name: &str) -> String {
    let without_parens = strip_parentheticals(name);
    without_parens
        .nfd()
        .filter(|c| !is_combining_mark(*c))
        .collect::<String>()
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Drop `(...)` groups. Unbalanced opening parentheses swallow the rest of
/// the string, which matches how disambiguators appear in practice.
fn strip_parentheticals(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut depth = 0usize;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ if depth == 0 => out.push(c),
            _ => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_case_and_diacritics() {
        assert_eq!(normalize_name("José García"), "jose garcia");
        assert_eq!(normalize_name("Müller"), "muller");
        assert_eq!(normalize_name("Hélène Cixous"), "helene cixous");
    }

    #[test]
    fn drops_parenthetical_disambiguators() {
        assert_eq!(normalize_name("Samuel Butler (novelist)"), "samuel butler");
        assert_eq!(normalize_name("Susan Wood (science fiction)"), "susan wood");
    }

    #[test]
    fn collapses_whitespace() {
        assert_eq!(normalize_name("  Virginia   Woolf "), "virginia woolf");
    }

    #[test]
    fn passes_non_latin_through() {
        assert_eq!(normalize_name("老舍"), "老舍");
    }

    #[test]
    fn nested_and_unbalanced_parens() {
        assert_eq!(normalize_name("A (b (c) d) E"), "a e");
        assert_eq!(normalize_name("A (b"), "a");
    }
}
