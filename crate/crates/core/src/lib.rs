//! Ranking toolkit for public-domain notability.
//!
//! The crate implements a file-driven pipeline that ranks historical
//! individuals by the predicted probability that their works have
//! volunteer-made public-domain digital editions:
//!
//! * [`ingest`] — corpus parsing (record files, edition catalogs, MediaWiki
//!   export fixtures) and label assignment by author/edition matching.
//! * [`topics`] — fixed-K latent topic inference with collapsed Gibbs
//!   sampling; per-document topic weights feed the regression.
//! * [`features`] — design-matrix assembly, standardization, and
//!   age-interaction columns.
//! * [`model`] — logistic regression with weakly informative Student-t
//!   priors: MAP fit, Laplace-approximation posterior draws, coefficient
//!   reporting.
//! * [`ranking`] — expected rank and score over the full population.
//! * [`eval`] — repeated half-holdout cross-validation against baseline
//!   models, and pairwise-loss comparison with permutation confidence.
//! * [`reports`] — public-domain-day, commons-gap, and overlooked-article
//!   lists.
//!
//! Every stochastic step is driven by an explicit seed through ChaCha8, so
//! identical inputs and seeds reproduce identical outputs across platforms.

pub mod error;
pub mod eval;
pub mod features;
pub mod ingest;
pub mod model;
pub mod ranking;
pub mod reports;
pub mod topics;

pub use error::{Error, Result};
