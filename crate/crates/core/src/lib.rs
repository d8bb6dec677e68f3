//! Predicting positive/negative communication codes of dyadic interaction
//! sequences from transcripts and precomputed vectors.
//!
//! The pipeline: load a [`corpus::Corpus`], drop sequences without words,
//! featurize (DIC [`lexicon`], [`tfidf`] n-grams, or [`vectors`] tables
//! fused by concatenation), and score a class-weighted RBF [`svm`] with
//! couple-grouped nested cross-validation ([`experiment`]). Runs are
//! summarized as balanced accuracy ± standard error and compared with a
//! paired signed-rank test ([`evalstats`]).

pub mod corpus;
pub mod error;
pub mod evalstats;
pub mod experiment;
pub mod lexicon;
pub mod matrix;
pub mod svm;
pub mod tfidf;
pub mod tokenize;
pub mod vectors;

pub use corpus::{Code, Corpus, CorpusStats, Partner, Sequence};
pub use error::{Error, Result};
pub use matrix::Matrix;
