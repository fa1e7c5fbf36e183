//! Text-classification pipeline for short informal Spanish texts, built for
//! exhaustive sweeps over preprocessing and tokenizer choices.
//!
//! A [`Configuration`] is one on/off assignment of fifteen transformation
//! flags plus a non-empty set of tokenizers. For each configuration the
//! pipeline normalizes text ([`textnorm`]), tokenizes it ([`tokenizers`]),
//! weights tokens ([`vectorizer`]), trains a one-vs-rest linear model
//! ([`classifier`]) and scores it by stratified cross-validation
//! ([`evaluation`]). [`sweep`] runs that over many configurations, possibly
//! in parallel, and summarizes the best ones.
//!
//! ```
//! use textsweep::{Configuration, Normalizer};
//!
//! let config = Configuration::parse_fragment("lc,usr;tok=w1+q3").unwrap();
//! let text = Normalizer::bundled().normalize("Hola @ana", &config);
//! assert_eq!(text, "hola _user");
//! ```

pub mod classifier;
pub mod config;
pub mod corpus;
pub mod evaluation;
pub mod parallel;
pub mod sweep;
pub mod textnorm;
pub mod tokenizers;
pub mod vectorizer;

pub use classifier::{train, LinearModel, TrainError, TrainParams};
pub use config::{ConfigError, Configuration, Flag, FlagSet, Tokenizer, TokenizerSet};
pub use corpus::{Document, Label};
pub use evaluation::{accuracy, macro_f1, stratified_folds, ConfusionMatrix, EvalResult, Evaluator};
pub use parallel::Execution;
pub use sweep::{enumerate_space, run_sweep, SweepRecord, SweepSummary};
pub use textnorm::{normalize, LemmaMap, LexiconSet, Normalizer};
pub use tokenizers::{jaccard, tokenize_multi, tokenize_qgrams, tokenize_words, TokenBag};
pub use vectorizer::{build_vocabulary, vectorize, SparseVector, Vocabulary};
