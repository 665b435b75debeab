//! Adversarial misspelling attacks against word-frequency text classifiers,
//! and an embedding-based context-sensitive corrector that undoes them.
//!
//! The crate is organized around a small pipeline:
//!
//! * [`textnorm`] — tokenization, sentence segmentation, tweet placeholders.
//! * [`lexicon`] — vocabulary with frequencies and the function-word list.
//! * [`editdist`] — restricted Damerau-Levenshtein distance and candidate
//!   enumeration (linear scan and a deletion-neighborhood index).
//! * [`embedding`] — word vectors and the windowed least-squares context
//!   score that ranks correction candidates.
//! * [`spam_nb`] — multinomial Naive Bayes victim classifier and metrics.
//! * [`attacker`] — misspelling generation and corpus-level attacks.
//! * [`corrector`] — the end-to-end correction pipeline.
//! * [`corpus`] — labeled TSV corpora shared by all of the above.
//! * [`fixtures`] — bundled toy data so the whole loop runs offline.
//!
//! Everything is deterministic: random choices flow from explicit seeds,
//! and all public types are immutable after construction, so shared read
//! access across threads is safe.

pub mod attacker;
pub mod corpus;
pub mod corrector;
pub mod editdist;
pub mod embedding;
mod error;
pub mod fixtures;
pub mod lexicon;
pub mod spam_nb;
pub mod textnorm;

pub use attacker::{
    attack_corpus, generate_misspelling, invert_attack, AttackLog, AttackOutcome, AttackRecord,
    AttackSpec, KeywordScorer, PerturbKind, PerturbOp, TargetStrategy, WeightedLexiconScorer,
};
pub use corpus::Document;
pub use corrector::{
    correct_corpus, correct_sentence, correct_text, correction_accuracy, CorpusCorrection,
    CorrectionResult, CorrectorConfig, SelectionPolicy, TokenCorrection,
};
pub use editdist::{dl_distance, CandidateIndex, CandidateSet};
pub use embedding::{select_correction, ContextWindow, EmbeddingTable, ScoredCandidate};
pub use error::{Error, Result};
pub use lexicon::{FunctionWordList, Vocabulary};
pub use spam_nb::{evaluate, ClassMetrics, ClassificationReport, NaiveBayesModel};
pub use textnorm::{normalize_tweet, tokenize, Token, TokenKind, TokenizedText};
