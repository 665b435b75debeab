//! Bundled fixture data: a toy spam corpus with matching vocabulary and
//! embeddings for the offline demo, plus a small insult-correction showcase
//! with hand-constructed embeddings.
//!
//! All fixtures are compiled into the library so the full
//! attack→detect→correct loop runs without any external files. The demo
//! corpus and embeddings are produced by `tools/gen_demo_fixtures.py`; the
//! showcase files are hand-written.

use crate::corpus::{parse_corpus, Document};
use crate::embedding::EmbeddingTable;
use crate::lexicon::Vocabulary;

/// 40 alternating spam/ham documents, TSV `label<TAB>text`.
pub const DEMO_CORPUS_TSV: &str = include_str!("../data/demo_corpus.tsv");
/// Word frequencies for every demo corpus word plus six high-frequency
/// decoys, each one edit away from a spam keyword.
pub const DEMO_VOCAB_TSV: &str = include_str!("../data/demo_vocab.tsv");
/// 50-dimension embeddings for the demo content words: spam keywords lie in
/// the span of their context words; decoys are orthogonal to it.
pub const DEMO_EMBEDDINGS_VEC: &str = include_str!("../data/demo_embeddings.vec");

/// Vocabulary for the insult showcase sentences.
pub const SHOWCASE_VOCAB_TSV: &str = include_str!("../data/showcase_vocab.tsv");
/// 6-dimension embeddings for the insult showcase sentences.
pub const SHOWCASE_EMBEDDINGS_VEC: &str = include_str!("../data/showcase_embeddings.vec");

/// Disguised insult sentences paired with their expected corrections.
///
/// Each disguise is one edit: an interior `*`, a transposition, and an
/// inserted letter. The middle sentence is the interesting one — "ahte" has
/// two candidates and the higher-frequency one ("ate") is wrong, so only
/// context-sensitive selection recovers "hate".
pub const SHOWCASE_SENTENCES: [(&str, &str); 3] = [
    (
        "the stu*pid and stubborn administrators",
        "the stupid and stubborn administrators",
    ),
    ("anti American ahte groups", "anti American hate groups"),
    ("you're a biased fucdk", "you're a biased fuck"),
];

/// Parse the bundled demo corpus.
pub fn demo_corpus() -> Vec<Document> {
    parse_corpus(DEMO_CORPUS_TSV).expect("bundled demo corpus is well-formed")
}

/// Parse the bundled demo vocabulary.
pub fn demo_vocab() -> Vocabulary {
    Vocabulary::parse(DEMO_VOCAB_TSV, 1).expect("bundled demo vocabulary is well-formed")
}

/// Parse the bundled demo embeddings.
pub fn demo_embeddings() -> EmbeddingTable {
    EmbeddingTable::parse(DEMO_EMBEDDINGS_VEC).expect("bundled demo embeddings are well-formed")
}

/// Parse the bundled showcase vocabulary.
pub fn showcase_vocab() -> Vocabulary {
    Vocabulary::parse(SHOWCASE_VOCAB_TSV, 1).expect("bundled showcase vocabulary is well-formed")
}

/// Parse the bundled showcase embeddings.
pub fn showcase_embeddings() -> EmbeddingTable {
    EmbeddingTable::parse(SHOWCASE_EMBEDDINGS_VEC)
        .expect("bundled showcase embeddings are well-formed")
}
