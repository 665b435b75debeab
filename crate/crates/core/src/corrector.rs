//! End-to-end context-sensitive spelling correction.
//!
//! The pipeline flags word tokens the vocabulary does not recognize,
//! enumerates correction candidates at minimal edit distance, and picks the
//! candidate whose embedding best fits the span of the surrounding words.
//! Substitution is strictly 1:1 — a flagged token is either replaced by a
//! vocabulary word or left alone — so corrected text lines up token for
//! token with its source, and an attack log can be scored against it.

use std::collections::HashMap;

use crate::attacker::AttackLog;
use crate::corpus::Document;
use crate::editdist::{CandidateIndex, CandidateSet, DEFAULT_MAX_RADIUS};
use crate::embedding::{
    select_correction, ContextWindow, EmbeddingTable, ScoredCandidate, DEFAULT_WINDOW_SIZE,
};
use crate::error::{Error, Result};
use crate::lexicon::Vocabulary;
use crate::textnorm::{tokenize, Token, TokenizedText};

/// How the winning candidate is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionPolicy {
    /// Rank candidates by embedding distance to the context (the full
    /// pipeline).
    #[default]
    ContextSensitive,
    /// Always take the most frequent candidate — the classic spell-checker
    /// baseline the context-sensitive policy is measured against.
    FrequencyOnly,
}

/// Correction parameters.
#[derive(Debug, Clone, Copy)]
pub struct CorrectorConfig {
    /// Largest edit distance searched for candidates.
    pub max_radius: usize,
    /// Largest context window size `P`.
    pub window_size: usize,
    pub policy: SelectionPolicy,
}

impl Default for CorrectorConfig {
    fn default() -> CorrectorConfig {
        CorrectorConfig {
            max_radius: DEFAULT_MAX_RADIUS,
            window_size: DEFAULT_WINDOW_SIZE,
            policy: SelectionPolicy::default(),
        }
    }
}

/// What happened to one token.
#[derive(Debug, Clone)]
pub struct TokenCorrection {
    /// Flat token index within the unit that was corrected.
    pub token_index: usize,
    /// Surface form before correction.
    pub original: String,
    /// True when the token was a word the vocabulary rejects.
    pub flagged: bool,
    /// Candidates found for a flagged token, if any.
    pub candidates: Option<CandidateSet>,
    /// The vocabulary word substituted in (lowercase), if any.
    pub chosen: Option<String>,
    /// Context scores for the scorable candidates, best first.
    pub scores: Vec<ScoredCandidate>,
}

/// Outcome of correcting one sentence or document.
#[derive(Debug, Clone, Default)]
pub struct CorrectionResult {
    /// One record per token, in token order.
    pub records: Vec<TokenCorrection>,
    pub corrected_text: String,
    /// Word tokens the vocabulary rejected.
    pub flagged: usize,
    /// Flagged tokens that were substituted.
    pub corrected: usize,
    /// Flagged tokens with no candidate in range, left unchanged.
    pub unchanged_oov: usize,
}

/// Corpus-wide correction outcome.
#[derive(Debug, Clone, Default)]
pub struct CorpusCorrection {
    /// Per-document results, in corpus order.
    pub by_document: Vec<(String, CorrectionResult)>,
    pub flagged: usize,
    pub corrected: usize,
    pub unchanged_oov: usize,
}

/// Correct every flagged token of `tokenized` in place.
fn correct_tokenized(
    vocab: &Vocabulary,
    index: &CandidateIndex,
    table: &EmbeddingTable,
    tokenized: &mut TokenizedText,
    config: &CorrectorConfig,
) -> CorrectionResult {
    let mut result = CorrectionResult::default();
    let mut base = 0usize;
    for s in 0..tokenized.sentences.len() {
        // Valid word tokens are the only context slots; numbers,
        // punctuation, placeholders and the flagged tokens themselves
        // never appear in a window.
        let slots: Vec<(usize, String)> = tokenized.sentences[s]
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_word() && vocab.is_valid(&t.lower))
            .map(|(i, t)| (i, t.lower.clone()))
            .collect();

        for i in 0..tokenized.sentences[s].len() {
            let token = &tokenized.sentences[s][i];
            let mut record = TokenCorrection {
                token_index: base + i,
                original: token.surface.clone(),
                flagged: false,
                candidates: None,
                chosen: None,
                scores: Vec::new(),
            };
            if token.is_word() && !vocab.is_valid(&token.lower) {
                record.flagged = true;
                result.flagged += 1;
                match index.enumerate(&token.lower, config.max_radius) {
                    Some(candidates) => {
                        let (chosen, scores) = match config.policy {
                            SelectionPolicy::ContextSensitive => {
                                let left: Vec<String> = slots
                                    .iter()
                                    .filter(|(j, _)| *j < i)
                                    .map(|(_, w)| w.clone())
                                    .collect();
                                let right: Vec<String> = slots
                                    .iter()
                                    .filter(|(j, _)| *j > i)
                                    .map(|(_, w)| w.clone())
                                    .collect();
                                let window = ContextWindow::new(
                                    token.lower.clone(),
                                    left,
                                    right,
                                    config.window_size,
                                );
                                select_correction(table, &candidates, &window)
                            }
                            SelectionPolicy::FrequencyOnly => {
                                let (word, _) = candidates
                                    .candidates
                                    .iter()
                                    .max_by(|(wa, fa), (wb, fb)| fa.cmp(fb).then(wb.cmp(wa)))
                                    .expect("candidate sets are never empty");
                                (word.clone(), Vec::new())
                            }
                        };
                        tokenized.sentences[s][i] =
                            tokenized.sentences[s][i].with_replacement(&chosen);
                        result.corrected += 1;
                        record.candidates = Some(candidates);
                        record.chosen = Some(chosen);
                        record.scores = scores;
                    }
                    None => result.unchanged_oov += 1,
                }
            }
            result.records.push(record);
        }
        base += tokenized.sentences[s].len();
    }
    result.corrected_text = tokenized.detokenize();
    result
}

/// Correct one sentence of tokens.
///
/// Token indices in the result are positions within the sentence.
pub fn correct_sentence(
    vocab: &Vocabulary,
    index: &CandidateIndex,
    table: &EmbeddingTable,
    sentence: &[Token],
    config: &CorrectorConfig,
) -> CorrectionResult {
    let mut tokenized = TokenizedText {
        sentences: vec![sentence.to_vec()],
        trailing: String::new(),
    };
    correct_tokenized(vocab, index, table, &mut tokenized, config)
}

/// Correct a whole text; token indices count across sentences.
pub fn correct_text(
    vocab: &Vocabulary,
    index: &CandidateIndex,
    table: &EmbeddingTable,
    text: &str,
    config: &CorrectorConfig,
) -> CorrectionResult {
    let mut tokenized = tokenize(text);
    correct_tokenized(vocab, index, table, &mut tokenized, config)
}

/// Correct every document of a corpus.
pub fn correct_corpus(
    vocab: &Vocabulary,
    index: &CandidateIndex,
    table: &EmbeddingTable,
    docs: &[Document],
    config: &CorrectorConfig,
) -> (Vec<Document>, CorpusCorrection) {
    let mut corrected_docs = Vec::with_capacity(docs.len());
    let mut corpus = CorpusCorrection::default();
    for doc in docs {
        let result = correct_text(vocab, index, table, &doc.text, config);
        corpus.flagged += result.flagged;
        corpus.corrected += result.corrected;
        corpus.unchanged_oov += result.unchanged_oov;
        corrected_docs.push(Document::new(
            doc.id.clone(),
            doc.label.clone(),
            result.corrected_text.clone(),
        ));
        corpus.by_document.push((doc.id.clone(), result));
    }
    (corrected_docs, corpus)
}

/// Fraction of attacked occurrences restored to their original word.
///
/// A logged occurrence counts as recovered when the correction chosen at
/// its `(doc id, token index)` equals the logged original, compared
/// case-insensitively. Fails when the log is empty or names documents the
/// correction never saw.
pub fn correction_accuracy(log: &AttackLog, corpus: &CorpusCorrection) -> Result<f64> {
    if log.records.is_empty() {
        return Err(Error::InvalidInput("attack log has no records".into()));
    }
    let mut chosen: HashMap<(&str, usize), Option<&str>> = HashMap::new();
    for (doc_id, result) in &corpus.by_document {
        for record in &result.records {
            chosen.insert(
                (doc_id.as_str(), record.token_index),
                record.chosen.as_deref(),
            );
        }
    }
    let mut recovered = 0usize;
    for record in &log.records {
        match chosen.get(&(record.doc_id.as_str(), record.token_index)) {
            None => {
                return Err(Error::Contract(format!(
                    "attack log names document {:?} token {}, which the correction never saw",
                    record.doc_id, record.token_index
                )))
            }
            Some(Some(word)) if *word == record.original.to_lowercase() => recovered += 1,
            Some(_) => {}
        }
    }
    Ok(recovered as f64 / log.records.len() as f64)
}
