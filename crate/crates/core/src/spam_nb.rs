//! Multinomial Naive Bayes text classifier and evaluation metrics.
//!
//! This is the victim model for misspelling attacks: it sees text purely as
//! a bag of word counts, so a single character edit moves a word out of the
//! feature set entirely. Training selects the top-K most frequent words as
//! features, estimates per-class word likelihoods with add-one smoothing,
//! and classifies by comparing class log scores.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::textnorm::tokenize;

/// Default feature-set size.
pub const DEFAULT_TOP_K: usize = 2500;

/// A trained two-class multinomial Naive Bayes model.
///
/// The positive class is the lexicographically greater label (so for
/// `spam`/`ham` corpora, `spam` is positive). Features are the `top_k`
/// most frequent training words, ordered by descending frequency and then
/// alphabetically, and that order fixes all iteration so scores are
/// bit-for-bit reproducible.
#[derive(Debug, Clone)]
pub struct NaiveBayesModel {
    positive: String,
    negative: String,
    /// Natural-log class priors, `(positive, negative)`.
    log_prior: (f64, f64),
    features: Vec<String>,
    index: HashMap<String, usize>,
    /// Per-feature natural-log likelihoods, `(positive, negative)`.
    log_like: Vec<(f64, f64)>,
}

impl NaiveBayesModel {
    /// Train on a labeled corpus with at most `top_k` features.
    ///
    /// The corpus must contain exactly two distinct labels and at least one
    /// word token.
    pub fn train(docs: &[Document], top_k: usize) -> Result<NaiveBayesModel> {
        if top_k == 0 {
            return Err(Error::InvalidInput("top_k must be positive".into()));
        }
        let mut labels: Vec<&str> = docs.iter().map(|d| d.label.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        let [negative, positive] = labels[..] else {
            return Err(Error::InvalidInput(format!(
                "training corpus must contain exactly two labels, found {}",
                labels.len()
            )));
        };

        // Word counts per class and overall, for feature selection.
        let mut totals: HashMap<String, u64> = HashMap::new();
        let mut by_class: HashMap<String, (u64, u64)> = HashMap::new();
        let mut doc_counts = (0u64, 0u64);
        for doc in docs {
            let is_positive = doc.label == positive;
            if is_positive {
                doc_counts.0 += 1;
            } else {
                doc_counts.1 += 1;
            }
            for token in tokenize(&doc.text).tokens().filter(|t| t.is_word()) {
                let word = token.lower.clone();
                *totals.entry(word.clone()).or_default() += 1;
                let slot = by_class.entry(word).or_default();
                if is_positive {
                    slot.0 += 1;
                } else {
                    slot.1 += 1;
                }
            }
        }
        if totals.is_empty() {
            return Err(Error::InvalidInput(
                "training corpus contains no word tokens".into(),
            ));
        }

        let mut ranked: Vec<(&String, &u64)> = totals.iter().collect();
        ranked.sort_by(|(wa, fa), (wb, fb)| fb.cmp(fa).then(wa.cmp(wb)));
        let features: Vec<String> = ranked
            .iter()
            .take(top_k)
            .map(|(w, _)| (*w).clone())
            .collect();
        let index: HashMap<String, usize> = features
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();

        // Class totals count feature-word occurrences only, which keeps the
        // smoothed per-class distribution summing to exactly one.
        let k = features.len() as f64;
        let mut class_totals = (0u64, 0u64);
        for word in &features {
            let (p, n) = by_class.get(word).copied().unwrap_or((0, 0));
            class_totals.0 += p;
            class_totals.1 += n;
        }
        let log_like = features
            .iter()
            .map(|word| {
                let (p, n) = by_class.get(word).copied().unwrap_or((0, 0));
                (
                    ((p as f64 + 1.0) / (class_totals.0 as f64 + k)).ln(),
                    ((n as f64 + 1.0) / (class_totals.1 as f64 + k)).ln(),
                )
            })
            .collect();

        let total_docs = (doc_counts.0 + doc_counts.1) as f64;
        Ok(NaiveBayesModel {
            positive: positive.to_string(),
            negative: negative.to_string(),
            log_prior: (
                (doc_counts.0 as f64 / total_docs).ln(),
                (doc_counts.1 as f64 / total_docs).ln(),
            ),
            features,
            index,
            log_like,
        })
    }

    /// The positive (lexicographically greater) label.
    pub fn positive_label(&self) -> &str {
        &self.positive
    }

    /// The negative label; ties predict this class.
    pub fn negative_label(&self) -> &str {
        &self.negative
    }

    /// Feature words in model order.
    pub fn features(&self) -> &[String] {
        &self.features
    }

    /// Natural-log class priors, `(positive, negative)`.
    pub fn log_priors(&self) -> (f64, f64) {
        self.log_prior
    }

    /// Log likelihoods `(positive, negative)` for a feature word.
    pub fn log_likelihood(&self, word: &str) -> Option<(f64, f64)> {
        self.index
            .get(&word.to_lowercase())
            .map(|&i| self.log_like[i])
    }

    /// How strongly a feature word signals the positive class:
    /// `log P(w|positive) - log P(w|negative)`.
    pub fn log_ratio(&self, word: &str) -> Option<f64> {
        self.log_likelihood(word).map(|(p, n)| p - n)
    }

    /// Feature counts for a text, in model feature order.
    ///
    /// Only word tokens count, case-insensitively; words outside the
    /// feature set are invisible to the model.
    pub fn featurize(&self, text: &str) -> Vec<(String, u32)> {
        self.feature_counts(text)
            .into_iter()
            .map(|(i, n)| (self.features[i].clone(), n))
            .collect()
    }

    fn feature_counts(&self, text: &str) -> Vec<(usize, u32)> {
        let mut counts: HashMap<usize, u32> = HashMap::new();
        for token in tokenize(text).tokens().filter(|t| t.is_word()) {
            if let Some(&i) = self.index.get(&token.lower) {
                *counts.entry(i).or_default() += 1;
            }
        }
        let mut counts: Vec<(usize, u32)> = counts.into_iter().collect();
        counts.sort_unstable_by_key(|(i, _)| *i);
        counts
    }

    /// Class log scores `(positive, negative)` for a text.
    pub fn score(&self, text: &str) -> (f64, f64) {
        let mut pos = self.log_prior.0;
        let mut neg = self.log_prior.1;
        for (i, n) in self.feature_counts(text) {
            let (lp, ln_) = self.log_like[i];
            pos += n as f64 * lp;
            neg += n as f64 * ln_;
        }
        (pos, neg)
    }

    /// Positive-minus-negative log score; positive margins predict spam.
    pub fn margin(&self, text: &str) -> f64 {
        let (pos, neg) = self.score(text);
        pos - neg
    }

    /// Predicted label; exact ties go to the negative class.
    pub fn predict(&self, text: &str) -> &str {
        if self.margin(text) > 0.0 {
            &self.positive
        } else {
            &self.negative
        }
    }

    /// Serialize to the line-oriented model format.
    ///
    /// Floats print in Rust's shortest round-trip form, so parsing and
    /// re-serializing reproduces the text byte for byte.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "nbmodel v1 K={}", self.features.len()).unwrap();
        writeln!(out, "class\t{}\t{}", self.positive, self.log_prior.0).unwrap();
        writeln!(out, "class\t{}\t{}", self.negative, self.log_prior.1).unwrap();
        for (word, (lp, ln_)) in self.features.iter().zip(&self.log_like) {
            writeln!(out, "{word}\t{lp}\t{ln_}").unwrap();
        }
        out
    }

    /// Parse the format produced by [`NaiveBayesModel::to_text`].
    pub fn parse(text: &str) -> Result<NaiveBayesModel> {
        Self::parse_named(text, "<model>")
    }

    fn parse_named(text: &str, path: impl AsRef<Path>) -> Result<NaiveBayesModel> {
        let path = path.as_ref();
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(path, 1, "empty model file"))?;
        let k: usize = header
            .strip_prefix("nbmodel v1 K=")
            .and_then(|k| k.parse().ok())
            .ok_or_else(|| Error::parse(path, 1, "expected header `nbmodel v1 K=<count>`"))?;

        let mut class_line = |expected_line: usize| -> Result<(String, f64)> {
            let (idx, line) = lines
                .next()
                .ok_or_else(|| Error::parse(path, expected_line, "missing class line"))?;
            let lineno = idx + 1;
            let mut fields = line.split('\t');
            match (fields.next(), fields.next(), fields.next(), fields.next()) {
                (Some("class"), Some(label), Some(prior), None) => {
                    let prior: f64 = prior.parse().map_err(|_| {
                        Error::parse(path, lineno, format!("bad log prior {prior:?}"))
                    })?;
                    Ok((label.to_string(), prior))
                }
                _ => Err(Error::parse(
                    path,
                    lineno,
                    "expected `class\\t<label>\\t<log prior>`",
                )),
            }
        };
        let (positive, prior_pos) = class_line(2)?;
        let (negative, prior_neg) = class_line(3)?;
        if positive <= negative {
            return Err(Error::parse(
                path,
                2,
                format!("positive label {positive:?} must sort after {negative:?}"),
            ));
        }

        let mut features = Vec::with_capacity(k);
        let mut index = HashMap::with_capacity(k);
        let mut log_like = Vec::with_capacity(k);
        for (idx, line) in lines {
            let lineno = idx + 1;
            let mut fields = line.split('\t');
            match (fields.next(), fields.next(), fields.next(), fields.next()) {
                (Some(word), Some(lp), Some(ln_), None) => {
                    let parse_f = |s: &str| {
                        s.parse::<f64>()
                            .map_err(|_| Error::parse(path, lineno, format!("bad float {s:?}")))
                    };
                    let row = (parse_f(lp)?, parse_f(ln_)?);
                    if index.insert(word.to_string(), features.len()).is_some() {
                        return Err(Error::parse(
                            path,
                            lineno,
                            format!("duplicate word {word:?}"),
                        ));
                    }
                    features.push(word.to_string());
                    log_like.push(row);
                }
                _ => {
                    return Err(Error::parse(
                        path,
                        lineno,
                        "expected `<word>\\t<log p positive>\\t<log p negative>`",
                    ))
                }
            }
        }
        if features.len() != k {
            return Err(Error::parse(
                path,
                1,
                format!("header declares {k} features, file has {}", features.len()),
            ));
        }
        Ok(NaiveBayesModel {
            positive,
            negative,
            log_prior: (prior_pos, prior_neg),
            features,
            index,
            log_like,
        })
    }

    /// Load a serialized model from disk.
    pub fn load(path: impl AsRef<Path>) -> Result<NaiveBayesModel> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_named(&text, path)
    }

    /// Write the serialized model to disk.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Precision, recall, and F1 for one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMetrics {
    pub label: String,
    /// Number of gold instances of this class.
    pub support: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Accuracy plus per-class metrics over a set of predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub total: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// Per-class metrics, sorted by label.
    pub per_class: Vec<ClassMetrics>,
    pub macro_f1: f64,
}

impl ClassificationReport {
    /// Build a report from `(gold, predicted)` label pairs.
    ///
    /// Undefined ratios (no predictions for a class, or no gold instances)
    /// are reported as zero.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut total = 0usize;
        let mut correct = 0usize;
        // label -> (true positives, false positives, false negatives)
        let mut tally: HashMap<&str, (usize, usize, usize)> = HashMap::new();
        for (gold, predicted) in pairs {
            total += 1;
            if gold == predicted {
                correct += 1;
                tally.entry(gold).or_default().0 += 1;
            } else {
                tally.entry(predicted).or_default().1 += 1;
                tally.entry(gold).or_default().2 += 1;
            }
        }
        if total == 0 {
            return Err(Error::InvalidInput("no predictions to evaluate".into()));
        }

        let ratio = |num: usize, den: usize| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let mut per_class: Vec<ClassMetrics> = tally
            .into_iter()
            .map(|(label, (tp, fp, fn_))| {
                let precision = ratio(tp, tp + fp);
                let recall = ratio(tp, tp + fn_);
                let f1 = if precision + recall == 0.0 {
                    0.0
                } else {
                    2.0 * precision * recall / (precision + recall)
                };
                ClassMetrics {
                    label: label.to_string(),
                    support: tp + fn_,
                    precision,
                    recall,
                    f1,
                }
            })
            .collect();
        per_class.sort_by(|a, b| a.label.cmp(&b.label));
        let macro_f1 = per_class.iter().map(|c| c.f1).sum::<f64>() / per_class.len() as f64;
        Ok(ClassificationReport {
            total,
            correct,
            accuracy: correct as f64 / total as f64,
            per_class,
            macro_f1,
        })
    }

    /// Metrics for one class, if present.
    pub fn class(&self, label: &str) -> Option<&ClassMetrics> {
        self.per_class.iter().find(|c| c.label == label)
    }
}

/// Predict every document and report accuracy and per-class metrics.
pub fn evaluate(model: &NaiveBayesModel, docs: &[Document]) -> Result<ClassificationReport> {
    ClassificationReport::from_pairs(
        docs.iter()
            .map(|doc| (doc.label.as_str(), model.predict(&doc.text))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Four tiny documents with hand-checkable counts.
    fn toy_docs() -> Vec<Document> {
        [
            ("spam", "free money money"),
            ("spam", "money offer"),
            ("ham", "meeting notes"),
            ("ham", "notes review"),
        ]
        .iter()
        .enumerate()
        .map(|(i, (label, text))| Document::new(i.to_string(), *label, *text))
        .collect()
    }

    #[test]
    fn training_matches_hand_computation() {
        // Six distinct words; spam has 5 word tokens, ham has 4. With
        // add-one smoothing: P(money|spam) = (3+1)/(5+6), P(money|ham) =
        // (0+1)/(4+6).
        let model = NaiveBayesModel::train(&toy_docs(), 100).unwrap();
        assert_eq!(model.positive_label(), "spam");
        assert_eq!(model.negative_label(), "ham");
        let (lp, ln_) = model.log_likelihood("money").unwrap();
        assert!((lp - (4.0f64 / 11.0).ln()).abs() < 1e-12);
        assert!((ln_ - (1.0f64 / 10.0).ln()).abs() < 1e-12);
        let (pp, pn) = model.log_priors();
        assert!((pp - 0.5f64.ln()).abs() < 1e-12);
        assert!((pn - 0.5f64.ln()).abs() < 1e-12);
        assert_eq!(model.predict("money money"), "spam");
        assert_eq!(model.predict("notes"), "ham");
    }

    #[test]
    fn features_rank_by_frequency_then_word() {
        let model = NaiveBayesModel::train(&toy_docs(), 4).unwrap();
        assert_eq!(model.features(), ["money", "notes", "free", "meeting"]);
    }

    #[test]
    fn class_distributions_sum_to_one() {
        let model = NaiveBayesModel::train(&toy_docs(), 100).unwrap();
        let mut sums = (0.0, 0.0);
        for word in model.features() {
            let (lp, ln_) = model.log_likelihood(word).unwrap();
            sums.0 += lp.exp();
            sums.1 += ln_.exp();
        }
        assert!((sums.0 - 1.0).abs() < 1e-9, "positive sums to {}", sums.0);
        assert!((sums.1 - 1.0).abs() < 1e-9, "negative sums to {}", sums.1);
    }

    #[test]
    fn unknown_words_tie_and_ties_go_negative() {
        let model = NaiveBayesModel::train(&toy_docs(), 100).unwrap();
        assert_eq!(
            model.margin("xyzzy plugh"),
            0.0,
            "unknown words are invisible"
        );
        assert_eq!(model.predict("xyzzy plugh"), "ham");
    }

    #[test]
    fn featurize_counts_word_tokens_case_insensitively() {
        let model = NaiveBayesModel::train(&toy_docs(), 100).unwrap();
        let counts = model.featurize("Money talks; money 42 walks, OFFER!");
        assert_eq!(
            counts,
            vec![("money".to_string(), 2), ("offer".to_string(), 1)]
        );
    }

    #[test]
    fn training_requires_two_labels_and_some_words() {
        let one_label = vec![Document::new("0", "spam", "free money")];
        assert!(NaiveBayesModel::train(&one_label, 10).is_err());
        let empty_text = vec![
            Document::new("0", "spam", "!!!"),
            Document::new("1", "ham", "..."),
        ];
        assert!(NaiveBayesModel::train(&empty_text, 10).is_err());
        assert!(NaiveBayesModel::train(&toy_docs(), 0).is_err());
    }

    #[test]
    fn serialization_round_trips_byte_exactly() {
        let model = NaiveBayesModel::train(&toy_docs(), 100).unwrap();
        let text = model.to_text();
        assert!(text.starts_with("nbmodel v1 K=6\nclass\tspam\t"));
        let reparsed = NaiveBayesModel::parse(&text).unwrap();
        assert_eq!(reparsed.to_text(), text);
        assert_eq!(reparsed.predict("money money"), "spam");
        let (lp, _) = reparsed.log_likelihood("money").unwrap();
        assert_eq!(lp.to_bits(), (4.0f64 / 11.0).ln().to_bits());
    }

    #[test]
    fn parse_rejects_malformed_models() {
        for (text, what) in [
            ("", "empty"),
            ("nbmodel v2 K=0\n", "unknown version"),
            ("nbmodel v1 K=1\nclass\tspam\t-0.5\n", "missing class line"),
            (
                "nbmodel v1 K=0\nclass\tham\t-0.5\nclass\tspam\t-0.7\n",
                "positive class listed second",
            ),
            (
                "nbmodel v1 K=2\nclass\tspam\t-0.5\nclass\tham\t-0.7\nmoney\t-1\t-2\n",
                "row count mismatch",
            ),
            (
                "nbmodel v1 K=1\nclass\tspam\t-0.5\nclass\tham\t-0.7\nmoney\t-1\n",
                "row arity",
            ),
            (
                "nbmodel v1 K=2\nclass\tspam\t-0.5\nclass\tham\t-0.7\nmoney\t-1\t-2\nmoney\t-1\t-2\n",
                "duplicate word",
            ),
        ] {
            assert!(NaiveBayesModel::parse(text).is_err(), "{what} should fail");
        }
    }

    #[test]
    fn save_and_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.tsv");
        let model = NaiveBayesModel::train(&toy_docs(), 100).unwrap();
        model.save(&path).unwrap();
        let loaded = NaiveBayesModel::load(&path).unwrap();
        assert_eq!(loaded.to_text(), model.to_text());
    }

    #[test]
    fn report_matches_hand_confusion_matrix() {
        // 10 spam: 5 right, 5 predicted ham. 10 ham: all right.
        let mut pairs = Vec::new();
        pairs.extend(std::iter::repeat_n(("spam", "spam"), 5));
        pairs.extend(std::iter::repeat_n(("spam", "ham"), 5));
        pairs.extend(std::iter::repeat_n(("ham", "ham"), 10));
        let report = ClassificationReport::from_pairs(pairs).unwrap();
        assert_eq!(report.total, 20);
        assert!((report.accuracy - 0.75).abs() < 1e-12);
        let spam = report.class("spam").unwrap();
        assert_eq!(spam.support, 10);
        assert!((spam.precision - 1.0).abs() < 1e-12);
        assert!((spam.recall - 0.5).abs() < 1e-12);
        assert!((spam.f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn report_handles_many_classes_and_degenerate_ratios() {
        let pairs = vec![("a", "a"), ("a", "b"), ("b", "b"), ("c", "b")];
        let report = ClassificationReport::from_pairs(pairs).unwrap();
        assert_eq!(report.per_class.len(), 3);
        let c = report.class("c").unwrap();
        assert_eq!((c.precision, c.recall, c.f1), (0.0, 0.0, 0.0));
        let expected_macro = (2.0 / 3.0 + 0.5 + 0.0) / 3.0;
        assert!((report.macro_f1 - expected_macro).abs() < 1e-12);
        assert!(ClassificationReport::from_pairs(Vec::new()).is_err());
    }

    #[test]
    fn evaluate_reports_model_accuracy() {
        let model = NaiveBayesModel::train(&toy_docs(), 100).unwrap();
        let report = evaluate(&model, &toy_docs()).unwrap();
        assert_eq!(report.total, 4);
        assert_eq!(report.correct, 4, "toy corpus is separable");
        assert_eq!(report.accuracy, 1.0);
    }

    /// Random small corpora over a closed word set.
    fn corpus_strategy() -> impl Strategy<Value = Vec<Document>> {
        let word = prop::sample::select(vec!["alpha", "bravo", "carol", "delta", "echo"]);
        let text = prop::collection::vec(word, 1..8).prop_map(|ws| ws.join(" "));
        let doc = (prop::bool::ANY, text);
        prop::collection::vec(doc, 2..12).prop_map(|rows| {
            rows.into_iter()
                .enumerate()
                .map(|(i, (is_spam, text))| {
                    Document::new(i.to_string(), if is_spam { "spam" } else { "ham" }, text)
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn margin_is_order_invariant(docs in corpus_strategy(), perm in prop::collection::vec(0usize..100, 8)) {
            let labels: std::collections::HashSet<_> = docs.iter().map(|d| d.label.clone()).collect();
            prop_assume!(labels.len() == 2);
            let model = NaiveBayesModel::train(&docs, 50).unwrap();
            let words: Vec<&str> = docs[0].text.split(' ').collect();
            let mut shuffled = words.clone();
            // Deterministic pseudo-shuffle driven by the generated indices.
            for (i, p) in perm.iter().enumerate() {
                let len = shuffled.len();
                shuffled.swap(i % len, p % len);
            }
            let base = model.margin(&words.join(" "));
            let moved = model.margin(&shuffled.join(" "));
            prop_assert_eq!(base.to_bits(), moved.to_bits(), "bag of words must ignore order");
        }

        #[test]
        fn dropping_a_spammy_word_never_raises_the_margin(docs in corpus_strategy()) {
            let labels: std::collections::HashSet<_> = docs.iter().map(|d| d.label.clone()).collect();
            prop_assume!(labels.len() == 2);
            let model = NaiveBayesModel::train(&docs, 50).unwrap();
            let words: Vec<&str> = docs[0].text.split(' ').collect();
            let spammy = words
                .iter()
                .position(|w| model.log_ratio(w).is_some_and(|r| r > 0.0));
            prop_assume!(spammy.is_some());
            let base = model.margin(&words.join(" "));
            let mut fewer = words.clone();
            fewer.remove(spammy.unwrap());
            let dropped = model.margin(&fewer.join(" "));
            prop_assert!(dropped <= base + 1e-9);
        }
    }
}
