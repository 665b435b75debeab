//! Vocabulary of known words plus the function-word list used to decide
//! which words an attack may target.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::textnorm;

/// Frequency floor used for attack-target eligibility when the caller has
/// no better idea (rare words make poor attack targets).
pub const DEFAULT_SENSITIVE_MIN_COUNT: u64 = 100;

/// Case-insensitive word list with frequencies.
///
/// All stored words are lowercase; every entry's frequency is at least the
/// `min_frequency` the vocabulary was built with.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    entries: HashMap<String, u64>,
    min_frequency: u64,
}

impl Vocabulary {
    /// Build from `(word, frequency)` pairs, lowercasing words, merging
    /// duplicates by summing and then dropping words below `min_frequency`.
    pub fn from_entries<I, S>(entries: I, min_frequency: u64) -> Vocabulary
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut merged: HashMap<String, u64> = HashMap::new();
        for (word, count) in entries {
            *merged.entry(word.as_ref().to_lowercase()).or_insert(0) += count;
        }
        merged.retain(|_, count| *count >= min_frequency);
        Vocabulary {
            entries: merged,
            min_frequency,
        }
    }

    /// Load a `word<TAB>count` file, merging duplicate words by summing
    /// before the `min_frequency` filter is applied.
    pub fn load(path: impl AsRef<Path>, min_frequency: u64) -> Result<Vocabulary> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Vocabulary::parse_named(&text, min_frequency, path)
    }

    /// Parse the same `word<TAB>count` format from memory (fixtures, tests).
    pub fn parse(text: &str, min_frequency: u64) -> Result<Vocabulary> {
        Vocabulary::parse_named(text, min_frequency, "<vocabulary>")
    }

    fn parse_named(text: &str, min_frequency: u64, path: impl AsRef<Path>) -> Result<Vocabulary> {
        let path = path.as_ref();
        let mut pairs = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let (word, count) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(path, lineno, "expected word<TAB>count"))?;
            if word.is_empty() || word.chars().any(char::is_whitespace) {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("bad word field {word:?}"),
                ));
            }
            let count: u64 = count
                .trim_end()
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("bad count field {count:?}")))?;
            pairs.push((word.to_string(), count));
        }
        Ok(Vocabulary::from_entries(pairs, min_frequency))
    }

    /// Serialize as `word<TAB>count` lines, sorted lexicographically.
    pub fn to_tsv(&self) -> String {
        let mut words: Vec<&str> = self.entries.keys().map(String::as_str).collect();
        words.sort_unstable();
        let mut out = String::new();
        for word in words {
            out.push_str(word);
            out.push('\t');
            out.push_str(&self.entries[word].to_string());
            out.push('\n');
        }
        out
    }

    /// Write the sorted `word<TAB>count` form to `path`.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }

    /// Extend with every corpus token (word tokens only, lowercased) whose
    /// corpus frequency reaches `min_frequency`. Words already present keep
    /// the larger of their existing and corpus frequencies.
    pub fn augment_from_corpus(&self, corpus: &[Document], min_frequency: u64) -> Vocabulary {
        let mut counts: HashMap<String, u64> = HashMap::new();
        for doc in corpus {
            for token in textnorm::tokenize(&doc.text).tokens() {
                if token.is_word() {
                    *counts.entry(token.lower.clone()).or_insert(0) += 1;
                }
            }
        }
        let mut entries = self.entries.clone();
        for (word, count) in counts {
            if count >= min_frequency {
                let slot = entries.entry(word).or_insert(0);
                *slot = (*slot).max(count);
            }
        }
        Vocabulary {
            entries,
            min_frequency: self.min_frequency.min(min_frequency),
        }
    }

    /// Case-insensitive membership test.
    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(&word.to_lowercase())
    }

    /// Frequency of `word` (case-insensitive), 0 when absent.
    pub fn frequency(&self, word: &str) -> u64 {
        self.entries.get(&word.to_lowercase()).copied().unwrap_or(0)
    }

    /// Iterate `(word, frequency)` pairs in arbitrary order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|(w, c)| (w.as_str(), *c))
    }

    /// Number of distinct words.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// True when the vocabulary holds no words.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The frequency floor this vocabulary guarantees.
    pub fn min_frequency(&self) -> u64 {
        self.min_frequency
    }

    /// Whether `token` should be left alone by the corrector.
    ///
    /// True for vocabulary members (case-insensitive), placeholders, and
    /// tokens without a single alphabetic character (numbers, punctuation).
    pub fn is_valid(&self, token: &str) -> bool {
        if textnorm::is_placeholder(token) || !token.chars().any(char::is_alphabetic) {
            return true;
        }
        self.contains(token)
    }
}

/// Lowercased set of function words (articles, pronouns, auxiliaries, ...).
///
/// Perturbing these never changes the substance of a text, so attack-target
/// selection skips them.
#[derive(Debug, Clone)]
pub struct FunctionWordList {
    words: HashSet<String>,
}

static BUNDLED_FUNCTION_WORDS: &str = include_str!("../data/function_words.txt");

impl FunctionWordList {
    /// The list shipped with the crate.
    pub fn bundled() -> FunctionWordList {
        FunctionWordList::from_words(BUNDLED_FUNCTION_WORDS.lines())
    }

    /// Build from any word iterator; entries are lowercased.
    pub fn from_words<I, S>(words: I) -> FunctionWordList
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        FunctionWordList {
            words: words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        }
    }

    /// Load a one-word-per-line file.
    pub fn from_path(path: impl AsRef<Path>) -> Result<FunctionWordList> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let list = FunctionWordList::from_words(text.lines());
        if list.is_empty() {
            return Err(Error::InvalidInput(format!(
                "function word list {} is empty",
                path.display()
            )));
        }
        Ok(list)
    }

    /// Case-insensitive membership test.
    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(&word.to_lowercase())
    }

    /// Number of entries.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    /// True when the list is empty.
    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Whether `word` is a worthwhile attack target: longer than two characters,
/// frequent enough to carry signal, and not a function word.
pub fn is_sensitive_eligible(
    vocab: &Vocabulary,
    fwl: &FunctionWordList,
    word: &str,
    min_count: u64,
) -> bool {
    word.chars().count() > 2 && vocab.frequency(word) >= min_count && !fwl.contains(word)
}
