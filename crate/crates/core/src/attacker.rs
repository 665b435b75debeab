//! Adversarial misspelling generation and corpus-level attacks.
//!
//! The attacker picks the words a classifier leans on most, then perturbs
//! them with character-level edits — insert, swap adjacent, replace, or
//! delete — until the result is out of vocabulary. A bag-of-words model no
//! longer sees the word at all; a human reader barely notices. Every
//! substitution is logged so the attack can be undone byte for byte, which
//! is what makes controlled correction experiments possible.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::Document;
use crate::editdist::dl_distance;
use crate::error::{Error, Result};
use crate::lexicon::{is_sensitive_eligible, FunctionWordList, Vocabulary};
use crate::spam_nb::NaiveBayesModel;
use crate::textnorm::{is_single_word_token, tokenize};

/// Default number of edits per misspelling.
pub const DEFAULT_MAX_EDITS: usize = 1;

/// Words shorter than this are never perturbed.
pub const MIN_TARGET_CHARS: usize = 3;

/// Resampling budget per target word.
const MAX_ATTEMPTS: usize = 50;

const LETTERS: [char; 26] = [
    'a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'i', 'j', 'k', 'l', 'm', 'n', 'o', 'p', 'q', 'r', 's',
    't', 'u', 'v', 'w', 'x', 'y', 'z',
];
/// Obfuscation characters ("stu*pid", "idio.t"). The sampler only places
/// them strictly inside a word so the result still tokenizes as one token.
const SIGILS: [char; 2] = ['.', '*'];

fn is_edit_char(c: char) -> bool {
    c.is_ascii_lowercase() || SIGILS.contains(&c)
}

/// The four kinds of character edit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PerturbKind {
    Insertion,
    Permutation,
    Replacement,
    Removal,
}

impl PerturbKind {
    pub const ALL: [PerturbKind; 4] = [
        PerturbKind::Insertion,
        PerturbKind::Permutation,
        PerturbKind::Replacement,
        PerturbKind::Removal,
    ];

    /// Canonical lowercase name.
    pub fn name(self) -> &'static str {
        match self {
            PerturbKind::Insertion => "insertion",
            PerturbKind::Permutation => "permutation",
            PerturbKind::Replacement => "replacement",
            PerturbKind::Removal => "removal",
        }
    }

    /// Parse a comma-separated list of kind names.
    pub fn parse_list(s: &str) -> Result<Vec<PerturbKind>> {
        s.split(',')
            .map(str::trim)
            .filter(|part| !part.is_empty())
            .map(|part| {
                PerturbKind::ALL
                    .into_iter()
                    .find(|kind| kind.name() == part)
                    .ok_or_else(|| Error::InvalidInput(format!("unknown edit op {part:?}")))
            })
            .collect()
    }
}

/// One fully specified character edit.
///
/// Positions are character indices. Insertion may use any position up to
/// the word length; permutation swaps `position` with `position + 1`;
/// replacement and removal address an existing character. Insertion and
/// replacement characters must be lowercase ASCII letters or one of the
/// obfuscation characters `.` and `*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbOp {
    Insertion { position: usize, ch: char },
    Permutation { position: usize },
    Replacement { position: usize, ch: char },
    Removal { position: usize },
}

impl PerturbOp {
    pub fn kind(&self) -> PerturbKind {
        match self {
            PerturbOp::Insertion { .. } => PerturbKind::Insertion,
            PerturbOp::Permutation { .. } => PerturbKind::Permutation,
            PerturbOp::Replacement { .. } => PerturbKind::Replacement,
            PerturbOp::Removal { .. } => PerturbKind::Removal,
        }
    }
}

/// Apply exactly one edit to `word`.
///
/// The word must be at least [`MIN_TARGET_CHARS`] characters long and the
/// op must address a position inside it; violations are contract errors.
pub fn perturb(word: &str, op: &PerturbOp) -> Result<String> {
    let mut chars: Vec<char> = word.chars().collect();
    let len = chars.len();
    if len < MIN_TARGET_CHARS {
        return Err(Error::Contract(format!(
            "word {word:?} is too short to perturb (need {MIN_TARGET_CHARS} characters)"
        )));
    }
    let out_of_range = |position: usize, max: usize| {
        Error::Contract(format!(
            "position {position} out of range for {word:?} (max {max})"
        ))
    };
    let bad_char =
        |ch: char| Error::Contract(format!("{ch:?} is not a lowercase letter, '.' or '*'"));
    match *op {
        PerturbOp::Insertion { position, ch } => {
            if position > len {
                return Err(out_of_range(position, len));
            }
            if !is_edit_char(ch) {
                return Err(bad_char(ch));
            }
            chars.insert(position, ch);
        }
        PerturbOp::Permutation { position } => {
            if position + 1 >= len {
                return Err(out_of_range(position, len - 2));
            }
            chars.swap(position, position + 1);
        }
        PerturbOp::Replacement { position, ch } => {
            if position >= len {
                return Err(out_of_range(position, len - 1));
            }
            if !is_edit_char(ch) {
                return Err(bad_char(ch));
            }
            chars[position] = ch;
        }
        PerturbOp::Removal { position } => {
            if position >= len {
                return Err(out_of_range(position, len - 1));
            }
            chars.remove(position);
        }
    }
    Ok(chars.into_iter().collect())
}

/// Draw an edit character. Sigils are offered only for interior positions,
/// and `exclude` (the character being replaced) is never drawn, so a
/// replacement always changes the word.
fn random_char(rng: &mut impl Rng, interior: bool, exclude: Option<char>) -> char {
    let mut allowed: Vec<char> = LETTERS.to_vec();
    if interior {
        allowed.extend(SIGILS);
    }
    if let Some(ex) = exclude {
        allowed.retain(|c| *c != ex);
    }
    allowed[rng.gen_range(0..allowed.len())]
}

/// Sample a concrete op of the given kind for a word of `len` characters.
fn sample_op(kind: PerturbKind, chars: &[char], rng: &mut impl Rng) -> PerturbOp {
    let len = chars.len();
    match kind {
        PerturbKind::Insertion => {
            let position = rng.gen_range(0..=len);
            let interior = position >= 1 && position < len;
            PerturbOp::Insertion {
                position,
                ch: random_char(rng, interior, None),
            }
        }
        PerturbKind::Permutation => PerturbOp::Permutation {
            position: rng.gen_range(0..len - 1),
        },
        PerturbKind::Replacement => {
            let position = rng.gen_range(0..len);
            let interior = position >= 1 && position + 1 < len;
            PerturbOp::Replacement {
                position,
                ch: random_char(rng, interior, Some(chars[position])),
            }
        }
        PerturbKind::Removal => PerturbOp::Removal {
            position: rng.gen_range(0..len),
        },
    }
}

/// How misspellings are generated.
#[derive(Debug, Clone)]
pub struct AttackSpec {
    /// Edit budget per misspelling (1 or 2).
    pub max_edits: usize,
    /// Edit kinds to sample from.
    pub ops_allowed: Vec<PerturbKind>,
    /// Base seed; each document derives its own stream from it.
    pub rng_seed: u64,
    /// Reject misspellings that are still vocabulary words.
    pub require_oov: bool,
}

impl Default for AttackSpec {
    fn default() -> AttackSpec {
        AttackSpec {
            max_edits: DEFAULT_MAX_EDITS,
            ops_allowed: PerturbKind::ALL.to_vec(),
            rng_seed: 0,
            require_oov: true,
        }
    }
}

impl AttackSpec {
    fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.max_edits) {
            return Err(Error::InvalidInput(format!(
                "max_edits must be 1 or 2, got {}",
                self.max_edits
            )));
        }
        if self.ops_allowed.is_empty() {
            return Err(Error::InvalidInput("no edit operations enabled".into()));
        }
        Ok(())
    }
}

/// Generate a misspelling of `word` (given in lowercase), or `None` when no
/// acceptable one is found within the attempt budget.
///
/// Each attempt applies between 1 and `spec.max_edits` sampled edits. The
/// result is kept only if it differs from the original, stays within
/// `spec.max_edits` edit distance, still tokenizes as a single word token,
/// and (when `spec.require_oov`) is invalid under `vocab`.
pub fn generate_misspelling(
    word: &str,
    spec: &AttackSpec,
    vocab: &Vocabulary,
    rng: &mut ChaCha8Rng,
) -> Option<String> {
    if word.chars().count() < MIN_TARGET_CHARS {
        return None;
    }
    'attempts: for _ in 0..MAX_ATTEMPTS {
        let edits = rng.gen_range(1..=spec.max_edits);
        let mut current: Vec<char> = word.chars().collect();
        for _ in 0..edits {
            if current.len() < MIN_TARGET_CHARS {
                continue 'attempts;
            }
            let kind = spec.ops_allowed[rng.gen_range(0..spec.ops_allowed.len())];
            let op = sample_op(kind, &current, rng);
            let interim: String = current.iter().collect();
            match perturb(&interim, &op) {
                Ok(next) => current = next.chars().collect(),
                Err(_) => continue 'attempts,
            }
        }
        let result: String = current.iter().collect();
        if result != word
            && dl_distance(word, &result) <= spec.max_edits
            && is_single_word_token(&result)
            && (!spec.require_oov || !vocab.is_valid(&result))
        {
            return Some(result);
        }
    }
    None
}

/// Feature words ranked by how strongly they signal the positive class:
/// `log P(w|positive) - log P(w|negative)`, descending, alphabetical on
/// ties. Returns at most `top_n` words.
pub fn rank_sensitive_words_nb(model: &NaiveBayesModel, top_n: usize) -> Vec<String> {
    let mut ranked: Vec<(&String, f64)> = model
        .features()
        .iter()
        .filter_map(|w| model.log_ratio(w).map(|r| (w, r)))
        .collect();
    ranked.sort_by(|(wa, ra), (wb, rb)| rb.total_cmp(ra).then(wa.cmp(wb)));
    ranked
        .into_iter()
        .take(top_n)
        .map(|(w, _)| w.clone())
        .collect()
}

/// Scores a bag of words; higher means more sensitive content.
pub trait KeywordScorer {
    fn score(&self, words: &[&str]) -> f64;
}

/// A [`KeywordScorer`] that sums per-word weights from a lexicon.
#[derive(Debug, Clone, Default)]
pub struct WeightedLexiconScorer {
    weights: HashMap<String, f64>,
}

impl WeightedLexiconScorer {
    /// Build from `(word, weight)` pairs; words are lowercased and repeated
    /// words keep the last weight.
    pub fn from_entries<I, S>(entries: I) -> WeightedLexiconScorer
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        WeightedLexiconScorer {
            weights: entries
                .into_iter()
                .map(|(w, x)| (w.as_ref().to_lowercase(), x))
                .collect(),
        }
    }

    /// Load a `word<TAB>weight` file.
    pub fn load(path: impl AsRef<Path>) -> Result<WeightedLexiconScorer> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut weights = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let (word, weight) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(path, lineno, "expected `word<TAB>weight`"))?;
            let weight: f64 = weight
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("bad weight {weight:?}")))?;
            weights.insert(word.to_lowercase(), weight);
        }
        if weights.is_empty() {
            return Err(Error::InvalidInput(format!(
                "scorer lexicon {} is empty",
                path.display()
            )));
        }
        Ok(WeightedLexiconScorer { weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

impl KeywordScorer for WeightedLexiconScorer {
    fn score(&self, words: &[&str]) -> f64 {
        words
            .iter()
            .filter_map(|w| self.weights.get(&w.to_lowercase()))
            .sum()
    }
}

/// Pick the word in a sentence whose removal drops the score the most.
///
/// `eligible` masks which positions may be attacked. Returns the index of
/// the chosen word; ties keep the earliest position. `None` when nothing
/// is eligible.
pub fn rank_sensitive_word_scorer(
    scorer: &dyn KeywordScorer,
    words: &[&str],
    eligible: &[bool],
) -> Option<usize> {
    debug_assert_eq!(words.len(), eligible.len());
    let base = scorer.score(words);
    let mut best: Option<(usize, f64)> = None;
    for (i, ok) in eligible.iter().enumerate() {
        if !ok {
            continue;
        }
        let mut without: Vec<&str> = words.to_vec();
        without.remove(i);
        let drop = base - scorer.score(&without);
        if best.is_none_or(|(_, d)| drop > d) {
            best = Some((i, drop));
        }
    }
    best.map(|(i, _)| i)
}

/// How attack targets are chosen.
pub enum TargetStrategy<'a> {
    /// Attack every occurrence of the model's `top_n` most spam-indicative
    /// feature words.
    NbTargets {
        model: &'a NaiveBayesModel,
        top_n: usize,
    },
    /// Attack one word per sentence: the eligible word whose removal drops
    /// the scorer output the most.
    Scorer {
        scorer: &'a dyn KeywordScorer,
        function_words: &'a FunctionWordList,
        min_count: u64,
    },
}

/// One logged substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackRecord {
    pub doc_id: String,
    /// Flat token index within the document (counting across sentences).
    pub token_index: usize,
    /// Surface before the attack.
    pub original: String,
    /// Surface actually placed in the document.
    pub misspelled: String,
}

/// The successful substitutions of an attack, in document order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AttackLog {
    pub records: Vec<AttackRecord>,
}

const LOG_HEADER: &str = "doc_id\ttoken_index\toriginal\tmisspelled";

impl AttackLog {
    /// Serialize as TSV with a header row.
    pub fn to_tsv(&self) -> Result<String> {
        let mut out = String::new();
        writeln!(out, "{LOG_HEADER}").unwrap();
        for r in &self.records {
            for field in [&r.doc_id, &r.original, &r.misspelled] {
                if field.contains(['\t', '\n']) {
                    return Err(Error::InvalidInput(format!(
                        "log field {field:?} contains a tab or newline"
                    )));
                }
            }
            writeln!(
                out,
                "{}\t{}\t{}\t{}",
                r.doc_id, r.token_index, r.original, r.misspelled
            )
            .unwrap();
        }
        Ok(out)
    }

    /// Parse the TSV format produced by [`AttackLog::to_tsv`].
    pub fn parse(text: &str) -> Result<AttackLog> {
        Self::parse_named(text, "<attack log>")
    }

    fn parse_named(text: &str, path: impl AsRef<Path>) -> Result<AttackLog> {
        let path = path.as_ref();
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header == LOG_HEADER => {}
            _ => {
                return Err(Error::parse(
                    path,
                    1,
                    format!("expected header {LOG_HEADER:?}"),
                ))
            }
        }
        let mut records = Vec::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let fields: Vec<&str> = line.split('\t').collect();
            let [doc_id, token_index, original, misspelled] = fields[..] else {
                return Err(Error::parse(
                    path,
                    lineno,
                    "expected 4 tab-separated fields",
                ));
            };
            let token_index: usize = token_index.parse().map_err(|_| {
                Error::parse(path, lineno, format!("bad token index {token_index:?}"))
            })?;
            records.push(AttackRecord {
                doc_id: doc_id.to_string(),
                token_index,
                original: original.to_string(),
                misspelled: misspelled.to_string(),
            });
        }
        Ok(AttackLog { records })
    }

    /// Load a TSV attack log.
    pub fn load(path: impl AsRef<Path>) -> Result<AttackLog> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_named(&text, path)
    }

    /// Write the TSV attack log.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()?).map_err(|e| Error::io(path, e))
    }
}

/// An attacked corpus plus the log needed to undo it.
#[derive(Debug, Clone)]
pub struct AttackOutcome {
    pub documents: Vec<Document>,
    pub log: AttackLog,
    /// Targets for which no acceptable misspelling was found; those words
    /// stay unperturbed and are not logged.
    pub failed_targets: usize,
}

/// Attack a corpus.
///
/// Documents are processed independently on per-document random streams
/// derived from `spec.rng_seed`, so results do not depend on corpus order
/// and identical seeds reproduce identical attacks.
pub fn attack_corpus(
    docs: &[Document],
    vocab: &Vocabulary,
    spec: &AttackSpec,
    strategy: &TargetStrategy,
) -> Result<AttackOutcome> {
    spec.validate()?;
    let nb_targets: Option<HashSet<String>> = match strategy {
        TargetStrategy::NbTargets { model, top_n } => {
            Some(rank_sensitive_words_nb(model, *top_n).into_iter().collect())
        }
        TargetStrategy::Scorer { .. } => None,
    };

    let mut documents = Vec::with_capacity(docs.len());
    let mut log = AttackLog::default();
    let mut failed_targets = 0usize;
    for (doc_index, doc) in docs.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
        rng.set_stream(doc_index as u64);

        let mut tokenized = tokenize(&doc.text);
        let target_indices: Vec<usize> = match strategy {
            TargetStrategy::NbTargets { .. } => {
                let targets = nb_targets.as_ref().expect("set above");
                tokenized
                    .tokens()
                    .enumerate()
                    .filter(|(_, t)| {
                        t.is_word()
                            && t.lower.chars().count() >= MIN_TARGET_CHARS
                            && targets.contains(&t.lower)
                    })
                    .map(|(i, _)| i)
                    .collect()
            }
            TargetStrategy::Scorer {
                scorer,
                function_words,
                min_count,
            } => {
                let mut chosen = Vec::new();
                let mut base = 0usize;
                for sentence in &tokenized.sentences {
                    let word_slots: Vec<(usize, &str)> = sentence
                        .iter()
                        .enumerate()
                        .filter(|(_, t)| t.is_word())
                        .map(|(i, t)| (base + i, t.lower.as_str()))
                        .collect();
                    let words: Vec<&str> = word_slots.iter().map(|(_, w)| *w).collect();
                    let eligible: Vec<bool> = words
                        .iter()
                        .map(|w| is_sensitive_eligible(vocab, function_words, w, *min_count))
                        .collect();
                    if let Some(i) = rank_sensitive_word_scorer(*scorer, &words, &eligible) {
                        chosen.push(word_slots[i].0);
                    }
                    base += sentence.len();
                }
                chosen
            }
        };

        for idx in target_indices {
            let token = tokenized.token(idx).expect("index from enumeration");
            let original = token.surface.clone();
            match generate_misspelling(&token.lower, spec, vocab, &mut rng) {
                Some(miss) => {
                    tokenized.replace_token(idx, &miss);
                    let placed = tokenized.token(idx).expect("index in range");
                    log.records.push(AttackRecord {
                        doc_id: doc.id.clone(),
                        token_index: idx,
                        original,
                        misspelled: placed.surface.clone(),
                    });
                }
                None => failed_targets += 1,
            }
        }
        documents.push(Document::new(
            doc.id.clone(),
            doc.label.clone(),
            tokenized.detokenize(),
        ));
    }
    Ok(AttackOutcome {
        documents,
        log,
        failed_targets,
    })
}

/// Undo an attack using its log, byte for byte.
///
/// Fails with a contract error when the log names a document or token that
/// does not line up with the corpus.
pub fn invert_attack(docs: &[Document], log: &AttackLog) -> Result<Vec<Document>> {
    let mut by_doc: HashMap<&str, Vec<&AttackRecord>> = HashMap::new();
    for record in &log.records {
        by_doc.entry(&record.doc_id).or_default().push(record);
    }
    let known: HashSet<&str> = docs.iter().map(|d| d.id.as_str()).collect();
    if let Some(unknown) = by_doc.keys().find(|id| !known.contains(**id)) {
        return Err(Error::Contract(format!(
            "attack log names unknown document {unknown:?}"
        )));
    }

    let mut restored = Vec::with_capacity(docs.len());
    for doc in docs {
        let mut tokenized = tokenize(&doc.text);
        for record in by_doc.get(doc.id.as_str()).map_or(&[][..], Vec::as_slice) {
            let token = tokenized.token(record.token_index).ok_or_else(|| {
                Error::Contract(format!(
                    "document {:?} has no token {}",
                    doc.id, record.token_index
                ))
            })?;
            if token.surface != record.misspelled {
                return Err(Error::Contract(format!(
                    "document {:?} token {} is {:?}, log says {:?}",
                    doc.id, record.token_index, token.surface, record.misspelled
                )));
            }
            tokenized.replace_token(record.token_index, &record.original);
        }
        restored.push(Document::new(
            doc.id.clone(),
            doc.label.clone(),
            tokenized.detokenize(),
        ));
    }
    Ok(restored)
}
