//! Restricted Damerau-Levenshtein distance and candidate enumeration.
//!
//! The distance counts insertions, deletions, substitutions and adjacent
//! transpositions, with the restriction that no substring is edited twice
//! (optimal string alignment). Candidates for a misspelling are the
//! vocabulary words at the smallest nonzero distance, searched radius by
//! radius. A deletion-neighborhood index answers the same query in
//! sublinear expected time for small radii.

use std::collections::{HashMap, HashSet};

use crate::lexicon::Vocabulary;

/// Default search radius for candidate enumeration.
pub const DEFAULT_MAX_RADIUS: usize = 2;

/// Restricted Damerau-Levenshtein distance over Unicode scalar values.
///
/// Distinguishes itself from unrestricted Damerau-Levenshtein on inputs
/// like `("ca", "abc")`, which cost 3 here because the transposed pair
/// cannot be edited again.
pub fn dl_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }

    let width = b.len() + 1;
    let mut prev2 = vec![0usize; width];
    let mut prev: Vec<usize> = (0..width).collect();
    let mut cur = vec![0usize; width];

    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut best = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                best = best.min(prev2[j - 2] + 1);
            }
            cur[j] = best;
        }
        std::mem::swap(&mut prev2, &mut prev);
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// The vocabulary words closest to a misspelled token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    /// The misspelled token the set was built for.
    pub source: String,
    /// Common distance of every candidate (at least 1: the source itself
    /// is never a candidate).
    pub distance: usize,
    /// `(word, vocabulary frequency)` pairs, sorted by word.
    pub candidates: Vec<(String, u64)>,
}

/// Collect the minimal-distance candidate set from `(word, freq, dist)` hits.
fn candidate_set_from(token: &str, hits: Vec<(String, u64, usize)>) -> Option<CandidateSet> {
    let best = hits.iter().map(|(_, _, d)| *d).min()?;
    let mut candidates: Vec<(String, u64)> = hits
        .into_iter()
        .filter(|(_, _, d)| *d == best)
        .map(|(w, f, _)| (w, f))
        .collect();
    candidates.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    Some(CandidateSet {
        source: token.to_string(),
        distance: best,
        candidates,
    })
}

/// Enumerate candidates by scanning the whole vocabulary.
///
/// Returns the words at the smallest distance in `1..=max_radius`, or
/// `None` when no word is that close. This is the reference route the
/// index is required to agree with.
pub fn enumerate_candidates(
    vocab: &Vocabulary,
    token: &str,
    max_radius: usize,
) -> Option<CandidateSet> {
    let token_len = token.chars().count();
    let hits = vocab
        .entries()
        .filter(|(word, _)| word.chars().count().abs_diff(token_len) <= max_radius)
        .map(|(word, freq)| (word.to_string(), freq, dl_distance(token, word)))
        .filter(|(_, _, d)| (1..=max_radius).contains(d))
        .collect();
    candidate_set_from(token, hits)
}

/// Deletion-neighborhood index over a vocabulary.
///
/// Every vocabulary word is indexed under each string obtainable from it by
/// at most `max_distance` character deletions. A query generates the same
/// neighborhood for the token, intersects, and verifies survivors with
/// [`dl_distance`]; any pair within the radius shares a delete variant, so
/// the verified result equals the linear scan's.
#[derive(Debug, Clone)]
pub struct CandidateIndex {
    max_distance: usize,
    entries: Vec<(String, u64)>,
    deletes: HashMap<String, Vec<u32>>,
}

impl CandidateIndex {
    /// Index `vocab` for queries up to [`DEFAULT_MAX_RADIUS`].
    pub fn build(vocab: &Vocabulary) -> CandidateIndex {
        CandidateIndex::with_max_distance(vocab, DEFAULT_MAX_RADIUS)
    }

    /// Index `vocab` for queries up to `max_distance`.
    pub fn with_max_distance(vocab: &Vocabulary, max_distance: usize) -> CandidateIndex {
        let mut entries: Vec<(String, u64)> =
            vocab.entries().map(|(w, f)| (w.to_string(), f)).collect();
        // Deterministic id assignment regardless of hash-map iteration order.
        entries.sort_unstable();
        let mut deletes: HashMap<String, Vec<u32>> = HashMap::new();
        for (id, (word, _)) in entries.iter().enumerate() {
            for variant in deletes_within(word, max_distance) {
                deletes.entry(variant).or_default().push(id as u32);
            }
        }
        CandidateIndex {
            max_distance,
            entries,
            deletes,
        }
    }

    /// The radius this index was built for.
    pub fn max_distance(&self) -> usize {
        self.max_distance
    }

    /// Number of indexed words.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// True when the index holds no words.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Enumerate candidates for `token`, equivalently to a linear scan.
    ///
    /// Radii beyond the build-time `max_distance` fall back to scanning,
    /// so the result is exact either way.
    pub fn enumerate(&self, token: &str, max_radius: usize) -> Option<CandidateSet> {
        if max_radius > self.max_distance {
            return self.enumerate_by_scan(token, max_radius);
        }
        let token_len = token.chars().count();
        let mut ids: Vec<u32> = deletes_within(token, max_radius)
            .into_iter()
            .filter_map(|variant| self.deletes.get(&variant))
            .flatten()
            .copied()
            .collect();
        ids.sort_unstable();
        ids.dedup();

        let hits = ids
            .into_iter()
            .map(|id| &self.entries[id as usize])
            .filter(|(word, _)| word.chars().count().abs_diff(token_len) <= max_radius)
            .map(|(word, freq)| (word.clone(), *freq, dl_distance(token, word)))
            .filter(|(_, _, d)| (1..=max_radius).contains(d))
            .collect();
        candidate_set_from(token, hits)
    }

    fn enumerate_by_scan(&self, token: &str, max_radius: usize) -> Option<CandidateSet> {
        let token_len = token.chars().count();
        let hits = self
            .entries
            .iter()
            .filter(|(word, _)| word.chars().count().abs_diff(token_len) <= max_radius)
            .map(|(word, freq)| (word.clone(), *freq, dl_distance(token, word)))
            .filter(|(_, _, d)| (1..=max_radius).contains(d))
            .collect();
        candidate_set_from(token, hits)
    }
}

/// Every string reachable from `word` by at most `max_d` deletions,
/// including `word` itself.
fn deletes_within(word: &str, max_d: usize) -> HashSet<String> {
    let mut seen: HashSet<String> = HashSet::from([word.to_string()]);
    let mut frontier: Vec<Vec<char>> = vec![word.chars().collect()];
    for _ in 0..max_d {
        let mut next = Vec::new();
        for chars in &frontier {
            for i in 0..chars.len() {
                let mut shorter = chars.clone();
                shorter.remove(i);
                let s: String = shorter.iter().collect();
                if seen.insert(s) {
                    next.push(shorter);
                }
            }
        }
        frontier = next;
    }
    seen
}
