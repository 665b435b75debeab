//! Word embeddings and the windowed context score used to rank correction
//! candidates.
//!
//! A candidate `c` is scored against the words surrounding a misspelling.
//! For each window size `p` we take the context words within distance `p`,
//! stack their vectors as columns of `V`, and measure how far `v_c` sits
//! from their span:
//!
//! ```text
//! dist(c, T_p) = min over a of ||V a - v_c||^2 / ||v_c||
//! ```
//!
//! solved in closed form through the normal equations. Window scores are
//! then combined with harmonic weights, so near context dominates:
//!
//! ```text
//! dist(c, T) = sum over p = 1..=P of (1/p) * dist(c, T_p)
//! ```
//!
//! The candidate with the smallest combined score wins.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::editdist::CandidateSet;
use crate::error::{Error, Result};

/// Default largest window size `P`.
pub const DEFAULT_WINDOW_SIZE: usize = 4;

/// Ridge factor applied when the Gram matrix is not positive definite.
const RIDGE_SCALE: f64 = 1e-8;

/// Word vectors of a fixed dimension, keyed by lowercase word.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, DVector<f64>>,
}

impl EmbeddingTable {
    /// Load a text-format embedding file.
    ///
    /// The first line is `N D` (row count and dimension); each of the `N`
    /// following lines is a word and `D` space-separated floats. Words are
    /// lowercased; rows that repeat a word are dropped (first wins) and
    /// all-zero rows are dropped, both with a logged warning.
    pub fn load(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_named(&text, path)
    }

    /// Parse the same format from memory (fixtures, tests).
    pub fn parse(text: &str) -> Result<EmbeddingTable> {
        Self::parse_named(text, "<embeddings>")
    }

    fn parse_named(text: &str, path: impl AsRef<Path>) -> Result<EmbeddingTable> {
        let path = path.as_ref();
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(path, 1, "empty embedding file"))?;
        let mut parts = header.split_whitespace();
        let (n, dim) = match (parts.next(), parts.next(), parts.next()) {
            (Some(n), Some(d), None) => {
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::parse(path, 1, format!("bad row count {n:?}")))?;
                let d: usize = d
                    .parse()
                    .map_err(|_| Error::parse(path, 1, format!("bad dimension {d:?}")))?;
                (n, d)
            }
            _ => return Err(Error::parse(path, 1, "expected header `N D`")),
        };
        if dim == 0 {
            return Err(Error::parse(path, 1, "dimension must be positive"));
        }

        let mut vectors: HashMap<String, DVector<f64>> = HashMap::new();
        let mut rows = 0usize;
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                return Err(Error::parse(path, lineno, "blank row"));
            }
            rows += 1;
            let mut fields = line.split_whitespace();
            let word = fields.next().expect("non-blank line has a first field");
            let values = fields
                .map(|f| {
                    f.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::parse(path, lineno, format!("bad component {f:?}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if values.len() != dim {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("expected {dim} components, found {}", values.len()),
                ));
            }
            let word = word.to_lowercase();
            if values.iter().all(|v| *v == 0.0) {
                log::warn!("skipping zero vector for {word:?} at line {lineno}");
                continue;
            }
            if vectors.contains_key(&word) {
                log::warn!("duplicate embedding for {word:?} at line {lineno}; keeping first");
                continue;
            }
            vectors.insert(word, DVector::from_vec(values));
        }
        if rows != n {
            return Err(Error::parse(
                path,
                1,
                format!("header declares {n} rows, file has {rows}"),
            ));
        }
        Ok(EmbeddingTable { dim, vectors })
    }

    /// Build from `(word, vector)` pairs; rejects mixed dimensions and zero
    /// vectors outright.
    pub fn from_pairs<I, S>(dim: usize, pairs: I) -> Result<EmbeddingTable>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: AsRef<str>,
    {
        let mut vectors = HashMap::new();
        for (word, values) in pairs {
            let word = word.as_ref().to_lowercase();
            if values.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "vector for {word:?} has dimension {}, expected {dim}",
                    values.len()
                )));
            }
            if values.iter().all(|v| *v == 0.0) {
                return Err(Error::InvalidInput(format!("zero vector for {word:?}")));
            }
            vectors.insert(word, DVector::from_vec(values));
        }
        Ok(EmbeddingTable { dim, vectors })
    }

    /// Vector dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of words with vectors.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    /// True when the table is empty.
    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Case-insensitive vector lookup.
    pub fn get(&self, word: &str) -> Option<&DVector<f64>> {
        self.vectors
            .get(word)
            .or_else(|| self.vectors.get(&word.to_lowercase()))
    }

    /// Case-insensitive membership test.
    pub fn contains(&self, word: &str) -> bool {
        self.get(word).is_some()
    }
}

/// The words around a correction site, split by side.
///
/// `left` is ordered nearest-last and `right` nearest-first, so the words
/// within distance `p` are the last `p` of `left` and the first `p` of
/// `right`. Both sides are clamped to `p_max` at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextWindow {
    pub center: String,
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub p_max: usize,
}

impl ContextWindow {
    /// Build a window, keeping only the `p_max` nearest words per side.
    pub fn new(
        center: impl Into<String>,
        mut left: Vec<String>,
        mut right: Vec<String>,
        p_max: usize,
    ) -> ContextWindow {
        if left.len() > p_max {
            left.drain(..left.len() - p_max);
        }
        right.truncate(p_max);
        ContextWindow {
            center: center.into(),
            left,
            right,
            p_max,
        }
    }

    /// Context words within distance `p` of the center.
    pub fn words_within(&self, p: usize) -> impl Iterator<Item = &str> {
        let skip = self.left.len().saturating_sub(p);
        self.left[skip..]
            .iter()
            .chain(self.right.iter().take(p))
            .map(String::as_str)
    }
}

/// Squared distance from `target` to the span of `context`, via the normal
/// equations. An empty context leaves the full `||target||^2`.
fn span_residual_sq(context: &[&DVector<f64>], target: &DVector<f64>) -> f64 {
    let k = context.len();
    if k == 0 {
        return target.norm_squared();
    }
    let gram = DMatrix::from_fn(k, k, |i, j| context[i].dot(context[j]));
    let rhs = DVector::from_fn(k, |i, _| context[i].dot(target));

    let coeffs = nalgebra::Cholesky::new(gram.clone())
        .map(|ch| ch.solve(&rhs))
        .filter(|a| a.iter().all(|x| x.is_finite()))
        .unwrap_or_else(|| {
            // Rank-deficient context (repeated or collinear words): fall
            // back to a tiny ridge, which keeps the solve deterministic and
            // perturbs well-conditioned answers far below test tolerances.
            let mut lambda = RIDGE_SCALE * gram.trace() / k as f64;
            loop {
                let ridged = &gram + DMatrix::identity(k, k) * lambda;
                if let Some(ch) = nalgebra::Cholesky::new(ridged) {
                    let a = ch.solve(&rhs);
                    if a.iter().all(|x| x.is_finite()) {
                        return a;
                    }
                }
                // Nonzero vectors give a positive trace, so a positive
                // ridge must eventually succeed; escalate just in case.
                lambda *= 10.0;
            }
        });

    let mut residual = -target.clone();
    for (i, v) in context.iter().enumerate() {
        residual += *v * coeffs[i];
    }
    residual.norm_squared()
}

/// Distance of `candidate` from the span of the context words within
/// distance `p`, normalized by the candidate's vector norm.
///
/// Context words without embeddings are skipped; an empty effective context
/// scores `||v_c||`. Fails only when the *candidate* has no embedding.
pub fn window_distance(
    table: &EmbeddingTable,
    candidate: &str,
    window: &ContextWindow,
    p: usize,
) -> Result<f64> {
    let v_c = table
        .get(candidate)
        .ok_or_else(|| Error::MissingEmbedding(candidate.to_string()))?;
    let context: Vec<&DVector<f64>> = window
        .words_within(p)
        .filter_map(|w| table.get(w))
        .collect();
    Ok(span_residual_sq(&context, v_c) / v_c.norm())
}

/// A candidate with its combined and per-window context scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCandidate {
    pub word: String,
    /// Harmonically weighted sum of `per_window`.
    pub weighted_distance: f64,
    /// `per_window[p - 1]` is the window-`p` distance, `p = 1..=p_max`.
    pub per_window: Vec<f64>,
}

/// Score `candidate` over every window size up to `window.p_max`.
pub fn weighted_distance(
    table: &EmbeddingTable,
    candidate: &str,
    window: &ContextWindow,
) -> Result<ScoredCandidate> {
    let mut per_window = Vec::with_capacity(window.p_max);
    let mut weighted = 0.0;
    for p in 1..=window.p_max {
        let d = window_distance(table, candidate, window, p)?;
        per_window.push(d);
        weighted += d / p as f64;
    }
    Ok(ScoredCandidate {
        word: candidate.to_string(),
        weighted_distance: weighted,
        per_window,
    })
}

/// Pick the candidate that best fits the context.
///
/// Candidates without embeddings cannot be scored; if at least one has an
/// embedding the smallest weighted distance wins, with ties broken by
/// higher vocabulary frequency and then lexicographic order. If none has
/// an embedding the highest-frequency candidate wins. The returned scores
/// (ascending) cover the scorable candidates, for diagnostics.
pub fn select_correction(
    table: &EmbeddingTable,
    candidates: &CandidateSet,
    window: &ContextWindow,
) -> (String, Vec<ScoredCandidate>) {
    let mut scored: Vec<(ScoredCandidate, u64)> = candidates
        .candidates
        .iter()
        .filter(|(word, _)| table.contains(word))
        .map(|(word, freq)| {
            let sc =
                weighted_distance(table, word, window).expect("candidate embedding checked above");
            (sc, *freq)
        })
        .collect();

    if scored.is_empty() {
        let (word, _) = candidates
            .candidates
            .iter()
            .max_by(|(wa, fa), (wb, fb)| fa.cmp(fb).then(wb.cmp(wa)))
            .expect("candidate sets are never empty");
        return (word.clone(), Vec::new());
    }

    scored.sort_by(|(a, fa), (b, fb)| {
        a.weighted_distance
            .total_cmp(&b.weighted_distance)
            .then(fb.cmp(fa))
            .then(a.word.cmp(&b.word))
    });
    let winner = scored[0].0.word.clone();
    (winner, scored.into_iter().map(|(sc, _)| sc).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn table(dim: usize, pairs: &[(&str, &[f64])]) -> EmbeddingTable {
        EmbeddingTable::from_pairs(dim, pairs.iter().map(|(w, v)| (*w, v.to_vec()))).unwrap()
    }

    #[test]
    fn parse_valid_file() {
        let t = EmbeddingTable::parse("2 3\nMoney 1.0 0.5 -0.25\noffer 0 0 1\n").unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.len(), 2);
        assert!(t.contains("money"), "words are lowercased");
        assert_eq!(t.get("MONEY").unwrap()[2], -0.25);
    }

    #[test]
    fn parse_rejects_bad_files() {
        for (text, what) in [
            ("", "empty"),
            ("3\nx 1 1\n", "one-field header"),
            ("1 2\nx 1\n", "row arity"),
            ("1 2\nx 1 nan\n", "non-finite component"),
            ("2 2\nx 1 1\n", "row count mismatch"),
            ("1 0\nx\n", "zero dimension"),
            ("2 2\nx 1 1\n\n", "blank row"),
        ] {
            assert!(EmbeddingTable::parse(text).is_err(), "{what} should fail");
        }
    }

    #[test]
    fn parse_skips_zero_and_duplicate_rows() {
        let t = EmbeddingTable::parse("3 2\nzero 0 0\nword 1 0\nWORD 0 1\n").unwrap();
        assert_eq!(t.len(), 1);
        assert!(!t.contains("zero"));
        assert_eq!(t.get("word").unwrap()[0], 1.0, "first duplicate wins");
    }

    fn window(center: &str, left: &[&str], right: &[&str], p: usize) -> ContextWindow {
        ContextWindow::new(
            center,
            left.iter().map(|s| s.to_string()).collect(),
            right.iter().map(|s| s.to_string()).collect(),
            p,
        )
    }

    #[test]
    fn window_clamps_to_p_max() {
        let w = window("c", &["a", "b", "x"], &["d", "e", "f"], 2);
        assert_eq!(w.left, ["b", "x"], "nearest-last entries kept");
        assert_eq!(w.right, ["d", "e"]);
        assert_eq!(w.words_within(1).collect::<Vec<_>>(), ["x", "d"]);
    }

    #[test]
    fn in_span_candidate_scores_zero() {
        let t = table(
            3,
            &[
                ("c", &[2.0, 3.0, 0.0]),
                ("u", &[1.0, 0.0, 0.0]),
                ("v", &[0.0, 1.0, 0.0]),
            ],
        );
        let w = window("m", &["u"], &["v"], 1);
        let d = window_distance(&t, "c", &w, 1).unwrap();
        assert!(d.abs() < 1e-10, "in-span residual, got {d}");
    }

    #[test]
    fn orthogonal_candidate_scores_its_norm() {
        let t = table(2, &[("c", &[0.0, 1.0]), ("u", &[1.0, 0.0])]);
        let w = window("m", &["u"], &[], 1);
        assert!((window_distance(&t, "c", &w, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_spanned_candidate_scores_residual_over_norm() {
        // Context spans the first two axes; a third of the candidate's
        // squared norm survives: 1 / sqrt(3).
        let t = table(
            3,
            &[
                ("c", &[1.0, 1.0, 1.0]),
                ("u", &[1.0, 0.0, 0.0]),
                ("v", &[0.0, 1.0, 0.0]),
            ],
        );
        let w = window("m", &["u"], &["v"], 1);
        let d = window_distance(&t, "c", &w, 1).unwrap();
        assert!((d - 1.0 / 3f64.sqrt()).abs() < 1e-12, "got {d}");
    }

    #[test]
    fn empty_context_scores_candidate_norm() {
        let t = table(2, &[("c", &[3.0, 4.0])]);
        let w = window("m", &[], &[], 2);
        assert!((window_distance(&t, "c", &w, 1).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn context_words_without_embeddings_are_skipped() {
        let t = table(2, &[("c", &[0.0, 2.0]), ("u", &[1.0, 0.0])]);
        let w = window("m", &["mystery", "u"], &["unknown"], 2);
        let d = window_distance(&t, "c", &w, 2).unwrap();
        assert!((d - 2.0).abs() < 1e-12, "only u is effective, got {d}");
    }

    #[test]
    fn missing_candidate_embedding_is_an_error() {
        let t = table(2, &[("u", &[1.0, 0.0])]);
        let w = window("m", &["u"], &[], 1);
        assert!(matches!(
            window_distance(&t, "ghost", &w, 1),
            Err(Error::MissingEmbedding(_))
        ));
    }

    #[test]
    fn repeated_context_words_hit_the_ridge_path() {
        let t = table(
            2,
            &[("c", &[5.0, 0.0]), ("u", &[1.0, 0.0]), ("o", &[0.0, 2.0])],
        );
        let w = window("m", &["u", "u"], &["u"], 3);
        let d = window_distance(&t, "c", &w, 3).unwrap();
        assert!(d.abs() < 1e-10, "in-span despite singular Gram, got {d}");
        let d = window_distance(&t, "o", &w, 3).unwrap();
        assert!(
            (d - 2.0).abs() < 1e-9,
            "orthogonal despite singular Gram, got {d}"
        );
    }

    #[test]
    fn weighted_distance_matches_manual_sum() {
        let t = table(
            3,
            &[
                ("c", &[1.0, 1.0, 1.0]),
                ("a", &[1.0, 0.0, 0.0]),
                ("b", &[0.0, 1.0, 0.0]),
                ("d", &[0.0, 0.0, 1.0]),
            ],
        );
        let w = window("m", &["a", "b"], &["d"], 3);
        let sc = weighted_distance(&t, "c", &w).unwrap();
        assert_eq!(sc.per_window.len(), 3);
        let manual: f64 = (1..=3)
            .map(|p| window_distance(&t, "c", &w, p).unwrap() / p as f64)
            .sum();
        assert!((sc.weighted_distance - manual).abs() < 1e-9);
        // Windows nest, so per-window distances never increase with p.
        assert!(sc.per_window[1] <= sc.per_window[0] + 1e-12);
        assert!(sc.per_window[2] <= sc.per_window[1] + 1e-12);
    }

    #[test]
    fn select_prefers_in_span_candidate() {
        let t = table(
            3,
            &[
                ("stupid", &[1.0, 1.0, 0.0]),
                ("stud", &[0.0, 0.0, 1.0]),
                ("stubborn", &[1.0, 0.0, 0.0]),
                ("admins", &[0.0, 1.0, 0.0]),
            ],
        );
        let cands = CandidateSet {
            source: "stupd".into(),
            distance: 1,
            candidates: vec![("stud".into(), 2000), ("stupid".into(), 900)],
        };
        let w = window("stupd", &[], &["stubborn", "admins"], 4);
        let (winner, scores) = select_correction(&t, &cands, &w);
        assert_eq!(winner, "stupid");
        assert_eq!(scores.len(), 2);
        assert!(scores[0].weighted_distance < scores[1].weighted_distance);
    }

    #[test]
    fn select_breaks_ties_by_frequency_then_word() {
        // Identical vectors give identical scores.
        let t = table(
            2,
            &[
                ("beta", &[1.0, 0.0]),
                ("alfa", &[1.0, 0.0]),
                ("u", &[0.0, 1.0]),
            ],
        );
        let w = window("x", &["u"], &[], 1);
        let cands = CandidateSet {
            source: "x".into(),
            distance: 1,
            candidates: vec![("alfa".into(), 10), ("beta".into(), 500)],
        };
        let (winner, _) = select_correction(&t, &cands, &w);
        assert_eq!(winner, "beta", "higher frequency wins the tie");

        let cands = CandidateSet {
            source: "x".into(),
            distance: 1,
            candidates: vec![("alfa".into(), 10), ("beta".into(), 10)],
        };
        let (winner, _) = select_correction(&t, &cands, &w);
        assert_eq!(winner, "alfa", "equal frequency falls back to word order");
    }

    #[test]
    fn select_falls_back_to_frequency_without_embeddings() {
        let t = table(2, &[("unrelated", &[1.0, 0.0])]);
        let cands = CandidateSet {
            source: "monye".into(),
            distance: 1,
            candidates: vec![("money".into(), 700), ("monye2".into(), 900)],
        };
        let w = window("monye", &[], &[], 4);
        let (winner, scores) = select_correction(&t, &cands, &w);
        assert_eq!(winner, "monye2");
        assert!(scores.is_empty());
    }

    /// Random instances for the numeric properties below.
    fn random_instance(
        rng: &mut ChaCha8Rng,
        max_dim: usize,
        max_k: usize,
    ) -> (Vec<DVector<f64>>, DVector<f64>) {
        let dim = rng.gen_range(2..=max_dim);
        let k = rng.gen_range(1..=max_k.min(dim));
        let mut vecs = Vec::with_capacity(k);
        for _ in 0..k {
            vecs.push(DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0)));
        }
        let target = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
        (vecs, target)
    }

    #[test]
    fn residual_is_orthogonal_to_context_at_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (vecs, target) = random_instance(&mut rng, 20, 6);
            let refs: Vec<&DVector<f64>> = vecs.iter().collect();
            let k = refs.len();
            let gram = DMatrix::from_fn(k, k, |i, j| refs[i].dot(refs[j]));
            let rhs = DVector::from_fn(k, |i, _| refs[i].dot(&target));
            let coeffs = nalgebra::Cholesky::new(gram).unwrap().solve(&rhs);
            let mut residual = -target.clone();
            for (i, v) in refs.iter().enumerate() {
                residual += *v * coeffs[i];
            }
            for v in &refs {
                let bound = 1e-8 * v.norm() * target.norm();
                assert!(v.dot(&residual).abs() <= bound, "residual not orthogonal");
            }
        }
    }

    #[test]
    fn closed_form_beats_random_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let (vecs, target) = random_instance(&mut rng, 12, 5);
            let refs: Vec<&DVector<f64>> = vecs.iter().collect();
            let best = span_residual_sq(&refs, &target);
            for _ in 0..500 {
                let mut attempt = -target.clone();
                for v in &refs {
                    attempt += *v * rng.gen_range(-5.0..5.0);
                }
                assert!(
                    best <= attempt.norm_squared() + 1e-9,
                    "random coefficients beat the closed form"
                );
            }
        }
    }

    #[test]
    fn value_is_invariant_under_context_permutation_and_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let (mut vecs, target) = random_instance(&mut rng, 15, 5);
            let refs: Vec<&DVector<f64>> = vecs.iter().collect();
            let base = span_residual_sq(&refs, &target);

            vecs.reverse();
            let refs: Vec<&DVector<f64>> = vecs.iter().collect();
            let permuted = span_residual_sq(&refs, &target);
            assert!(
                (base - permuted).abs() <= 1e-9 * (1.0 + base),
                "permutation changed value"
            );

            let scaled_vecs: Vec<DVector<f64>> = vecs.iter().map(|v| v * 3.0).collect();
            let refs: Vec<&DVector<f64>> = scaled_vecs.iter().collect();
            let scaled = span_residual_sq(&refs, &target);
            assert!(
                (base - scaled).abs() <= 1e-9 * (1.0 + base),
                "scaling changed value"
            );
        }
    }

    #[test]
    fn growing_the_context_never_hurts() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..100 {
            let (vecs, target) = random_instance(&mut rng, 15, 5);
            let extra = DVector::from_fn(target.len(), |_, _| rng.gen_range(-1.0..1.0));
            let refs: Vec<&DVector<f64>> = vecs.iter().collect();
            let base = span_residual_sq(&refs, &target);
            let mut grown: Vec<&DVector<f64>> = vecs.iter().collect();
            grown.push(&extra);
            let bigger_span = span_residual_sq(&grown, &target);
            assert!(
                bigger_span <= base + 1e-9 * (1.0 + base),
                "extra vector raised residual"
            );
        }
    }
}
