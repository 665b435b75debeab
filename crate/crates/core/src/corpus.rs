//! Labeled document corpora stored as one `label<TAB>text` line per document.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// One labeled document. `id` is the 0-based line index it was loaded from
/// (or assigned at construction) and stays stable through attack/correction
/// round trips.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub label: String,
    pub text: String,
}

impl Document {
    /// Convenience constructor.
    pub fn new(id: impl Into<String>, label: impl Into<String>, text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            label: label.into(),
            text: text.into(),
        }
    }
}

/// Load a TSV corpus. Each line is `label<TAB>text`; only the first tab
/// separates, so the text may itself contain tabs.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus_named(&raw, path)
}

/// Parse the same TSV format from memory (fixtures, tests).
pub fn parse_corpus(text: &str) -> Result<Vec<Document>> {
    parse_corpus_named(text, "<corpus>")
}

fn parse_corpus_named(raw: &str, path: impl AsRef<Path>) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let mut docs = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        let (label, text) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, idx + 1, "expected label<TAB>text"))?;
        if label.is_empty() {
            return Err(Error::parse(path, idx + 1, "empty label"));
        }
        docs.push(Document::new(idx.to_string(), label, text));
    }
    Ok(docs)
}

/// Serialize a corpus back to its TSV form.
pub fn corpus_to_tsv(docs: &[Document]) -> Result<String> {
    let mut out = String::new();
    for doc in docs {
        if doc.label.contains('\t') || doc.label.contains('\n') || doc.text.contains('\n') {
            return Err(Error::InvalidInput(format!(
                "document {} contains characters the TSV corpus format cannot carry",
                doc.id
            )));
        }
        out.push_str(&doc.label);
        out.push('\t');
        out.push_str(&doc.text);
        out.push('\n');
    }
    Ok(out)
}

/// Write a corpus to `path` in TSV form.
pub fn save_corpus(docs: &[Document], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, corpus_to_tsv(docs)?).map_err(|e| Error::io(path, e))
}
