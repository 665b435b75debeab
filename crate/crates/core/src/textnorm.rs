//! Tokenization, sentence segmentation and tweet normalization.
//!
//! The tokenizer is deliberately conservative: it splits on whitespace and
//! punctuation, but keeps marks that sit *inside* a word (apostrophes in
//! "you're", obfuscation characters in "stu*pid" or "idio.t") so that a
//! mangled word survives as a single token and can be repaired by a 1:1
//! substitution. Tokens remember their original spelling, position and the
//! whitespace that preceded them, which makes detokenization lossless.

use std::sync::LazyLock;

use regex::Regex;

/// Placeholder spellings produced by [`normalize_tweet`].
pub const PLACEHOLDERS: [&str; 4] = ["$HASHTAG$", "$URL$", "$MENTION$", "$RESERVED$"];

/// Returns true when `s` is exactly one of the placeholder spellings.
pub fn is_placeholder(s: &str) -> bool {
    PLACEHOLDERS.contains(&s)
}

/// Coarse classification of a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    /// Contains at least one alphabetic character.
    Word,
    /// Alphanumeric run without any alphabetic character ("42", "3.14").
    Number,
    /// A single non-alphanumeric character.
    Punctuation,
    /// One of the `$...$` placeholders.
    Placeholder,
}

/// One token plus enough bookkeeping to rebuild the text it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// The token exactly as it appeared (or the replacement surface).
    pub surface: String,
    /// Lowercased form of `surface`; all lookups go through this.
    pub lower: String,
    pub kind: TokenKind,
    /// Half-open `[start, end)` character offsets into the tokenized source.
    /// A replaced token keeps the span of the token it replaced.
    pub span: (usize, usize),
    /// Whitespace that sat between the previous token and this one.
    pub gap: String,
}

impl Token {
    /// True for [`TokenKind::Word`] tokens.
    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }

    /// Build the token that substitutes `word` for this one.
    ///
    /// Keeps the gap and span; restores a leading capital if the original
    /// surface had one ("Stupd" corrected with "stupid" becomes "Stupid").
    pub fn with_replacement(&self, word: &str) -> Token {
        Token {
            surface: restore_leading_capital(&self.surface, word),
            lower: word.to_lowercase(),
            kind: self.kind,
            span: self.span,
            gap: self.gap.clone(),
        }
    }
}

/// Capitalize `replacement` iff `original` starts with an uppercase letter.
fn restore_leading_capital(original: &str, replacement: &str) -> String {
    let capitalized = original.chars().next().is_some_and(char::is_uppercase);
    if !capitalized {
        return replacement.to_string();
    }
    let mut chars = replacement.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// A tokenized text: sentences of tokens plus any trailing whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenizedText {
    pub sentences: Vec<Vec<Token>>,
    /// Whitespace after the final token (kept so round trips are exact).
    pub trailing: String,
}

impl TokenizedText {
    /// All tokens in order, across sentences.
    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flatten()
    }

    /// Total number of tokens.
    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    /// Token at flat index `idx` (counting across sentences).
    pub fn token(&self, idx: usize) -> Option<&Token> {
        self.tokens().nth(idx)
    }

    /// Substitute `word` for the token at flat index `idx`.
    ///
    /// Returns false when `idx` is out of range.
    pub fn replace_token(&mut self, idx: usize, word: &str) -> bool {
        let mut remaining = idx;
        for sentence in &mut self.sentences {
            if remaining < sentence.len() {
                sentence[remaining] = sentence[remaining].with_replacement(word);
                return true;
            }
            remaining -= sentence.len();
        }
        false
    }

    /// Rebuild the text, byte for byte when no token was replaced.
    pub fn detokenize(&self) -> String {
        let mut out = String::new();
        for sentence in &self.sentences {
            for token in sentence {
                out.push_str(&token.gap);
                out.push_str(&token.surface);
            }
        }
        out.push_str(&self.trailing);
        out
    }
}

/// Rebuild a single sentence (gaps before each token included).
pub fn detokenize_sentence(sentence: &[Token]) -> String {
    let mut out = String::new();
    for token in sentence {
        out.push_str(&token.gap);
        out.push_str(&token.surface);
    }
    out
}

/// Split `text` into sentences of tokens.
///
/// Words are maximal alphanumeric runs; a non-alphanumeric mark stays inside
/// a word only when flanked by alphanumerics on both sides. Every other
/// non-whitespace character becomes a one-character punctuation token.
/// Sentences end after `.`, `!` or `?` tokens followed by whitespace or the
/// end of the text.
pub fn tokenize(text: &str) -> TokenizedText {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut sentence: Vec<Token> = Vec::new();
    let mut gap = String::new();
    let mut i = 0;

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            gap.push(c);
            i += 1;
            continue;
        }

        let start = i;
        let (surface, kind) = if let Some(placeholder) = placeholder_at(&chars, i) {
            i += placeholder.chars().count();
            (placeholder.to_string(), TokenKind::Placeholder)
        } else if c.is_alphanumeric() {
            let mut end = i + 1;
            while end < chars.len() {
                if chars[end].is_alphanumeric() {
                    end += 1;
                } else if !chars[end].is_whitespace()
                    && placeholder_at(&chars, end).is_none()
                    && end + 1 < chars.len()
                    && chars[end + 1].is_alphanumeric()
                {
                    // Word-internal mark: "you're", "stu*pid", "idio.t", "3.14".
                    end += 2;
                } else {
                    break;
                }
            }
            let surface: String = chars[i..end].iter().collect();
            let kind = if surface.chars().any(char::is_alphabetic) {
                TokenKind::Word
            } else {
                TokenKind::Number
            };
            i = end;
            (surface, kind)
        } else {
            i += 1;
            (c.to_string(), TokenKind::Punctuation)
        };

        sentence.push(Token {
            lower: surface.to_lowercase(),
            kind,
            span: (start, i),
            gap: std::mem::take(&mut gap),
            surface,
        });

        let boundary = kind == TokenKind::Punctuation
            && matches!(sentence.last().unwrap().surface.as_str(), "." | "!" | "?")
            && (i >= chars.len() || chars[i].is_whitespace());
        if boundary {
            sentences.push(std::mem::take(&mut sentence));
        }
    }

    if !sentence.is_empty() {
        sentences.push(sentence);
    }
    TokenizedText {
        sentences,
        trailing: gap,
    }
}

/// The placeholder starting at `chars[i]`, if any.
fn placeholder_at(chars: &[char], i: usize) -> Option<&'static str> {
    if chars[i] != '$' {
        return None;
    }
    PLACEHOLDERS
        .iter()
        .find(|p| {
            let pat: Vec<char> = p.chars().collect();
            chars[i..].starts_with(&pat)
        })
        .copied()
}

/// True when `s` tokenizes to exactly one word token spelled `s`.
///
/// The attack generator uses this to guarantee a misspelling still occupies
/// a single token slot, which keeps attack logs invertible.
pub fn is_single_word_token(s: &str) -> bool {
    let tokenized = tokenize(s);
    let mut tokens = tokenized.tokens();
    matches!(
        (tokens.next(), tokens.next()),
        (Some(t), None) if t.kind == TokenKind::Word && t.surface == s
    )
}

static URL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?:https?://|\bt\.co/)\S+").unwrap());
static HASHTAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"#\w+").unwrap());
static MENTION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@\w+").unwrap());
static RESERVED: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\b(RT|FAV)\b").unwrap());

/// Replace tweet-specific fragments with placeholder tokens.
///
/// Hashtags become `$HASHTAG$`, URLs (scheme-full or bare `t.co/...`)
/// become `$URL$`, @-mentions become `$MENTION$` and the retweet/favorite
/// markers become `$RESERVED$`. Trailing sentence punctuation after a URL
/// is not part of it and stays in place. Everything else is left
/// untouched, so the function is idempotent.
pub fn normalize_tweet(text: &str) -> String {
    let text = URL.replace_all(text, |caps: &regex::Captures| {
        let m = caps.get(0).unwrap().as_str();
        let kept = m.trim_end_matches(['.', ',', '!', '?', ';', ':']);
        format!("$URL${}", &m[kept.len()..])
    });
    let text = HASHTAG.replace_all(&text, "$$HASHTAG$$");
    let text = MENTION.replace_all(&text, "$$MENTION$$");
    RESERVED.replace_all(&text, "$$RESERVED$$").into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(t: &TokenizedText) -> Vec<String> {
        t.tokens().map(|tok| tok.surface.clone()).collect()
    }

    #[test]
    fn keeps_word_internal_apostrophes() {
        let t = tokenize("you're a biased fuck");
        assert_eq!(t.sentences.len(), 1);
        assert_eq!(surfaces(&t), ["you're", "a", "biased", "fuck"]);
    }

    #[test]
    fn empty_input_has_no_sentences() {
        let t = tokenize("");
        assert!(t.sentences.is_empty());
        assert_eq!(t.detokenize(), "");
    }

    #[test]
    fn trailing_period_is_its_own_token() {
        let t = tokenize("Please pya any fees.");
        assert_eq!(t.sentences.len(), 1);
        assert_eq!(surfaces(&t), ["Please", "pya", "any", "fees", "."]);
    }

    #[test]
    fn sentence_breaks_on_terminator_plus_whitespace() {
        let t = tokenize("Go now. Then stop! Why? done");
        let sents: Vec<Vec<String>> = t
            .sentences
            .iter()
            .map(|s| s.iter().map(|tok| tok.surface.clone()).collect())
            .collect();
        assert_eq!(
            sents,
            vec![
                vec!["Go", "now", "."],
                vec!["Then", "stop", "!"],
                vec!["Why", "?"],
                vec!["done"],
            ]
        );
    }

    #[test]
    fn obfuscated_words_stay_single_tokens() {
        assert_eq!(
            surfaces(&tokenize("the stu*pid admin")),
            ["the", "stu*pid", "admin"]
        );
        // '.' inside a word does not end the sentence.
        let t = tokenize("what an idio.t move");
        assert_eq!(t.sentences.len(), 1);
        assert_eq!(surfaces(&t), ["what", "an", "idio.t", "move"]);
    }

    #[test]
    fn classifies_kinds() {
        let t = tokenize("$HASHTAG$ win 42 now 3.14 !");
        let kinds: Vec<TokenKind> = t.tokens().map(|tok| tok.kind).collect();
        assert_eq!(
            kinds,
            [
                TokenKind::Placeholder,
                TokenKind::Word,
                TokenKind::Number,
                TokenKind::Word,
                TokenKind::Number,
                TokenKind::Punctuation,
            ]
        );
    }

    #[test]
    fn placeholder_adjacent_to_word_splits() {
        let t = tokenize("abc$MENTION$def");
        assert_eq!(surfaces(&t), ["abc", "$MENTION$", "def"]);
    }

    #[test]
    fn spans_index_the_source() {
        let text = "Héllo  wörld's  stu*pid.";
        let chars: Vec<char> = text.chars().collect();
        for token in tokenize(text).tokens() {
            let (s, e) = token.span;
            let from_span: String = chars[s..e].iter().collect();
            assert_eq!(from_span, token.surface);
        }
    }

    #[test]
    fn detokenize_is_lossless() {
        for text in [
            "Please pya any fees.",
            "  leading and  double  spaces ",
            "tabs\tand\nnewlines kept.  Next sentence!",
            "you're a biased fuck",
            "",
            "   ",
            "#tag stays, $URL$ too.",
        ] {
            assert_eq!(tokenize(text).detokenize(), text, "round trip of {text:?}");
        }
    }

    #[test]
    fn replacement_restores_leading_capital() {
        let mut t = tokenize("Stupd and stubborn");
        assert!(t.replace_token(0, "stupid"));
        assert_eq!(t.detokenize(), "Stupid and stubborn");

        let mut t = tokenize("so stupd");
        assert!(t.replace_token(1, "stupid"));
        assert_eq!(t.detokenize(), "so stupid");
    }

    #[test]
    fn single_word_token_check() {
        assert!(is_single_word_token("stu*pid"));
        assert!(is_single_word_token("idio.t"));
        assert!(!is_single_word_token("idiot."));
        assert!(!is_single_word_token("*idiot"));
        assert!(!is_single_word_token("two words"));
        assert!(!is_single_word_token("42"));
    }

    #[test]
    fn normalizes_sample_tweets() {
        assert_eq!(normalize_tweet("@user lol #yes"), "$MENTION$ lol $HASHTAG$");
        assert_eq!(
            normalize_tweet("#isis #islam pc puzzle: see http://t.co/tbjusaemuh"),
            "$HASHTAG$ $HASHTAG$ pc puzzle: see $URL$"
        );
        assert_eq!(normalize_tweet("RT @a: hi"), "$RESERVED$ $MENTION$: hi");
        assert_eq!(normalize_tweet("read t.co/abc123 now"), "read $URL$ now");
        assert_eq!(normalize_tweet("plain text"), "plain text");
    }

    #[test]
    fn url_keeps_trailing_sentence_punctuation() {
        assert_eq!(
            normalize_tweet("see http://x.co/a, then"),
            "see $URL$, then"
        );
        assert_eq!(
            normalize_tweet("link http://t.co/g4xoh..."),
            "link $URL$..."
        );
        assert_eq!(normalize_tweet("ask http://a.b/q?x=1 now"), "ask $URL$ now");
    }

    #[test]
    fn normalize_is_idempotent_on_examples() {
        for tweet in [
            "@user lol #yes",
            "#isis #islam pc puzzle: see http://t.co/tbjusaemuh",
            "RT @a: hi ##double #tag@mixed",
            "https://x.co/a?b=c&d=e #1 @2",
        ] {
            let once = normalize_tweet(tweet);
            assert_eq!(normalize_tweet(&once), once, "idempotence on {tweet:?}");
        }
    }
}
