//! Stopword masking and stemming shared by corpus sentences and domain terms.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::porter;

/// Token that replaces every stopword.
pub const PLACEHOLDER: &str = "_";

/// Bumped whenever tokenization, masking or stemming changes output.
pub const NORMALIZATION_VERSION: u32 = 1;

const SMART_STOPWORDS: &str = include_str!("../data/smart_stopwords.txt");

/// A set of lowercase stopwords. Membership is an exact string match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopwordSet {
    words: HashSet<String>,
}

impl StopwordSet {
    /// The bundled SMART list.
    pub fn smart() -> Self {
        Self::parse(SMART_STOPWORDS)
    }

    /// One word per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| l.to_lowercase())
            .collect();
        StopwordSet { words }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let set = Self::parse(&text);
        if set.is_empty() {
            return Err(Error::Input(format!("{}: stopword file has no words", path.display())));
        }
        Ok(set)
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        StopwordSet {
            words: words.into_iter().map(Into::into).collect(),
        }
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Stable digest of the sorted word list, used to tie stage files to the
    /// normalization they were produced with.
    pub fn fingerprint(&self) -> String {
        let mut sorted: Vec<&str> = self.words.iter().map(String::as_str).collect();
        sorted.sort_unstable();
        let mut h = Sha256::new();
        h.update(NORMALIZATION_VERSION.to_le_bytes());
        for w in sorted {
            h.update(w.as_bytes());
            h.update([0u8]);
        }
        hex_prefix(&h.finalize(), 8)
    }
}

pub(crate) fn hex_prefix(bytes: &[u8], n: usize) -> String {
    bytes.iter().take(n).map(|b| format!("{b:02x}")).collect()
}

/// A normalized token sequence: stems and placeholders.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct NormalizedSentence {
    pub tokens: Vec<String>,
}

impl NormalizedSentence {
    pub fn new(tokens: Vec<String>) -> Self {
        NormalizedSentence { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// True when nothing but placeholders is left.
    pub fn is_all_placeholder(&self) -> bool {
        self.tokens.iter().all(|t| t == PLACEHOLDER)
    }
}

impl fmt::Display for NormalizedSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tokens.join(" "))
    }
}

/// A token made only of punctuation or symbols.
pub fn is_punctuation(token: &str) -> bool {
    !token.is_empty() && token != PLACEHOLDER && !token.chars().any(char::is_alphanumeric)
}

/// Replace each stopword by the placeholder. Length is preserved.
pub fn mask_stopwords(tokens: &[String], stops: &StopwordSet) -> Vec<String> {
    tokens
        .iter()
        .map(|t| {
            if stops.contains(t) {
                PLACEHOLDER.to_owned()
            } else {
                t.clone()
            }
        })
        .collect()
}

/// Drop punctuation-only tokens, mask stopwords, then stem what remains.
pub fn normalize_tokens(tokens: &[String], stops: &StopwordSet) -> NormalizedSentence {
    let kept: Vec<String> = tokens.iter().filter(|t| !is_punctuation(t)).cloned().collect();
    let tokens = mask_stopwords(&kept, stops)
        .into_iter()
        .map(|t| if t == PLACEHOLDER { t } else { porter::stem(&t) })
        .collect();
    NormalizedSentence { tokens }
}

/// [`normalize_tokens`] with a memo of stems, for corpus-scale use.
///
/// Produces exactly the same output; only the stemming work is cached.
#[derive(Debug)]
pub struct Normalizer<'a> {
    stops: &'a StopwordSet,
    cache: std::collections::HashMap<String, String>,
}

impl<'a> Normalizer<'a> {
    const CACHE_LIMIT: usize = 1 << 20;

    pub fn new(stops: &'a StopwordSet) -> Self {
        Normalizer {
            stops,
            cache: Default::default(),
        }
    }

    pub fn normalize(&mut self, tokens: &[String]) -> NormalizedSentence {
        let mut out = Vec::with_capacity(tokens.len());
        for t in tokens {
            if is_punctuation(t) {
                continue;
            }
            if self.stops.contains(t) {
                out.push(PLACEHOLDER.to_owned());
                continue;
            }
            if t == PLACEHOLDER {
                out.push(t.clone());
                continue;
            }
            if let Some(s) = self.cache.get(t) {
                out.push(s.clone());
                continue;
            }
            let s = porter::stem(t);
            if self.cache.len() >= Self::CACHE_LIMIT {
                self.cache.clear();
            }
            self.cache.insert(t.clone(), s.clone());
            out.push(s);
        }
        NormalizedSentence { tokens: out }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &[&str]) -> Vec<String> {
        s.iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn smart_list_loads() {
        let stops = StopwordSet::smart();
        assert_eq!(stops.len(), 570);
        for w in ["a", "is", "and", "of", "the", "a's", "zero"] {
            assert!(stops.contains(w), "{w}");
        }
        assert!(!stops.contains("_"));
        assert!(!stops.contains("philosophy"));
    }

    #[test]
    fn parse_skips_comments_and_blanks() {
        let s = StopwordSet::parse("# header\n\nthe\nOf  # trailing\n  \n");
        assert_eq!(s.len(), 2);
        assert!(s.contains("of"));
    }

    #[test]
    fn masking() {
        let stops = StopwordSet::smart();
        assert_eq!(
            mask_stopwords(&toks(&["is", "a", "political", "philosophy"]), &stops),
            toks(&["_", "_", "political", "philosophy"])
        );
        assert!(mask_stopwords(&[], &stops).is_empty());
        assert_eq!(mask_stopwords(&toks(&["_"]), &stops), toks(&["_"]));
    }

    #[test]
    fn normalize_examples() {
        let stops = StopwordSet::smart();
        let n = normalize_tokens(&toks(&["biological", "and", "physical"]), &stops);
        assert_eq!(n.tokens, toks(&["biolog", "_", "physic"]));
        let n = normalize_tokens(&toks(&["metaphysics"]), &stops);
        assert_eq!(n.tokens, toks(&["metaphys"]));
        let n = normalize_tokens(&toks(&["'", "anarchism", "'", "is", "a"]), &stops);
        assert_eq!(n.tokens, toks(&["anarch", "_", "_"]));
    }

    #[test]
    fn cached_normalizer_agrees() {
        let stops = StopwordSet::smart();
        let mut n = Normalizer::new(&stops);
        let input = toks(&["the", "theology", ",", "of", "history", "theology", "_"]);
        assert_eq!(n.normalize(&input), normalize_tokens(&input, &stops));
        assert_eq!(n.normalize(&input), normalize_tokens(&input, &stops));
    }

    #[test]
    fn fingerprint_is_order_independent() {
        let a = StopwordSet::from_words(["x", "y"]);
        let b = StopwordSet::from_words(["y", "x"]);
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), StopwordSet::from_words(["x"]).fingerprint());
    }
}
