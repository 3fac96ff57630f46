//! Term recognition in normalized sentences and corpus co-occurrence counts.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use aho_corasick::{AhoCorasick, MatchKind};
use sha2::{Digest, Sha256};

use crate::catalog::{TermCatalog, TermId};
use crate::error::{Error, Result};
use crate::normalize::{hex_prefix, NormalizedSentence};

pub const STATS_VERSION: u32 = 1;

/// Largest token id representable by the 3-byte encoding.
const MAX_TOKEN_ID: u32 = (1 << 21) - 2;
/// Id given to sentence tokens that occur in no term.
const UNKNOWN_TOKEN: u32 = (1 << 21) - 1;

/// One recognized term occurrence: the term and its first token position.
pub type Occurrence = (TermId, usize);

/// Multi-pattern matcher over normalized token sequences.
///
/// Every token is encoded as three bytes whose first byte alone has the high
/// bit set, so a byte-level match can only start and end on token
/// boundaries. Stopwords were all masked to the same placeholder on both
/// sides, so a placeholder in a term matches any stopword in a sentence.
#[derive(Debug, Clone)]
pub struct TermMatcher {
    vocab: HashMap<String, u32>,
    automaton: Option<AhoCorasick>,
    /// Pattern index -> terms sharing that normalized form, ascending.
    pattern_terms: Vec<Vec<TermId>>,
    /// Pattern index -> length in tokens.
    pattern_len: Vec<usize>,
    nested: bool,
}

fn encode_token(id: u32, out: &mut Vec<u8>) {
    out.push(0x80 | ((id >> 14) & 0x7f) as u8);
    out.push(((id >> 7) & 0x7f) as u8);
    out.push((id & 0x7f) as u8);
}

impl TermMatcher {
    /// Build a matcher over every matchable term of the catalog. Nested and
    /// overlapping matches are all reported.
    pub fn new(catalog: &TermCatalog) -> Result<Self> {
        Self::with_nesting(catalog, true)
    }

    /// With `nested == false`, a match whose span lies strictly inside a
    /// longer match in the same sentence is dropped.
    pub fn with_nesting(catalog: &TermCatalog, nested: bool) -> Result<Self> {
        let mut vocab: HashMap<String, u32> = HashMap::new();
        let mut by_form: BTreeMap<Vec<u32>, Vec<TermId>> = BTreeMap::new();
        for term in catalog.terms().iter().filter(|t| t.is_matchable()) {
            let mut form = Vec::with_capacity(term.norm_tokens.len());
            for tok in &term.norm_tokens.tokens {
                let next = vocab.len() as u32;
                let id = *vocab.entry(tok.clone()).or_insert(next);
                if id > MAX_TOKEN_ID {
                    return Err(Error::Input("term vocabulary too large for the matcher".into()));
                }
                form.push(id);
            }
            by_form.entry(form).or_default().push(term.id);
        }
        let mut patterns = Vec::with_capacity(by_form.len());
        let mut pattern_terms = Vec::with_capacity(by_form.len());
        let mut pattern_len = Vec::with_capacity(by_form.len());
        for (form, mut ids) in by_form {
            let mut bytes = Vec::with_capacity(form.len() * 3);
            for &t in &form {
                encode_token(t, &mut bytes);
            }
            ids.sort();
            patterns.push(bytes);
            pattern_terms.push(ids);
            pattern_len.push(form.len());
        }
        let automaton = if patterns.is_empty() {
            None
        } else {
            Some(
                AhoCorasick::builder()
                    .match_kind(MatchKind::Standard)
                    .build(&patterns)
                    .map_err(|e| Error::Invariant(format!("building term automaton: {e}")))?,
            )
        };
        Ok(TermMatcher {
            vocab,
            automaton,
            pattern_terms,
            pattern_len,
            nested,
        })
    }

    pub fn pattern_count(&self) -> usize {
        self.pattern_terms.len()
    }

    /// All term occurrences in a sentence, sorted by (start, term id).
    pub fn find_occurrences(&self, sentence: &NormalizedSentence) -> Vec<Occurrence> {
        self.find_in_tokens(sentence.tokens.iter().map(String::as_str))
    }

    /// Same as [`Self::find_occurrences`] over borrowed tokens, e.g. a
    /// space-separated line from a sentence file.
    pub fn find_in_tokens<'a, I>(&self, tokens: I) -> Vec<Occurrence>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut out = Vec::new();
        let Some(ac) = &self.automaton else {
            return out;
        };
        let mut hay = Vec::new();
        let mut known = false;
        for tok in tokens {
            let id = self.vocab.get(tok).copied().unwrap_or(UNKNOWN_TOKEN);
            known |= id != UNKNOWN_TOKEN;
            encode_token(id, &mut hay);
        }
        if !known {
            return out;
        }
        let mut spans: Vec<(usize, usize, usize)> = ac
            .find_overlapping_iter(&hay)
            .map(|m| {
                let p = m.pattern().as_usize();
                (m.start() / 3, self.pattern_len[p], p)
            })
            .collect();
        if !self.nested {
            let all = spans.clone();
            spans.retain(|&(s, len, _)| {
                !all.iter()
                    .any(|&(os, olen, _)| olen > len && os <= s && s + len <= os + olen)
            });
        }
        for (start, _, p) in spans {
            out.extend(self.pattern_terms[p].iter().map(|&t| (t, start)));
        }
        out.sort_unstable();
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TermCounts {
    pub doc_freq: u64,
    pub term_freq: u64,
    pub sent_freq: u64,
}

/// Per-term and pairwise counts over a corpus, for one catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusStats {
    fingerprint: String,
    pub total_docs: u64,
    pub total_sentences: u64,
    terms: HashMap<TermId, TermCounts>,
    /// Keyed by (smaller id, larger id); only non-zero counts are stored.
    pairs: HashMap<(TermId, TermId), u64>,
}

fn pair_key(a: TermId, b: TermId) -> (TermId, TermId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl CorpusStats {
    /// Zero counts for every term of the catalog.
    pub fn new(catalog: &TermCatalog) -> Self {
        let mut s = Self::empty(catalog.fingerprint());
        for t in catalog.terms() {
            s.terms.insert(t.id, TermCounts::default());
        }
        s
    }

    pub fn empty(fingerprint: impl Into<String>) -> Self {
        CorpusStats {
            fingerprint: fingerprint.into(),
            total_docs: 0,
            total_sentences: 0,
            terms: HashMap::new(),
            pairs: HashMap::new(),
        }
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn counts(&self, t: TermId) -> TermCounts {
        self.terms.get(&t).copied().unwrap_or_default()
    }

    pub fn has_term(&self, t: TermId) -> bool {
        self.terms.contains_key(&t)
    }

    pub fn doc_freq(&self, t: TermId) -> u64 {
        self.counts(t).doc_freq
    }

    pub fn term_freq(&self, t: TermId) -> u64 {
        self.counts(t).term_freq
    }

    pub fn sent_freq(&self, t: TermId) -> u64 {
        self.counts(t).sent_freq
    }

    /// Sentences containing both terms. Symmetric; zero for `a == b`.
    pub fn sent_cooc(&self, a: TermId, b: TermId) -> u64 {
        if a == b {
            return 0;
        }
        self.pairs.get(&pair_key(a, b)).copied().unwrap_or(0)
    }

    pub fn term_ids(&self) -> impl Iterator<Item = TermId> + '_ {
        self.terms.keys().copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = ((TermId, TermId), u64)> + '_ {
        self.pairs.iter().map(|(&k, &v)| (k, v))
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// Co-occurring partners of `t` with their counts, by scanning all pairs.
    pub fn partners(&self, t: TermId) -> Vec<(TermId, u64)> {
        let mut out: Vec<(TermId, u64)> = self
            .pairs
            .iter()
            .filter_map(|(&(a, b), &n)| match (a == t, b == t) {
                (true, _) => Some((b, n)),
                (_, true) => Some((a, n)),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Partner lists for every term at once.
    pub fn adjacency(&self) -> HashMap<TermId, Vec<(TermId, u64)>> {
        let mut adj: HashMap<TermId, Vec<(TermId, u64)>> = HashMap::new();
        for (&(a, b), &n) in &self.pairs {
            adj.entry(a).or_default().push((b, n));
            adj.entry(b).or_default().push((a, n));
        }
        for v in adj.values_mut() {
            v.sort_unstable();
        }
        adj
    }

    /// Count one document given the occurrences found in each of its
    /// sentences (including sentences with no occurrence).
    pub fn accumulate_document(&mut self, sentences: &[Vec<Occurrence>]) {
        self.total_docs += 1;
        let mut in_doc: Vec<TermId> = Vec::new();
        let mut distinct: Vec<TermId> = Vec::new();
        for occ in sentences {
            self.total_sentences += 1;
            distinct.clear();
            for &(t, _) in occ {
                self.terms.entry(t).or_default().term_freq += 1;
                distinct.push(t);
            }
            distinct.sort_unstable();
            distinct.dedup();
            for (i, &a) in distinct.iter().enumerate() {
                self.terms.entry(a).or_default().sent_freq += 1;
                for &b in &distinct[i + 1..] {
                    *self.pairs.entry((a, b)).or_default() += 1;
                }
            }
            in_doc.extend_from_slice(&distinct);
        }
        in_doc.sort_unstable();
        in_doc.dedup();
        for t in in_doc {
            self.terms.entry(t).or_default().doc_freq += 1;
        }
    }

    /// Pointwise sum. Both sides must come from the same catalog.
    pub fn merge(mut self, other: CorpusStats) -> Result<CorpusStats> {
        self.merge_from(other)?;
        Ok(self)
    }

    pub fn merge_from(&mut self, other: CorpusStats) -> Result<()> {
        if self.fingerprint != other.fingerprint {
            return Err(Error::Fingerprint {
                left: self.fingerprint.clone(),
                right: other.fingerprint,
            });
        }
        self.total_docs += other.total_docs;
        self.total_sentences += other.total_sentences;
        for (t, c) in other.terms {
            let e = self.terms.entry(t).or_default();
            e.doc_freq += c.doc_freq;
            e.term_freq += c.term_freq;
            e.sent_freq += c.sent_freq;
        }
        for (k, n) in other.pairs {
            *self.pairs.entry(k).or_default() += n;
        }
        Ok(())
    }

    /// Check the count invariants; any failure means a bug or a forged file.
    pub fn check_invariants(&self) -> Result<()> {
        for (t, c) in &self.terms {
            if c.doc_freq > self.total_docs {
                return Err(Error::Invariant(format!("doc_freq[{t}] > total_docs")));
            }
            if c.sent_freq > self.total_sentences {
                return Err(Error::Invariant(format!("sent_freq[{t}] > total_sentences")));
            }
            if c.sent_freq > 0 && c.doc_freq == 0 {
                return Err(Error::Invariant(format!(
                    "term {t} seen in a sentence but in no document"
                )));
            }
            if c.sent_freq > c.term_freq {
                return Err(Error::Invariant(format!("sent_freq[{t}] > term_freq")));
            }
        }
        for (&(a, b), &n) in &self.pairs {
            if a >= b || n == 0 {
                return Err(Error::Invariant(format!("bad pair entry ({a}, {b}) = {n}")));
            }
            if n > self.sent_freq(a).min(self.sent_freq(b)) {
                return Err(Error::Invariant(format!(
                    "sent_cooc({a}, {b}) exceeds a sentence frequency"
                )));
            }
        }
        Ok(())
    }

    /// Serialize to the versioned TSV format. Output is fully sorted, so
    /// equal stats always serialize to identical bytes.
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "#version\t{STATS_VERSION}");
        let _ = writeln!(s, "#catalog-fingerprint\t{}", self.fingerprint);
        let _ = writeln!(s, "#total_docs\t{}", self.total_docs);
        let _ = writeln!(s, "#total_sentences\t{}", self.total_sentences);
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_unstable_by_key(|(t, _)| **t);
        for (t, c) in terms {
            let _ = writeln!(s, "T\t{t}\t{}\t{}\t{}", c.doc_freq, c.term_freq, c.sent_freq);
        }
        let mut pairs: Vec<_> = self.pairs.iter().collect();
        pairs.sort_unstable();
        for ((a, b), n) in pairs {
            let _ = writeln!(s, "P\t{a}\t{b}\t{n}");
        }
        let digest = checksum(s.as_bytes());
        let _ = writeln!(s, "#checksum\t{digest}");
        s
    }

    /// Parse the TSV format. Any structural problem, a version mismatch or a
    /// checksum failure is an error; partial stats are never returned.
    pub fn from_tsv(text: &str) -> Result<CorpusStats> {
        let body_end = text
            .rfind("#checksum\t")
            .filter(|&i| i == 0 || text.as_bytes()[i - 1] == b'\n')
            .ok_or_else(|| Error::Input("stats file is truncated (no checksum line)".into()))?;
        let (body, tail) = text.split_at(body_end);
        let stored = tail["#checksum\t".len()..].trim_end_matches('\n');
        if stored.contains('\n') {
            return Err(Error::Input("stats file has content after the checksum line".into()));
        }
        let computed = checksum(body.as_bytes());
        if stored != computed {
            return Err(Error::Checksum {
                stored: stored.to_owned(),
                computed,
            });
        }

        let mut lines = body.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut header = |key: &str| -> Result<String> {
            let (n, line) = lines
                .next()
                .ok_or_else(|| Error::format(0, format!("missing #{key} header")))?;
            line.strip_prefix('#')
                .and_then(|l| l.strip_prefix(key))
                .and_then(|l| l.strip_prefix('\t'))
                .map(str::to_owned)
                .ok_or_else(|| Error::format(n, format!("expected #{key} header")))
        };
        let version = header("version")?;
        if version != STATS_VERSION.to_string() {
            return Err(Error::Version {
                found: version,
                expected: STATS_VERSION,
            });
        }
        let fingerprint = header("catalog-fingerprint")?;
        let total_docs = parse_count(&header("total_docs")?, 3)?;
        let total_sentences = parse_count(&header("total_sentences")?, 4)?;
        let mut stats = CorpusStats::empty(fingerprint);
        stats.total_docs = total_docs;
        stats.total_sentences = total_sentences;
        let mut in_pairs = false;
        for (n, line) in lines {
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.as_slice() {
                ["T", id, df, tf, sf] if !in_pairs => {
                    let id = TermId(parse_id(id, n)?);
                    let c = TermCounts {
                        doc_freq: parse_count(df, n)?,
                        term_freq: parse_count(tf, n)?,
                        sent_freq: parse_count(sf, n)?,
                    };
                    if stats.terms.insert(id, c).is_some() {
                        return Err(Error::format(n, format!("duplicate term row {id}")));
                    }
                }
                ["P", a, b, count] => {
                    in_pairs = true;
                    let a = TermId(parse_id(a, n)?);
                    let b = TermId(parse_id(b, n)?);
                    if a >= b {
                        return Err(Error::format(n, "pair ids must satisfy id_i < id_j"));
                    }
                    let count = parse_count(count, n)?;
                    if count == 0 {
                        return Err(Error::format(n, "zero pair count"));
                    }
                    if stats.pairs.insert((a, b), count).is_some() {
                        return Err(Error::format(n, format!("duplicate pair row ({a}, {b})")));
                    }
                }
                _ => return Err(Error::format(n, format!("unexpected stats line {line:?}"))),
            }
        }
        stats
            .check_invariants()
            .map_err(|e| Error::Input(format!("stats file is inconsistent: {e}")))?;
        Ok(stats)
    }
}

fn checksum(bytes: &[u8]) -> String {
    hex_prefix(&Sha256::digest(bytes), 32)
}

fn parse_count(s: &str, line: usize) -> Result<u64> {
    s.parse().map_err(|_| Error::format(line, format!("bad count {s:?}")))
}

fn parse_id(s: &str, line: usize) -> Result<u32> {
    s.parse().map_err(|_| Error::format(line, format!("bad term id {s:?}")))
}

pub fn save_stats(stats: &CorpusStats, path: &Path) -> Result<()> {
    std::fs::write(path, stats.to_tsv()).map_err(|e| Error::io(path, e))
}

pub fn load_stats(path: &Path) -> Result<CorpusStats> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    CorpusStats::from_tsv(&text).map_err(|e| match e {
        Error::Format { line, message } => Error::Input(format!("{}:{line}: {message}", path.display())),
        other => other,
    })
}
