//! Subterm heuristics on surface forms: suffix containment, and a prefix
//! followed by a short connector word.

use std::collections::HashMap;
use std::str::FromStr;

use crate::catalog::{Term, TermCatalog, TermId};
use crate::select::{HypernymPair, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SuffixMode {
    /// Plain character suffix: "licorice" ends with "rice".
    #[default]
    Char,
    /// The suffix must also start right after a space.
    TokenBoundary,
}

impl FromStr for SuffixMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "char" => Ok(SuffixMode::Char),
            "token-boundary" | "token" => Ok(SuffixMode::TokenBoundary),
            _ => Err(format!("unknown suffix mode {s:?} (expected char or token-boundary)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubtermConfig {
    pub suffix_mode: SuffixMode,
    /// Length in characters of the token that must follow a prefix hypernym.
    pub connector_len: usize,
}

impl Default for SubtermConfig {
    fn default() -> Self {
        SubtermConfig {
            suffix_mode: SuffixMode::Char,
            connector_len: 2,
        }
    }
}

/// `hyper` is a strict suffix of `hypo`.
pub fn suffix_hypernym(hypo: &Term, hyper: &Term, cfg: &SubtermConfig) -> bool {
    is_suffix_hypernym(&hypo.surface, &hyper.surface, cfg.suffix_mode)
}

fn is_suffix_hypernym(hypo: &str, hyper: &str, mode: SuffixMode) -> bool {
    if hyper.is_empty() || hyper.len() >= hypo.len() || !hypo.ends_with(hyper) {
        return false;
    }
    match mode {
        SuffixMode::Char => true,
        SuffixMode::TokenBoundary => hypo[..hypo.len() - hyper.len()].ends_with(' '),
    }
}

/// `hypo`'s tokens start with all of `hyper`'s tokens, and the next token of
/// `hypo` is exactly `connector_len` characters long.
pub fn prefix_hypernym(hypo: &Term, hyper: &Term, cfg: &SubtermConfig) -> bool {
    let (a, b) = (&hypo.surface_tokens, &hyper.surface_tokens);
    !b.is_empty() && a.len() > b.len() && a[..b.len()] == b[..] && a[b.len()].chars().count() == cfg.connector_len
}

/// Every subterm pair of the catalog, sorted by (hypo id, hyper id).
///
/// When both heuristics hold for the same ordered pair the pair is recorded
/// once, as a suffix pair. Candidates come from surface and token-prefix
/// lookups rather than an all-pairs scan.
pub fn subterm_pairs(catalog: &TermCatalog, cfg: &SubtermConfig) -> Vec<HypernymPair> {
    let terms = catalog.terms();
    let by_surface: HashMap<&str, TermId> = terms.iter().map(|t| (t.surface.as_str(), t.id)).collect();
    let mut by_tokens: HashMap<&[String], Vec<TermId>> = HashMap::new();
    for t in terms.iter().filter(|t| !t.surface_tokens.is_empty()) {
        by_tokens.entry(t.surface_tokens.as_slice()).or_default().push(t.id);
    }

    let mut out: Vec<HypernymPair> = Vec::new();
    let mut found: Vec<(TermId, Provenance)> = Vec::new();
    for hypo in terms {
        found.clear();
        for (i, _) in hypo.surface.char_indices().skip(1) {
            let tail = &hypo.surface[i..];
            if let Some(&h) = by_surface.get(tail) {
                if is_suffix_hypernym(&hypo.surface, tail, cfg.suffix_mode) {
                    found.push((h, Provenance::Suffix));
                }
            }
        }
        let toks = &hypo.surface_tokens;
        for k in 1..toks.len() {
            if toks[k].chars().count() != cfg.connector_len {
                continue;
            }
            if let Some(ids) = by_tokens.get(&toks[..k]) {
                found.extend(ids.iter().map(|&h| (h, Provenance::Prefix)));
            }
        }
        found.retain(|&(h, _)| h != hypo.id);
        // Suffix sorts before prefix, so dedup keeps the suffix record.
        found.sort();
        found.dedup_by_key(|(h, _)| *h);
        out.extend(found.iter().map(|&(h, p)| HypernymPair::subterm(hypo.id, h, p)));
    }
    out.sort_by_key(|p| (p.hypo, p.hyper));
    out
}
