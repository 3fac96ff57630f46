//! Domain term lists: loading, normalization, stable ids and the root term.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::tokenize;
use crate::normalize::{hex_prefix, normalize_tokens, NormalizedSentence, StopwordSet, NORMALIZATION_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(pub u32);

impl fmt::Display for TermId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub id: TermId,
    /// Lowercased surface form.
    pub surface: String,
    pub surface_tokens: Vec<String>,
    pub norm_tokens: NormalizedSentence,
}

impl Term {
    /// A term whose normalized form is empty or only placeholders cannot be
    /// found in the corpus. It still takes part in the subterm heuristics.
    pub fn is_matchable(&self) -> bool {
        !self.norm_tokens.is_empty() && !self.norm_tokens.is_all_placeholder()
    }
}

/// Tokenize, mask and stem a term surface exactly as corpus text is.
pub fn normalize_term(surface: &str, stops: &StopwordSet) -> (Vec<String>, NormalizedSentence) {
    let surface_tokens = tokenize(surface);
    let norm = normalize_tokens(&surface_tokens, stops);
    (surface_tokens, norm)
}

#[derive(Debug, Clone)]
pub struct TermCatalog {
    domain: String,
    terms: Vec<Term>,
    root: TermId,
    by_id: HashMap<TermId, usize>,
    by_surface: HashMap<String, usize>,
    /// Fingerprint of the stopword list used for normalization.
    stopwords: String,
}

/// A duplicate surface dropped while loading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Duplicate {
    pub line: usize,
    pub first_line: usize,
    pub surface: String,
}

#[derive(Debug, Clone)]
pub struct LoadedCatalog {
    pub catalog: TermCatalog,
    pub duplicates: Vec<Duplicate>,
    /// Whether the root was missing from the list and had to be added.
    pub root_added: bool,
}

/// Parse a term list. Each non-blank line is `id<TAB>term` or a bare `term`;
/// bare terms get the line's 0-based position among term lines as id.
pub fn parse_terms(text: &str, domain: &str, root: &str, stops: &StopwordSet) -> Result<LoadedCatalog> {
    let root = root.trim().to_lowercase();
    if root.is_empty() {
        return Err(Error::Input("root term must not be empty".into()));
    }
    let mut entries: Vec<(Option<u32>, String, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (id, surface) = match line.split_once('\t') {
            Some((id, term)) => {
                let id: u32 = id
                    .trim()
                    .parse()
                    .map_err(|_| Error::format(line_no, format!("bad term id {id:?}")))?;
                (Some(id), term)
            }
            None => (None, line),
        };
        let surface = surface.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
        if surface.is_empty() {
            return Err(Error::format(line_no, "empty term"));
        }
        entries.push((id, surface, line_no));
    }
    if entries.is_empty() {
        return Err(Error::Input("no terms".into()));
    }

    let mut terms = Vec::with_capacity(entries.len() + 1);
    let mut by_surface: HashMap<String, usize> = HashMap::new();
    let mut first_line: HashMap<String, usize> = HashMap::new();
    let mut by_id: HashMap<TermId, usize> = HashMap::new();
    let mut duplicates = Vec::new();
    for (pos, (id, surface, line)) in entries.into_iter().enumerate() {
        if let Some(&first) = first_line.get(&surface) {
            log::warn!("line {line}: duplicate term {surface:?} (first on line {first}), dropped");
            duplicates.push(Duplicate {
                line,
                first_line: first,
                surface,
            });
            continue;
        }
        let id = TermId(id.unwrap_or(pos as u32));
        if by_id.contains_key(&id) {
            return Err(Error::format(line, format!("duplicate term id {id}")));
        }
        let (surface_tokens, norm_tokens) = normalize_term(&surface, stops);
        first_line.insert(surface.clone(), line);
        by_surface.insert(surface.clone(), terms.len());
        by_id.insert(id, terms.len());
        terms.push(Term {
            id,
            surface,
            surface_tokens,
            norm_tokens,
        });
    }

    let root_added = !by_surface.contains_key(&root);
    if root_added {
        let id = TermId(by_id.keys().map(|i| i.0 + 1).max().unwrap_or(0));
        let (surface_tokens, norm_tokens) = normalize_term(&root, stops);
        by_surface.insert(root.clone(), terms.len());
        by_id.insert(id, terms.len());
        terms.push(Term {
            id,
            surface: root.clone(),
            surface_tokens,
            norm_tokens,
        });
    }
    let root_id = terms[by_surface[&root]].id;
    Ok(LoadedCatalog {
        catalog: TermCatalog {
            domain: domain.to_owned(),
            terms,
            root: root_id,
            by_id,
            by_surface,
            stopwords: stops.fingerprint(),
        },
        duplicates,
        root_added,
    })
}

/// Load a term file. See [`parse_terms`] for the format.
pub fn load_terms(path: &Path, domain: &str, root: &str, stops: &StopwordSet) -> Result<LoadedCatalog> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_terms(&text, domain, root, stops).map_err(|e| match e {
        Error::Input(m) if m == "no terms" => Error::NoTerms(path.to_path_buf()),
        Error::Format { line, message } => Error::Input(format!("{}:{line}: {message}", path.display())),
        other => other,
    })
}

impl TermCatalog {
    pub fn domain(&self) -> &str {
        &self.domain
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn root_id(&self) -> TermId {
        self.root
    }

    pub fn root(&self) -> &Term {
        self.get(self.root).expect("root is always in the catalog")
    }

    pub fn get(&self, id: TermId) -> Option<&Term> {
        self.by_id.get(&id).map(|&i| &self.terms[i])
    }

    pub fn surface(&self, id: TermId) -> &str {
        self.get(id).map_or("", |t| t.surface.as_str())
    }

    pub fn by_surface(&self, surface: &str) -> Option<&Term> {
        self.by_surface.get(&surface.to_lowercase()).map(|&i| &self.terms[i])
    }

    pub fn stopwords_fingerprint(&self) -> &str {
        &self.stopwords
    }

    /// Digest of every term id and its normalized form. Stats computed
    /// against one catalog are only meaningful for catalogs with the same
    /// fingerprint.
    pub fn fingerprint(&self) -> String {
        let mut rows: Vec<(TermId, String)> = self.terms.iter().map(|t| (t.id, t.norm_tokens.to_string())).collect();
        rows.sort();
        let mut h = Sha256::new();
        h.update(NORMALIZATION_VERSION.to_le_bytes());
        h.update(self.stopwords.as_bytes());
        for (id, norm) in rows {
            h.update(id.0.to_le_bytes());
            h.update(norm.as_bytes());
            h.update([0u8]);
        }
        hex_prefix(&h.finalize(), 8)
    }
}
