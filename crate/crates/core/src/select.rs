//! Co-occurrence hypernym selection and taxonomy assembly.
//!
//! A term's candidate hypernyms are the terms it shares at least one sentence
//! with that occur in strictly more documents than it does. The `k` candidates
//! with the highest document frequency are kept.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::catalog::{TermCatalog, TermId};
use crate::cooc::CorpusStats;
use crate::error::{Error, Result};
use crate::rules::{subterm_pairs, SubtermConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    Suffix,
    Prefix,
    Cooc,
}

impl Provenance {
    pub const ALL: [Provenance; 3] = [Provenance::Suffix, Provenance::Prefix, Provenance::Cooc];

    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Suffix => "suffix",
            Provenance::Prefix => "prefix",
            Provenance::Cooc => "cooc",
        }
    }

    fn bit(self) -> u8 {
        1 << self as u8
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "suffix" => Ok(Provenance::Suffix),
            "prefix" => Ok(Provenance::Prefix),
            "cooc" => Ok(Provenance::Cooc),
            _ => Err(format!("unknown provenance {s:?}")),
        }
    }
}

/// The techniques that produced a pair. Never empty for pairs built here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ProvenanceSet(u8);

impl ProvenanceSet {
    pub fn of(p: Provenance) -> Self {
        ProvenanceSet(p.bit())
    }

    pub fn insert(&mut self, p: Provenance) {
        self.0 |= p.bit();
    }

    pub fn contains(self, p: Provenance) -> bool {
        self.0 & p.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Provenance> {
        Provenance::ALL.into_iter().filter(move |p| self.contains(*p))
    }

    /// First technique in suffix, prefix, cooc order.
    pub fn primary(self) -> Provenance {
        self.iter().next().unwrap_or(Provenance::Cooc)
    }
}

impl fmt::Display for ProvenanceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(Provenance::as_str).collect();
        f.write_str(&names.join(","))
    }
}

impl FromStr for ProvenanceSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut set = ProvenanceSet::default();
        for part in s.split([',', '|']) {
            set.insert(part.trim().parse()?);
        }
        Ok(set)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HypernymPair {
    pub hypo: TermId,
    pub hyper: TermId,
    pub provenance: ProvenanceSet,
    /// Document frequency of the hypernym, for co-occurrence pairs.
    pub score: Option<u64>,
}

impl HypernymPair {
    pub fn subterm(hypo: TermId, hyper: TermId, p: Provenance) -> Self {
        HypernymPair {
            hypo,
            hyper,
            provenance: ProvenanceSet::of(p),
            score: None,
        }
    }

    pub fn cooc(hypo: TermId, hyper: TermId, doc_freq: u64) -> Self {
        HypernymPair {
            hypo,
            hyper,
            provenance: ProvenanceSet::of(Provenance::Cooc),
            score: Some(doc_freq),
        }
    }
}

/// Which terms the co-occurrence rule is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoocScope {
    #[default]
    All,
    /// Only terms that got no hypernym from the subterm heuristics.
    Uncovered,
}

impl FromStr for CoocScope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(CoocScope::All),
            "uncovered" => Ok(CoocScope::Uncovered),
            _ => Err(format!("unknown cooc scope {s:?} (expected all or uncovered)")),
        }
    }
}

/// Ordering of candidate hypernyms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankBy {
    /// Highest document frequency first.
    #[default]
    DocFreq,
    /// Highest sentence co-occurrence with the term first, then document frequency.
    Cooc,
}

impl FromStr for RankBy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "doc-freq" | "docfreq" | "df" => Ok(RankBy::DocFreq),
            "cooc" => Ok(RankBy::Cooc),
            _ => Err(format!("unknown ranking {s:?} (expected doc-freq or cooc)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectConfig {
    pub k: usize,
    pub cooc_scope: CoocScope,
    pub attach_orphans: bool,
    pub rank_by: RankBy,
    pub subterm: SubtermConfig,
}

impl Default for SelectConfig {
    fn default() -> Self {
        SelectConfig {
            k: 3,
            cooc_scope: CoocScope::All,
            attach_orphans: true,
            rank_by: RankBy::DocFreq,
            subterm: SubtermConfig::default(),
        }
    }
}

fn filter_candidates(t: TermId, stats: &CorpusStats, partners: &[(TermId, u64)]) -> BTreeSet<TermId> {
    let own = stats.doc_freq(t);
    partners
        .iter()
        .filter(|&&(j, n)| j != t && n > 0 && stats.doc_freq(j) > own)
        .map(|&(j, _)| j)
        .collect()
}

/// Terms sharing a sentence with `t` that appear in strictly more documents.
pub fn cand_hypernyms(t: TermId, stats: &CorpusStats) -> BTreeSet<TermId> {
    if !stats.has_term(t) {
        return BTreeSet::new();
    }
    filter_candidates(t, stats, &stats.partners(t))
}

/// Candidate hypernyms ranked per `rank_by`, ties broken by surface.
pub fn rank_candidates(
    t: TermId,
    candidates: &BTreeSet<TermId>,
    stats: &CorpusStats,
    catalog: &TermCatalog,
    rank_by: RankBy,
) -> Vec<TermId> {
    let mut v: Vec<TermId> = candidates.iter().copied().collect();
    v.sort_by(|&a, &b| {
        let by_df = stats.doc_freq(b).cmp(&stats.doc_freq(a));
        let primary = match rank_by {
            RankBy::DocFreq => by_df,
            RankBy::Cooc => stats.sent_cooc(t, b).cmp(&stats.sent_cooc(t, a)).then(by_df),
        };
        primary
            .then_with(|| catalog.surface(a).cmp(catalog.surface(b)))
            .then(a.cmp(&b))
    });
    v
}

/// The `k` best candidates by document frequency, highest first.
pub fn top_k_hypernyms(t: TermId, stats: &CorpusStats, catalog: &TermCatalog, k: usize) -> Vec<TermId> {
    let mut v = rank_candidates(t, &cand_hypernyms(t, stats), stats, catalog, RankBy::DocFreq);
    v.truncate(k);
    v
}

/// A set of hypernym pairs over a catalog. Cycles are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taxonomy {
    pub root: TermId,
    pairs: Vec<HypernymPair>,
}

impl Taxonomy {
    /// Pairs are deduplicated on (hypo, hyper), merging provenance, and
    /// self-loops are rejected.
    pub fn new(root: TermId, pairs: impl IntoIterator<Item = HypernymPair>) -> Result<Self> {
        let mut map: BTreeMap<(TermId, TermId), HypernymPair> = BTreeMap::new();
        for p in pairs {
            if p.hypo == p.hyper {
                return Err(Error::Invariant(format!("self-loop on term {}", p.hypo)));
            }
            map.entry((p.hypo, p.hyper))
                .and_modify(|e| {
                    for pr in p.provenance.iter() {
                        e.provenance.insert(pr);
                    }
                    e.score = e.score.or(p.score);
                })
                .or_insert(p);
        }
        Ok(Taxonomy {
            root,
            pairs: map.into_values().collect(),
        })
    }

    /// Sorted by (hypo id, hyper id).
    pub fn pairs(&self) -> &[HypernymPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (TermId, TermId)> + '_ {
        self.pairs.iter().map(|p| (p.hypo, p.hyper))
    }

    /// One line per pair, sorted by (hyponym surface, hypernym surface).
    pub fn to_taxo(&self, catalog: &TermCatalog, with_provenance: bool) -> String {
        let mut rows: Vec<(&str, &str, &HypernymPair)> = self
            .pairs
            .iter()
            .map(|p| (catalog.surface(p.hypo), catalog.surface(p.hyper), p))
            .collect();
        rows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut out = String::new();
        for (hypo, hyper, p) in rows {
            out.push_str(hypo);
            out.push('\t');
            out.push_str(hyper);
            if with_provenance {
                out.push('\t');
                out.push_str(&p.provenance.to_string());
                out.push('\t');
                match p.score {
                    Some(s) => out.push_str(&s.to_string()),
                    None => out.push('-'),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Subterm pairs plus the top-k co-occurrence hypernyms of each term.
pub fn build_taxonomy(catalog: &TermCatalog, stats: &CorpusStats, cfg: &SelectConfig) -> Result<Taxonomy> {
    if cfg.k == 0 {
        return Err(Error::Input("k must be at least 1".into()));
    }
    let root = catalog.root_id();
    let mut pairs: Vec<HypernymPair> = subterm_pairs(catalog, &cfg.subterm)
        .into_iter()
        .filter(|p| p.hypo != root)
        .collect();
    let covered: HashSet<TermId> = pairs.iter().map(|p| p.hypo).collect();
    let adjacency = stats.adjacency();
    let no_partners = Vec::new();
    for term in catalog.terms() {
        let t = term.id;
        if t == root || !stats.has_term(t) {
            continue;
        }
        if cfg.cooc_scope == CoocScope::Uncovered && covered.contains(&t) {
            continue;
        }
        let partners = adjacency.get(&t).unwrap_or(&no_partners);
        let candidates = filter_candidates(t, stats, partners);
        let mut ranked = rank_candidates(t, &candidates, stats, catalog, cfg.rank_by);
        ranked.truncate(cfg.k);
        pairs.extend(ranked.into_iter().map(|h| HypernymPair::cooc(t, h, stats.doc_freq(h))));
    }
    if cfg.attach_orphans {
        let with_parent: HashSet<TermId> = pairs.iter().map(|p| p.hypo).collect();
        for term in catalog.terms() {
            if term.id != root && !with_parent.contains(&term.id) {
                pairs.push(HypernymPair::cooc(term.id, root, 0));
            }
        }
    }
    Taxonomy::new(root, pairs)
}

/// A pair read back from a `.taxo` file, by surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPair {
    pub hypo: String,
    pub hyper: String,
    pub provenance: Option<ProvenanceSet>,
    pub score: Option<u64>,
}

impl LabeledPair {
    pub fn from_taxonomy(taxo: &Taxonomy, catalog: &TermCatalog) -> Vec<LabeledPair> {
        taxo.pairs()
            .iter()
            .map(|p| LabeledPair {
                hypo: catalog.surface(p.hypo).to_owned(),
                hyper: catalog.surface(p.hyper).to_owned(),
                provenance: Some(p.provenance),
                score: p.score,
            })
            .collect()
    }
}

/// Parse a `.taxo` file: `hypo<TAB>hyper[<TAB>provenance[<TAB>score]]`.
/// Surfaces are lowercased; blank lines are skipped.
pub fn parse_taxo(text: &str) -> Result<Vec<LabeledPair>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if !(2..=4).contains(&f.len()) {
            return Err(Error::format(line_no, "expected 2 to 4 tab-separated columns"));
        }
        let hypo = f[0].trim().to_lowercase();
        let hyper = f[1].trim().to_lowercase();
        if hypo.is_empty() || hyper.is_empty() {
            return Err(Error::format(line_no, "empty term"));
        }
        let provenance = match f.get(2) {
            Some(p) => Some(p.parse::<ProvenanceSet>().map_err(|e| Error::format(line_no, e))?),
            None => None,
        };
        let score = match f.get(3).map(|s| s.trim()) {
            None | Some("-") => None,
            Some(s) => Some(
                s.parse()
                    .map_err(|_| Error::format(line_no, format!("bad score {s:?}")))?,
            ),
        };
        out.push(LabeledPair {
            hypo,
            hyper,
            provenance,
            score,
        });
    }
    Ok(out)
}

/// Number of cooc pairs per hyponym, for the `k` bound check.
pub fn cooc_fanout(taxo: &Taxonomy) -> HashMap<TermId, usize> {
    let mut m = HashMap::new();
    for p in taxo.pairs().iter().filter(|p| p.provenance.contains(Provenance::Cooc)) {
        *m.entry(p.hypo).or_default() += 1;
    }
    m
}
