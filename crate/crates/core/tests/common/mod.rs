//! Independent oracles and fixture generators shared by the integration tests.
//!
//! Nothing in here calls the code path it is used to check: matching is a
//! naive slice scan, counting is a direct recount, subterm pairs come from an
//! all-pairs loop and cycles from a transitive closure.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use hyperex::catalog::{parse_terms, TermCatalog, TermId};
use hyperex::normalize::{normalize_tokens, NormalizedSentence, StopwordSet};
use hyperex::CorpusStats;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every (term, start) where the term's normalized tokens appear verbatim.
pub fn naive_occurrences(sentence: &[String], catalog: &TermCatalog) -> Vec<(TermId, usize)> {
    let mut out = Vec::new();
    for t in catalog.terms() {
        let pat = &t.norm_tokens.tokens;
        if pat.is_empty() || pat.iter().all(|p| p == "_") || pat.len() > sentence.len() {
            continue;
        }
        for start in 0..=sentence.len() - pat.len() {
            if sentence[start..start + pat.len()] == pat[..] {
                out.push((t.id, start));
            }
        }
    }
    out.sort();
    out
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct BruteStats {
    pub total_docs: u64,
    pub total_sentences: u64,
    pub doc_freq: BTreeMap<TermId, u64>,
    pub term_freq: BTreeMap<TermId, u64>,
    pub sent_freq: BTreeMap<TermId, u64>,
    pub sent_cooc: BTreeMap<(TermId, TermId), u64>,
}

/// Direct recount over documents of normalized sentences.
pub fn brute_stats(docs: &[Vec<Vec<String>>], catalog: &TermCatalog) -> BruteStats {
    let mut b = BruteStats::default();
    let ids: Vec<TermId> = catalog.terms().iter().map(|t| t.id).collect();
    for doc in docs {
        b.total_docs += 1;
        let mut in_doc: BTreeSet<TermId> = BTreeSet::new();
        for sentence in doc {
            b.total_sentences += 1;
            let occ = naive_occurrences(sentence, catalog);
            let mut present: BTreeSet<TermId> = BTreeSet::new();
            for (t, _) in &occ {
                *b.term_freq.entry(*t).or_default() += 1;
                present.insert(*t);
            }
            for &i in &ids {
                for &j in &ids {
                    if i < j && present.contains(&i) && present.contains(&j) {
                        *b.sent_cooc.entry((i, j)).or_default() += 1;
                    }
                }
            }
            for t in &present {
                *b.sent_freq.entry(*t).or_default() += 1;
            }
            in_doc.extend(present);
        }
        for t in in_doc {
            *b.doc_freq.entry(t).or_default() += 1;
        }
    }
    b
}

/// Compare every field; returns a description of the first mismatch.
pub fn compare_stats(s: &CorpusStats, b: &BruteStats, catalog: &TermCatalog) -> Result<(), String> {
    if s.total_docs != b.total_docs {
        return Err(format!("total_docs {} vs {}", s.total_docs, b.total_docs));
    }
    if s.total_sentences != b.total_sentences {
        return Err(format!(
            "total_sentences {} vs {}",
            s.total_sentences, b.total_sentences
        ));
    }
    let get = |m: &BTreeMap<TermId, u64>, t| m.get(&t).copied().unwrap_or(0);
    for t in catalog.terms() {
        let id = t.id;
        let got = (s.doc_freq(id), s.term_freq(id), s.sent_freq(id));
        let want = (get(&b.doc_freq, id), get(&b.term_freq, id), get(&b.sent_freq, id));
        if got != want {
            return Err(format!("term {id}: (df, tf, sf) {got:?} vs {want:?}"));
        }
        for u in catalog.terms() {
            let want = if id < u.id {
                b.sent_cooc.get(&(id, u.id)).copied().unwrap_or(0)
            } else {
                b.sent_cooc.get(&(u.id, id)).copied().unwrap_or(0)
            };
            if s.sent_cooc(id, u.id) != want {
                return Err(format!("cooc({id}, {}) {} vs {want}", u.id, s.sent_cooc(id, u.id)));
            }
        }
    }
    if s.pair_count() != b.sent_cooc.len() {
        return Err(format!("pair count {} vs {}", s.pair_count(), b.sent_cooc.len()));
    }
    Ok(())
}

/// A random catalog and corpus over a small vocabulary.
pub struct MiniCorpus {
    pub catalog: TermCatalog,
    /// Documents of normalized sentences.
    pub docs: Vec<Vec<Vec<String>>>,
}

const WORDS: &[&str] = &[
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "theta", "kappa", "lambda", "sigma", "omega", "river",
    "stone", "forest", "engine", "signal", "garden", "market", "bridge", "harbor", "tower", "meadow", "of", "the",
    "and", "in", "rivers", "stones", "signals", "gardens",
];

pub fn mini_corpus(seed: u64, max_docs: usize, max_terms: usize) -> MiniCorpus {
    let mut r = rng(seed);
    let alphabet = r.random_range(4..=WORDS.len());
    let words = &WORDS[..alphabet];
    let n_terms = r.random_range(1..=max_terms);
    let mut surfaces: BTreeSet<String> = BTreeSet::new();
    for _ in 0..n_terms * 3 {
        if surfaces.len() >= n_terms {
            break;
        }
        let len = r.random_range(1..=3);
        let s: Vec<&str> = (0..len).map(|_| words[r.random_range(0..words.len())]).collect();
        surfaces.insert(s.join(" "));
    }
    let text: String = surfaces.iter().map(|s| format!("{s}\n")).collect();
    let stops = StopwordSet::smart();
    let catalog = parse_terms(&text, "mini", "root", &stops).unwrap().catalog;
    let n_docs = r.random_range(0..=max_docs);
    let docs = (0..n_docs)
        .map(|_| {
            let n_sent = r.random_range(0..=6);
            (0..n_sent)
                .map(|_| {
                    let len = r.random_range(1..=12);
                    let toks: Vec<String> = (0..len)
                        .map(|_| words[r.random_range(0..words.len())].to_string())
                        .collect();
                    let n = normalize_tokens(&toks, &stops);
                    if n.is_empty() {
                        vec!["_".to_string()]
                    } else {
                        n.tokens
                    }
                })
                .collect()
        })
        .collect();
    MiniCorpus { catalog, docs }
}

/// Stats for a slice of documents through the public accumulation path.
pub fn stats_for(docs: &[Vec<Vec<String>>], catalog: &TermCatalog) -> CorpusStats {
    let m = hyperex::TermMatcher::new(catalog).unwrap();
    let mut s = CorpusStats::new(catalog);
    for d in docs {
        let occ: Vec<_> = d
            .iter()
            .map(|sent| m.find_occurrences(&NormalizedSentence::new(sent.clone())))
            .collect();
        s.accumulate_document(&occ);
    }
    s
}

/// Cyclic strongly connected components by transitive closure: u and v share
/// a component iff each reaches the other.
pub fn closure_cycles(n: usize, edges: &[(u32, u32)]) -> Vec<Vec<u32>> {
    let mut reach = vec![vec![false; n]; n];
    for &(a, b) in edges {
        reach[a as usize][b as usize] = true;
    }
    for k in 0..n {
        let via = reach[k].clone();
        for row in reach.iter_mut() {
            if row[k] {
                for (cell, &r) in row.iter_mut().zip(&via) {
                    *cell |= r;
                }
            }
        }
    }
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for u in 0..n {
        if assigned[u] || !reach[u][u] {
            continue;
        }
        let comp: Vec<u32> = (0..n)
            .filter(|&v| reach[u][v] && reach[v][u])
            .map(|v| v as u32)
            .collect();
        for &v in &comp {
            assigned[v as usize] = true;
        }
        out.push(comp);
    }
    out.sort();
    out
}

/// Random DAG (edges go from lower to higher rank in a random order), plus
/// optional planted back edges and 2-cycles.
pub fn random_graph(seed: u64, max_nodes: usize) -> (usize, Vec<(u32, u32)>) {
    let mut r = rng(seed);
    let n = r.random_range(1..=max_nodes);
    let mut order: Vec<u32> = (0..n as u32).collect();
    for i in (1..n).rev() {
        let j = r.random_range(0..=i);
        order.swap(i, j);
    }
    let density = r.random_range(0.0..0.15);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if r.random_bool(density) {
                edges.push((order[i], order[j]));
            }
        }
    }
    match seed % 4 {
        1 if !edges.is_empty() => {
            let (a, b) = edges[r.random_range(0..edges.len())];
            edges.push((b, a));
        }
        2 if n >= 2 => {
            let a = r.random_range(0..n) as u32;
            let b = (a + 1 + r.random_range(0..n as u32 - 1)) % n as u32;
            edges.push((a, b));
            edges.push((b, a));
        }
        3 if n >= 3 => {
            let i = r.random_range(0..n - 2);
            let j = r.random_range(i + 2..n);
            edges.push((order[j], order[i]));
        }
        _ => {}
    }
    (n, edges)
}

/// All-pairs subterm oracle over surfaces: (hypo, hyper, is_suffix).
pub fn brute_subterms(
    catalog: &TermCatalog,
    connector_len: usize,
    token_boundary: bool,
) -> Vec<(TermId, TermId, bool)> {
    let mut out = Vec::new();
    for a in catalog.terms() {
        for b in catalog.terms() {
            if a.id == b.id {
                continue;
            }
            let suffix = a.surface.len() > b.surface.len()
                && a.surface.ends_with(&b.surface)
                && (!token_boundary || a.surface[..a.surface.len() - b.surface.len()].ends_with(' '));
            let (at, bt) = (&a.surface_tokens, &b.surface_tokens);
            let prefix = at.len() > bt.len()
                && at.iter().zip(bt.iter()).all(|(x, y)| x == y)
                && at[bt.len()].chars().count() == connector_len;
            if suffix || prefix {
                out.push((a.id, b.id, suffix));
            }
        }
    }
    out.sort();
    out
}

/// Stats with injected counts, for selection tests.
pub fn injected_stats(catalog: &TermCatalog, doc_freq: &[(&str, u64)], cooc: &[(&str, &str, u64)]) -> CorpusStats {
    let id = |s: &str| catalog.by_surface(s).unwrap_or_else(|| panic!("no term {s}")).id;
    let df: HashMap<TermId, u64> = doc_freq.iter().map(|&(s, d)| (id(s), d)).collect();
    let max_df = df.values().copied().max().unwrap_or(0);
    // One document per unit of the largest doc frequency; term t appears in
    // the first df[t] of them. Co-occurrences are laid into those same
    // documents, which have room because cooc <= min df in every fixture.
    let mut docs: Vec<Vec<Vec<(TermId, usize)>>> = (0..max_df).map(|_| Vec::new()).collect();
    for &(a, b, n) in cooc {
        let (a, b) = (id(a), id(b));
        let room = df[&a].min(df[&b]);
        assert!(n <= room, "fixture cooc exceeds doc frequency");
        for doc in docs.iter_mut().take(n as usize) {
            doc.push(vec![(a, 0), (b, 1)]);
        }
    }
    for (&t, &d) in &df {
        for doc in docs.iter_mut().take(d as usize) {
            doc.push(vec![(t, 0)]);
        }
    }
    let mut s = CorpusStats::new(catalog);
    for d in docs {
        s.accumulate_document(&d);
    }
    s
}
