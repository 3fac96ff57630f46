//! Scoring a produced taxonomy against a gold standard, and cycle detection.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::catalog::TermId;
use crate::error::{Error, Result};
use crate::select::{LabeledPair, Provenance, Taxonomy};

/// Reference (hyponym, hypernym) pairs, lowercased.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldStandard {
    pairs: BTreeSet<(String, String)>,
}

impl GoldStandard {
    pub fn from_pairs<I, A, B>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let pairs: BTreeSet<(String, String)> = pairs
            .into_iter()
            .map(|(a, b)| (a.as_ref().trim().to_lowercase(), b.as_ref().trim().to_lowercase()))
            .filter(|(a, b)| a != b)
            .collect();
        if pairs.is_empty() {
            return Err(Error::Input("gold standard has no pairs".into()));
        }
        Ok(GoldStandard { pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, hypo: &str, hyper: &str) -> bool {
        // BTreeSet<(String, String)> cannot be probed with borrowed strs.
        self.pairs.contains(&(hypo.to_owned(), hyper.to_owned()))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.pairs.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }
}

/// A skipped gold line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldWarning {
    pub line: usize,
    pub message: String,
}

/// Parse `hyponym<TAB>hypernym` lines. A leading numeric id column is also
/// accepted. Blank lines are ignored; malformed lines and self-loops are
/// skipped with a warning.
pub fn parse_gold(text: &str) -> Result<(GoldStandard, Vec<GoldWarning>)> {
    let mut warnings = Vec::new();
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').map(str::trim).collect();
        let (hypo, hyper) = match f.as_slice() {
            [a, b] => (*a, *b),
            [id, a, b] if id.parse::<u64>().is_ok() => (*a, *b),
            _ => {
                warnings.push(GoldWarning {
                    line: i + 1,
                    message: "expected hyponym<TAB>hypernym".into(),
                });
                continue;
            }
        };
        if hypo.is_empty() || hyper.is_empty() {
            warnings.push(GoldWarning {
                line: i + 1,
                message: "empty term".into(),
            });
            continue;
        }
        if hypo.to_lowercase() == hyper.to_lowercase() {
            warnings.push(GoldWarning {
                line: i + 1,
                message: "self-loop".into(),
            });
            continue;
        }
        pairs.push((hypo, hyper));
    }
    let gold = GoldStandard::from_pairs(pairs)?;
    Ok((gold, warnings))
}

pub fn load_gold(path: &Path) -> Result<GoldStandard> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let (gold, warnings) = parse_gold(&text).map_err(|_| Error::EmptyGold(path.to_path_buf()))?;
    for w in warnings {
        log::warn!("{}:{}: {}, line skipped", path.display(), w.line, w.message);
    }
    Ok(gold)
}

/// `found` out of `total`, kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Recall {
    pub found: usize,
    pub total: usize,
}

impl Recall {
    pub fn exact(self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.found as f64 / self.total as f64
        }
    }

    /// Percentage rounded half up, in integer arithmetic.
    pub fn percent(self) -> u64 {
        if self.total == 0 {
            return 0;
        }
        let (f, t) = (self.found as u64, self.total as u64);
        (200 * f + t) / (2 * t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub gold_size: usize,
    /// Pairs produced per technique. A pair found by two techniques counts for both.
    pub produced: BTreeMap<Provenance, usize>,
    pub produced_total: usize,
    pub found: BTreeMap<Provenance, usize>,
    pub union_found: usize,
    /// Cycles in the produced pair graph, as lists of surfaces.
    pub cycles: Vec<Vec<String>>,
}

impl EvalReport {
    pub fn recall(&self, p: Provenance) -> Recall {
        Recall {
            found: self.found.get(&p).copied().unwrap_or(0),
            total: self.gold_size,
        }
    }

    pub fn union_recall(&self) -> Recall {
        Recall {
            found: self.union_found,
            total: self.gold_size,
        }
    }

    /// Produced counts, gold hits and recall percentages as aligned tables.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "Pairs produced");
        let _ = writeln!(s, "{:<10}{:>8}{:>8}{:>8}{:>8}", "", "suffix", "prefix", "cooc", "total");
        let _ = writeln!(
            s,
            "{:<10}{:>8}{:>8}{:>8}{:>8}",
            "produced",
            self.produced[&Provenance::Suffix],
            self.produced[&Provenance::Prefix],
            self.produced[&Provenance::Cooc],
            self.produced_total
        );
        let _ = writeln!(s);
        let _ = writeln!(s, "Gold pairs found");
        let _ = writeln!(
            s,
            "{:<10}{:>8}{:>8}{:>8}{:>8}{:>8}",
            "", "suffix", "prefix", "cooc", "union", "gold"
        );
        let _ = writeln!(
            s,
            "{:<10}{:>8}{:>8}{:>8}{:>8}{:>8}",
            "found",
            self.found[&Provenance::Suffix],
            self.found[&Provenance::Prefix],
            self.found[&Provenance::Cooc],
            self.union_found,
            self.gold_size
        );
        let pct = |r: Recall| format!("{}%", r.percent());
        let _ = writeln!(
            s,
            "{:<10}{:>8}{:>8}{:>8}{:>8}",
            "recall",
            pct(self.recall(Provenance::Suffix)),
            pct(self.recall(Provenance::Prefix)),
            pct(self.recall(Provenance::Cooc)),
            pct(self.union_recall())
        );
        let _ = writeln!(s);
        if self.cycles.is_empty() {
            let _ = writeln!(s, "No cycles.");
        } else {
            let _ = writeln!(s, "{} cycle(s):", self.cycles.len());
            for c in &self.cycles {
                let _ = writeln!(s, "  {}", c.join(" | "));
            }
        }
        s
    }

    /// Machine-readable form with exact recall values.
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "#gold_size\t{}", self.gold_size);
        let _ = writeln!(s, "#produced_total\t{}", self.produced_total);
        let _ = writeln!(s, "technique\tproduced\tfound\trecall_pct\trecall_exact");
        for p in Provenance::ALL {
            let r = self.recall(p);
            let _ = writeln!(
                s,
                "{p}\t{}\t{}\t{}\t{:.6}",
                self.produced[&p],
                r.found,
                r.percent(),
                r.exact()
            );
        }
        let r = self.union_recall();
        let _ = writeln!(
            s,
            "union\t{}\t{}\t{}\t{:.6}",
            self.produced_total,
            r.found,
            r.percent(),
            r.exact()
        );
        for c in &self.cycles {
            let _ = writeln!(s, "cycle\t{}\t{}", c.len(), c.join(" | "));
        }
        s
    }
}

/// Count gold hits per technique and overall. Pairs without provenance only
/// count towards the union.
pub fn score(pairs: &[LabeledPair], gold: &GoldStandard) -> EvalReport {
    let mut produced: BTreeMap<Provenance, HashSet<(&str, &str)>> =
        Provenance::ALL.iter().map(|&p| (p, HashSet::new())).collect();
    let mut all: HashSet<(&str, &str)> = HashSet::new();
    for p in pairs {
        let key = (p.hypo.as_str(), p.hyper.as_str());
        all.insert(key);
        if let Some(ps) = p.provenance {
            for pr in ps.iter() {
                produced.get_mut(&pr).expect("all techniques present").insert(key);
            }
        }
    }
    let found: BTreeMap<Provenance, usize> = produced
        .iter()
        .map(|(&p, set)| (p, set.iter().filter(|(a, b)| gold.contains(a, b)).count()))
        .collect();
    let union_found = all.iter().filter(|(a, b)| gold.contains(a, b)).count();
    EvalReport {
        gold_size: gold.len(),
        produced: produced.iter().map(|(&p, s)| (p, s.len())).collect(),
        produced_total: all.len(),
        found,
        union_found,
        cycles: surface_cycles(pairs),
    }
}

/// Cycles among labeled pairs, each as sorted surfaces.
pub fn surface_cycles(pairs: &[LabeledPair]) -> Vec<Vec<String>> {
    let mut ids: HashMap<&str, u32> = HashMap::new();
    let mut names: Vec<&str> = Vec::new();
    let mut edges = Vec::with_capacity(pairs.len());
    for p in pairs {
        let a = intern(&p.hypo, &mut ids, &mut names);
        let b = intern(&p.hyper, &mut ids, &mut names);
        edges.push((a, b));
    }
    let mut out: Vec<Vec<String>> = strongly_connected_cycles(names.len(), &edges)
        .into_iter()
        .map(|c| {
            let mut v: Vec<String> = c.into_iter().map(|i| names[i as usize].to_owned()).collect();
            v.sort();
            v
        })
        .collect();
    out.sort();
    out
}

fn intern<'a>(s: &'a str, ids: &mut HashMap<&'a str, u32>, names: &mut Vec<&'a str>) -> u32 {
    *ids.entry(s).or_insert_with(|| {
        names.push(s);
        names.len() as u32 - 1
    })
}

/// Cycles of a taxonomy as sorted term-id lists.
pub fn detect_cycles(taxo: &Taxonomy) -> Vec<Vec<TermId>> {
    let mut index: HashMap<TermId, u32> = HashMap::new();
    let mut back: Vec<TermId> = Vec::new();
    let mut edges = Vec::with_capacity(taxo.len());
    for (a, b) in taxo.edges() {
        let mut id = |t: TermId| {
            *index.entry(t).or_insert_with(|| {
                back.push(t);
                back.len() as u32 - 1
            })
        };
        let ia = id(a);
        let ib = id(b);
        edges.push((ia, ib));
    }
    let mut out: Vec<Vec<TermId>> = strongly_connected_cycles(back.len(), &edges)
        .into_iter()
        .map(|c| {
            let mut v: Vec<TermId> = c.into_iter().map(|i| back[i as usize]).collect();
            v.sort();
            v
        })
        .collect();
    out.sort();
    out
}

/// Strongly connected components that contain a cycle: every component of
/// two or more nodes, plus single nodes with a self-edge. Iterative Tarjan.
pub fn strongly_connected_cycles(n: usize, edges: &[(u32, u32)]) -> Vec<Vec<u32>> {
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut self_loop = vec![false; n];
    for &(a, b) in edges {
        adj[a as usize].push(b);
        if a == b {
            self_loop[a as usize] = true;
        }
    }
    const UNSEEN: u32 = u32::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next_index = 0u32;
    let mut out = Vec::new();
    // (node, next edge to explore)
    let mut work: Vec<(u32, usize)> = Vec::new();

    for start in 0..n as u32 {
        if index[start as usize] != UNSEEN {
            continue;
        }
        work.push((start, 0));
        while let Some(&mut (v, ref mut ei)) = work.last_mut() {
            let vu = v as usize;
            if *ei == 0 && index[vu] == UNSEEN {
                index[vu] = next_index;
                low[vu] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[vu] = true;
            }
            if let Some(&w) = adj[vu].get(*ei) {
                *ei += 1;
                let wu = w as usize;
                if index[wu] == UNSEEN {
                    work.push((w, 0));
                } else if on_stack[wu] {
                    low[vu] = low[vu].min(index[wu]);
                }
                continue;
            }
            work.pop();
            if let Some(&(parent, _)) = work.last() {
                let pu = parent as usize;
                low[pu] = low[pu].min(low[vu]);
            }
            if low[vu] == index[vu] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w as usize] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                if comp.len() >= 2 || self_loop[vu] {
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
    }
    out.sort();
    out
}
