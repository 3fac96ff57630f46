//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use hyperex::catalog::parse_terms;
use hyperex::eval::{score, strongly_connected_cycles, GoldStandard};
use hyperex::ingest::tokenize;
use hyperex::normalize::{normalize_tokens, StopwordSet};
use hyperex::pipeline::{self, CatalogSpec, PipelineConfig, StatsOptions};
use hyperex::porter::stem;
use hyperex::rules::{prefix_hypernym, suffix_hypernym, SubtermConfig};
use hyperex::select::{cand_hypernyms, top_k_hypernyms, LabeledPair, Provenance, ProvenanceSet, SelectConfig};
use hyperex::CorpusStats;
use rand::RngExt;

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 subterm heuristics", Duration::from_secs(1), subterm_cases),
        (
            "2 co-occurrence selection fixture",
            Duration::from_secs(1),
            biblical_fixture,
        ),
        ("3 stats oracle equivalence", Duration::from_secs(60), stats_oracle),
        ("4 evaluation arithmetic", Duration::from_secs(5), eval_arithmetic),
        ("5 cycle detection", Duration::from_secs(10), cycle_oracle),
        ("6 normalization fidelity", Duration::from_secs(5), normalization),
        ("7 determinism and throughput", Duration::from_secs(3600), determinism),
    ];
    let mut failed = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let mut result = check();
        let took = start.elapsed();
        if result.is_ok() && took > budget {
            result = Err(format!("took {took:.2?}, budget {budget:?}"));
        }
        match result {
            Ok(note) => println!("PASS  {name}  ({took:.2?}) {note}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}  ({took:.2?}) {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn subterm_cases() -> Check {
    let stops = StopwordSet::smart();
    let cases = [
        ("communications satellite", "satellite", true),
        ("licorice", "rice", true),
        ("helmet of coşofeneşti", "helmet", true),
        ("caterpillar d9", "caterpillar", true),
        ("fortimicin b", "fortimicin", false),
        ("ginsenoside c-y", "ginsenoside", false),
    ];
    let cfg = SubtermConfig::default();
    for (hypo, hyper, want) in cases {
        let catalog = parse_terms(&format!("{hypo}\n{hyper}\n"), "d", "root", &stops)
            .map_err(|e| e.to_string())?
            .catalog;
        let (a, b) = (catalog.by_surface(hypo).unwrap(), catalog.by_surface(hyper).unwrap());
        let got = suffix_hypernym(a, b, &cfg) || prefix_hypernym(a, b, &cfg);
        if got != want {
            return Err(format!("({hypo} -> {hyper}) gave {got}, want {want}"));
        }
    }
    Ok("6/6".into())
}

fn biblical_fixture() -> Check {
    let stops = StopwordSet::smart();
    let terms = "biblical studies\ntheology\nhistory\nreligion\nmusic\n";
    let catalog = parse_terms(terms, "d", "root", &stops)
        .map_err(|e| e.to_string())?
        .catalog;
    let stats = common::injected_stats(
        &catalog,
        &[
            ("biblical studies", 887),
            ("theology", 21977),
            ("history", 383927),
            ("religion", 64044),
            ("music", 412791),
        ],
        &[
            ("biblical studies", "theology", 215),
            ("biblical studies", "history", 111),
            ("biblical studies", "religion", 50),
            ("biblical studies", "music", 43),
        ],
    );
    let t = catalog.by_surface("biblical studies").unwrap().id;
    let cands: Vec<&str> = cand_hypernyms(t, &stats).iter().map(|&c| catalog.surface(c)).collect();
    let mut sorted = cands.clone();
    sorted.sort();
    if sorted != ["history", "music", "religion", "theology"] {
        return Err(format!("candidates {cands:?}"));
    }
    let top: Vec<&str> = top_k_hypernyms(t, &stats, &catalog, 3)
        .iter()
        .map(|&c| catalog.surface(c))
        .collect();
    if top != ["music", "history", "religion"] {
        return Err(format!("top-3 {top:?}"));
    }
    Ok("cand=4, top3=[music, history, religion]".into())
}

fn stats_oracle() -> Check {
    let mut splits = 0;
    for seed in 0..100u64 {
        let mc = common::mini_corpus(seed, 200, 50);
        let whole = common::stats_for(&mc.docs, &mc.catalog);
        let brute = common::brute_stats(&mc.docs, &mc.catalog);
        common::compare_stats(&whole, &brute, &mc.catalog).map_err(|e| format!("seed {seed}: {e}"))?;

        let mut r = common::rng(seed ^ 0x5eed);
        let n = mc.docs.len();
        let (i, j) = {
            let a = r.random_range(0..=n);
            let b = r.random_range(0..=n);
            (a.min(b), a.max(b))
        };
        let a = common::stats_for(&mc.docs[..i], &mc.catalog);
        let b = common::stats_for(&mc.docs[i..j], &mc.catalog);
        let c = common::stats_for(&mc.docs[j..], &mc.catalog);
        let empty = CorpusStats::new(&mc.catalog);
        let merge = |x: &CorpusStats, y: &CorpusStats| x.clone().merge(y.clone()).map_err(|e| e.to_string());
        let left = merge(&merge(&a, &b)?, &c)?;
        let right = merge(&a, &merge(&b, &c)?)?;
        if left != right {
            return Err(format!("seed {seed}: merge not associative"));
        }
        if merge(&a, &b)? != merge(&b, &a)? {
            return Err(format!("seed {seed}: merge not commutative"));
        }
        if merge(&a, &empty)? != a || merge(&empty, &a)? != a {
            return Err(format!("seed {seed}: empty stats is not an identity"));
        }
        if left != whole {
            return Err(format!("seed {seed}: sharded counts differ from a single pass"));
        }
        splits += 1;
    }
    Ok(format!("100 corpora, {splits} splits"))
}

fn eval_arithmetic() -> Check {
    let rows = [
        (644, 1387, 46),
        (184, 485, 38),
        (726, 1533, 47),
        (240, 441, 54),
        (2407, 24817, 10),
        (305, 615, 50),
        (822, 1587, 52),
        (209, 465, 45),
    ];
    for (found, total, want) in rows {
        let gold = GoldStandard::from_pairs((0..total).map(|i| (format!("hypo{i}"), format!("hyper{i}"))))
            .map_err(|e| e.to_string())?;
        let mut pairs: Vec<LabeledPair> = (0..found)
            .map(|i| LabeledPair {
                hypo: format!("hypo{i}"),
                hyper: format!("hyper{i}"),
                provenance: Some(ProvenanceSet::of(if i % 2 == 0 {
                    Provenance::Cooc
                } else {
                    Provenance::Suffix
                })),
                score: None,
            })
            .collect();
        // Wrong guesses must not count.
        pairs.extend((0..found / 3).map(|i| LabeledPair {
            hypo: format!("hypo{i}"),
            hyper: format!("other{i}"),
            provenance: Some(ProvenanceSet::of(Provenance::Prefix)),
            score: None,
        }));
        let report = score(&pairs, &gold);
        let got = report.union_recall().percent() as i64;
        if (got - want).abs() > 1 {
            return Err(format!("{found}/{total}: recall {got}, want {want}"));
        }
    }
    Ok("8/8 rows".into())
}

fn cycle_oracle() -> Check {
    let mut cyclic = 0;
    for seed in 0..200u64 {
        let (n, edges) = common::random_graph(seed, 50);
        let got = strongly_connected_cycles(n, &edges);
        let want = common::closure_cycles(n, &edges);
        if got != want {
            return Err(format!("seed {seed}: {got:?} vs {want:?}"));
        }
        cyclic += usize::from(!want.is_empty());
    }
    Ok(format!("200 graphs, {cyclic} with cycles"))
}

fn normalization() -> Check {
    let words = [
        ("anarchism", "anarch"),
        ("societies", "societi"),
        ("philosophy", "philosophi"),
        ("theology", "theologi"),
        ("history", "histori"),
        ("metaphysics", "metaphys"),
    ];
    for (w, want) in words {
        if stem(w) != want {
            return Err(format!("{w} -> {}, want {want}", stem(w)));
        }
    }
    let phrase = normalize_tokens(&tokenize("biological and physical"), &StopwordSet::smart()).to_string();
    if phrase != "biolog _ physic" {
        return Err(format!("phrase -> {phrase}"));
    }
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let voc = fs::read_to_string(dir.join("porter_voc.txt")).map_err(|e| e.to_string())?;
    let out = fs::read_to_string(dir.join("porter_output.txt")).map_err(|e| e.to_string())?;
    let mut n = 0;
    for (w, want) in voc.lines().zip(out.lines()) {
        if stem(w) != want {
            return Err(format!("vocabulary: {w} -> {}, want {want}", stem(w)));
        }
        n += 1;
    }
    if n != voc.lines().count() || n != out.lines().count() {
        return Err("vocabulary files differ in length".into());
    }
    Ok(format!("{n} vocabulary words"))
}

fn determinism() -> Check {
    let target: u64 = std::env::var("HYPEREX_ACCEPT_MB")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(50)
        << 20;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dump = dir.path().join("dump.xml");
    let terms = dir.path().join("terms.txt");
    let gold = dir.path().join("gold.tsv");
    let size = synthetic_corpus(&dump, &terms, &gold, target).map_err(|e| e.to_string())?;

    let run = |name: &str, workers: usize| -> Result<(Vec<Vec<u8>>, Duration), String> {
        let cfg = PipelineConfig {
            dump: dump.clone(),
            catalog: CatalogSpec {
                terms: terms.clone(),
                domain: "synthetic".into(),
                root: "thing".into(),
            },
            work_dir: dir.path().join(name),
            gold: Some(gold.clone()),
            stopwords: None,
            encoding: "utf-8".into(),
            stats: StatsOptions { workers, nested: true },
            select: SelectConfig::default(),
            force: false,
        };
        pipeline::run_pipeline(&cfg).map_err(|e| e.to_string())?;
        let p = cfg.paths();
        let files = [&p.sentences, &p.stats, &p.taxo, &p.taxo_provenance, &p.report]
            .iter()
            .map(|f| fs::read(f).map_err(|e| format!("{}: {e}", f.display())))
            .collect::<Result<Vec<_>, _>>()?;

        // Time the stats pass alone on the sentence file just written.
        let stops = StopwordSet::smart();
        let catalog = pipeline::load_catalog(&cfg.catalog, &stops).map_err(|e| e.to_string())?;
        let start = Instant::now();
        pipeline::stats_file(
            &p.sentences,
            &catalog,
            &dir.path().join(format!("{name}.stats")),
            &cfg.stats,
        )
        .map_err(|e| e.to_string())?;
        Ok((files, start.elapsed()))
    };
    let (a, t1) = run("w1a", 1)?;
    let (b, _) = run("w1b", 1)?;
    let (c, _) = run("w4", 4)?;
    let names = ["sentences", "stats", "taxo", "provenance taxo", "report"];
    for (i, name) in names.iter().enumerate() {
        if a[i] != b[i] {
            return Err(format!("{name} differs between two single-worker runs"));
        }
        if a[i] != c[i] {
            return Err(format!("{name} differs between 1 and 4 workers"));
        }
    }
    let mb = size as f64 / (1 << 20) as f64;
    let rate = mb / t1.as_secs_f64();
    let soft = if rate >= 10.0 { "meets" } else { "below" };
    Ok(format!(
        "{mb:.0} MB corpus, stats pass {rate:.1} MB/s on 1 worker ({soft} the 10 MB/s soft target)"
    ))
}

/// Write a wiki-style dump of about `target` bytes, a term list and a gold
/// file; returns the dump size.
fn synthetic_corpus(dump: &Path, terms: &Path, gold: &Path, target: u64) -> std::io::Result<u64> {
    let mut r = common::rng(7);
    let syll = [
        "ka", "lo", "mi", "ne", "ru", "sa", "ti", "vo", "ze", "pra", "ston", "mel", "dar", "quin", "bel",
    ];
    let mut vocab: Vec<String> = Vec::new();
    while vocab.len() < 400 {
        let n = r.random_range(2..=4);
        let w: String = (0..n).map(|_| syll[r.random_range(0..syll.len())]).collect();
        if !vocab.contains(&w) {
            vocab.push(w);
        }
    }
    let fillers = ["the", "of", "and", "in", "was", "is", "a", "with", "from", "by"];
    let mut term_list: Vec<String> = Vec::new();
    while term_list.len() < 600 {
        let n = r.random_range(1..=3);
        let t: Vec<&str> = (0..n).map(|_| vocab[r.random_range(0..60)].as_str()).collect();
        let t = t.join(" ");
        if !term_list.contains(&t) {
            term_list.push(t);
        }
    }
    fs::write(
        terms,
        term_list
            .iter()
            .enumerate()
            .map(|(i, t)| format!("{i}\t{t}\n"))
            .collect::<String>(),
    )?;
    let gold_text: String = term_list
        .iter()
        .take(300)
        .enumerate()
        .map(|(i, t)| format!("{t}\t{}\n", term_list[(i * 7 + 3) % 300]))
        .collect();
    fs::write(gold, gold_text)?;

    let mut out = BufWriter::new(fs::File::create(dump)?);
    let mut written = 0u64;
    let mut doc = 0u64;
    writeln!(out, "<mediawiki>")?;
    while written < target {
        let mut body = String::new();
        for _ in 0..r.random_range(3..40) {
            let len = r.random_range(4..25);
            for k in 0..len {
                let w = match r.random_range(0..10) {
                    0..=2 => fillers[r.random_range(0..fillers.len())],
                    3 => term_list[r.random_range(0..term_list.len())].as_str(),
                    _ => vocab[r.random_range(0..vocab.len())].as_str(),
                };
                if k == 0 {
                    let mut cs = w.chars();
                    body.extend(cs.next().map(|c| c.to_ascii_uppercase()));
                    body.push_str(cs.as_str());
                } else {
                    body.push(' ');
                    body.push_str(w);
                }
            }
            body.push_str(if r.random_bool(0.1) { ", &amp; more.\n\n" } else { ". " });
        }
        let page = format!("<page>\n<title>Doc {doc}</title>\n<text xml:space=\"preserve\">{body}</text>\n</page>\n");
        written += page.len() as u64;
        out.write_all(page.as_bytes())?;
        doc += 1;
    }
    writeln!(out, "</mediawiki>")?;
    out.flush()?;
    Ok(fs::metadata(dump)?.len())
}
