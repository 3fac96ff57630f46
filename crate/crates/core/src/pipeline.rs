//! The pipeline stages behind the CLI subcommands. Each stage reads and
//! writes plain files so the expensive passes can be reused.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use rayon::prelude::*;

use crate::catalog::{load_terms, TermCatalog};
use crate::cooc::{load_stats, save_stats, CorpusStats, Occurrence, TermMatcher};
use crate::error::{Error, Result};
use crate::eval::{load_gold, score, EvalReport};
use crate::ingest::{DocumentStream, SentenceDocument, SentenceReader, SentenceWriter, TokenizedDocument};
use crate::normalize::{Normalizer, StopwordSet, NORMALIZATION_VERSION};
use crate::select::{build_taxonomy, parse_taxo, SelectConfig, Taxonomy};

/// Documents handed to the worker pool at a time during the stats pass.
const STATS_BATCH: usize = 2048;

/// Which catalog to use and how to build it.
#[derive(Debug, Clone)]
pub struct CatalogSpec {
    pub terms: PathBuf,
    pub domain: String,
    pub root: String,
}

pub fn load_stopwords(path: Option<&Path>) -> Result<StopwordSet> {
    match path {
        Some(p) => StopwordSet::load(p),
        None => Ok(StopwordSet::smart()),
    }
}

pub fn load_catalog(spec: &CatalogSpec, stops: &StopwordSet) -> Result<TermCatalog> {
    let loaded = load_terms(&spec.terms, &spec.domain, &spec.root, stops)?;
    if loaded.root_added {
        log::info!("root term {:?} was not in the list and has been added", spec.root);
    }
    Ok(loaded.catalog)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IngestSummary {
    pub documents: usize,
    pub sentences: usize,
    pub warnings: usize,
}

/// Dump to normalized sentence stream.
pub fn ingest<R: BufRead, W: Write>(
    dump: R,
    out: W,
    stops: &StopwordSet,
    encoding: &'static encoding_rs::Encoding,
) -> Result<IngestSummary> {
    let io_err = |e: std::io::Error| Error::Input(format!("writing sentences: {e}"));
    let mut stream = DocumentStream::new(dump, encoding);
    let mut writer = SentenceWriter::new(out, stops).map_err(io_err)?;
    let mut normalizer = Normalizer::new(stops);
    for doc in stream.by_ref() {
        let doc = doc?;
        let tokenized = TokenizedDocument::from_raw(&doc);
        let sentences: Vec<_> = tokenized.sentences.iter().map(|s| normalizer.normalize(s)).collect();
        writer.write_document(&doc.title, &sentences).map_err(io_err)?;
    }
    let summary = IngestSummary {
        documents: writer.documents,
        sentences: writer.sentences,
        warnings: stream.warnings(),
    };
    writer.into_inner().flush().map_err(io_err)?;
    Ok(summary)
}

pub fn ingest_file(dump: &Path, out: &Path, stops: &StopwordSet, encoding: &str) -> Result<IngestSummary> {
    let enc = crate::ingest::encoding_for_label(encoding)?;
    let reader = open(dump)?;
    let writer = create(out)?;
    ingest(reader, writer, stops, enc)
}

fn count_document(matcher: &TermMatcher, doc: &SentenceDocument, stats: &mut CorpusStats) {
    let occ: Vec<Vec<Occurrence>> = doc
        .sentences
        .iter()
        .map(|s| matcher.find_in_tokens(s.split(' ')))
        .collect();
    stats.accumulate_document(&occ);
}

/// Count a sentence stream against a catalog with `workers` threads. The
/// result does not depend on the worker count.
pub fn compute_stats<R: BufRead>(
    sentences: R,
    catalog: &TermCatalog,
    matcher: &TermMatcher,
    workers: usize,
) -> Result<CorpusStats> {
    if workers == 0 {
        return Err(Error::Input("worker count must be at least 1".into()));
    }
    let reader = SentenceReader::new(sentences)?;
    if reader.header.norm_version != NORMALIZATION_VERSION || reader.header.stopwords != catalog.stopwords_fingerprint()
    {
        return Err(Error::Input(format!(
            "sentence file was normalized with norm={} stopwords={}, catalog uses norm={} stopwords={}",
            reader.header.norm_version,
            reader.header.stopwords,
            NORMALIZATION_VERSION,
            catalog.stopwords_fingerprint()
        )));
    }
    let mut total = CorpusStats::new(catalog);
    if workers == 1 {
        for doc in reader {
            count_document(matcher, &doc?, &mut total);
        }
        return Ok(total);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Invariant(format!("starting worker pool: {e}")))?;
    let fingerprint = total.fingerprint().to_owned();
    let mut batch: Vec<SentenceDocument> = Vec::with_capacity(STATS_BATCH);
    let mut reader = reader.peekable();
    while reader.peek().is_some() {
        batch.clear();
        for doc in reader.by_ref().take(STATS_BATCH) {
            batch.push(doc?);
        }
        let part = pool.install(|| {
            batch
                .par_iter()
                .fold(
                    || CorpusStats::empty(fingerprint.clone()),
                    |mut acc, doc| {
                        count_document(matcher, doc, &mut acc);
                        acc
                    },
                )
                .map(Ok::<_, Error>)
                .try_reduce(|| CorpusStats::empty(fingerprint.clone()), CorpusStats::merge)
        })?;
        total.merge_from(part)?;
    }
    Ok(total)
}

#[derive(Debug, Clone)]
pub struct StatsOptions {
    pub workers: usize,
    pub nested: bool,
}

impl Default for StatsOptions {
    fn default() -> Self {
        StatsOptions {
            workers: 1,
            nested: true,
        }
    }
}

pub fn stats_file(sentences: &Path, catalog: &TermCatalog, out: &Path, opts: &StatsOptions) -> Result<CorpusStats> {
    let matcher = TermMatcher::with_nesting(catalog, opts.nested)?;
    let stats = compute_stats(open(sentences)?, catalog, &matcher, opts.workers)?;
    stats.check_invariants()?;
    save_stats(&stats, out)?;
    Ok(stats)
}

/// Build the taxonomy from a catalog and a stats file computed for it.
pub fn extract(catalog: &TermCatalog, stats: &CorpusStats, cfg: &SelectConfig) -> Result<Taxonomy> {
    if stats.fingerprint() != catalog.fingerprint() {
        return Err(Error::Fingerprint {
            left: catalog.fingerprint(),
            right: stats.fingerprint().to_owned(),
        });
    }
    let missing = catalog.terms().iter().filter(|t| !stats.has_term(t.id)).count();
    if missing > 0 {
        log::warn!("{missing} catalog term(s) have no row in the stats file; treating their counts as zero");
    }
    build_taxonomy(catalog, stats, cfg)
}

pub fn extract_file(
    catalog: &TermCatalog,
    stats: &Path,
    out: &Path,
    cfg: &SelectConfig,
    with_provenance: bool,
) -> Result<Taxonomy> {
    let stats = load_stats(stats)?;
    let taxo = extract(catalog, &stats, cfg)?;
    write_text(out, &taxo.to_taxo(catalog, with_provenance))?;
    Ok(taxo)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn eval_files(taxo: &Path, gold: &Path) -> Result<EvalReport> {
    let text = std::fs::read_to_string(taxo).map_err(|e| Error::io(taxo, e))?;
    let pairs = parse_taxo(&text).map_err(|e| Error::Input(format!("{}: {e}", taxo.display())))?;
    if pairs.iter().any(|p| p.provenance.is_none()) {
        log::warn!(
            "{}: pairs without provenance only count towards the union",
            taxo.display()
        );
    }
    let gold = load_gold(gold)?;
    Ok(score(&pairs, &gold))
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub dump: PathBuf,
    pub catalog: CatalogSpec,
    pub work_dir: PathBuf,
    pub gold: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub encoding: String,
    pub stats: StatsOptions,
    pub select: SelectConfig,
    pub force: bool,
}

/// Artifact locations inside the work directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelinePaths {
    pub sentences: PathBuf,
    pub stats: PathBuf,
    pub taxo: PathBuf,
    pub taxo_provenance: PathBuf,
    pub report: PathBuf,
}

impl PipelineConfig {
    pub fn paths(&self) -> PipelinePaths {
        let d = &self.work_dir;
        let domain = &self.catalog.domain;
        PipelinePaths {
            sentences: d.join("sentences.tsv"),
            stats: d.join(format!("{domain}.stats.tsv")),
            taxo: d.join(format!("{domain}.taxo")),
            taxo_provenance: d.join(format!("{domain}.provenance.taxo")),
            report: d.join(format!("{domain}.report.tsv")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StageRuns {
    pub ingest: bool,
    pub stats: bool,
    pub extract: bool,
    pub eval: bool,
}

#[derive(Debug, Clone, Default)]
pub struct PipelineOutcome {
    pub ran: StageRuns,
    pub ingest: Option<IngestSummary>,
    pub report: Option<EvalReport>,
}

fn mtime(p: &Path) -> Option<SystemTime> {
    std::fs::metadata(p).and_then(|m| m.modified()).ok()
}

/// An output is stale when it is missing or older than any of its inputs.
fn stale(output: &Path, inputs: &[&Path]) -> bool {
    let Some(out) = mtime(output) else {
        return true;
    };
    inputs.iter().any(|i| mtime(i).is_none_or(|t| t > out))
}

/// ingest, stats, extract and (with a gold file) eval. Stages whose outputs
/// are newer than their inputs are skipped unless `force` is set.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutcome> {
    if !cfg.dump.exists() {
        return Err(Error::Input(format!("{}: dump not found", cfg.dump.display())));
    }
    std::fs::create_dir_all(&cfg.work_dir).map_err(|e| Error::io(&cfg.work_dir, e))?;
    let paths = cfg.paths();
    let stops = load_stopwords(cfg.stopwords.as_deref())?;
    let catalog = load_catalog(&cfg.catalog, &stops)?;
    let mut outcome = PipelineOutcome::default();

    let mut sw_inputs: Vec<&Path> = Vec::new();
    if let Some(s) = &cfg.stopwords {
        sw_inputs.push(s);
    }
    let mut ingest_inputs = vec![cfg.dump.as_path()];
    ingest_inputs.extend(&sw_inputs);
    if cfg.force || stale(&paths.sentences, &ingest_inputs) {
        outcome.ingest = Some(ingest_file(&cfg.dump, &paths.sentences, &stops, &cfg.encoding)?);
        outcome.ran.ingest = true;
    }

    let stats_inputs = [paths.sentences.as_path(), cfg.catalog.terms.as_path()];
    if cfg.force || outcome.ran.ingest || stale(&paths.stats, &stats_inputs) {
        stats_file(&paths.sentences, &catalog, &paths.stats, &cfg.stats)?;
        outcome.ran.stats = true;
    }

    let extract_inputs = [paths.stats.as_path(), cfg.catalog.terms.as_path()];
    if cfg.force
        || outcome.ran.stats
        || stale(&paths.taxo, &extract_inputs)
        || stale(&paths.taxo_provenance, &extract_inputs)
    {
        let taxo = extract_file(&catalog, &paths.stats, &paths.taxo, &cfg.select, false)?;
        write_text(&paths.taxo_provenance, &taxo.to_taxo(&catalog, true))?;
        outcome.ran.extract = true;
    }

    if let Some(gold) = &cfg.gold {
        let eval_inputs = [paths.taxo_provenance.as_path(), gold.as_path()];
        if cfg.force || outcome.ran.extract || stale(&paths.report, &eval_inputs) {
            let report = eval_files(&paths.taxo_provenance, gold)?;
            write_text(&paths.report, &report.to_tsv())?;
            outcome.report = Some(report);
            outcome.ran.eval = true;
        }
    }
    Ok(outcome)
}
