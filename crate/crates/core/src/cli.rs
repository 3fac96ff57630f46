//! Command-line interface: `ingest`, `stats`, `extract`, `eval`, `pipeline`.
//!
//! Exit codes: 0 success, 1 usage, 2 input error, 3 internal invariant
//! violation.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Result;
use crate::pipeline::{self, CatalogSpec, PipelineConfig, StatsOptions};
use crate::rules::{SubtermConfig, SuffixMode};
use crate::select::{CoocScope, RankBy, SelectConfig};

#[derive(Debug, Parser)]
#[command(
    name = "hyperex",
    version,
    about = "Hypernym extraction from a term list and a text corpus"
)]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract, tokenize and normalize a wiki dump into a sentence file.
    Ingest(IngestArgs),
    /// Count term occurrences and co-occurrences over a sentence file.
    Stats(StatsArgs),
    /// Produce hypernym pairs from a catalog and its stats.
    Extract(ExtractArgs),
    /// Score a .taxo file against a gold standard.
    Eval(EvalArgs),
    /// Run ingest, stats, extract (and eval) with stage reuse.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
pub struct NormArgs {
    /// Stopword list, one word per line (default: bundled SMART list).
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub dump: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Dump encoding; malformed bytes are replaced, never fatal.
    #[arg(long, default_value = "utf-8")]
    pub encoding: String,
    #[command(flatten)]
    pub norm: NormArgs,
}

#[derive(Debug, Args)]
pub struct TermArgs {
    /// Term list: one term per line, either `id<TAB>term` or `term`.
    #[arg(long)]
    pub terms: PathBuf,
    #[arg(long)]
    pub domain: String,
    /// Root term of the domain; added to the catalog when missing.
    #[arg(long)]
    pub root: String,
}

impl TermArgs {
    fn spec(&self) -> CatalogSpec {
        CatalogSpec {
            terms: self.terms.clone(),
            domain: self.domain.clone(),
            root: self.root.clone(),
        }
    }
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// Worker threads for the counting pass.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: u16,
    /// Do not count a term occurrence nested inside a longer term occurrence.
    #[arg(long)]
    pub no_nested: bool,
}

impl CountArgs {
    fn options(&self) -> StatsOptions {
        StatsOptions {
            workers: self.workers as usize,
            nested: !self.no_nested,
        }
    }
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Sentence file written by `ingest`.
    #[arg(long)]
    pub sentences: PathBuf,
    #[command(flatten)]
    pub terms: TermArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub count: CountArgs,
    #[command(flatten)]
    pub norm: NormArgs,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Co-occurrence hypernyms kept per term.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    /// `char` (plain character suffix) or `token-boundary`.
    #[arg(long, default_value = "char")]
    pub suffix_mode: SuffixMode,
    /// Length of the word that must follow a prefix hypernym.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    pub connector_len: u32,
    /// Apply the co-occurrence rule to `all` terms or only `uncovered` ones.
    #[arg(long, default_value = "all")]
    pub cooc_scope: CoocScope,
    /// Leave terms without any hypernym unattached instead of linking them to the root.
    #[arg(long)]
    pub no_attach_orphans: bool,
    /// Rank candidates by `doc-freq` or by `cooc` count.
    #[arg(long, default_value = "doc-freq")]
    pub rank_by: RankBy,
}

impl SelectArgs {
    fn config(&self) -> SelectConfig {
        SelectConfig {
            k: self.k as usize,
            cooc_scope: self.cooc_scope,
            attach_orphans: !self.no_attach_orphans,
            rank_by: self.rank_by,
            subterm: SubtermConfig {
                suffix_mode: self.suffix_mode,
                connector_len: self.connector_len as usize,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub terms: TermArgs,
    #[arg(long)]
    pub stats: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Add provenance and score columns.
    #[arg(long)]
    pub with_provenance: bool,
    #[command(flatten)]
    pub select: SelectArgs,
    #[command(flatten)]
    pub norm: NormArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Taxonomy to score, ideally written with --with-provenance.
    #[arg(long)]
    pub taxo: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    /// Write the TSV report here; the table always goes to stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub dump: PathBuf,
    #[command(flatten)]
    pub terms: TermArgs,
    /// Directory for all stage outputs.
    #[arg(long)]
    pub work_dir: PathBuf,
    #[arg(long)]
    pub gold: Option<PathBuf>,
    #[arg(long, default_value = "utf-8")]
    pub encoding: String,
    /// Rebuild every stage even when its outputs are up to date.
    #[arg(long)]
    pub force: bool,
    #[command(flatten)]
    pub count: CountArgs,
    #[command(flatten)]
    pub select: SelectArgs,
    #[command(flatten)]
    pub norm: NormArgs,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(a) => {
            let stops = pipeline::load_stopwords(a.norm.stopwords.as_deref())?;
            let s = pipeline::ingest_file(&a.dump, &a.out, &stops, &a.encoding)?;
            println!("documents\t{}\nsentences\t{}", s.documents, s.sentences);
            if s.warnings > 0 {
                println!("warnings\t{}", s.warnings);
            }
        }
        Command::Stats(a) => {
            let stops = pipeline::load_stopwords(a.norm.stopwords.as_deref())?;
            let catalog = pipeline::load_catalog(&a.terms.spec(), &stops)?;
            let stats = pipeline::stats_file(&a.sentences, &catalog, &a.out, &a.count.options())?;
            println!(
                "documents\t{}\nsentences\t{}\nterms\t{}\npairs\t{}",
                stats.total_docs,
                stats.total_sentences,
                catalog.len(),
                stats.pair_count()
            );
        }
        Command::Extract(a) => {
            let stops = pipeline::load_stopwords(a.norm.stopwords.as_deref())?;
            let catalog = pipeline::load_catalog(&a.terms.spec(), &stops)?;
            let taxo = pipeline::extract_file(&catalog, &a.stats, &a.out, &a.select.config(), a.with_provenance)?;
            println!("pairs\t{}", taxo.len());
        }
        Command::Eval(a) => {
            let report = pipeline::eval_files(&a.taxo, &a.gold)?;
            if let Some(path) = &a.report {
                pipeline::write_text(path, &report.to_tsv())?;
            }
            print!("{}", report.to_table());
        }
        Command::Pipeline(a) => {
            let cfg = PipelineConfig {
                dump: a.dump,
                catalog: a.terms.spec(),
                work_dir: a.work_dir,
                gold: a.gold,
                stopwords: a.norm.stopwords,
                encoding: a.encoding,
                stats: a.count.options(),
                select: a.select.config(),
                force: a.force,
            };
            let out = pipeline::run_pipeline(&cfg)?;
            let mark = |ran: bool| if ran { "ran" } else { "up to date" };
            println!("ingest\t{}", mark(out.ran.ingest));
            println!("stats\t{}", mark(out.ran.stats));
            println!("extract\t{}", mark(out.ran.extract));
            if cfg.gold.is_some() {
                println!("eval\t{}", mark(out.ran.eval));
            }
            if let Some(r) = out.report {
                print!("{}", r.to_table());
            }
        }
    }
    Ok(())
}
