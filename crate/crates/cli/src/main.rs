mod config;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;

use microcommit::analytics::{self, stats, AnalyticsError, Population, Tabular, TokenScope};
use microcommit::fixture;
use microcommit::maintenance::MatchMode;
use microcommit::miner::{GitCli, MineError};
use microcommit::pipeline::{self, PipelineError};
use microcommit::store::{Store, StoreError};
use microcommit::taxonomy;

use config::{Format, RunConfig};

#[derive(Parser)]
#[command(
    name = "microcommit",
    version,
    about = "Token-level mining of micro commits in Git histories"
)]
struct Cli {
    /// More log output on stderr (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    /// Only warnings and errors on stderr.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DbArg {
    /// Database file.
    #[arg(long, env = "MICROCOMMIT_DB")]
    db: PathBuf,
}

#[derive(Args)]
struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MineArgs {
    #[arg(long)]
    repo: PathBuf,
    /// Comma-separated languages.
    #[arg(long, value_delimiter = ',', default_value = "c,java")]
    languages: Vec<String>,
    /// Comma-separated extensions; defaults to those of the languages.
    #[arg(long, value_delimiter = ',')]
    extensions: Option<Vec<String>>,
    #[arg(long)]
    include_merges: bool,
    /// Examine only the first N commits; 0 means all.
    #[arg(long, default_value_t = 0)]
    max_commits: usize,
    /// Mine commits again even if already stored.
    #[arg(long)]
    no_resume: bool,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long, default_value_t = microcommit::detect::DEFAULT_THRESHOLD)]
    threshold: usize,
    /// Separate limits as ADDED:REMOVED.
    #[arg(long, value_name = "A:R")]
    asym: Option<String>,
    /// Drop the single-file condition of micro commits.
    #[arg(long)]
    any_files: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Mine a repository into the database.
    Ingest {
        #[command(flatten)]
        db: DbArg,
        #[command(flatten)]
        mine: MineArgs,
    },
    /// Label one-line, micro and one-token commits.
    Detect {
        #[command(flatten)]
        db: DbArg,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    #[command(subcommand)]
    Classify(Classify),
    /// Print an aggregate table.
    Report {
        #[command(flatten)]
        db: DbArg,
        #[arg(long, value_enum)]
        table: Table,
        /// Commits to aggregate over; each table has its own default.
        #[arg(long)]
        population: Option<Population>,
        /// Largest axis value for heatmap, accum and hunks.
        #[arg(long, default_value_t = 10)]
        max: usize,
        /// What the tokens table counts.
        #[arg(long, default_value = "types")]
        scope: TokenScope,
        #[command(flatten)]
        out: OutArgs,
    },
    #[command(subcommand)]
    Stats(Stats),
    /// Ingest, detect and classify in one go, then print the summary.
    Run(RunArgs),
    /// Dump a database table as CSV.
    Export {
        #[command(flatten)]
        db: DbArg,
        #[arg(long)]
        table: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Select commits with a filter expression, as CSV.
    Query {
        #[command(flatten)]
        db: DbArg,
        /// For example `n_files = 1 and n_tokens_added <= 5`.
        #[arg(long, default_value = "")]
        filter: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check stored counts against stored tokens.
    Audit {
        #[command(flatten)]
        db: DbArg,
    },
    /// Create a demonstration repository.
    Fixture {
        #[arg(value_enum)]
        kind: FixtureKind,
        dir: PathBuf,
    },
}

#[derive(Subcommand)]
enum Classify {
    /// Label commit messages with maintenance categories.
    Maintenance {
        #[command(flatten)]
        db: DbArg,
        /// TOML file with corrective, adaptive and perfective keyword lists.
        #[arg(long)]
        keywords: Option<PathBuf>,
        #[arg(long, default_value = "token")]
        match_mode: MatchMode,
    },
    /// Label micro commits with an operation and a target.
    Taxonomy {
        #[command(flatten)]
        db: DbArg,
        /// CSV of commit_id, operation, target to score the labels against.
        #[arg(long)]
        gold: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Stats {
    /// Fleiss' kappa of a subjects-by-categories count matrix.
    Kappa {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Sample size for a population, confidence level and interval in percent.
    Samplesize {
        population: u64,
        confidence: String,
        interval: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    repo: Option<PathBuf>,
    /// Database file; falls back to the config, then MICROCOMMIT_DB.
    #[arg(long)]
    db: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    languages: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    extensions: Option<Vec<String>>,
    #[arg(long)]
    threshold: Option<usize>,
    #[arg(long, value_name = "A:R")]
    asym: Option<String>,
    #[arg(long)]
    include_merges: bool,
    #[arg(long)]
    max_commits: Option<usize>,
    #[arg(long)]
    keywords: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    Heatmap,
    Accum,
    Tokens,
    Patterns,
    Intersection,
    Corrective,
    Hunks,
    Taxonomy,
    Summary,
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureKind {
    /// One commit per code listing.
    Listings,
    /// The 12-commit repository with known detector counts.
    Bundled,
}

/// A failed command, by exit code.
#[derive(Debug)]
enum Failure {
    Config(String),
    Repo(String),
    Storage(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Other(_) => 1,
            Failure::Config(_) => 2,
            Failure::Repo(_) => 3,
            Failure::Storage(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Repo(m) | Failure::Storage(m) | Failure::Other(m) => m,
        }
    }

    fn stage(self, stage: &str) -> Self {
        let at = |m: String| format!("{stage}: {m}");
        match self {
            Failure::Config(m) => Failure::Config(at(m)),
            Failure::Repo(m) => Failure::Repo(at(m)),
            Failure::Storage(m) => Failure::Storage(at(m)),
            Failure::Other(m) => Failure::Other(at(m)),
        }
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Filter(_) | StoreError::UnknownTable(_) => Failure::Config(e.to_string()),
            _ => Failure::Storage(e.to_string()),
        }
    }
}

impl From<MineError> for Failure {
    fn from(e: MineError) -> Self {
        Failure::Repo(e.to_string())
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Mine(e) => e.into(),
            PipelineError::Store(e) => e.into(),
        }
    }
}

impl From<AnalyticsError> for Failure {
    fn from(e: AnalyticsError) -> Self {
        match e {
            AnalyticsError::Store(e) => e.into(),
            AnalyticsError::Sqlite(e) => Failure::Storage(e.to_string()),
            e => Failure::Other(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            Box::new(BufWriter::new(File::create(p).map_err(|e| {
                Failure::Other(format!("cannot create {}: {e}", p.display()))
            })?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn emit<T: Tabular>(table: &T, out: &OutArgs) -> Result<()> {
    let mut w = output(out.out.as_deref())?;
    match out.format {
        Format::Json => table.write_json(&mut w)?,
        Format::Csv => table.write_csv(&mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn open_store(path: &Path) -> Result<Store> {
    Store::open(path).map_err(|e| Failure::Storage(format!("cannot open {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => "warn",
        (false, 0) => "info",
        (false, 1) => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Ingest { db, mine } => ingest(&db.db, &mine),
        Command::Detect { db, thresholds } => {
            let t = config::thresholds(thresholds.threshold, thresholds.asym.as_deref(), !thresholds.any_files)
                .map_err(Failure::Config)?;
            let mut store = open_store(&db.db)?;
            store.set_meta("thresholds", &t.to_string())?;
            let stats = pipeline::detect(&mut store, &t).map_err(|e| Failure::from(e).stage("detect"))?;
            print_json(&stats)
        }
        Command::Classify(Classify::Maintenance {
            db,
            keywords,
            match_mode,
        }) => {
            let classifier = config::classifier(keywords.as_deref(), match_mode).map_err(Failure::Config)?;
            let mut store = open_store(&db.db)?;
            let counts = pipeline::classify_maintenance(&mut store, &classifier)
                .map_err(|e| Failure::from(e).stage("classify maintenance"))?;
            print_json(&counts.into_iter().collect::<BTreeMap<_, _>>())
        }
        Command::Classify(Classify::Taxonomy { db, gold }) => classify_taxonomy(&db.db, gold.as_deref()),
        Command::Report {
            db,
            table,
            population,
            max,
            scope,
            out,
        } => report(&db.db, table, population, max, scope, &out),
        Command::Stats(s) => run_stats(s),
        Command::Run(args) => run(args),
        Command::Export { db, table, out } => {
            let store = open_store(&db.db)?;
            let mut w = output(out.as_deref())?;
            let n = store.export_csv(&table, &mut w)?;
            w.flush()?;
            info!("exported {n} rows of {table}");
            Ok(())
        }
        Command::Query { db, filter, out } => {
            let store = open_store(&db.db)?;
            let rows = store.query_str(&filter)?;
            let mut w = csv::Writer::from_writer(output(out.as_deref())?);
            for r in &rows {
                w.serialize(r).map_err(|e| Failure::Other(e.to_string()))?;
            }
            w.flush()?;
            info!("{} commits match", rows.len());
            Ok(())
        }
        Command::Audit { db } => {
            let store = open_store(&db.db)?;
            let report = store.audit()?;
            print_json(&report)?;
            if report.is_clean() {
                Ok(())
            } else {
                Err(Failure::Storage(format!("{} problems found", report.problems.len())))
            }
        }
        Command::Fixture { kind, dir } => {
            let commits = match kind {
                FixtureKind::Listings => fixture::listing_history(),
                FixtureKind::Bundled => fixture::bundled_history(),
            };
            let ids = fixture::build_git_repo(&dir, &commits).map_err(|e| Failure::Repo(e.to_string()))?;
            let mut out = io::stdout().lock();
            for id in ids {
                writeln!(out, "{id}")?;
            }
            Ok(())
        }
    }
}

fn ingest(db: &Path, args: &MineArgs) -> Result<()> {
    let cfg = config::mine_config(
        &args.languages,
        args.extensions.as_deref(),
        args.include_merges,
        args.max_commits,
    )
    .map_err(Failure::Config)?;
    let reader = GitCli::open(&args.repo)?;
    let mut store = open_store(db)?;
    store.set_meta("mine_config", &serde_json::to_string(&cfg)?)?;
    info!("mining {}", args.repo.display());
    let stats =
        pipeline::ingest(&mut store, &reader, &cfg, !args.no_resume).map_err(|e| Failure::from(e).stage("ingest"))?;
    info!("stored {} new commits", stats.n_stored);
    print_json(&stats)
}

fn classify_taxonomy(db: &Path, gold: Option<&Path>) -> Result<()> {
    let gold = gold
        .map(|p| {
            let f = File::open(p).map_err(|e| Failure::Config(format!("cannot read {}: {e}", p.display())))?;
            taxonomy::read_gold(f).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))
        })
        .transpose()?;
    let mut store = open_store(db)?;
    let predicted = pipeline::classify_taxonomy(&mut store).map_err(|e| Failure::from(e).stage("classify taxonomy"))?;
    info!("labeled {} micro commits", predicted.len());
    match gold {
        Some(gold) => print_json(&taxonomy::accuracy(&gold, &predicted)),
        None => {
            let mut counts: BTreeMap<String, u64> = BTreeMap::new();
            for p in predicted.values() {
                *counts.entry(p.to_string()).or_default() += 1;
            }
            print_json(&counts)
        }
    }
}

fn report(
    db: &Path,
    table: Table,
    population: Option<Population>,
    max: usize,
    scope: TokenScope,
    out: &OutArgs,
) -> Result<()> {
    let store = open_store(db)?;
    let micro = population.unwrap_or(Population::Micro);
    let studied = population.unwrap_or(Population::Studied);
    match table {
        Table::Heatmap => emit(&analytics::heatmap(&store, studied, max)?, out),
        Table::Accum => emit(&analytics::accum_curve(&store, studied, max)?, out),
        Table::Hunks => emit(&analytics::hunk_distribution(&store, micro, max)?, out),
        Table::Tokens => emit(&analytics::token_frequencies(&store, scope, micro)?, out),
        Table::Patterns => emit(&analytics::modification_patterns(&store, micro)?, out),
        Table::Taxonomy => emit(&analytics::taxonomy_frequencies(&store, micro)?, out),
        Table::Intersection => emit(&analytics::intersection(&store)?, out),
        Table::Corrective => emit(&analytics::corrective_comparison(&store)?, out),
        Table::Summary => emit(&analytics::summary(&store)?, out),
    }
}

#[derive(Serialize)]
struct KappaReport {
    kappa: f64,
    interpretation: stats::Agreement,
    n_subjects: usize,
    n_categories: usize,
    raters: u64,
}

fn run_stats(s: Stats) -> Result<()> {
    match s {
        Stats::Kappa { matrix } => {
            let f =
                File::open(&matrix).map_err(|e| Failure::Config(format!("cannot read {}: {e}", matrix.display())))?;
            let m = stats::RaterMatrix::from_csv(f).map_err(|e| Failure::Config(e.to_string()))?;
            let kappa = stats::fleiss_kappa(&m);
            print_json(&KappaReport {
                kappa,
                interpretation: stats::kappa_interpretation(kappa),
                n_subjects: m.n_subjects(),
                n_categories: m.n_categories(),
                raters: m.raters(),
            })
        }
        Stats::Samplesize {
            population,
            confidence,
            interval,
        } => {
            let c = confidence
                .parse::<stats::Confidence>()
                .map_err(|e| Failure::Config(e.to_string()))?;
            let n = stats::sample_size(population, c, interval).map_err(|e| Failure::Config(e.to_string()))?;
            writeln!(io::stdout(), "{n}")?;
            Ok(())
        }
    }
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p).map_err(Failure::Config)?,
        None => RunConfig::default(),
    };
    if args.repo.is_some() {
        cfg.repo_path = args.repo;
    }
    cfg.db_path = args
        .db
        .or(cfg.db_path)
        .or_else(|| std::env::var_os("MICROCOMMIT_DB").map(PathBuf::from));
    if let Some(l) = args.languages {
        cfg.languages = l;
    }
    if args.extensions.is_some() {
        cfg.extensions = args.extensions;
    }
    if let Some(t) = args.threshold {
        cfg.threshold = t;
    }
    if args.asym.is_some() {
        cfg.asym = args.asym;
    }
    cfg.include_merges |= args.include_merges;
    if let Some(m) = args.max_commits {
        cfg.max_commits = m;
    }
    if args.keywords.is_some() {
        cfg.keywords = args.keywords;
    }
    if let Some(f) = args.format {
        cfg.format = f;
    }
    let v = cfg.validate().map_err(Failure::Config)?;

    let reader = GitCli::open(&v.repo)?;
    let mut store = open_store(&v.db)?;
    let provenance = toml::to_string(&cfg).map_err(|e| Failure::Other(e.to_string()))?;
    store.set_meta("run_config", &provenance)?;

    info!("ingest: mining {}", v.repo.display());
    let ingested =
        pipeline::ingest(&mut store, &reader, &v.mine, true).map_err(|e| Failure::from(e).stage("ingest"))?;
    info!(
        "ingest: {} commits examined, {} already stored, {} stored",
        ingested.mine.n_commits, ingested.mine.n_skipped, ingested.n_stored
    );
    let detected = pipeline::detect(&mut store, &v.thresholds).map_err(|e| Failure::from(e).stage("detect"))?;
    info!(
        "detect: {} one-line, {} micro, {} one-token of {}",
        detected.n_one_line, detected.n_micro, detected.n_one_token, detected.n_commits
    );
    pipeline::classify_maintenance(&mut store, &v.classifier)
        .map_err(|e| Failure::from(e).stage("classify maintenance"))?;
    let labeled = pipeline::classify_taxonomy(&mut store).map_err(|e| Failure::from(e).stage("classify taxonomy"))?;
    info!("classify: {} micro commits labeled", labeled.len());
    let summary = analytics::summary(&store).map_err(|e| Failure::from(e).stage("report"))?;
    emit(
        &summary,
        &OutArgs {
            format: cfg.format,
            out: None,
        },
    )
}
