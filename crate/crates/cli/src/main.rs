use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use proxima::classify::{load_categories, predict_corpus, render_categories};
use proxima::engine::with_workers;
use proxima::{
    evaluate, generate_synthetic_corpus, parse_query, rank_corpus, render_query, Analyzer, Corpus,
    Error, PositionalDocument, RunConfig, SynthSpec,
};

const MANIFEST: &str = "manifest.tsv";

#[derive(Debug, Parser)]
#[command(
    name = "proxima",
    version,
    about = "Fuzzy proximity retrieval and classification"
)]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// key=value configuration file; flags override its settings
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Influence kernel: triangular, rectangular, gaussian or hanning
    #[arg(long, global = true)]
    kernel: Option<String>,

    /// Influence width
    #[arg(long, global = true)]
    k: Option<u32>,

    /// Sliding window half-width for rbf mode
    #[arg(long, global = true)]
    kf: Option<u32>,

    /// Scoring mode: standard or rbf
    #[arg(long, global = true)]
    mode: Option<String>,

    /// Semantic neighborhood half-width, in standard deviations
    #[arg(long, global = true, allow_negative_numbers = true)]
    threshold: Option<f64>,

    /// Do not clamp rbf relevance to 1
    #[arg(long, global = true)]
    no_clamp: bool,

    /// Neighbor relevance for rbf mode: focal or self
    #[arg(long, global = true)]
    neighbor_relevance: Option<String>,

    /// Width preset: phrase (k=5) or paragraph (k=100)
    #[arg(long, global = true)]
    preset: Option<String>,

    #[arg(long, global = true, value_name = "FILE")]
    stoplist: Option<PathBuf>,

    #[arg(long, global = true, value_name = "FILE")]
    stemmer_rules: Option<PathBuf>,

    /// Category file. Read by classify and eval; written by gen-synth,
    /// which defaults to the output path with a `.categories` extension.
    #[arg(long, global = true, value_name = "FILE")]
    categories: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for per-document work
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Table,
    Records,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Preprocess a directory of UTF-8 .txt files into a corpus file
    Index {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Rank the documents of a corpus against a query
    Query {
        corpus: PathBuf,
        query: Option<String>,
        /// File with one query per line
        #[arg(long, conflicts_with = "query")]
        query_file: Option<PathBuf>,
    },
    /// Assign each document to its most similar category
    Classify { corpus: PathBuf },
    /// Recall/precision of top-1 classification on a labeled corpus
    Eval {
        corpus: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        format: ReportFormat,
    },
    /// Generate a labeled synthetic corpus and its category file
    GenSynth {
        /// TOML generator spec
        spec: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn run_config(opts: &GlobalOpts) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &opts.config {
        cfg.apply_file(path)?;
    }
    let mut set = |key: &str, value: Option<String>| -> CliResult<()> {
        if let Some(v) = value {
            cfg.set(key, &v, None)?;
        }
        Ok(())
    };
    set("preset", opts.preset.clone())?;
    set("kernel", opts.kernel.clone())?;
    set("k", opts.k.map(|v| v.to_string()))?;
    set("kf", opts.kf.map(|v| v.to_string()))?;
    set("mode", opts.mode.clone())?;
    set("threshold", opts.threshold.map(|v| v.to_string()))?;
    set("neighbor_relevance", opts.neighbor_relevance.clone())?;
    set("seed", opts.seed.map(|v| v.to_string()))?;
    set("workers", opts.workers.map(|v| v.to_string()))?;
    if opts.no_clamp {
        cfg.clamp = false;
    }
    for (slot, value) in [
        (&mut cfg.stoplist, &opts.stoplist),
        (&mut cfg.stemmer_rules, &opts.stemmer_rules),
        (&mut cfg.categories, &opts.categories),
    ] {
        if value.is_some() {
            slot.clone_from(value);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn categories_path(cfg: &RunConfig) -> CliResult<&Path> {
    cfg.categories
        .as_deref()
        .ok_or_else(|| Failure::Usage("--categories is required".into()))
}

fn text_files(input: &Path) -> CliResult<Vec<(String, PathBuf, Option<String>)>> {
    let manifest = input.join(MANIFEST);
    if manifest.is_file() {
        let text = fs::read_to_string(&manifest)
            .map_err(|e| Failure::Io(format!("{}: {e}", manifest.display())))?;
        let mut out = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(file), label) = (fields.next(), fields.next()) else {
                unreachable!("split yields at least one field")
            };
            let path = input.join(file);
            let id = Path::new(file)
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| {
                    Failure::Usage(format!("{MANIFEST}, line {}: bad file name", idx + 1))
                })?
                .to_string();
            let label = label.map(str::trim).filter(|l| !l.is_empty() && *l != "-");
            out.push((id, path, label.map(str::to_string)));
        }
        return Ok(out);
    }
    let entries =
        fs::read_dir(input).map_err(|e| Failure::Io(format!("{}: {e}", input.display())))?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("txt") || !path.is_file() {
            continue;
        }
        if let Some(id) = path.file_stem().and_then(|s| s.to_str()) {
            out.push((id.to_string(), path.clone(), None));
        }
    }
    out.sort();
    Ok(out)
}

fn cmd_index(cfg: &RunConfig, input: &Path, output: &Path, out: &mut impl Write) -> CliResult<()> {
    let analyzer = cfg.analyzer()?;
    let mut corpus = Corpus::new();
    for (id, path, label) in text_files(input)? {
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("warning: skipping {}: {e}", path.display());
                continue;
            }
        };
        let doc = PositionalDocument::new(id.clone(), analyzer.preprocess(&text));
        if let Err(e) = corpus.insert(doc) {
            eprintln!("warning: skipping {}: {e}", path.display());
            continue;
        }
        if let Some(label) = label {
            corpus.set_label(&id, label)?;
        }
    }
    if corpus.is_empty() {
        return Err(Failure::Io(format!(
            "no documents indexed from {}",
            input.display()
        )));
    }
    corpus.save(output)?;
    writeln!(
        out,
        "indexed {} documents ({} tokens, {} distinct terms) into {}",
        corpus.len(),
        corpus.total_tokens(),
        corpus.distinct_terms(),
        output.display()
    )?;
    Ok(())
}

fn run_query(
    cfg: &RunConfig,
    corpus: &Corpus,
    analyzer: &Analyzer,
    text: &str,
    out: &mut impl Write,
) -> CliResult<()> {
    let ast = parse_query(text, analyzer).map_err(|e| Failure::Usage(e.to_string()))?;
    let scorer = cfg.scorer()?;
    let ranked = with_workers(cfg.workers, || rank_corpus(corpus, &ast, &scorer))?;
    for (rank, s) in ranked.iter().enumerate() {
        writeln!(out, "{}\t{}\t{:.6}", rank + 1, s.doc_id, s.similarity)?;
    }
    Ok(())
}

fn cmd_query(
    cfg: &RunConfig,
    corpus: &Path,
    query: Option<&str>,
    query_file: Option<&Path>,
    out: &mut impl Write,
) -> CliResult<()> {
    let analyzer = cfg.analyzer()?;
    match (query, query_file) {
        (Some(q), _) => {
            parse_query(q, &analyzer).map_err(|e| Failure::Usage(e.to_string()))?;
            let corpus = Corpus::load(corpus)?;
            run_query(cfg, &corpus, &analyzer, q, out)
        }
        (None, Some(file)) => {
            let text = fs::read_to_string(file)
                .map_err(|e| Failure::Io(format!("{}: {e}", file.display())))?;
            let queries: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
            for q in &queries {
                parse_query(q, &analyzer).map_err(|e| Failure::Usage(e.to_string()))?;
            }
            let corpus = Corpus::load(corpus)?;
            for q in queries {
                let ast = parse_query(q, &analyzer).map_err(|e| Failure::Usage(e.to_string()))?;
                writeln!(out, "# {}", render_query(&ast))?;
                run_query(cfg, &corpus, &analyzer, q, out)?;
            }
            Ok(())
        }
        (None, None) => Err(Failure::Usage("a query or --query-file is required".into())),
    }
}

fn cmd_classify(cfg: &RunConfig, corpus: &Path, out: &mut impl Write) -> CliResult<()> {
    let analyzer = cfg.analyzer()?;
    let categories = load_categories(categories_path(cfg)?, &analyzer)?;
    let corpus = Corpus::load(corpus)?;
    let predictions = predict_corpus(&corpus, &categories, &cfg.scorer()?, cfg.workers)?;
    for p in predictions {
        writeln!(out, "{}\t{}\t{:.6}", p.doc_id, p.category, p.similarity)?;
    }
    Ok(())
}

fn cmd_eval(
    cfg: &RunConfig,
    corpus: &Path,
    format: ReportFormat,
    out: &mut impl Write,
) -> CliResult<()> {
    let analyzer = cfg.analyzer()?;
    let categories = load_categories(categories_path(cfg)?, &analyzer)?;
    let corpus = Corpus::load(corpus)?;
    let report = evaluate(&corpus, &categories, &cfg.scorer()?, cfg.workers)?;
    match format {
        ReportFormat::Table => write!(out, "{}", report.to_table())?,
        ReportFormat::Records => write!(out, "{}", report.to_records())?,
    }
    Ok(())
}

fn cmd_gen_synth(
    cfg: &RunConfig,
    spec: &Path,
    output: &Path,
    out: &mut impl Write,
) -> CliResult<()> {
    let default_out = output.with_extension("categories");
    let categories_out = cfg.categories.as_deref().unwrap_or(&default_out);
    let text =
        fs::read_to_string(spec).map_err(|e| Failure::Io(format!("{}: {e}", spec.display())))?;
    let spec = SynthSpec::from_toml(&text)?;
    let synth = generate_synthetic_corpus(&spec, cfg.seed)?;
    synth.corpus.save(output)?;
    fs::write(categories_out, render_categories(&synth.categories))
        .map_err(|e| Failure::Io(format!("{}: {e}", categories_out.display())))?;
    writeln!(
        out,
        "generated {} documents in {} categories (seed {}); categories written to {}",
        synth.corpus.len(),
        synth.categories.len(),
        cfg.seed,
        categories_out.display()
    )?;
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = run_config(&cli.opts)?;
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    match &cli.command {
        Command::Index { input, output } => cmd_index(&cfg, input, output, &mut out)?,
        Command::Query {
            corpus,
            query,
            query_file,
        } => cmd_query(
            &cfg,
            corpus,
            query.as_deref(),
            query_file.as_deref(),
            &mut out,
        )?,
        Command::Classify { corpus } => cmd_classify(&cfg, corpus, &mut out)?,
        Command::Eval { corpus, format } => cmd_eval(&cfg, corpus, *format, &mut out)?,
        Command::GenSynth { spec, output } => cmd_gen_synth(&cfg, spec, output, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
