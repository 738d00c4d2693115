//! `randemb`: one binary, verb subcommands, TSV in and out.
//!
//! Exit codes: 0 success, 1 usage error, 2 input/parse error, 3 numeric
//! failure. Standard output carries only data; diagnostics go to standard
//! error. Every source of randomness takes an explicit seed, so repeated
//! invocations are byte-identical.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use randemb::corpus::{
    load_stopwords, parse_conllu, parse_ner, parse_predictions, parse_sentences, StopwordSet,
    TagScheme, UnitKind,
};
use randemb::gp::{convergence_experiment, ConvergenceRow, GpExperimentConfig};
use randemb::metrics::{self, parse_metric_tsv, MetricSeries};
use randemb::samplecomp::{parse_curve_tsv, sample_complexity_ratio, RatioSemantics};
use randemb::slice::{median_split, slice_errors};
use randemb::{CirculantEmbeddingSpec, CirculantStore, Error};

#[derive(Parser)]
#[command(name = "randemb", version, about = "Circulant random embeddings and dataset difficulty profiling", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate, inspect and export circulant embedding stores
    Embed {
        #[command(subcommand)]
        action: EmbedCommand,
    },
    /// Compute difficulty metrics over an evaluation corpus (TSV to stdout)
    Profile {
        #[command(subcommand)]
        task: ProfileCommand,
    },
    /// Median-split error-gap report for two prediction sets
    Slice(SliceArgs),
    /// Sample-complexity ratio from an accuracy-vs-fraction curve
    Samplecomp(SamplecompArgs),
    /// GP posterior convergence experiment (TSV to stdout)
    Gpsim(GpsimArgs),
}

#[derive(Subcommand)]
enum EmbedCommand {
    /// Generate a store and write the compact binary file
    Gen(GenArgs),
    /// Print one embedding row as space-separated values
    Row(RowArgs),
    /// Export the dense text embedding format for a vocabulary file
    Export(ExportArgs),
    /// Print the compact-vs-dense memory footprint report
    Mem(MemArgs),
}

#[derive(Args)]
struct SpecArgs {
    /// Vocabulary size n (rows)
    #[arg(long)]
    vocab_size: Option<usize>,
    /// Embedding dimension d
    #[arg(long)]
    dim: Option<usize>,
    /// Seed for all randomness
    #[arg(long)]
    seed: Option<u64>,
    /// Rescale so the Frobenius norm equals this target
    #[arg(long)]
    norm_target: Option<f64>,
}

impl SpecArgs {
    fn build(&self) -> Result<CirculantEmbeddingSpec, Error> {
        let (Some(n), Some(d), Some(seed)) = (self.vocab_size, self.dim, self.seed) else {
            return Err(Error::InvalidArgument(
                "--vocab-size, --dim and --seed are required".into(),
            ));
        };
        let spec = CirculantEmbeddingSpec::new(n, d, seed)?;
        match self.norm_target {
            Some(target) => spec.normalize_to(target),
            None => Ok(spec),
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Output path for the compact binary file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RowArgs {
    /// Compact binary file to read (alternative to spec flags)
    #[arg(long, conflicts_with_all = ["vocab_size", "dim", "seed", "norm_target"])]
    file: Option<PathBuf>,
    #[command(flatten)]
    spec: SpecArgs,
    /// Row index (0-based)
    #[arg(long)]
    index: usize,
}

#[derive(Args)]
struct ExportArgs {
    /// Compact binary file to read (alternative to spec flags)
    #[arg(long, conflicts_with_all = ["vocab_size", "dim", "seed", "norm_target"])]
    file: Option<PathBuf>,
    #[command(flatten)]
    spec: SpecArgs,
    /// Vocabulary file, one token per line, exactly n lines
    #[arg(long)]
    vocab: PathBuf,
    /// Output path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MemArgs {
    #[arg(long)]
    vocab_size: usize,
    #[arg(long)]
    dim: usize,
    /// Dense entry width in bytes
    #[arg(long, default_value_t = 4)]
    width: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricFamily {
    Complexity,
    Ambiguity,
    Unseen,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Iob1,
    Bio2,
}

impl From<SchemeArg> for TagScheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Iob1 => TagScheme::Iob1,
            SchemeArg::Bio2 => TagScheme::Bio2,
        }
    }
}

#[derive(Subcommand)]
enum ProfileCommand {
    /// Token/entity metrics for NER corpora
    Ner(ProfileNerArgs),
    /// Sentence metrics for classification corpora
    Sent(ProfileSentArgs),
}

#[derive(Args)]
struct ProfileNerArgs {
    /// Training corpus (CoNLL-2003-style)
    #[arg(long)]
    train: PathBuf,
    /// Evaluation corpus (CoNLL-2003-style)
    #[arg(long)]
    eval: PathBuf,
    #[arg(long, value_enum)]
    metric: MetricFamily,
    /// Tag scheme of both files
    #[arg(long, value_enum, default_value = "iob1")]
    scheme: SchemeArg,
}

#[derive(Args)]
struct ProfileSentArgs {
    /// Training corpus (`label<TAB>sentence` per line)
    #[arg(long)]
    train: PathBuf,
    /// Evaluation corpus (`label<TAB>sentence` per line)
    #[arg(long)]
    eval: PathBuf,
    #[arg(long, value_enum)]
    metric: MetricFamily,
    /// CoNLL-U parses of the evaluation sentences (required for complexity)
    #[arg(long)]
    parses: Option<PathBuf>,
    /// Stopword file, one word per line (default: bundled English list)
    #[arg(long)]
    stopwords: Option<PathBuf>,
}

#[derive(Args)]
struct SliceArgs {
    /// Metric TSV (`unit_id<TAB>value`; `inf` and `NA` allowed)
    #[arg(long)]
    metrics: PathBuf,
    /// Predictions of the base (contextual) model
    #[arg(long)]
    preds_base: PathBuf,
    /// Predictions of the comparison model
    #[arg(long)]
    preds_other: PathBuf,
    /// Name to print for the metric (default: metrics file stem)
    #[arg(long)]
    metric_name: Option<String>,
    /// Unit kind recorded in the prediction sets
    #[arg(long, default_value = "sentence")]
    unit_kind: String,
    /// Emit the report as TSV instead of an aligned table
    #[arg(long)]
    tsv: bool,
}

#[derive(Args)]
struct SamplecompArgs {
    /// Curve TSV: `fraction<TAB>score`, fractions like `1/64` or decimals
    #[arg(long)]
    curve: PathBuf,
    /// Competitor's full-data score
    #[arg(long)]
    other_full: f64,
    /// Use largest-prefix semantics instead of largest-qualifying
    #[arg(long)]
    prefix_semantics: bool,
}

#[derive(Args)]
struct GpsimArgs {
    /// key=value config file (flags below override it)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    sigma_obs: Option<f64>,
    #[arg(long)]
    sigma_kernel: Option<f64>,
    /// Comma-separated observation counts, strictly increasing
    #[arg(long)]
    m_grid: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Print the TSV header line before the rows
    #[arg(long)]
    header: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("randemb: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidArgument(_) => 1,
        Error::Numeric(_) => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Embed { action } => match action {
            EmbedCommand::Gen(args) => cmd_embed_gen(args),
            EmbedCommand::Row(args) => cmd_embed_row(args),
            EmbedCommand::Export(args) => cmd_embed_export(args),
            EmbedCommand::Mem(args) => cmd_embed_mem(args),
        },
        Command::Profile { task } => match task {
            ProfileCommand::Ner(args) => cmd_profile_ner(args),
            ProfileCommand::Sent(args) => cmd_profile_sent(args),
        },
        Command::Slice(args) => cmd_slice(args),
        Command::Samplecomp(args) => cmd_samplecomp(args),
        Command::Gpsim(args) => cmd_gpsim(args),
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Error> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Load a store from a compact file, or generate one from spec flags.
fn load_store(file: Option<&Path>, spec: &SpecArgs) -> Result<CirculantStore, Error> {
    match file {
        Some(path) => CirculantStore::read_compact(open(path)?),
        None => Ok(spec.build()?.to_store()),
    }
}

fn cmd_embed_gen(args: GenArgs) -> Result<(), Error> {
    let store = args.spec.build()?.to_store();
    let mut out = BufWriter::new(File::create(&args.out)?);
    store.write_compact(&mut out)?;
    out.flush()?;
    Ok(())
}

fn cmd_embed_row(args: RowArgs) -> Result<(), Error> {
    let store = load_store(args.file.as_deref(), &args.spec)?;
    let row = store.row::<f64>(args.index)?;
    let line: Vec<String> = row.iter().map(f64::to_string).collect();
    println!("{}", line.join(" "));
    Ok(())
}

fn cmd_embed_export(args: ExportArgs) -> Result<(), Error> {
    let store = load_store(args.file.as_deref(), &args.spec)?;
    let vocab: Vec<String> = open(&args.vocab)?
        .lines()
        .collect::<io::Result<Vec<_>>>()?
        .into_iter()
        .filter(|l| !l.is_empty())
        .collect();
    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            store.export_dense::<f64, _>(&vocab, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            store.export_dense::<f64, _>(&vocab, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn cmd_embed_mem(args: MemArgs) -> Result<(), Error> {
    let spec = CirculantEmbeddingSpec::new(args.vocab_size, args.dim, 0)?;
    let fp = spec.memory_footprint(args.width)?;
    println!("vocab_size\t{}", args.vocab_size);
    println!("dim\t{}", args.dim);
    println!("entry_width_bytes\t{}", fp.entry_width_bytes);
    println!("compact_bytes\t{}", fp.compact_bytes);
    println!("dense_bytes\t{}", fp.dense_bytes);
    Ok(())
}

fn load_stops(path: Option<&Path>) -> Result<StopwordSet, Error> {
    match path {
        Some(p) => load_stopwords(open(p)?),
        None => Ok(StopwordSet::bundled()),
    }
}

fn print_series(series: &MetricSeries<f64>) -> Result<(), Error> {
    let stdout = io::stdout();
    let mut w = BufWriter::new(stdout.lock());
    series.write_tsv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn cmd_profile_ner(args: ProfileNerArgs) -> Result<(), Error> {
    let scheme = TagScheme::from(args.scheme);
    let train = parse_ner(open(&args.train)?, scheme)?;
    let eval = parse_ner(open(&args.eval)?, scheme)?;
    let series = match args.metric {
        MetricFamily::Complexity => metrics::ner_complexity::<f64>(&eval),
        MetricFamily::Ambiguity => {
            metrics::ner_ambiguity(&metrics::build_token_table(&train), &eval)
        }
        MetricFamily::Unseen => metrics::ner_unseen(&metrics::build_token_table(&train), &eval),
    };
    print_series(&series)
}

fn cmd_profile_sent(args: ProfileSentArgs) -> Result<(), Error> {
    let train = parse_sentences(open(&args.train)?)?;
    let eval = parse_sentences(open(&args.eval)?)?;
    let stops = load_stops(args.stopwords.as_deref())?;
    let series = match args.metric {
        MetricFamily::Complexity => {
            let parses_path = args.parses.as_deref().ok_or_else(|| {
                Error::InvalidArgument("--parses is required for the complexity metric".into())
            })?;
            let parses = parse_conllu(open(parses_path)?)?;
            metrics::sent_complexity::<f64>(&eval, &parses, &stops)?
        }
        MetricFamily::Ambiguity => {
            let table = metrics::build_unigram_table::<f64>(&train, &stops);
            metrics::sent_ambiguity(&table, &eval, &stops)
        }
        MetricFamily::Unseen => {
            let table = metrics::build_unigram_table::<f64>(&train, &stops);
            metrics::sent_unseen(&table, &eval, &stops)
        }
    };
    print_series(&series)
}

fn cmd_slice(args: SliceArgs) -> Result<(), Error> {
    let unit_kind: UnitKind = args.unit_kind.parse()?;
    let values = parse_metric_tsv::<f64, _>(open(&args.metrics)?)?;
    let base = parse_predictions(open(&args.preds_base)?, unit_kind)?;
    let other = parse_predictions(open(&args.preds_other)?, unit_kind)?;
    let name = match &args.metric_name {
        Some(name) => name.clone(),
        None => args
            .metrics
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "metric".to_string()),
    };
    let split = median_split(&values)?;
    let report = slice_errors(&name, &split, &base, &other)?;
    if report.dropped > 0 {
        eprintln!(
            "randemb: warning: dropped {} unit(s) not covered by both prediction sets",
            report.dropped
        );
    }
    if args.tsv {
        let stdout = io::stdout();
        let mut w = BufWriter::new(stdout.lock());
        report.write_tsv(&mut w)?;
        w.flush()?;
    } else {
        println!("{report}");
    }
    Ok(())
}

fn cmd_samplecomp(args: SamplecompArgs) -> Result<(), Error> {
    let curve = parse_curve_tsv::<f64, _>(open(&args.curve)?)?;
    let semantics = if args.prefix_semantics {
        RatioSemantics::LargestPrefix
    } else {
        RatioSemantics::LargestQualifying
    };
    let n = sample_complexity_ratio(&curve, args.other_full, semantics)?;
    println!("{n}");
    Ok(())
}

fn cmd_gpsim(args: GpsimArgs) -> Result<(), Error> {
    let mut config = GpExperimentConfig::default();
    if let Some(path) = &args.config {
        let mut text = String::new();
        open(path)?.read_to_string(&mut text)?;
        config.apply_key_values(&text)?;
    }
    if let Some(n) = args.n {
        config.n_words = n;
    }
    if let Some(d) = args.d {
        config.dim = d;
    }
    if let Some(s) = args.sigma_obs {
        config.sigma_obs = s;
    }
    if let Some(s) = args.sigma_kernel {
        config.sigma_kernel = s;
    }
    if let Some(grid) = &args.m_grid {
        config.m_grid = randemb::gp::experiment::parse_m_grid(grid)?;
    }
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    config.validate()?;

    let rows = convergence_experiment::<f64>(&config)?;
    let stdout = io::stdout();
    let mut w = BufWriter::new(stdout.lock());
    if args.header {
        writeln!(w, "{}", ConvergenceRow::<f64>::TSV_COLUMNS)?;
    }
    let mut any_fallback = false;
    for row in &rows {
        writeln!(w, "{}", row.to_tsv_row())?;
        any_fallback |= row.cov_norm_fallback;
    }
    w.flush()?;
    if any_fallback {
        eprintln!("randemb: warning: eigensolver fell back to max-abs for some covariance norms");
    }
    Ok(())
}
