use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use intellig::cues::CueIndex;
use intellig::pipeline::{
    convert_cldf, emit_report, load_dataset, parse_list, prepare, run_cross, run_monolingual,
    ExperimentConfig, PipelineError, ReportFormat, Trimming,
};
use intellig::semantics::{load_embeddings, pairwise_cosine_report};
use intellig::{GoldMatching, SoundClass, SoundClassTable};
use log::info;

#[derive(Parser)]
#[command(name = "intellig", version, about = "Model cross-language word comprehension with linear discriminative learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the monolingual and cross-language experiment grid.
    Run(RunArgs),
    /// Write per-set cosine similarities between two languages.
    CosineReport(CosineArgs),
    /// Flatten a CLDF wordlist into the dataset TSV.
    ConvertCldf {
        cldf_dir: PathBuf,
        tsv: PathBuf,
    },
    /// Print the cue index of one language as `CUE<TAB>COLUMN`.
    DumpCues(DumpCuesArgs),
    /// Check a dataset (and optionally embedding coverage) without running experiments.
    Validate {
        tsv: PathBuf,
        #[arg(long)]
        embeddings: Option<PathBuf>,
        #[arg(long)]
        sound_classes: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
    },
}

#[derive(Args, Default)]
struct DataArgs {
    /// key = value experiment file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Comma-separated language codes.
    #[arg(long)]
    languages: Option<String>,
    #[arg(long)]
    sound_classes: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Comma-separated gram sizes.
    #[arg(long)]
    grams: Option<String>,
    /// Only trimmed forms.
    #[arg(long, conflicts_with = "no_trim")]
    trim: bool,
    /// Only full forms.
    #[arg(long)]
    no_trim: bool,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Comma-separated candidate depths.
    #[arg(long)]
    topk: Option<String>,
    /// Count a hit for any gold row identical to the target vector.
    #[arg(long)]
    identical_vectors: bool,
    /// Write F and the predicted vectors of every cell as CSV.
    #[arg(long)]
    dump_matrices: bool,
    /// Which grid to run.
    #[arg(long, value_parser = ["all", "mono", "cross"], default_value = "all")]
    mode: String,
}

#[derive(Args)]
struct CosineArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Two comma-separated language codes.
    #[arg(long)]
    pair: String,
}

#[derive(Args)]
struct DumpCuesArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    language: String,
    #[arg(long, default_value_t = 4)]
    grams: usize,
    #[arg(long)]
    trim: bool,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[arg(long)]
    sound_classes: Option<PathBuf>,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn base_config(data: &DataArgs) -> Result<ExperimentConfig> {
    let mut config = match &data.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(p) = &data.dataset {
        config.dataset = p.clone();
    }
    if let Some(p) = &data.embeddings {
        config.embeddings = p.clone();
    }
    if let Some(l) = &data.languages {
        config.set("languages", l)?;
    }
    if let Some(p) = &data.sound_classes {
        config.sound_classes = Some(p.clone());
    }
    if let Some(p) = &data.out {
        config.output = p.clone();
    }
    if config.dataset.as_os_str().is_empty() || config.embeddings.as_os_str().is_empty() {
        bail!("both a dataset and an embedding file are required (via --config or flags)");
    }
    Ok(config)
}

fn run(args: RunArgs) -> Result<()> {
    let mut config = base_config(&args.data)?;
    if let Some(g) = &args.grams {
        config.grams = parse_list("grams", g)?;
    }
    if args.trim {
        config.trimming = Trimming::Trimmed;
    } else if args.no_trim {
        config.trimming = Trimming::Full;
    }
    if let Some(t) = args.threshold {
        config.threshold = t;
    }
    if let Some(l) = args.lambda {
        config.lambda = l;
    }
    if let Some(k) = &args.topk {
        config.top_k = parse_list("topk", k)?;
    }
    if args.identical_vectors {
        config.matching = GoldMatching::IdenticalVector;
    }
    config.dump_matrices |= args.dump_matrices;
    config.validate()?;

    let data = prepare(&config)?;
    let mut results = intellig::ResultTable::default();
    if args.mode != "cross" {
        results.merge(run_monolingual(&config, &data.table, &data.store)?);
    }
    if args.mode != "mono" && config.languages.len() > 1 {
        results.merge(run_cross(&config, &data.table, &data.store)?);
    }
    let written = emit_report(&results, &config.output, &[ReportFormat::Csv, ReportFormat::Markdown])?;
    print!("{}", results.to_markdown());
    for path in written {
        info!("wrote {}", path.display());
    }
    Ok(())
}

fn cosine_report(args: CosineArgs) -> Result<()> {
    let (a, b) = args
        .pair
        .split_once(',')
        .map(|(a, b)| (a.trim().to_lowercase(), b.trim().to_lowercase()))
        .context("--pair expects two comma-separated language codes")?;
    let config = base_config(&args.data)?;
    for lang in [&a, &b] {
        if !config.languages.contains(lang) {
            bail!("language {lang} is not among the configured languages");
        }
    }
    let data = prepare(&config)?;
    let report = pairwise_cosine_report(&data.store, &data.table, (&a, &b))?;
    std::fs::create_dir_all(&config.output)
        .with_context(|| format!("creating {}", config.output.display()))?;
    let path = config.output.join(format!("cosine_{a}-{b}.csv"));
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    report.write_csv(BufWriter::new(file))?;
    println!(
        "{a}-{b}: {} sets, median cosine {:.4}",
        report.values.len(),
        report.median().unwrap_or(f64::NAN)
    );
    info!("wrote {}", path.display());
    Ok(())
}

fn sound_classes(path: Option<&Path>) -> Result<SoundClassTable> {
    Ok(match path {
        Some(p) => SoundClassTable::from_path(p)?,
        None => SoundClassTable::default(),
    })
}

fn dump_cues(args: DumpCuesArgs) -> Result<()> {
    let table = load_dataset(&args.dataset)?;
    let classes = sound_classes(args.sound_classes.as_deref())?;
    let threshold = args.trim.then_some(args.threshold);
    let words = table.sound_classes_for(&args.language, threshold, &classes)?;
    let index = CueIndex::from_words(&words, args.grams)?;
    match &args.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            index.write_tsv(BufWriter::new(file))?;
        }
        None => index.write_tsv(io::stdout().lock())?,
    }
    Ok(())
}

fn validate(tsv: &Path, embeddings: Option<&Path>, classes_path: Option<&Path>, threshold: f64) -> Result<()> {
    let table = load_dataset(tsv)?;
    let classes = sound_classes(classes_path)?;
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "{} complete cognate sets, languages: {}",
        table.set_count(),
        table.languages().join(", ")
    )?;
    for d in table.dropped() {
        writeln!(out, "dropped set {}: {}", d.cogset, d.reason)?;
    }
    let mut trim_failures = 0;
    for set in table.cognate_sets() {
        if let Err(e) = table.alignment(set)?.trim(threshold) {
            writeln!(out, "set {set}: {e}")?;
            trim_failures += 1;
        }
    }
    for lang in table.languages() {
        let words = table.sound_classes_for(lang, None, &classes)?;
        let mut histogram: BTreeMap<SoundClass, usize> = BTreeMap::new();
        for (_, seq) in &words {
            for &c in seq.classes() {
                *histogram.entry(c).or_default() += 1;
            }
        }
        let counts: Vec<String> = SoundClass::ALL
            .iter()
            .map(|c| format!("{c}:{}", histogram.get(c).copied().unwrap_or(0)))
            .collect();
        writeln!(out, "{lang}: {} words, classes {}", words.len(), counts.join(" "))?;
    }
    if let Some(path) = embeddings {
        let languages: BTreeSet<String> = table.languages().iter().cloned().collect();
        let vocabulary: HashSet<(String, String)> = table
            .entries()
            .iter()
            .map(|e| (e.language.clone(), e.lookup_key().to_string()))
            .collect();
        let store = load_embeddings(path, &languages, Some(&vocabulary))?;
        let embeddable = table.retain_embeddable(&store)?;
        writeln!(
            out,
            "{} of {} sets have embeddings for every form (dimension {})",
            embeddable.set_count(),
            table.set_count(),
            store.dimension()
        )?;
        for d in &embeddable.dropped()[table.dropped().len()..] {
            writeln!(out, "  set {}: {}", d.cogset, d.reason)?;
        }
    }
    if trim_failures > 0 {
        bail!("{trim_failures} sets cannot be trimmed at threshold {threshold}");
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<PipelineError>() {
        Some(e) if e.is_numerical() => 2,
        _ => match err.downcast_ref::<intellig::ldl::LdlError>() {
            Some(intellig::ldl::LdlError::NumericalFailure(_)) => 2,
            _ => 1,
        },
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::CosineReport(args) => cosine_report(args),
        Command::ConvertCldf { cldf_dir, tsv } => (|| {
            let file = File::create(&tsv).with_context(|| format!("creating {}", tsv.display()))?;
            let n = convert_cldf(&cldf_dir, BufWriter::new(file))?;
            println!("wrote {n} forms to {}", tsv.display());
            Ok(())
        })(),
        Command::DumpCues(args) => dump_cues(args),
        Command::Validate {
            tsv,
            embeddings,
            sound_classes,
            threshold,
        } => validate(&tsv, embeddings.as_deref(), sound_classes.as_deref(), threshold),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
