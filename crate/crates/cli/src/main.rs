//! Command-line surface for the attack → detect → correct pipeline.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/format error, 3 internal
//! contract violation. Every seeded command is bit-reproducible on identical
//! inputs, and every output file is written atomically (temp then rename).
//! The `VEILBREAK_LOG` environment variable controls diagnostic verbosity.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use veilbreak_core::attacker::{
    attack_corpus, AttackLog, AttackRecord, AttackSpec, PerturbKind, TargetStrategy,
    WeightedLexiconScorer, DEFAULT_MAX_EDITS,
};
use veilbreak_core::corpus::{corpus_to_tsv, load_corpus, Document};
use veilbreak_core::corrector::{
    correct_corpus, correction_accuracy, CorrectorConfig, SelectionPolicy,
};
use veilbreak_core::editdist::{dl_distance, CandidateIndex, DEFAULT_MAX_RADIUS};
use veilbreak_core::embedding::{EmbeddingTable, DEFAULT_WINDOW_SIZE};
use veilbreak_core::fixtures;
use veilbreak_core::lexicon::{FunctionWordList, Vocabulary, DEFAULT_SENSITIVE_MIN_COUNT};
use veilbreak_core::spam_nb::{evaluate, ClassificationReport, NaiveBayesModel, DEFAULT_TOP_K};
use veilbreak_core::Error;

/// Misspelling attacks on word-frequency classifiers, and the
/// context-sensitive corrector that undoes them.
#[derive(Parser)]
#[command(name = "veilbreak", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the restricted Damerau-Levenshtein distance between two words
    Distance { word_a: String, word_b: String },
    /// Misspell the sensitive words of a corpus; write the revised corpus and an attack log
    Attack(AttackArgs),
    /// Flag out-of-vocabulary tokens in a corpus and correct them in context
    Correct(CorrectArgs),
    /// Train the Naive Bayes classifier on a labeled corpus and save the model
    TrainNb(TrainNbArgs),
    /// Evaluate a saved model on a labeled corpus
    Eval(EvalArgs),
    /// Run the attack→detect→correct loop on bundled fixtures, no files needed
    Demo(DemoArgs),
}

#[derive(Args)]
struct AttackArgs {
    /// Labeled corpus to attack, TSV `label<TAB>text`
    #[arg(long)]
    corpus: PathBuf,
    /// Vocabulary file, TSV `word<TAB>count`
    #[arg(long)]
    vocab: PathBuf,
    /// Drop vocabulary words rarer than this
    #[arg(long, default_value_t = 1)]
    min_frequency: u64,
    /// Saved model whose most spam-indicative words become the targets
    #[arg(long)]
    model: Option<PathBuf>,
    /// How many top-ranked model words to target
    #[arg(long, default_value_t = 10)]
    top_n: usize,
    /// Keyword-weight lexicon, TSV `word<TAB>weight`, for scorer-driven targeting
    #[arg(long, conflicts_with = "model")]
    scorer_lexicon: Option<PathBuf>,
    /// Frequency floor for scorer-driven target eligibility
    #[arg(long, default_value_t = DEFAULT_SENSITIVE_MIN_COUNT)]
    min_count: u64,
    /// Function-word list, one word per line (bundled list when omitted)
    #[arg(long)]
    function_words: Option<PathBuf>,
    /// RNG seed; identical seeds reproduce identical bytes
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edit budget per misspelling (1 or 2)
    #[arg(long, default_value_t = DEFAULT_MAX_EDITS)]
    max_edits: usize,
    /// Comma-separated edit kinds to sample from
    #[arg(long, default_value = "insertion,permutation,replacement,removal")]
    ops: String,
    /// Directory for attacked_corpus.tsv, attack_log.tsv and run_config.json
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct CorrectArgs {
    /// Corpus to correct, TSV `label<TAB>text`
    #[arg(long)]
    corpus: PathBuf,
    /// Vocabulary file, TSV `word<TAB>count`
    #[arg(long)]
    vocab: PathBuf,
    /// Drop vocabulary words rarer than this
    #[arg(long, default_value_t = 1)]
    min_frequency: u64,
    /// Embeddings in word2vec text format
    #[arg(long)]
    embeddings: PathBuf,
    /// Widest edit distance searched for candidates
    #[arg(long, default_value_t = DEFAULT_MAX_RADIUS)]
    max_radius: usize,
    /// Window size P: context positions p = 1..=P are weighted 1/p
    #[arg(long = "window-P", default_value_t = DEFAULT_WINDOW_SIZE)]
    window_p: usize,
    /// How to choose among candidate corrections
    #[arg(long, value_enum, default_value_t = PolicyArg::Context)]
    policy: PolicyArg,
    /// Attack log to score the corrections against
    #[arg(long)]
    attack_log: Option<PathBuf>,
    /// Directory for corrected_corpus.tsv and corrections.tsv
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolicyArg {
    /// Least context distance, ties by frequency
    Context,
    /// Highest frequency, ignoring context
    Frequency,
}

impl From<PolicyArg> for SelectionPolicy {
    fn from(value: PolicyArg) -> SelectionPolicy {
        match value {
            PolicyArg::Context => SelectionPolicy::ContextSensitive,
            PolicyArg::Frequency => SelectionPolicy::FrequencyOnly,
        }
    }
}

#[derive(Args)]
struct TrainNbArgs {
    /// Labeled training corpus, TSV `label<TAB>text`
    #[arg(long)]
    corpus: PathBuf,
    /// Where to write the trained model
    #[arg(long)]
    model: PathBuf,
    /// Number of most-frequent words kept as features
    #[arg(long, default_value_t = DEFAULT_TOP_K)]
    top_k: usize,
}

#[derive(Args)]
struct EvalArgs {
    /// Labeled corpus to evaluate, TSV `label<TAB>text`
    #[arg(long)]
    corpus: PathBuf,
    /// Saved model file
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args)]
struct DemoArgs {
    /// RNG seed for the attack stage
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Optional directory for the demo artifacts
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// CLI failure: either a usage problem or an error from the pipeline.
enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg} (try --help)"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(Error::Contract(_)) => 3,
            CliError::Core(_) => 2,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    // Die quietly when stdout is a closed pipe (`veilbreak eval … | head`),
    // like any other line-oriented tool.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("VEILBREAK_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = u8::from(err.use_stderr());
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Distance { word_a, word_b } => {
            println!("{}", dl_distance(&word_a, &word_b));
            Ok(())
        }
        Command::Attack(args) => cmd_attack(args),
        Command::Correct(args) => cmd_correct(args),
        Command::TrainNb(args) => cmd_train_nb(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Demo(args) => cmd_demo(args),
    }
}

fn cmd_attack(args: AttackArgs) -> Result<(), CliError> {
    let ops = PerturbKind::parse_list(&args.ops).map_err(|e| usage(e.to_string()))?;
    if !(1..=2).contains(&args.max_edits) {
        return Err(usage("--max-edits must be 1 or 2"));
    }
    if args.model.is_none() && args.scorer_lexicon.is_none() {
        return Err(usage("attack needs --model or --scorer-lexicon"));
    }
    let docs = load_corpus(&args.corpus)?;
    let vocab = Vocabulary::load(&args.vocab, args.min_frequency)?;
    let spec = AttackSpec {
        max_edits: args.max_edits,
        ops_allowed: ops,
        rng_seed: args.seed,
        require_oov: true,
    };

    let outcome = match (&args.model, &args.scorer_lexicon) {
        (Some(model_path), None) => {
            let model = NaiveBayesModel::load(model_path)?;
            let strategy = TargetStrategy::NbTargets {
                model: &model,
                top_n: args.top_n,
            };
            attack_corpus(&docs, &vocab, &spec, &strategy)?
        }
        (None, Some(lexicon_path)) => {
            let scorer = WeightedLexiconScorer::load(lexicon_path)?;
            let function_words = match &args.function_words {
                Some(path) => FunctionWordList::from_path(path)?,
                None => FunctionWordList::bundled(),
            };
            let strategy = TargetStrategy::Scorer {
                scorer: &scorer,
                function_words: &function_words,
                min_count: args.min_count,
            };
            attack_corpus(&docs, &vocab, &spec, &strategy)?
        }
        (None, None) => return Err(usage("attack needs --model or --scorer-lexicon")),
        (Some(_), Some(_)) => unreachable!("clap rejects --model with --scorer-lexicon"),
    };

    fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    write_atomic(
        &args.out_dir.join("attacked_corpus.tsv"),
        &corpus_to_tsv(&outcome.documents)?,
    )?;
    write_atomic(&args.out_dir.join("attack_log.tsv"), &outcome.log.to_tsv()?)?;
    let config = RunConfig {
        command: "attack",
        corpus: Some(&args.corpus),
        vocab: Some(&args.vocab),
        model: args.model.as_deref(),
        scorer_lexicon: args.scorer_lexicon.as_deref(),
        top_n: args.model.is_some().then_some(args.top_n),
        min_count: args.scorer_lexicon.is_some().then_some(args.min_count),
        min_frequency: args.min_frequency,
        seed: args.seed,
        max_edits: args.max_edits,
        ops: spec.ops_allowed.iter().map(|k| k.name()).collect(),
        require_oov: true,
    };
    write_atomic(&args.out_dir.join("run_config.json"), &config.to_json())?;

    println!(
        "attacked {} documents: {} substitutions, {} failed targets",
        outcome.documents.len(),
        outcome.log.records.len(),
        outcome.failed_targets
    );
    println!("wrote {}", args.out_dir.display());
    Ok(())
}

fn cmd_correct(args: CorrectArgs) -> Result<(), CliError> {
    if args.max_radius == 0 {
        return Err(usage("--max-radius must be at least 1"));
    }
    if args.window_p == 0 {
        return Err(usage("--window-P must be at least 1"));
    }
    let docs = load_corpus(&args.corpus)?;
    let vocab = Vocabulary::load(&args.vocab, args.min_frequency)?;
    let table = EmbeddingTable::load(&args.embeddings)?;
    let index = CandidateIndex::with_max_distance(&vocab, args.max_radius);
    let config = CorrectorConfig {
        max_radius: args.max_radius,
        window_size: args.window_p,
        policy: args.policy.into(),
    };
    let (corrected, stats) = correct_corpus(&vocab, &index, &table, &docs, &config);

    fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    write_atomic(
        &args.out_dir.join("corrected_corpus.tsv"),
        &corpus_to_tsv(&corrected)?,
    )?;
    write_atomic(
        &args.out_dir.join("corrections.tsv"),
        &corrections_tsv(&stats)?,
    )?;

    println!(
        "corrected {} documents: {} flagged, {} corrected, {} left unchanged",
        corrected.len(),
        stats.flagged,
        stats.corrected,
        stats.unchanged_oov
    );
    if let Some(log_path) = &args.attack_log {
        let log = AttackLog::load(log_path)?;
        let accuracy = correction_accuracy(&log, &stats)?;
        println!("correction accuracy {accuracy:.3}");
    }
    println!("wrote {}", args.out_dir.display());
    Ok(())
}

/// Substitution diagnostics in the attack-log TSV format: `original` is the
/// flagged surface, `misspelled` the word put in its place.
fn corrections_tsv(stats: &veilbreak_core::CorpusCorrection) -> Result<String, Error> {
    let mut records = Vec::new();
    for (doc_id, result) in &stats.by_document {
        for record in &result.records {
            if let Some(chosen) = &record.chosen {
                records.push(AttackRecord {
                    doc_id: doc_id.clone(),
                    token_index: record.token_index,
                    original: record.original.clone(),
                    misspelled: chosen.clone(),
                });
            }
        }
    }
    AttackLog { records }.to_tsv()
}

fn cmd_train_nb(args: TrainNbArgs) -> Result<(), CliError> {
    if args.top_k == 0 {
        return Err(usage("--top-k must be at least 1"));
    }
    let docs = load_corpus(&args.corpus)?;
    let model = NaiveBayesModel::train(&docs, args.top_k)?;
    if let Some(parent) = args.model.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    write_atomic(&args.model, &model.to_text())?;
    println!(
        "trained on {} documents: labels {}/{}, {} features",
        docs.len(),
        model.negative_label(),
        model.positive_label(),
        model.features().len()
    );
    println!("wrote {}", args.model.display());
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let docs = load_corpus(&args.corpus)?;
    let model = NaiveBayesModel::load(&args.model)?;
    let report = evaluate(&model, &docs)?;
    print_report(&report);
    Ok(())
}

fn print_report(report: &ClassificationReport) {
    println!(
        "accuracy {:.3} ({}/{})",
        report.accuracy, report.correct, report.total
    );
    println!(
        "{:<16} {:>7} {:>9} {:>7} {:>7}",
        "class", "support", "precision", "recall", "f1"
    );
    for class in &report.per_class {
        println!(
            "{:<16} {:>7} {:>9.3} {:>7.3} {:>7.3}",
            class.label, class.support, class.precision, class.recall, class.f1
        );
    }
    println!("macro f1 {:.3}", report.macro_f1);
}

/// Number of top spam-indicative words the demo attacks — exactly the six
/// keywords planted in the bundled corpus.
const DEMO_TOP_N: usize = 6;
/// Bundled-corpus split: the first 30 documents train, the last 10 test.
const DEMO_TRAIN_DOCS: usize = 30;

fn cmd_demo(args: DemoArgs) -> Result<(), CliError> {
    let docs = fixtures::demo_corpus();
    let vocab = fixtures::demo_vocab();
    let table = fixtures::demo_embeddings();
    let (train, test) = docs.split_at(DEMO_TRAIN_DOCS);

    let model = NaiveBayesModel::train(train, DEFAULT_TOP_K)?;
    let clean = evaluate(&model, test)?;

    let spec = AttackSpec {
        rng_seed: args.seed,
        ..AttackSpec::default()
    };
    let strategy = TargetStrategy::NbTargets {
        model: &model,
        top_n: DEMO_TOP_N,
    };
    let outcome = attack_corpus(test, &vocab, &spec, &strategy)?;
    let attacked = evaluate(&model, &outcome.documents)?;

    let index = CandidateIndex::build(&vocab);
    let config = CorrectorConfig::default();
    let (corrected_docs, stats) =
        correct_corpus(&vocab, &index, &table, &outcome.documents, &config);
    let corrected = evaluate(&model, &corrected_docs)?;

    println!(
        "bundled demo: {} training docs, {} test docs, {} vocabulary words",
        train.len(),
        test.len(),
        vocab.len()
    );
    println!(
        "attack (seed {}): {} substitutions, {} failed targets",
        args.seed,
        outcome.log.records.len(),
        outcome.failed_targets
    );
    println!();
    println!("{:<10} {:>8}", "stage", "accuracy");
    println!("{:<10} {:>8.3}", "clean", clean.accuracy);
    println!("{:<10} {:>8.3}", "attacked", attacked.accuracy);
    println!("{:<10} {:>8.3}", "corrected", corrected.accuracy);

    if !outcome.log.records.is_empty() {
        let accuracy = correction_accuracy(&outcome.log, &stats)?;
        println!();
        println!("attacked tokens restored exactly: {accuracy:.3}");
        let doc_id = &outcome.log.records[0].doc_id;
        let find = |docs: &[Document]| {
            docs.iter()
                .find(|d| &d.id == doc_id)
                .map(|d| d.text.clone())
        };
        if let (Some(original), Some(hit), Some(fixed)) =
            (find(test), find(&outcome.documents), find(&corrected_docs))
        {
            println!();
            println!("sample (doc {doc_id}):");
            println!("  original:  {original}");
            println!("  attacked:  {hit}");
            println!("  corrected: {fixed}");
        }
    }

    if let Some(out_dir) = &args.out_dir {
        fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
        write_atomic(&out_dir.join("nb_model.tsv"), &model.to_text())?;
        write_atomic(
            &out_dir.join("attacked_test.tsv"),
            &corpus_to_tsv(&outcome.documents)?,
        )?;
        write_atomic(
            &out_dir.join("corrected_test.tsv"),
            &corpus_to_tsv(&corrected_docs)?,
        )?;
        write_atomic(&out_dir.join("attack_log.tsv"), &outcome.log.to_tsv()?)?;
        let config = RunConfig {
            command: "demo",
            corpus: None,
            vocab: None,
            model: None,
            scorer_lexicon: None,
            top_n: Some(DEMO_TOP_N),
            min_count: None,
            min_frequency: 1,
            seed: args.seed,
            max_edits: spec.max_edits,
            ops: spec.ops_allowed.iter().map(|k| k.name()).collect(),
            require_oov: spec.require_oov,
        };
        write_atomic(&out_dir.join("run_config.json"), &config.to_json())?;
        println!();
        println!("wrote {}", out_dir.display());
    }
    Ok(())
}

/// Everything needed to reproduce a seeded run, recorded next to its outputs.
#[derive(serde::Serialize)]
struct RunConfig<'a> {
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    corpus: Option<&'a Path>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vocab: Option<&'a Path>,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<&'a Path>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scorer_lexicon: Option<&'a Path>,
    #[serde(skip_serializing_if = "Option::is_none")]
    top_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_count: Option<u64>,
    min_frequency: u64,
    seed: u64,
    max_edits: usize,
    ops: Vec<&'a str>,
    require_oov: bool,
}

impl RunConfig<'_> {
    fn to_json(&self) -> String {
        let mut json = serde_json::to_string_pretty(self).expect("run config serializes to JSON");
        json.push('\n');
        json
    }
}

/// Write via a temp file in the same directory, then rename into place.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Error> {
    let dir = match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => parent,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
