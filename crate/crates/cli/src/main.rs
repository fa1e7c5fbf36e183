use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use textsweep::{Configuration, TokenizerSet};

mod commands;

/// Exhaustive preprocessing/tokenizer sweeps for short-text polarity
/// classification.
#[derive(Debug, Parser)]
#[command(name = "textsweep", version, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normalize stdin line by line under a flag assignment.
    Transform(TransformArgs),
    /// Print the token bag of each stdin line as JSON.
    Tokenize(TokenizeArgs),
    /// Train on a whole corpus and report training accuracy.
    Train(TrainArgs),
    /// Score one configuration by cross-validation or on a gold split.
    Eval(EvalArgs),
    /// Evaluate many configurations and store one JSON line per result.
    Sweep(SweepArgs),
    /// Summarize the k best records of a results file as TSV.
    Topk(TopkArgs),
    /// Cross the flags of the best records with every tokenizer subset.
    Expand(ExpandArgs),
    /// Fit Heaps' law to the vocabulary growth of a corpus.
    Heaps(HeapsArgs),
    /// Generate a synthetic labeled corpus.
    Gen(GenArgs),
}

fn parse_config(s: &str) -> Result<Configuration, String> {
    Configuration::parse_fragment(s).map_err(|e| e.to_string())
}

fn parse_tokenizers(s: &str) -> Result<TokenizerSet, String> {
    s.parse().map_err(|e: textsweep::ConfigError| e.to_string())
}

#[derive(Debug, Args)]
struct LexiconArgs {
    /// Directory overriding bundled lexicon files (stopwords.txt,
    /// emoticons.tsv, abbreviations.tsv, skip_words.txt, lemmas.tsv).
    #[arg(long, value_name = "DIR")]
    lexicons: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TransformArgs {
    /// Flags to enable, e.g. `stem,del-d1,usr` or `lc=1,emo=0`.
    #[arg(long, value_name = "FRAGMENT", default_value = "", value_parser = parse_config)]
    flags: Configuration,
    #[command(flatten)]
    lexicons: LexiconArgs,
}

#[derive(Debug, Args)]
struct TokenizeArgs {
    /// Tokenizers joined by `+`, e.g. `w1+q3`.
    #[arg(long, default_value = "w1", value_parser = parse_tokenizers)]
    tok: TokenizerSet,
    /// Normalize first with these flags.
    #[arg(long, value_name = "FRAGMENT", value_parser = parse_config)]
    flags: Option<Configuration>,
    #[command(flatten)]
    lexicons: LexiconArgs,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Training epochs.
    #[arg(long, default_value_t = 10)]
    epochs: u32,
    /// Seed for shuffling, fold assignment and splitting.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Labeled corpus, `id<TAB>label<TAB>text` per line.
    #[arg(long)]
    corpus: PathBuf,
    /// Configuration fragment, e.g. `tfidf,lc;tok=w1+q3`.
    #[arg(long, value_name = "FRAGMENT", value_parser = parse_config)]
    config: Configuration,
    /// Write the trained model as JSON.
    #[arg(long, value_name = "PATH")]
    model_out: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    lexicons: LexiconArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SplitArg {
    Cv,
    Gold,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Labeled corpus, `id<TAB>label<TAB>text` per line.
    #[arg(long)]
    corpus: PathBuf,
    /// Cross-validate (`cv`) or train and score on a held-out set (`gold`).
    #[arg(long, value_enum, default_value = "cv")]
    split: SplitArg,
    /// Held-out corpus for `--split gold`.
    #[arg(long, value_name = "TSV")]
    gold: Option<PathBuf>,
    /// Hold out part of `--corpus` by stratified split: with `--split gold`
    /// the rest is scored, with `--split cv` only this fraction is
    /// cross-validated. Defaults to 0.1 for gold when `--gold` is absent.
    #[arg(long, value_name = "F")]
    train_fraction: Option<f64>,
    /// Number of cross-validation folds.
    #[arg(long, default_value_t = 5)]
    folds: usize,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Configuration fragment, e.g. `tfidf,lc;tok=w1+q3`.
    #[arg(long, value_name = "FRAGMENT", value_parser = parse_config)]
    config: Configuration,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    lexicons: LexiconArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpaceArg {
    /// 2^15 flag assignments times 7 single tokenizers.
    Single,
    /// 2^15 flag assignments times 127 tokenizer subsets.
    Combos,
    /// Fixed fast flags with all 127 tokenizer subsets.
    Fast,
    /// Fixed fast flags with the 16 reduced tokenizer subsets.
    Fast16,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Configuration space to evaluate.
    #[arg(long, visible_alias = "preset", value_enum, default_value = "fast")]
    space: SpaceArg,
    /// Evaluate the config ids (or fragments) listed one per line instead.
    #[arg(long, value_name = "FILE", conflicts_with = "space")]
    configs: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Results file (JSON lines).
    #[arg(long)]
    out: PathBuf,
    /// Keep existing records and skip their configurations.
    #[arg(long)]
    resume: bool,
    /// Store per-configuration wall time in each record.
    #[arg(long)]
    timings: bool,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    lexicons: LexiconArgs,
}

#[derive(Debug, Args)]
struct TopkArgs {
    /// Results file (JSON lines).
    #[arg(long)]
    results: PathBuf,
    /// Comma-separated k values.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64,128,256,512")]
    k: Vec<usize>,
    /// Only use records of this split.
    #[arg(long, value_enum, default_value = "cv")]
    split: SplitArg,
}

#[derive(Debug, Args)]
struct ExpandArgs {
    /// Results file of a single-tokenizer sweep.
    #[arg(long)]
    results: PathBuf,
    /// Number of best records to expand.
    #[arg(long, default_value_t = 32)]
    top: usize,
    /// Only use records of this split.
    #[arg(long, value_enum, default_value = "cv")]
    split: SplitArg,
}

#[derive(Debug, Args)]
struct HeapsArgs {
    /// Corpus TSV.
    #[arg(long)]
    corpus: PathBuf,
    /// Tokens between sample points.
    #[arg(long, default_value_t = 100)]
    interval: u64,
    /// Also write the `n<TAB>V` points to this file.
    #[arg(long, value_name = "PATH")]
    points: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Number of documents.
    #[arg(long, default_value_t = 400)]
    docs: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Background vocabulary size.
    #[arg(long, default_value_t = 5000)]
    vocab: u64,
    /// Zipf exponent of the background words.
    #[arg(long, default_value_t = 1.0)]
    zipf: f64,
    /// Probability that a document's class keyword is misspelled.
    #[arg(long, default_value_t = 0.0)]
    keyword_noise: f64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
