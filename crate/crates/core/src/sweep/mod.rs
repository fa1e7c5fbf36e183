//! Configuration-space enumeration, resumable sweeps and result sinks.

mod topk;

pub use topk::{expand_combinations, rank_records, topk, write_topk_tsv, TopKRow, DEFAULT_KS};

use std::collections::HashSet;
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{Configuration, Flag, FlagSet, Tokenizer, TokenizerSet};
use crate::corpus::Document;
use crate::evaluation::{EvalResult, Evaluator, FoldScore};
use crate::parallel::Execution;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("results file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("results file {path}, line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("writing results: {0}")]
    Sink(#[source] io::Error),
    #[error("no records")]
    NoRecords,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Split {
    #[serde(rename = "train-cv")]
    TrainCv,
    #[serde(rename = "gold")]
    Gold,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::TrainCv => "train-cv",
            Split::Gold => "gold",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub config_id: String,
    pub split: Split,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub per_fold: Vec<FoldScore>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl SweepRecord {
    pub fn from_result(config: &Configuration, split: Split, result: &EvalResult, wall_time: Option<f64>) -> Self {
        SweepRecord {
            config_id: config.config_id(),
            split,
            accuracy: result.accuracy,
            macro_f1: result.macro_f1,
            per_fold: result.per_fold.clone(),
            wall_time,
        }
    }

    pub fn configuration(&self) -> Result<Configuration, crate::config::ConfigError> {
        self.config_id.parse()
    }

    fn key(&self) -> (String, Split) {
        (self.config_id.clone(), self.split)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceMode {
    /// Every flag assignment with each single tokenizer.
    Single,
    /// Every flag assignment with every non-empty tokenizer subset.
    Combos,
}

impl FromStr for SpaceMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" => Ok(SpaceMode::Single),
            "combos" => Ok(SpaceMode::Combos),
            other => Err(format!("unknown space `{other}`")),
        }
    }
}

/// Lazily yields the space in config-id order.
pub fn enumerate_space(mode: SpaceMode) -> impl Iterator<Item = Configuration> {
    let subsets: Vec<TokenizerSet> = match mode {
        SpaceMode::Single => TokenizerSet::all_subsets().into_iter().filter(|s| s.len() == 1).collect(),
        SpaceMode::Combos => TokenizerSet::all_subsets(),
    };
    (0..FlagSet::SPACE).flat_map(move |ordinal| {
        let flags = FlagSet::from_ordinal(ordinal);
        subsets.clone().into_iter().map(move |t| Configuration::new(flags, t))
    })
}

/// tfidf, emo, num, usr and lc on; everything else off.
pub fn fast_flags() -> FlagSet {
    FlagSet::from_flags([Flag::Tfidf, Flag::Emo, Flag::Num, Flag::Usr, Flag::Lc])
}

/// The fast flag assignment with all 127 tokenizer subsets.
pub fn fast_preset() -> Vec<Configuration> {
    TokenizerSet::all_subsets()
        .into_iter()
        .map(|t| Configuration::new(fast_flags(), t))
        .collect()
}

/// The 16 subsets `{w1, q3} ∪ S` with `S` drawing at least three of
/// `{w2, q4, q5, q6, q7}`.
pub fn reduced_subsets() -> Vec<TokenizerSet> {
    let optional = [Tokenizer::W2, Tokenizer::Q4, Tokenizer::Q5, Tokenizer::Q6, Tokenizer::Q7];
    TokenizerSet::all_subsets()
        .into_iter()
        .filter(|s| {
            s.contains(Tokenizer::W1)
                && s.contains(Tokenizer::Q3)
                && optional.iter().filter(|t| s.contains(**t)).count() >= 3
        })
        .collect()
}

pub fn fast16_preset() -> Vec<Configuration> {
    reduced_subsets()
        .into_iter()
        .map(|t| Configuration::new(fast_flags(), t))
        .collect()
}

/// Where scores come from.
#[derive(Debug, Clone, Copy)]
pub enum EvalData<'a> {
    /// Cross-validation on one corpus.
    Cv(&'a [Document]),
    /// Train on `train`, score on `gold`.
    Gold { train: &'a [Document], gold: &'a [Document] },
}

impl EvalData<'_> {
    pub fn split(&self) -> Split {
        match self {
            EvalData::Cv(_) => Split::TrainCv,
            EvalData::Gold { .. } => Split::Gold,
        }
    }

    fn evaluate(&self, evaluator: &Evaluator, config: &Configuration) -> Result<EvalResult, crate::evaluation::EvalError> {
        match self {
            EvalData::Cv(docs) => evaluator.cross_validate(docs, config),
            EvalData::Gold { train, gold } => evaluator.evaluate_gold(train, gold, config),
        }
    }
}

/// Destination for sweep records. Appends are serialized by the caller.
pub trait ResultSink {
    /// Keys already present; matching configurations are skipped.
    fn existing(&self) -> HashSet<(String, Split)>;
    fn append(&mut self, record: &SweepRecord) -> io::Result<()>;
    /// Called once after a run that did not abort.
    fn finish(&mut self) -> io::Result<()>;
    /// Every record, old and new.
    fn records(&self) -> Vec<SweepRecord>;
}

#[derive(Debug, Default)]
pub struct MemorySink {
    pub records: Vec<SweepRecord>,
}

impl ResultSink for MemorySink {
    fn existing(&self) -> HashSet<(String, Split)> {
        self.records.iter().map(SweepRecord::key).collect()
    }

    fn append(&mut self, record: &SweepRecord) -> io::Result<()> {
        self.records.push(record.clone());
        Ok(())
    }

    fn finish(&mut self) -> io::Result<()> {
        sort_records(&mut self.records);
        Ok(())
    }

    fn records(&self) -> Vec<SweepRecord> {
        self.records.clone()
    }
}

/// Sorts by `(config_id, split)`.
pub fn sort_records(records: &mut [SweepRecord]) {
    records.sort_by(|a, b| a.config_id.cmp(&b.config_id).then(a.split.cmp(&b.split)));
}

pub fn parse_records(path: &Path, text: &str) -> Result<Vec<SweepRecord>, SweepError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let record: SweepRecord = serde_json::from_str(l).map_err(|e| SweepError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
            record.configuration().map_err(|e| SweepError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
            Ok(record)
        })
        .collect()
}

pub fn load_records(path: &Path) -> Result<Vec<SweepRecord>, SweepError> {
    let text = fs::read_to_string(path).map_err(|source| SweepError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_records(path, &text)
}

/// JSON-lines results file.
///
/// Records are appended as they complete; [`ResultSink::finish`] rewrites
/// the file sorted by `(config_id, split)` through a temporary file.
#[derive(Debug)]
pub struct JsonlSink {
    path: PathBuf,
    records: Vec<SweepRecord>,
    writer: Option<BufWriter<File>>,
}

impl JsonlSink {
    /// Opens `path`, keeping existing records when `resume` is set and
    /// truncating otherwise.
    pub fn open(path: &Path, resume: bool) -> Result<Self, SweepError> {
        let io_err = |source| SweepError::Io {
            path: path.to_path_buf(),
            source,
        };
        let records = if resume && path.exists() {
            let file = File::open(path).map_err(io_err)?;
            let mut text = String::new();
            for line in BufReader::new(file).lines() {
                text.push_str(&line.map_err(io_err)?);
                text.push('\n');
            }
            let mut records = parse_records(path, &text)?;
            let mut seen = HashSet::new();
            records.retain(|r| seen.insert(r.key()));
            records
        } else {
            Vec::new()
        };
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .truncate(false)
            .open(path)
            .map_err(io_err)?;
        if !resume {
            file.set_len(0).map_err(io_err)?;
        }
        Ok(JsonlSink {
            path: path.to_path_buf(),
            records,
            writer: Some(BufWriter::new(file)),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl ResultSink for JsonlSink {
    fn existing(&self) -> HashSet<(String, Split)> {
        self.records.iter().map(SweepRecord::key).collect()
    }

    fn append(&mut self, record: &SweepRecord) -> io::Result<()> {
        let writer = self
            .writer
            .as_mut()
            .ok_or_else(|| io::Error::other("sink already finished"))?;
        serde_json::to_writer(&mut *writer, record)?;
        writer.write_all(b"\n")?;
        writer.flush()?;
        self.records.push(record.clone());
        Ok(())
    }

    fn finish(&mut self) -> io::Result<()> {
        if let Some(mut w) = self.writer.take() {
            w.flush()?;
        }
        sort_records(&mut self.records);
        let tmp = self.path.with_extension("jsonl.tmp");
        {
            let mut out = BufWriter::new(File::create(&tmp)?);
            for r in &self.records {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
        fs::rename(&tmp, &self.path)
    }

    fn records(&self) -> Vec<SweepRecord> {
        self.records.clone()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    pub execution: Execution,
    /// Store per-configuration wall time. Off by default so that results
    /// files are reproducible byte for byte.
    pub timings: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            execution: Execution::Sequential,
            timings: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub evaluated: usize,
    pub skipped: usize,
    /// Configurations whose evaluation failed; they are logged and not
    /// written, so a resumed run retries them.
    pub failed: usize,
    /// Best record of this split in the sink after the run.
    pub best: Option<SweepRecord>,
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} evaluated, {} skipped", self.evaluated, self.skipped)?;
        if self.failed > 0 {
            write!(f, ", {} failed", self.failed)?;
        }
        if let Some(b) = &self.best {
            write!(
                f,
                "; best {} accuracy={:.4} macro_f1={:.4}",
                b.config_id, b.accuracy, b.macro_f1
            )?;
        }
        Ok(())
    }
}

/// Evaluates every configuration not already in `sink`.
///
/// Duplicate configurations in `configs` are evaluated once. If an append
/// fails the run stops, already-written records stay in place and the error
/// is returned.
pub fn run_sweep<I, S>(
    data: EvalData<'_>,
    configs: I,
    evaluator: &Evaluator,
    options: &SweepOptions,
    sink: &mut S,
) -> Result<SweepSummary, SweepError>
where
    I: IntoIterator<Item = Configuration>,
    S: ResultSink + Send,
{
    let split = data.split();
    let mut existing = sink.existing();
    let mut pending = Vec::new();
    let mut skipped = 0;
    for config in configs {
        if existing.insert((config.config_id(), split)) {
            pending.push(config);
        } else {
            skipped += 1;
        }
    }
    log::info!(
        "sweep: {} to evaluate, {} skipped, {}",
        pending.len(),
        skipped,
        options.execution
    );

    let shared = Mutex::new((sink, 0usize, 0usize, None::<io::Error>));
    let aborted = AtomicBool::new(false);
    options.execution.for_each_while(&pending, |config| {
        if aborted.load(Ordering::Relaxed) {
            return false;
        }
        let start = Instant::now();
        let result = data.evaluate(evaluator, config);
        let elapsed = start.elapsed().as_secs_f64();
        let mut guard = shared.lock().expect("sink lock");
        let (sink, evaluated, failed, error) = &mut *guard;
        match result {
            Ok(r) => {
                let record = SweepRecord::from_result(config, split, &r, options.timings.then_some(elapsed));
                if let Err(e) = sink.append(&record) {
                    *error = Some(e);
                    aborted.store(true, Ordering::Relaxed);
                    return false;
                }
                *evaluated += 1;
            }
            Err(e) => {
                log::warn!("{}: {e}", config.config_id());
                *failed += 1;
            }
        }
        true
    });

    let (sink, evaluated, failed, error) = shared.into_inner().expect("sink lock");
    if let Some(e) = error {
        return Err(SweepError::Sink(e));
    }
    sink.finish().map_err(SweepError::Sink)?;
    let records: Vec<SweepRecord> = sink.records().into_iter().filter(|r| r.split == split).collect();
    let best = rank_records(&records).first().map(|r| (*r).clone());
    Ok(SweepSummary {
        evaluated,
        skipped,
        failed,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{default_keywords, gen_synthetic};
    use crate::textnorm::Normalizer;

    #[test]
    fn space_sizes() {
        assert_eq!(enumerate_space(SpaceMode::Single).take(20_000).count(), 20_000);
        assert_eq!(fast_preset().len(), 127);
        assert_eq!(fast16_preset().len(), 16);
        assert!(reduced_subsets()
            .iter()
            .all(|s| s.contains(Tokenizer::W1) && s.contains(Tokenizer::Q3)));
    }

    #[test]
    fn enumeration_is_sorted() {
        let ids: Vec<String> = enumerate_space(SpaceMode::Combos).take(400).map(|c| c.config_id()).collect();
        assert!(ids.windows(2).all(|w| w[0] < w[1]));
        let first = enumerate_space(SpaceMode::Single).next().unwrap();
        assert_eq!(first.flags, FlagSet::empty());
        assert_eq!(first.tokenizers.canonical(), "q3");
    }

    #[test]
    fn fast_flags_match_lists() {
        let on = [Flag::Tfidf, Flag::Emo, Flag::Num, Flag::Usr, Flag::Lc];
        for f in Flag::ALL {
            assert_eq!(fast_flags().contains(f), on.contains(&f), "{f}");
        }
    }

    #[test]
    fn record_json_round_trip() {
        let r = SweepRecord {
            config_id: fast_preset()[0].config_id(),
            split: Split::Gold,
            accuracy: 0.5,
            macro_f1: 0.25,
            per_fold: vec![FoldScore { accuracy: 0.5, macro_f1: 0.25 }],
            wall_time: None,
        };
        let line = serde_json::to_string(&r).unwrap();
        assert!(line.contains("\"split\":\"gold\"") && !line.contains("wall_time"));
        assert_eq!(parse_records(Path::new("x"), &line).unwrap(), vec![r]);
        assert!(parse_records(Path::new("x"), "{\"config_id\":\"bad\"}").is_err());
    }

    #[test]
    fn sweep_resumes_and_is_worker_independent() {
        let docs = gen_synthetic(40, &default_keywords(), 500, 1.0, 3).unwrap();
        let ev = Evaluator::new(Normalizer::bundled(), 42);
        let configs: Vec<Configuration> = fast16_preset().into_iter().take(4).collect();

        let mut one = MemorySink::default();
        let s = run_sweep(EvalData::Cv(&docs), configs.clone(), &ev, &SweepOptions::default(), &mut one).unwrap();
        assert_eq!((s.evaluated, s.skipped), (4, 0));
        assert!(s.best.is_some());

        let again = run_sweep(EvalData::Cv(&docs), configs.clone(), &ev, &SweepOptions::default(), &mut one).unwrap();
        assert_eq!((again.evaluated, again.skipped), (0, 4));

        let mut many = MemorySink::default();
        let opts = SweepOptions {
            execution: Execution::with_workers(3),
            timings: false,
        };
        run_sweep(EvalData::Cv(&docs), configs, &ev, &opts, &mut many).unwrap();
        assert_eq!(one.records, many.records);
    }

    struct FailingSink(usize);

    impl ResultSink for FailingSink {
        fn existing(&self) -> HashSet<(String, Split)> {
            HashSet::new()
        }
        fn append(&mut self, _: &SweepRecord) -> io::Result<()> {
            if self.0 == 0 {
                return Err(io::Error::other("disk full"));
            }
            self.0 -= 1;
            Ok(())
        }
        fn finish(&mut self) -> io::Result<()> {
            Ok(())
        }
        fn records(&self) -> Vec<SweepRecord> {
            Vec::new()
        }
    }

    #[test]
    fn sink_failure_aborts() {
        let docs = gen_synthetic(20, &default_keywords(), 200, 1.0, 3).unwrap();
        let ev = Evaluator::new(Normalizer::bundled(), 42);
        let err = run_sweep(EvalData::Cv(&docs), fast16_preset(), &ev, &SweepOptions::default(), &mut FailingSink(2));
        assert!(matches!(err, Err(SweepError::Sink(_))));
    }

    #[test]
    fn jsonl_sink_sorts_and_resumes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        let docs = gen_synthetic(20, &default_keywords(), 200, 1.0, 5).unwrap();
        let ev = Evaluator::new(Normalizer::bundled(), 42);
        let configs: Vec<Configuration> = fast16_preset().into_iter().rev().take(3).collect();
        let mut sink = JsonlSink::open(&path, false).unwrap();
        run_sweep(EvalData::Cv(&docs), configs.clone(), &ev, &SweepOptions::default(), &mut sink).unwrap();
        let records = load_records(&path).unwrap();
        assert_eq!(records.len(), 3);
        assert!(records.windows(2).all(|w| w[0].config_id < w[1].config_id));

        let mut sink = JsonlSink::open(&path, true).unwrap();
        let s = run_sweep(EvalData::Cv(&docs), configs.clone(), &ev, &SweepOptions::default(), &mut sink).unwrap();
        assert_eq!((s.evaluated, s.skipped), (0, 3));

        let mut sink = JsonlSink::open(&path, false).unwrap();
        let s = run_sweep(EvalData::Cv(&docs), configs, &ev, &SweepOptions::default(), &mut sink).unwrap();
        assert_eq!(s.evaluated, 3);
    }
}
