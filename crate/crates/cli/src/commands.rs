use std::error::Error;
use std::fs::{self, File};
use std::io::{self, BufRead, BufWriter, Write};
use std::path::Path;

use textsweep::corpus::{self, Document, SyntheticCorpus};
use textsweep::evaluation::{featurize, Evaluator};
use textsweep::sweep::{
    self, enumerate_space, expand_combinations, fast16_preset, fast_preset, load_records, run_sweep,
    write_topk_tsv, EvalData, JsonlSink, SpaceMode, Split, SweepOptions, SweepRecord,
};
use textsweep::textnorm::LEMMAS_FILE;
use textsweep::{
    build_vocabulary, tokenize_multi, vectorize, Configuration, Execution, Flag, LemmaMap, LexiconSet, Normalizer,
    TrainParams,
};

use crate::{
    Command, DataArgs, EvalArgs, ExpandArgs, GenArgs, HeapsArgs, LexiconArgs, ModelArgs, SpaceArg, SplitArg,
    SweepArgs, TokenizeArgs, TopkArgs, TrainArgs, TransformArgs,
};

const DEFAULT_TRAIN_FRACTION: f64 = 0.10;

type Result<T> = std::result::Result<T, Box<dyn Error>>;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Transform(a) => transform(a),
        Command::Tokenize(a) => tokenize(a),
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Topk(a) => topk(a),
        Command::Expand(a) => expand(a),
        Command::Heaps(a) => heaps(a),
        Command::Gen(a) => gen(a),
    }
}

fn normalizer(args: &LexiconArgs) -> Result<Normalizer> {
    let Some(dir) = &args.lexicons else {
        return Ok(Normalizer::bundled());
    };
    let lexicon = LexiconSet::from_dir(dir)?;
    let lemma_path = dir.join(LEMMAS_FILE);
    let lemmas = if lemma_path.exists() {
        LemmaMap::load(&lemma_path)?
    } else {
        LemmaMap::bundled()
    };
    Ok(Normalizer::new(lexicon, Some(lemmas)))
}

fn for_each_stdin_line(mut f: impl FnMut(&str, &mut dyn Write) -> Result<()>) -> Result<()> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    for line in io::stdin().lock().lines() {
        f(&line?, &mut out)?;
    }
    out.flush()?;
    Ok(())
}

fn transform(args: TransformArgs) -> Result<()> {
    let norm = normalizer(&args.lexicons)?;
    for_each_stdin_line(|line, out| {
        writeln!(out, "{}", norm.normalize(line, &args.flags))?;
        Ok(())
    })
}

fn tokenize(args: TokenizeArgs) -> Result<()> {
    let norm = normalizer(&args.lexicons)?;
    for_each_stdin_line(|line, out| {
        let text = match &args.flags {
            Some(config) => norm.normalize(line, config),
            None => line.to_string(),
        };
        let bag = tokenize_multi(&text, args.tok);
        let map: serde_json::Map<String, serde_json::Value> =
            bag.sorted().into_iter().map(|(t, c)| (t.to_string(), c.into())).collect();
        writeln!(out, "{}", serde_json::Value::Object(map))?;
        Ok(())
    })
}

fn train_params(args: &ModelArgs) -> TrainParams {
    TrainParams {
        epochs: args.epochs,
        seed: args.seed,
        lambda: None,
    }
}

fn train(args: TrainArgs) -> Result<()> {
    let docs = corpus::load_corpus(&args.corpus)?;
    let norm = normalizer(&args.lexicons)?;
    let bags = featurize(&docs, &args.config, &norm);
    let vocab = build_vocabulary(&bags)?;
    let tfidf = args.config.is_on(Flag::Tfidf);
    let xs: Vec<_> = bags.iter().map(|b| vectorize(b, &vocab, tfidf)).collect();
    let labels = corpus::labels(&docs);
    let model = textsweep::train(&xs, &labels, vocab.len(), &train_params(&args.model))?;
    let pred: Vec<_> = xs.iter().map(|x| model.predict(x)).collect();
    let summary = serde_json::json!({
        "config_id": args.config.config_id(),
        "documents": docs.len(),
        "vocabulary": vocab.len(),
        "train_accuracy": textsweep::accuracy(&labels, &pred)?,
        "train_macro_f1": textsweep::macro_f1(&labels, &pred)?,
    });
    println!("{summary}");
    if let Some(path) = &args.model_out {
        fs::write(path, model.to_json())?;
    }
    Ok(())
}

fn evaluator(data: &DataArgs, model: &ModelArgs, lexicons: &LexiconArgs) -> Result<Evaluator> {
    let mut ev = Evaluator::new(normalizer(lexicons)?, model.seed);
    ev.folds = data.folds;
    ev.params = train_params(model);
    Ok(ev)
}

/// Documents to use: (cv corpus) or (train, gold).
enum Loaded {
    Cv(Vec<Document>),
    Gold(Vec<Document>, Vec<Document>),
}

impl Loaded {
    fn as_data(&self) -> EvalData<'_> {
        match self {
            Loaded::Cv(d) => EvalData::Cv(d),
            Loaded::Gold(train, gold) => EvalData::Gold { train, gold },
        }
    }
}

fn load_data(args: &DataArgs, seed: u64) -> Result<Loaded> {
    let docs = corpus::load_corpus(&args.corpus)?;
    match args.split {
        SplitArg::Cv => match args.train_fraction {
            Some(f) => Ok(Loaded::Cv(corpus::split_train_test(&docs, f, seed)?.0)),
            None => Ok(Loaded::Cv(docs)),
        },
        SplitArg::Gold => match &args.gold {
            Some(path) => Ok(Loaded::Gold(docs, corpus::load_corpus(path)?)),
            None => {
                let (train, gold) = corpus::split_train_test(&docs, args.train_fraction.unwrap_or(DEFAULT_TRAIN_FRACTION), seed)?;
                Ok(Loaded::Gold(train, gold))
            }
        },
    }
}

fn eval(args: EvalArgs) -> Result<()> {
    let data = load_data(&args.data, args.model.seed)?;
    let ev = evaluator(&args.data, &args.model, &args.lexicons)?;
    let result = match data.as_data() {
        EvalData::Cv(docs) => ev.cross_validate(docs, &args.config)?,
        EvalData::Gold { train, gold } => ev.evaluate_gold(train, gold, &args.config)?,
    };
    println!("{}", serde_json::to_string(&result)?);
    Ok(())
}

fn read_config_list(path: &Path) -> Result<Vec<Configuration>> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            let l = l.trim();
            l.parse::<Configuration>()
                .or_else(|_| Configuration::parse_fragment(l))
                .map_err(|e| format!("{}, line {}: {e}", path.display(), i + 1).into())
        })
        .collect()
}

fn sweep_cmd(args: SweepArgs) -> Result<()> {
    if args.workers == 0 {
        return Err("--workers must be at least 1".into());
    }
    let data = load_data(&args.data, args.model.seed)?;
    let ev = evaluator(&args.data, &args.model, &args.lexicons)?;
    let options = SweepOptions {
        execution: Execution::with_workers(args.workers),
        timings: args.timings,
    };
    let mut sink = JsonlSink::open(&args.out, args.resume)?;
    let summary = match (&args.configs, args.space) {
        (Some(path), _) => run_sweep(data.as_data(), read_config_list(path)?, &ev, &options, &mut sink)?,
        (None, SpaceArg::Fast) => run_sweep(data.as_data(), fast_preset(), &ev, &options, &mut sink)?,
        (None, SpaceArg::Fast16) => run_sweep(data.as_data(), fast16_preset(), &ev, &options, &mut sink)?,
        (None, SpaceArg::Single) => {
            run_sweep(data.as_data(), enumerate_space(SpaceMode::Single), &ev, &options, &mut sink)?
        }
        (None, SpaceArg::Combos) => {
            run_sweep(data.as_data(), enumerate_space(SpaceMode::Combos), &ev, &options, &mut sink)?
        }
    };
    println!("{summary}");
    Ok(())
}

fn split_records(path: &Path, split: SplitArg) -> Result<Vec<SweepRecord>> {
    let want = match split {
        SplitArg::Cv => Split::TrainCv,
        SplitArg::Gold => Split::Gold,
    };
    let records: Vec<SweepRecord> = load_records(path)?.into_iter().filter(|r| r.split == want).collect();
    if records.is_empty() {
        return Err(format!("{}: no {want} records", path.display()).into());
    }
    Ok(records)
}

fn topk(args: TopkArgs) -> Result<()> {
    let records = split_records(&args.results, args.split)?;
    let mut ks = args.k.clone();
    if ks.contains(&0) {
        return Err("k values must be positive".into());
    }
    ks.sort_unstable();
    ks.dedup();
    let rows = sweep::topk(&records, &ks)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    write_topk_tsv(&rows, &mut out)?;
    Ok(())
}

fn expand(args: ExpandArgs) -> Result<()> {
    let records = split_records(&args.results, args.split)?;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    for c in expand_combinations(&records, args.top)? {
        writeln!(out, "{c}")?;
    }
    out.flush()?;
    Ok(())
}

fn heaps(args: HeapsArgs) -> Result<()> {
    let docs = corpus::load_corpus(&args.corpus)?;
    let fit = corpus::heaps_fit(docs.iter().map(|d| d.text.as_str()), args.interval)?;
    let summary = serde_json::json!({
        "alpha": fit.alpha,
        "log_k": fit.log_k,
        "points": fit.points.len(),
        "tokens": fit.points.last().map_or(0, |p| p.0),
        "vocabulary": fit.points.last().map_or(0, |p| p.1),
    });
    println!("{summary}");
    if let Some(path) = &args.points {
        let mut out = BufWriter::new(File::create(path)?);
        fit.write_points(&mut out)?;
        out.flush()?;
    }
    Ok(())
}

fn gen(args: GenArgs) -> Result<()> {
    if !(0.0..=1.0).contains(&args.keyword_noise) {
        return Err("--keyword-noise must be in [0, 1]".into());
    }
    let docs = SyntheticCorpus {
        n_docs: args.docs,
        vocab_size: args.vocab,
        zipf_s: args.zipf,
        seed: args.seed,
        keyword_noise: args.keyword_noise,
        ..SyntheticCorpus::default()
    }
    .generate()?;
    match &args.out {
        Some(path) => corpus::save_corpus(&docs, path)?,
        None => {
            let stdout = io::stdout();
            let mut out = BufWriter::new(stdout.lock());
            corpus::write_corpus(&docs, &mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}
