//! Labeled documents: loading, splitting, synthetic generation and
//! vocabulary-growth (Heaps' law) fitting.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("train fraction must be in (0, 1), got {0}")]
    BadFraction(f64),
    #[error("{0}")]
    Generation(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeapsError {
    #[error("need at least 2 sample points, got {0}")]
    TooFewPoints(usize),
    #[error("degenerate vocabulary curve: fitted alpha {0} is not positive")]
    Degenerate(f64),
    #[error("sample interval must be positive")]
    BadInterval,
}

/// The four polarity classes, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Neutral,
    Negative,
    None,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::Positive, Label::Neutral, Label::Negative, Label::None];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Positive => "positive",
            Label::Neutral => "neutral",
            Label::Negative => "negative",
            Label::None => "none",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| format!("unknown label `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub label: Label,
}

impl Document {
    pub fn new(id: impl Into<String>, label: Label, text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            label,
        }
    }
}

fn escape(field: &str) -> String {
    let mut out = String::with_capacity(field.len());
    for c in field.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            other => out.push(other),
        }
    }
    out
}

fn unescape(field: &str, line: usize) -> Result<String, CorpusError> {
    let mut out = String::with_capacity(field.len());
    let mut chars = field.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            other => {
                return Err(CorpusError::Parse {
                    line,
                    message: format!("bad escape sequence `\\{}`", other.map_or(String::new(), String::from)),
                })
            }
        }
    }
    Ok(out)
}

/// Parses `id<TAB>label<TAB>text` lines, preserving order.
pub fn parse_corpus(input: &str) -> Result<Vec<Document>, CorpusError> {
    let mut docs = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        if line.is_empty() {
            continue;
        }
        let mut parts = line.splitn(3, '\t');
        let (Some(id), Some(label), Some(text)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(CorpusError::Parse {
                line: line_no,
                message: "expected `id<TAB>label<TAB>text`".into(),
            });
        };
        if text.contains('\t') {
            return Err(CorpusError::Parse {
                line: line_no,
                message: "unescaped tab in text".into(),
            });
        }
        let label = label
            .parse::<Label>()
            .map_err(|message| CorpusError::Parse { line: line_no, message })?;
        docs.push(Document {
            id: unescape(id, line_no)?,
            text: unescape(text, line_no)?,
            label,
        });
    }
    Ok(docs)
}

pub fn load_corpus(path: &Path) -> Result<Vec<Document>, CorpusError> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_corpus(&text)
}

pub fn write_corpus<W: Write>(docs: &[Document], mut out: W) -> io::Result<()> {
    for d in docs {
        writeln!(out, "{}\t{}\t{}", escape(&d.id), d.label, escape(&d.text))?;
    }
    Ok(())
}

pub fn save_corpus(docs: &[Document], path: &Path) -> Result<(), CorpusError> {
    let mut buf = Vec::new();
    write_corpus(docs, &mut buf).expect("writing to memory");
    fs::write(path, buf).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn labels(docs: &[Document]) -> Vec<Label> {
    docs.iter().map(|d| d.label).collect()
}

/// Seeded stratified split into (train, test), both in original order.
///
/// Per-class train counts come from the largest-remainder rounding of
/// `fraction * class size`, with the total fixed at `round(fraction * n)`.
/// A class with fewer than 2 members goes entirely to train.
pub fn split_train_test(
    docs: &[Document],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<Document>, Vec<Document>), CorpusError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(CorpusError::BadFraction(train_fraction));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_class: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
    for (i, d) in docs.iter().enumerate() {
        by_class.entry(d.label).or_default().push(i);
    }

    let mut small = Vec::new();
    let mut regular: Vec<(Label, Vec<usize>)> = Vec::new();
    for (label, mut idx) in by_class {
        if idx.len() < 2 {
            log::warn!("class {label} has {} member(s); placing it in train", idx.len());
            small.extend(idx);
        } else {
            idx.shuffle(&mut rng);
            regular.push((label, idx));
        }
    }

    let n_regular: usize = regular.iter().map(|(_, v)| v.len()).sum();
    let target_total = (train_fraction * n_regular as f64).round() as usize;
    let exact: Vec<f64> = regular
        .iter()
        .map(|(_, v)| train_fraction * v.len() as f64)
        .collect();
    let mut take: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut remaining = target_total.saturating_sub(take.iter().sum());
    let mut order: Vec<usize> = (0..regular.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &c in &order {
        if remaining == 0 {
            break;
        }
        if take[c] < regular[c].1.len() {
            take[c] += 1;
            remaining -= 1;
        }
    }

    let mut in_train = vec![false; docs.len()];
    for i in small {
        in_train[i] = true;
    }
    for ((_, idx), n) in regular.iter().zip(&take) {
        for &i in &idx[..*n] {
            in_train[i] = true;
        }
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (d, t) in docs.iter().zip(in_train) {
        if t {
            train.push(d.clone());
        } else {
            test.push(d.clone());
        }
    }
    Ok((train, test))
}

/// Vocabulary growth curve and its power-law fit `V = k * n^alpha`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeapsFit {
    pub alpha: f64,
    pub log_k: f64,
    #[serde(skip)]
    pub points: Vec<(u64, u64)>,
}

impl HeapsFit {
    /// `n<TAB>V` lines.
    pub fn write_points<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n\tV")?;
        for (n, v) in &self.points {
            writeln!(out, "{n}\t{v}")?;
        }
        Ok(())
    }
}

/// Records `(tokens seen, distinct tokens)` every `sample_interval` tokens.
///
/// Texts are lowercased and URL tokens are dropped before whitespace
/// tokenization.
pub fn heaps_points<I, S>(texts: I, sample_interval: u64) -> Result<Vec<(u64, u64)>, HeapsError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    if sample_interval == 0 {
        return Err(HeapsError::BadInterval);
    }
    let mut seen: HashSet<String> = HashSet::new();
    let mut n = 0u64;
    let mut points = Vec::new();
    for text in texts {
        let lower = text.as_ref().to_lowercase();
        for token in lower.split_whitespace() {
            if token.starts_with("http://") || token.starts_with("https://") || token.starts_with("www.") {
                continue;
            }
            if !seen.contains(token) {
                seen.insert(token.to_string());
            }
            n += 1;
            if n.is_multiple_of(sample_interval) {
                points.push((n, seen.len() as u64));
            }
        }
    }
    Ok(points)
}

/// Least-squares fit of `log V = log k + alpha log n` over `points`.
pub fn fit_power_law(points: &[(u64, u64)]) -> Result<(f64, f64), HeapsError> {
    if points.len() < 2 {
        return Err(HeapsError::TooFewPoints(points.len()));
    }
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| (p.1 as f64).ln()).collect();
    let mean_x = xs.iter().sum::<f64>() / m;
    let mean_y = ys.iter().sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - mean_x) * (y - mean_y);
        sxx += (x - mean_x) * (x - mean_x);
    }
    if sxx == 0.0 {
        return Err(HeapsError::TooFewPoints(1));
    }
    let alpha = sxy / sxx;
    Ok((alpha, mean_y - alpha * mean_x))
}

pub fn heaps_fit<I, S>(texts: I, sample_interval: u64) -> Result<HeapsFit, HeapsError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let points = heaps_points(texts, sample_interval)?;
    let (alpha, log_k) = fit_power_law(&points)?;
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(HeapsError::Degenerate(alpha));
    }
    Ok(HeapsFit { alpha, log_k, points })
}

const CONSONANTS: [char; 14] = ['b', 'c', 'd', 'f', 'g', 'j', 'l', 'm', 'n', 'p', 'r', 's', 't', 'v'];
const VOWELS: [char; 5] = ['a', 'e', 'i', 'o', 'u'];

/// Background word for Zipf rank `rank` (1-based): two or more
/// consonant-vowel syllables. Words of this shape never start with a vowel
/// and never end in a consonant.
pub fn background_word(rank: u64) -> String {
    let base = (CONSONANTS.len() * VOWELS.len()) as u64;
    let mut r = rank + base; // guarantees at least two syllables
    let mut syllables = Vec::new();
    while r > 0 {
        let s = (r % base) as usize;
        syllables.push(s);
        r /= base;
    }
    syllables
        .iter()
        .rev()
        .flat_map(|&s| [CONSONANTS[s / VOWELS.len()], VOWELS[s % VOWELS.len()]])
        .collect()
}

/// One keyword per class. The defaults cannot collide with
/// [`background_word`] output.
pub fn default_keywords() -> Vec<(Label, String)> {
    vec![
        (Label::Positive, "excelente".to_string()),
        (Label::Neutral, "regular".to_string()),
        (Label::Negative, "horrible".to_string()),
        (Label::None, "anuncio".to_string()),
    ]
}

/// Applies one random edit (substitution, duplication, deletion or
/// transposition) to `word`.
pub fn misspell<R: Rng>(word: &str, rng: &mut R) -> String {
    let mut chars: Vec<char> = word.chars().collect();
    if chars.len() < 2 {
        chars.push(chars.first().copied().unwrap_or('x'));
        return chars.into_iter().collect();
    }
    let i = rng.random_range(0..chars.len());
    match rng.random_range(0..4) {
        0 => {
            let letters: Vec<char> = ('a'..='z').filter(|c| *c != chars[i]).collect();
            chars[i] = letters[rng.random_range(0..letters.len())];
        }
        1 => {
            let n = rng.random_range(1..=3);
            for _ in 0..n {
                chars.insert(i, chars[i]);
            }
        }
        2 => {
            chars.remove(i);
        }
        _ => {
            let j = if i + 1 < chars.len() { i + 1 } else { i - 1 };
            chars.swap(i, j);
        }
    }
    chars.into_iter().collect()
}

/// Synthetic labeled corpus with a class keyword in every document.
///
/// Documents cycle through the classes, so `n_docs` divisible by the number
/// of classes gives a balanced corpus. Background words follow a Zipf law
/// over `vocab_size` ranks.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub n_docs: usize,
    pub keywords: Vec<(Label, String)>,
    pub vocab_size: u64,
    pub zipf_s: f64,
    pub seed: u64,
    pub min_len: usize,
    pub max_len: usize,
    /// Probability that a document's keyword is misspelled.
    pub keyword_noise: f64,
}

impl Default for SyntheticCorpus {
    fn default() -> Self {
        SyntheticCorpus {
            n_docs: 400,
            keywords: default_keywords(),
            vocab_size: 5_000,
            zipf_s: 1.0,
            seed: 42,
            min_len: 6,
            max_len: 15,
            keyword_noise: 0.0,
        }
    }
}

impl SyntheticCorpus {
    pub fn generate(&self) -> Result<Vec<Document>, CorpusError> {
        if self.n_docs < 4 {
            return Err(CorpusError::Generation("need at least 4 documents".into()));
        }
        if self.keywords.is_empty() {
            return Err(CorpusError::Generation("need one keyword per class".into()));
        }
        if self.min_len == 0 || self.min_len > self.max_len {
            return Err(CorpusError::Generation("bad document length range".into()));
        }
        let zipf = Zipf::new(self.vocab_size as f64, self.zipf_s)
            .map_err(|e| CorpusError::Generation(format!("zipf: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let width = self.n_docs.to_string().len();
        let mut docs = Vec::with_capacity(self.n_docs);
        for i in 0..self.n_docs {
            let (label, keyword) = &self.keywords[i % self.keywords.len()];
            let len = rng.random_range(self.min_len..=self.max_len);
            let mut words: Vec<String> = (0..len)
                .map(|_| background_word(zipf.sample(&mut rng) as u64))
                .collect();
            let keyword = if self.keyword_noise > 0.0 && rng.random_bool(self.keyword_noise) {
                misspell(keyword, &mut rng)
            } else {
                keyword.clone()
            };
            let at = rng.random_range(0..=words.len());
            words.insert(at, keyword);
            docs.push(Document::new(format!("doc{:0width$}", i + 1), *label, words.join(" ")));
        }
        Ok(docs)
    }
}

pub fn gen_synthetic(
    n_docs: usize,
    keywords: &[(Label, String)],
    vocab_size: u64,
    zipf_s: f64,
    seed: u64,
) -> Result<Vec<Document>, CorpusError> {
    SyntheticCorpus {
        n_docs,
        keywords: keywords.to_vec(),
        vocab_size,
        zipf_s,
        seed,
        ..SyntheticCorpus::default()
    }
    .generate()
}

/// Misspells each token independently with probability `rate`.
pub fn inject_misspellings(texts: &[String], rate: f64, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    texts
        .iter()
        .map(|t| {
            t.split_whitespace()
                .map(|w| {
                    if rng.random_bool(rate) {
                        misspell(w, &mut rng)
                    } else {
                        w.to_string()
                    }
                })
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}
