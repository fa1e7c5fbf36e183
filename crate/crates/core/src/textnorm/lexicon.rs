//! Word lists and maps used by the text transformations.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::remove_diacritics;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("lexicon directory {0} does not exist")]
    MissingDir(PathBuf),
}

const STOPWORDS: &str = include_str!("../../data/stopwords.txt");
const EMOTICONS: &str = include_str!("../../data/emoticons.tsv");
const ABBREVIATIONS: &str = include_str!("../../data/abbreviations.tsv");
const SKIP_WORDS: &str = include_str!("../../data/skip_words.txt");
const LEMMAS: &str = include_str!("../../data/lemmas.tsv");

pub const STOPWORDS_FILE: &str = "stopwords.txt";
pub const EMOTICONS_FILE: &str = "emoticons.tsv";
pub const ABBREVIATIONS_FILE: &str = "abbreviations.tsv";
pub const SKIP_WORDS_FILE: &str = "skip_words.txt";
pub const LEMMAS_FILE: &str = "lemmas.tsv";

/// What an emoticon is replaced with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmoticonTarget {
    Positive,
    Negative,
    Neutral,
    Literal(String),
}

impl EmoticonTarget {
    pub fn replacement(&self) -> &str {
        match self {
            EmoticonTarget::Positive => "_positivo",
            EmoticonTarget::Negative => "_negativo",
            EmoticonTarget::Neutral => "_neutro",
            EmoticonTarget::Literal(text) => text,
        }
    }

    fn parse(s: &str) -> Self {
        match s {
            "pos" => EmoticonTarget::Positive,
            "neg" => EmoticonTarget::Negative,
            "neu" => EmoticonTarget::Neutral,
            other => EmoticonTarget::Literal(other.to_string()),
        }
    }
}

/// Emoticon table with longest-match lookup.
#[derive(Debug, Clone, Default)]
pub struct EmoticonTable {
    targets: HashMap<String, EmoticonTarget>,
    /// Keys grouped by first char, each group sorted by length (in chars)
    /// descending, then lexicographically.
    by_first: HashMap<char, Vec<String>>,
}

impl EmoticonTable {
    pub fn new<I: IntoIterator<Item = (String, EmoticonTarget)>>(entries: I) -> Self {
        let mut targets = HashMap::new();
        for (k, v) in entries {
            targets.insert(k, v);
        }
        let mut by_first: HashMap<char, Vec<String>> = HashMap::new();
        for key in targets.keys() {
            let first = key.chars().next().expect("emoticon keys are non-empty");
            by_first.entry(first).or_default().push(key.clone());
        }
        for group in by_first.values_mut() {
            group.sort_by(|a, b| {
                b.chars()
                    .count()
                    .cmp(&a.chars().count())
                    .then_with(|| a.cmp(b))
            });
        }
        EmoticonTable { targets, by_first }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn get(&self, emoticon: &str) -> Option<&EmoticonTarget> {
        self.targets.get(emoticon)
    }

    pub fn contains(&self, emoticon: &str) -> bool {
        self.targets.contains_key(emoticon)
    }

    /// Candidates starting with `first`, longest first.
    pub fn candidates(&self, first: char) -> &[String] {
        self.by_first.get(&first).map_or(&[], Vec::as_slice)
    }

    /// All keys sorted by length descending, then lexicographically.
    pub fn ordered_keys(&self) -> Vec<&str> {
        let mut keys: Vec<&str> = self.targets.keys().map(String::as_str).collect();
        keys.sort_by(|a, b| {
            b.chars()
                .count()
                .cmp(&a.chars().count())
                .then_with(|| a.cmp(b))
        });
        keys
    }
}

/// Lexical resources for [`normalize`](super::normalize). Immutable after
/// construction.
#[derive(Debug, Clone, Default)]
pub struct LexiconSet {
    /// Lowercase, diacritic-stripped.
    pub stopwords: HashSet<String>,
    pub emoticons: EmoticonTable,
    /// Keys are lowercase.
    pub abbreviations: HashMap<String, String>,
    /// Lowercase, diacritic-stripped.
    pub skip_words: HashSet<String>,
}

impl LexiconSet {
    /// The resources shipped in the crate's `data/` directory.
    pub fn bundled() -> Self {
        let origin = Path::new("<bundled>");
        LexiconSet {
            stopwords: fold_words(parse_word_list(STOPWORDS, origin).expect("bundled stopwords")),
            emoticons: parse_emoticons(EMOTICONS, origin).expect("bundled emoticons"),
            abbreviations: lowercase_keys(
                parse_pairs(ABBREVIATIONS, origin).expect("bundled abbreviations"),
            ),
            skip_words: fold_words(parse_word_list(SKIP_WORDS, origin).expect("bundled skip words")),
        }
    }

    /// Loads resources from `dir`; files absent from the directory fall
    /// back to the bundled copies.
    pub fn from_dir(dir: &Path) -> Result<Self, LexiconError> {
        if !dir.is_dir() {
            return Err(LexiconError::MissingDir(dir.to_path_buf()));
        }
        let mut lex = LexiconSet::bundled();
        if let Some((path, text)) = read_optional(dir, STOPWORDS_FILE)? {
            lex.stopwords = fold_words(parse_word_list(&text, &path)?);
        }
        if let Some((path, text)) = read_optional(dir, EMOTICONS_FILE)? {
            lex.emoticons = parse_emoticons(&text, &path)?;
        }
        if let Some((path, text)) = read_optional(dir, ABBREVIATIONS_FILE)? {
            lex.abbreviations = lowercase_keys(parse_pairs(&text, &path)?);
        }
        if let Some((path, text)) = read_optional(dir, SKIP_WORDS_FILE)? {
            lex.skip_words = fold_words(parse_word_list(&text, &path)?);
        }
        Ok(lex)
    }

    pub fn with_stopwords<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.stopwords = fold_words(words.into_iter().map(|w| w.as_ref().to_string()).collect());
        self
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(&fold(token))
    }

    pub fn is_skip_word(&self, token: &str) -> bool {
        self.skip_words.contains(&fold(token))
    }
}

/// Lemma dictionary, `form -> lemma`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LemmaMap(HashMap<String, String>);

impl LemmaMap {
    pub fn new(map: HashMap<String, String>) -> Self {
        LemmaMap(map)
    }

    pub fn bundled() -> Self {
        LemmaMap(parse_pairs(LEMMAS, Path::new("<bundled>")).expect("bundled lemmas"))
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let text = read(path)?;
        Ok(LemmaMap(parse_pairs(&text, path)?))
    }

    pub fn get(&self, form: &str) -> Option<&str> {
        self.0.get(form).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for LemmaMap {
    fn from_iter<T: IntoIterator<Item = (K, V)>>(iter: T) -> Self {
        LemmaMap(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}

fn fold(token: &str) -> String {
    remove_diacritics(&token.to_lowercase())
}

fn fold_words(words: Vec<String>) -> HashSet<String> {
    words.iter().map(|w| fold(w)).collect()
}

fn lowercase_keys(pairs: HashMap<String, String>) -> HashMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_lowercase(), v)).collect()
}

fn read(path: &Path) -> Result<String, LexiconError> {
    fs::read_to_string(path).map_err(|source| LexiconError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_optional(dir: &Path, name: &str) -> Result<Option<(PathBuf, String)>, LexiconError> {
    let path = dir.join(name);
    if !path.exists() {
        return Ok(None);
    }
    let text = read(&path)?;
    Ok(Some((path, text)))
}

/// One word per line; `#` starts a comment.
pub fn parse_word_list(text: &str, origin: &Path) -> Result<Vec<String>, LexiconError> {
    let mut words = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.chars().any(char::is_whitespace) {
            return Err(LexiconError::Parse {
                path: origin.to_path_buf(),
                line: i + 1,
                message: format!("word `{line}` contains whitespace"),
            });
        }
        words.push(line.to_string());
    }
    Ok(words)
}

/// Two tab-separated columns per line; blank lines are skipped.
pub fn parse_pairs(text: &str, origin: &Path) -> Result<HashMap<String, String>, LexiconError> {
    let mut map = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| LexiconError::Parse {
            path: origin.to_path_buf(),
            line: i + 1,
            message,
        };
        let (key, value) = line
            .split_once('\t')
            .ok_or_else(|| bad("expected two tab-separated columns".into()))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() || value.contains('\t') {
            return Err(bad("expected two non-empty tab-separated columns".into()));
        }
        map.insert(key.to_string(), value.to_string());
    }
    Ok(map)
}

/// `emoticon<TAB>pos|neg|neu|literal text`.
pub fn parse_emoticons(text: &str, origin: &Path) -> Result<EmoticonTable, LexiconError> {
    let pairs = parse_pairs(text, origin)?;
    for (i, line) in text.lines().enumerate() {
        if let Some((key, _)) = line.split_once('\t') {
            if key.trim().chars().any(char::is_whitespace) {
                return Err(LexiconError::Parse {
                    path: origin.to_path_buf(),
                    line: i + 1,
                    message: "emoticon contains whitespace".into(),
                });
            }
        }
    }
    Ok(EmoticonTable::new(
        pairs.into_iter().map(|(k, v)| (k, EmoticonTarget::parse(&v))),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_resources_load() {
        let lex = LexiconSet::bundled();
        assert!(lex.stopwords.len() > 300);
        assert!(lex.emoticons.len() >= 450);
        assert!(lex.abbreviations.contains_key("tqm"));
        assert!(lex.is_skip_word("lo"));
        assert!(lex.is_skip_word("está"));
        assert!(!LemmaMap::bundled().is_empty());
    }

    #[test]
    fn stopwords_are_folded() {
        let lex = LexiconSet::bundled();
        assert!(lex.is_stopword("Él"));
        assert!(lex.is_stopword("el"));
        assert!(lex.is_stopword("MÁS"));
    }

    #[test]
    fn paper_table_emoticons_present() {
        let lex = LexiconSet::bundled();
        for e in [":)", ":D", ":P"] {
            assert_eq!(lex.emoticons.get(e), Some(&EmoticonTarget::Positive), "{e}");
        }
        for e in [":(", ":-(", ":'("] {
            assert_eq!(lex.emoticons.get(e), Some(&EmoticonTarget::Negative), "{e}");
        }
        for e in [":-|", "U_U", "-.-"] {
            assert_eq!(lex.emoticons.get(e), Some(&EmoticonTarget::Neutral), "{e}");
        }
    }

    #[test]
    fn longest_match_ordering() {
        let table = EmoticonTable::new([
            (":)".to_string(), EmoticonTarget::Positive),
            (":))".to_string(), EmoticonTarget::Positive),
            (":(".to_string(), EmoticonTarget::Negative),
        ]);
        assert_eq!(table.candidates(':'), [":))", ":(", ":)"]);
        assert_eq!(table.ordered_keys(), vec![":))", ":(", ":)"]);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = parse_pairs("a\tb\nbroken\n", Path::new("x.tsv")).unwrap_err();
        assert!(err.to_string().contains("x.tsv:2"), "{err}");
        let err = parse_word_list("ok\ntwo words\n", Path::new("w.txt")).unwrap_err();
        assert!(err.to_string().contains("w.txt:2"), "{err}");
    }

    #[test]
    fn word_list_comments() {
        let words = parse_word_list("# header\nuno\n\ndos # trailing\n", Path::new("w")).unwrap();
        assert_eq!(words, vec!["uno", "dos"]);
    }

    #[test]
    fn from_dir_overrides_and_falls_back() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(STOPWORDS_FILE), "coche\n").unwrap();
        let lex = LexiconSet::from_dir(dir.path()).unwrap();
        assert_eq!(lex.stopwords.len(), 1);
        assert!(lex.emoticons.len() > 100);

        fs::write(dir.path().join(EMOTICONS_FILE), ":)\n").unwrap();
        assert!(LexiconSet::from_dir(dir.path()).is_err());
        assert!(LexiconSet::from_dir(&dir.path().join("nope")).is_err());
    }
}
