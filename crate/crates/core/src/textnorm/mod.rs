//! Text transformations applied before tokenization.
//!
//! [`normalize`] runs the enabled transformations in a fixed order:
//!
//! 1. abbreviation expansion (always, data driven)
//! 2. emoticon mapping (`emo`)
//! 3. user, URL and number coarsening (`usr`, `url`, `num`)
//! 4. entity removal (`del-ent`)
//! 5. lowercasing (`lc`)
//! 6. diacritic removal (`del-diac`)
//! 7. symbol-run reduction (`del-d1`, else `del-d2`)
//! 8. punctuation removal (`del-punc`)
//! 9. negation attachment (`neg`)
//! 10. stopword removal (`del-sw`)
//! 11. lemmatization (`lem`), then stemming (`stem`)
//!
//! Emoticons are mapped before lowercasing so `:D` and `:P` still match,
//! and negation runs before stopword removal because `no` and `sin` are
//! themselves stopwords. Every step is a pure function of its input and the
//! lexicons, and the output tokens are separated by single spaces.

mod lexicon;
pub mod stemmer;

use std::sync::OnceLock;

use regex::Regex;

pub use lexicon::{
    parse_emoticons, parse_pairs, parse_word_list, EmoticonTable, EmoticonTarget, LemmaMap,
    LexiconError, LexiconSet, ABBREVIATIONS_FILE, EMOTICONS_FILE, LEMMAS_FILE, SKIP_WORDS_FILE,
    STOPWORDS_FILE,
};

use crate::config::{Configuration, Flag};

pub const USER_TAG: &str = "_user";
pub const URL_TAG: &str = "_url";
pub const NUM_TAG: &str = "_num";
pub const NEGATION_PREFIX: &str = "no_";

const NEGATION_MARKERS: [&str; 4] = ["no", "nunca", "jamas", "sin"];

/// Symbol-run reduction mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    /// Runs of 2+ identical characters collapse to one.
    D1,
    /// Runs of 3+ identical characters collapse to two.
    D2,
}

/// Token class replaced by a shared tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coarsening {
    Usr,
    Url,
    Num,
}

/// Runs of whitespace collapse to one space; leading/trailing removed.
pub fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn normalize(
    text: &str,
    config: &Configuration,
    lex: &LexiconSet,
    lemmas: Option<&LemmaMap>,
) -> String {
    let mut s = collapse_whitespace(text);
    s = expand_abbreviations(&s, lex);
    if config.is_on(Flag::Emo) {
        s = map_emoticons(&s, lex);
    }
    if config.is_on(Flag::Usr) {
        s = coarsen(&s, Coarsening::Usr);
    }
    if config.is_on(Flag::Url) {
        s = coarsen(&s, Coarsening::Url);
    }
    if config.is_on(Flag::Num) {
        s = coarsen(&s, Coarsening::Num);
    }
    if config.is_on(Flag::DelEnt) {
        s = remove_entities(&s);
    }
    if config.is_on(Flag::Lc) {
        s = s.to_lowercase();
    }
    if config.is_on(Flag::DelDiac) {
        s = remove_diacritics(&s);
    }
    if config.is_on(Flag::DelD1) {
        s = reduce_runs(&s, RunMode::D1);
    } else if config.is_on(Flag::DelD2) {
        s = reduce_runs(&s, RunMode::D2);
    }
    if config.is_on(Flag::DelPunc) {
        s = remove_punctuation(&s, lex);
    }
    if config.is_on(Flag::Neg) {
        s = attach_negation(&s, lex);
    }
    if config.is_on(Flag::DelSw) {
        s = remove_stopwords(&s, lex);
    }
    if config.is_on(Flag::Lem) {
        if let Some(map) = lemmas {
            s = lemmatize(&s, map);
        }
    }
    if config.is_on(Flag::Stem) {
        s = stem(&s);
    }
    collapse_whitespace(&s)
}

/// Bundles the lexicons so callers can normalize many documents.
#[derive(Debug, Clone)]
pub struct Normalizer {
    pub lexicon: LexiconSet,
    pub lemmas: Option<LemmaMap>,
}

impl Normalizer {
    pub fn new(lexicon: LexiconSet, lemmas: Option<LemmaMap>) -> Self {
        Normalizer { lexicon, lemmas }
    }

    pub fn bundled() -> Self {
        Normalizer::new(LexiconSet::bundled(), Some(LemmaMap::bundled()))
    }

    pub fn normalize(&self, text: &str, config: &Configuration) -> String {
        normalize(text, config, &self.lexicon, self.lemmas.as_ref())
    }
}

fn fold_char(c: char) -> char {
    match c {
        'á' => 'a',
        'é' => 'e',
        'í' => 'i',
        'ó' => 'o',
        'ú' | 'ü' => 'u',
        'ñ' => 'n',
        'Á' => 'A',
        'É' => 'E',
        'Í' => 'I',
        'Ó' => 'O',
        'Ú' | 'Ü' => 'U',
        'Ñ' => 'N',
        other => other,
    }
}

pub fn remove_diacritics(text: &str) -> String {
    text.chars().map(fold_char).collect()
}

pub fn reduce_runs(text: &str, mode: RunMode) -> String {
    let keep = match mode {
        RunMode::D1 => 1,
        RunMode::D2 => 2,
    };
    let mut out = String::with_capacity(text.len());
    let mut prev: Option<char> = None;
    let mut run = 0usize;
    for c in text.chars() {
        if Some(c) == prev {
            run += 1;
        } else {
            prev = Some(c);
            run = 1;
        }
        if run <= keep {
            out.push(c);
        }
    }
    out
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn is_url(token: &str) -> bool {
    token.starts_with("http://") || token.starts_with("https://") || token.starts_with("www.")
}

/// Splits `token` into (leading punctuation, core, trailing punctuation),
/// where punctuation is anything that is not a word character.
fn peel(token: &str) -> (&str, &str, &str) {
    let start = token
        .char_indices()
        .find(|(_, c)| is_word_char(*c))
        .map_or(token.len(), |(i, _)| i);
    let end = token
        .char_indices()
        .rev()
        .find(|(_, c)| is_word_char(*c))
        .map_or(start, |(i, c)| i + c.len_utf8());
    (&token[..start], &token[start..end], &token[end..])
}

/// Replaces colloquial words by their expansion, e.g. `tqm` becomes
/// `te quiero mucho`. Matching is case-insensitive on the token with its
/// surrounding punctuation peeled off; the punctuation is kept.
pub fn expand_abbreviations(text: &str, lex: &LexiconSet) -> String {
    if lex.abbreviations.is_empty() {
        return text.to_string();
    }
    let tokens: Vec<String> = text
        .split_whitespace()
        .map(|token| {
            if is_url(token) {
                return token.to_string();
            }
            let (lead, core, trail) = peel(token);
            match lex.abbreviations.get(&core.to_lowercase()) {
                Some(expansion) if !core.is_empty() => format!("{lead}{expansion}{trail}"),
                _ => token.to_string(),
            }
        })
        .collect();
    tokens.join(" ")
}

/// Longest-match emoticon replacement.
///
/// An emoticon may sit inside a token (`genial:)`), but an alphanumeric
/// edge of the emoticon may not touch an alphanumeric neighbour, so `xD`
/// is not found inside `xDavid`. URL tokens are left alone.
pub fn map_emoticons(text: &str, lex: &LexiconSet) -> String {
    let table = &lex.emoticons;
    if table.is_empty() {
        return text.to_string();
    }
    let mut out: Vec<String> = Vec::new();
    for token in text.split_whitespace() {
        if is_url(token) {
            out.push(token.to_string());
            continue;
        }
        let chars: Vec<char> = token.chars().collect();
        let mut pending = String::new();
        let mut i = 0;
        while i < chars.len() {
            match match_emoticon(table, &chars, i) {
                Some((len, replacement)) => {
                    if !pending.is_empty() {
                        out.push(std::mem::take(&mut pending));
                    }
                    out.push(replacement.to_string());
                    i += len;
                }
                None => {
                    pending.push(chars[i]);
                    i += 1;
                }
            }
        }
        if !pending.is_empty() {
            out.push(pending);
        }
    }
    out.join(" ")
}

fn match_emoticon<'t>(table: &'t EmoticonTable, chars: &[char], at: usize) -> Option<(usize, &'t str)> {
    for key in table.candidates(chars[at]) {
        let len = key.chars().count();
        if at + len > chars.len() || !chars[at..at + len].iter().copied().eq(key.chars()) {
            continue;
        }
        let first = chars[at];
        let last = chars[at + len - 1];
        let before = at.checked_sub(1).map(|i| chars[i]);
        let after = chars.get(at + len).copied();
        let clash = |edge: char, neighbour: Option<char>| {
            edge.is_alphanumeric() && neighbour.is_some_and(char::is_alphanumeric)
        };
        if clash(first, before) || clash(last, after) {
            continue;
        }
        let target = table.get(key).expect("candidate keys come from the table");
        return Some((len, target.replacement()));
    }
    None
}

fn number_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[0-9]+(?:[.,][0-9]+)?").expect("valid regex"))
}

pub fn coarsen(text: &str, kind: Coarsening) -> String {
    match kind {
        Coarsening::Num => number_regex().replace_all(text, NUM_TAG).into_owned(),
        Coarsening::Url => text
            .split_whitespace()
            .map(|t| if is_url(t) { URL_TAG } else { t })
            .collect::<Vec<_>>()
            .join(" "),
        Coarsening::Usr => text
            .split_whitespace()
            .map(|t| match mention_len(t) {
                Some(len) => format!("{USER_TAG}{}", &t[len..]),
                None => t.to_string(),
            })
            .collect::<Vec<_>>()
            .join(" "),
    }
}

/// Byte length of a leading `@name` (or `#tag`) with at least one word char.
fn sigil_len(token: &str, sigil: char) -> Option<usize> {
    let rest = token.strip_prefix(sigil)?;
    let name: usize = rest
        .chars()
        .take_while(|c| is_word_char(*c))
        .map(char::len_utf8)
        .sum();
    (name > 0).then_some(sigil.len_utf8() + name)
}

fn mention_len(token: &str) -> Option<usize> {
    sigil_len(token, '@')
}

fn ends_sentence(token: &str) -> bool {
    token.ends_with(['.', '!', '?', '…'])
}

/// Drops mentions, hashtags, URLs and capitalized words that do not start
/// a sentence (a stand-in for proper-noun detection).
pub fn remove_entities(text: &str) -> String {
    let mut kept: Vec<&str> = Vec::new();
    let mut sentence_start = true;
    for token in text.split_whitespace() {
        let at_start = sentence_start;
        sentence_start = ends_sentence(token);
        if sigil_len(token, '@').is_some() || sigil_len(token, '#').is_some() || is_url(token) {
            continue;
        }
        let (_, core, _) = peel(token);
        let capitalized = core.chars().next().is_some_and(char::is_uppercase);
        if capitalized && !at_start {
            continue;
        }
        kept.push(token);
    }
    kept.join(" ")
}

fn punctuation_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[\p{P}--[_@#]]").expect("valid regex"))
}

/// Removes Unicode punctuation except `_`, `@` and `#`. Tokens that are
/// known emoticons survive untouched.
pub fn remove_punctuation(text: &str, lex: &LexiconSet) -> String {
    let re = punctuation_regex();
    text.split_whitespace()
        .filter_map(|t| {
            if lex.emoticons.contains(t) {
                return Some(t.to_string());
            }
            let stripped = re.replace_all(t, "");
            (!stripped.is_empty()).then(|| stripped.into_owned())
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn is_punctuation_only(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| !is_word_char(c))
}

/// Splits leading and trailing punctuation off word tokens, so that
/// `entretenimiento;` becomes `entretenimiento ;`. Known emoticons, URLs
/// and punctuation-only tokens are left whole.
pub fn separate_punctuation(text: &str, lex: &LexiconSet) -> Vec<String> {
    let mut out = Vec::new();
    for token in text.split_whitespace() {
        if lex.emoticons.contains(token) || is_url(token) || is_punctuation_only(token) {
            out.push(token.to_string());
            continue;
        }
        let (lead, core, trail) = peel(token);
        for part in [lead, core, trail] {
            if !part.is_empty() {
                out.push(part.to_string());
            }
        }
    }
    out
}

fn is_negation_marker(token: &str) -> bool {
    let folded = remove_diacritics(&token.to_lowercase());
    NEGATION_MARKERS.contains(&folded.as_str())
}

/// Attaches each negation marker (`no`, `nunca`, `jamás`, `sin`) to the
/// nearest following content word.
///
/// Punctuation is first split off words. The marker is deleted, skip words
/// (pronouns, articles, copula forms) between it and the content word keep
/// their order, and the content word gets the `no_` prefix. A marker
/// followed by punctuation, another marker, or nothing is kept verbatim.
pub fn attach_negation(text: &str, lex: &LexiconSet) -> String {
    let tokens = separate_punctuation(text, lex);
    let mut out: Vec<String> = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        let token = &tokens[i];
        if !is_negation_marker(token) {
            out.push(token.clone());
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < tokens.len() && lex.is_skip_word(&tokens[j]) {
            j += 1;
        }
        let target = tokens
            .get(j)
            .filter(|t| !is_punctuation_only(t) && !is_negation_marker(t));
        match target {
            Some(word) => {
                out.extend(tokens[i + 1..j].iter().cloned());
                out.push(format!("{NEGATION_PREFIX}{word}"));
                i = j + 1;
            }
            None => {
                out.push(token.clone());
                i += 1;
            }
        }
    }
    out.join(" ")
}

/// Drops stopwords; `no_` tokens are never dropped.
pub fn remove_stopwords(text: &str, lex: &LexiconSet) -> String {
    text.split_whitespace()
        .filter(|t| t.starts_with(NEGATION_PREFIX) || !lex.is_stopword(t))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Splits a `no_` or `_` prefix from the part that stemming and
/// lemmatization act on.
fn split_prefix(token: &str) -> (&str, &str) {
    if let Some(rest) = token.strip_prefix(NEGATION_PREFIX) {
        (&token[..NEGATION_PREFIX.len()], rest)
    } else if let Some(rest) = token.strip_prefix('_') {
        (&token[..1], rest)
    } else {
        ("", token)
    }
}

pub fn stem(text: &str) -> String {
    text.split_whitespace()
        .map(|t| {
            let (prefix, body) = split_prefix(t);
            format!("{prefix}{}", stemmer::stem_word(body))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Dictionary lemmatization; unknown tokens pass through unchanged.
pub fn lemmatize(text: &str, lemmas: &LemmaMap) -> String {
    text.split_whitespace()
        .map(|t| {
            if let Some(lemma) = lemmas.get(t) {
                return lemma.to_string();
            }
            let (prefix, body) = split_prefix(t);
            match lemmas.get(body) {
                Some(lemma) if !prefix.is_empty() => format!("{prefix}{lemma}"),
                _ => t.to_string(),
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}
