//! Word n-grams, character q-grams and their combinations.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::config::{Tokenizer, TokenizerKind, TokenizerSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TokenizeError {
    #[error("word n-gram size must be 1 or 2, got {0}")]
    BadWordSize(usize),
    #[error("q-gram size must be between 3 and 7, got {0}")]
    BadQ(usize),
    #[error("empty tokenizer set")]
    EmptySet,
}

/// Multiset of tokens. Every stored count is at least 1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenBag {
    counts: HashMap<String, u32>,
}

impl TokenBag {
    pub fn new() -> Self {
        TokenBag::default()
    }

    pub fn add(&mut self, token: impl Into<String>) {
        *self.counts.entry(token.into()).or_insert(0) += 1;
    }

    pub fn add_count(&mut self, token: impl Into<String>, count: u32) {
        if count > 0 {
            *self.counts.entry(token.into()).or_insert(0) += count;
        }
    }

    pub fn count(&self, token: &str) -> u32 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    /// Sum of all counts.
    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| u64::from(c)).sum()
    }

    /// Number of distinct tokens.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.counts.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn distinct(&self) -> HashSet<&str> {
        self.counts.keys().map(String::as_str).collect()
    }

    /// Tokens with counts, sorted by token.
    pub fn sorted(&self) -> Vec<(&str, u32)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_unstable();
        v
    }

    /// Adds every count of `other` into `self`.
    pub fn merge(&mut self, other: TokenBag) {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
    }
}

impl<S: Into<String>> FromIterator<S> for TokenBag {
    fn from_iter<T: IntoIterator<Item = S>>(iter: T) -> Self {
        let mut bag = TokenBag::new();
        for t in iter {
            bag.add(t);
        }
        bag
    }
}

pub fn tokenize_words(text: &str, n: usize) -> Result<TokenBag, TokenizeError> {
    if !(1..=2).contains(&n) {
        return Err(TokenizeError::BadWordSize(n));
    }
    let words: Vec<&str> = text.split_whitespace().collect();
    Ok(words.windows(n).map(|w| w.join(" ")).collect())
}

/// Every length-`q` character window, with whitespace written as `_`.
pub fn tokenize_qgrams(text: &str, q: usize) -> Result<TokenBag, TokenizeError> {
    if !(3..=7).contains(&q) {
        return Err(TokenizeError::BadQ(q));
    }
    let chars: Vec<char> = text
        .chars()
        .map(|c| if c.is_whitespace() { '_' } else { c })
        .collect();
    Ok(chars.windows(q).map(|w| w.iter().collect::<String>()).collect())
}

fn tokenize_one(text: &str, tokenizer: Tokenizer) -> TokenBag {
    let bag = match tokenizer.kind() {
        TokenizerKind::Words(n) => tokenize_words(text, n),
        TokenizerKind::QGrams(q) => tokenize_qgrams(text, q),
    };
    bag.expect("tokenizer sizes are in range by construction")
}

/// Union of the bags of every tokenizer in `set`, each token prefixed with
/// its tokenizer's name (`w1:hola`, `q3:hol`) so that vocabularies of
/// different tokenizers never collide.
pub fn tokenize_multi(text: &str, set: TokenizerSet) -> TokenBag {
    let mut out = TokenBag::new();
    for tokenizer in set.iter() {
        let tag = tokenizer.name();
        for (token, count) in tokenize_one(text, tokenizer).counts {
            out.add_count(format!("{tag}:{token}"), count);
        }
    }
    out
}

/// Like [`tokenize_multi`] but takes any list of tokenizers and rejects an
/// empty one.
pub fn tokenize_with(text: &str, tokenizers: &[Tokenizer]) -> Result<TokenBag, TokenizeError> {
    let set = TokenizerSet::new(tokenizers.iter().copied()).map_err(|_| TokenizeError::EmptySet)?;
    Ok(tokenize_multi(text, set))
}

/// Jaccard coefficient of the distinct tokens; 1 when both are empty.
pub fn jaccard(a: &TokenBag, b: &TokenBag) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let inter = small.counts.keys().filter(|k| large.counts.contains_key(*k)).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}
