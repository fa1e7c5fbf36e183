//! Vocabulary construction and TF / TF-IDF weighting.
//!
//! Term frequency is normalized by the largest count in the document,
//! `tf(w) = f(w) / max_u f(u)`, and inverse document frequency is the
//! natural log `idf(w) = ln(N / df(w))`. Tokens present in every training
//! document therefore get weight zero under TF-IDF and are not stored.

use std::collections::HashMap;
use std::io::{self, Write};

use thiserror::Error;

use crate::tokenizers::TokenBag;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VectorizeError {
    #[error("empty vocabulary")]
    EmptyVocabulary,
    #[error("out-of-vocabulary token `{0}`")]
    OutOfVocabulary(String),
}

/// Token to column map built on training documents only.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    index: HashMap<String, u32>,
    tokens: Vec<String>,
    df: Vec<u32>,
    n_docs: u32,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn n_docs(&self) -> u32 {
        self.n_docs
    }

    pub fn column(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, column: u32) -> &str {
        &self.tokens[column as usize]
    }

    pub fn df(&self, token: &str) -> Option<u32> {
        self.column(token).map(|c| self.df[c as usize])
    }

    /// Tokens in column order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn idf(&self, token: &str) -> Result<f64, VectorizeError> {
        let column = self
            .column(token)
            .ok_or_else(|| VectorizeError::OutOfVocabulary(token.to_string()))?;
        Ok(self.idf_at(column))
    }

    fn idf_at(&self, column: u32) -> f64 {
        (f64::from(self.n_docs) / f64::from(self.df[column as usize])).ln()
    }

    /// `token<TAB>column<TAB>df` lines in column order.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (column, token) in self.tokens.iter().enumerate() {
            writeln!(out, "{token}\t{column}\t{}", self.df[column])?;
        }
        Ok(())
    }
}

/// Columns are assigned in lexicographic token order.
pub fn build_vocabulary<'a, I>(bags: I) -> Result<Vocabulary, VectorizeError>
where
    I: IntoIterator<Item = &'a TokenBag>,
{
    let mut df: HashMap<&'a str, u32> = HashMap::new();
    let mut n_docs = 0u32;
    for bag in bags {
        n_docs += 1;
        for (token, _) in bag.iter() {
            *df.entry(token).or_insert(0) += 1;
        }
    }
    if df.is_empty() {
        return Err(VectorizeError::EmptyVocabulary);
    }
    let mut entries: Vec<(&str, u32)> = df.into_iter().collect();
    entries.sort_unstable_by(|a, b| a.0.cmp(b.0));
    let mut index = HashMap::with_capacity(entries.len());
    let mut tokens = Vec::with_capacity(entries.len());
    let mut dfs = Vec::with_capacity(entries.len());
    for (column, (token, count)) in entries.into_iter().enumerate() {
        index.insert(token.to_string(), column as u32);
        tokens.push(token.to_string());
        dfs.push(count);
    }
    Ok(Vocabulary {
        index,
        tokens,
        df: dfs,
        n_docs,
    })
}

pub fn term_frequency(bag: &TokenBag) -> HashMap<String, f64> {
    let Some(max) = bag.iter().map(|(_, c)| c).max() else {
        return HashMap::new();
    };
    let max = f64::from(max);
    bag.iter()
        .map(|(t, c)| (t.to_string(), f64::from(c) / max))
        .collect()
}

/// Sparse row: strictly increasing columns, no zero weights.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    entries: Vec<(u32, f64)>,
}

impl SparseVector {
    /// Sorts by column, sums duplicates and drops zeros.
    pub fn from_entries(mut entries: Vec<(u32, f64)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(u32, f64)> = Vec::with_capacity(entries.len());
        for (c, w) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += w,
                _ => merged.push((c, w)),
            }
        }
        merged.retain(|e| e.1 != 0.0);
        SparseVector { entries: merged }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(c, w)| w * dense[c as usize])
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> SparseVector {
        SparseVector::from_entries(self.entries.iter().map(|&(c, w)| (c, w * factor)).collect())
    }

    pub fn max_column(&self) -> Option<u32> {
        self.entries.last().map(|e| e.0)
    }
}

pub fn vectorize(bag: &TokenBag, vocab: &Vocabulary, use_tfidf: bool) -> SparseVector {
    let Some(max) = bag.iter().map(|(_, c)| c).max() else {
        return SparseVector::default();
    };
    let max = f64::from(max);
    let entries = bag
        .iter()
        .filter_map(|(token, count)| {
            let column = vocab.column(token)?;
            let tf = f64::from(count) / max;
            let weight = if use_tfidf { tf * vocab.idf_at(column) } else { tf };
            Some((column, weight))
        })
        .collect();
    SparseVector::from_entries(entries)
}
