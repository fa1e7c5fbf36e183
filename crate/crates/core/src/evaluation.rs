//! Stratified k-fold cross-validation, gold-split evaluation and the two
//! reported scores, accuracy and macro-F1.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{self, TrainError, TrainParams};
use crate::config::{Configuration, Flag};
use crate::corpus::{Document, Label};
use crate::textnorm::Normalizer;
use crate::tokenizers::{tokenize_multi, TokenBag};
use crate::vectorizer::{build_vocabulary, vectorize, VectorizeError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("gold has {gold} labels but predictions have {pred}")]
    LengthMismatch { gold: usize, pred: usize },
    #[error("no labels to score")]
    Empty,
    #[error("k must be at least 2, got {0}")]
    TooFewFolds(usize),
    #[error("cannot split {docs} documents into {k} folds")]
    TooManyFolds { k: usize, docs: usize },
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Vectorize(#[from] VectorizeError),
}

/// Rows are gold labels, columns are predictions, both in [`Label::ALL`] order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix(pub [[u64; 4]; 4]);

impl ConfusionMatrix {
    pub fn from_pairs(gold: &[Label], pred: &[Label]) -> Result<Self, EvalError> {
        check_lengths(gold, pred)?;
        let mut m = ConfusionMatrix::default();
        for (g, p) in gold.iter().zip(pred) {
            m.0[g.index()][p.index()] += 1;
        }
        Ok(m)
    }

    pub fn add(&mut self, other: &ConfusionMatrix) {
        for (row, other_row) in self.0.iter_mut().zip(&other.0) {
            for (a, b) in row.iter_mut().zip(other_row) {
                *a += b;
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.0.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => self.trace() as f64 / n as f64,
        }
    }

    /// F1 of class `c`; zero when precision and recall are both undefined
    /// or zero.
    pub fn f1(&self, c: Label) -> f64 {
        let i = c.index();
        let tp = self.0[i][i] as f64;
        let predicted: u64 = (0..4).map(|g| self.0[g][i]).sum();
        let actual: u64 = self.0[i].iter().sum();
        // 2PR/(P+R) simplifies to 2tp/(predicted+actual).
        let denom = (predicted + actual) as f64;
        if tp == 0.0 || denom == 0.0 {
            0.0
        } else {
            2.0 * tp / denom
        }
    }

    pub fn macro_f1(&self) -> f64 {
        Label::ALL.iter().map(|&c| self.f1(c)).sum::<f64>() / 4.0
    }
}

fn check_lengths(gold: &[Label], pred: &[Label]) -> Result<(), EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::LengthMismatch {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    if gold.is_empty() {
        return Err(EvalError::Empty);
    }
    Ok(())
}

pub fn accuracy(gold: &[Label], pred: &[Label]) -> Result<f64, EvalError> {
    check_lengths(gold, pred)?;
    let hits = gold.iter().zip(pred).filter(|(g, p)| g == p).count();
    Ok(hits as f64 / gold.len() as f64)
}

/// Mean F1 over all four classes, including classes absent from `gold`.
pub fn macro_f1(gold: &[Label], pred: &[Label]) -> Result<f64, EvalError> {
    Ok(ConfusionMatrix::from_pairs(gold, pred)?.macro_f1())
}

/// Splits indices into `k` disjoint folds.
///
/// Each class's indices are shuffled with `seed`; the classes are then
/// concatenated in label order and dealt round-robin, so per-class and total
/// fold sizes differ by at most one. Every fold is returned sorted.
pub fn stratified_folds(labels: &[Label], k: usize, seed: u64) -> Result<Vec<Vec<usize>>, EvalError> {
    if k < 2 {
        return Err(EvalError::TooFewFolds(k));
    }
    if k > labels.len() {
        return Err(EvalError::TooManyFolds { k, docs: labels.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dealt = Vec::with_capacity(labels.len());
    for class in Label::ALL {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        dealt.extend(idx);
    }
    let mut folds = vec![Vec::new(); k];
    for (pos, i) in dealt.into_iter().enumerate() {
        folds[pos % k].push(i);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldScore {
    pub accuracy: f64,
    pub macro_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub confusion: ConfusionMatrix,
    pub per_fold: Vec<FoldScore>,
}

impl EvalResult {
    fn from_folds(folds: Vec<ConfusionMatrix>) -> Self {
        let mut pooled = ConfusionMatrix::default();
        let per_fold = folds
            .iter()
            .map(|m| {
                pooled.add(m);
                FoldScore {
                    accuracy: m.accuracy(),
                    macro_f1: m.macro_f1(),
                }
            })
            .collect();
        EvalResult {
            accuracy: pooled.accuracy(),
            macro_f1: pooled.macro_f1(),
            confusion: pooled,
            per_fold,
        }
    }
}

/// Normalizes and tokenizes each document under `config`.
pub fn featurize(docs: &[Document], config: &Configuration, normalizer: &Normalizer) -> Vec<TokenBag> {
    docs.iter()
        .map(|d| tokenize_multi(&normalizer.normalize(&d.text, config), config.tokenizers))
        .collect()
}

/// Fits vocabulary and model on `train` bags and predicts `test` bags.
pub fn fit_predict(
    train: &[&TokenBag],
    train_labels: &[Label],
    test: &[&TokenBag],
    use_tfidf: bool,
    params: &TrainParams,
) -> Result<Vec<Label>, EvalError> {
    let vocab = build_vocabulary(train.iter().copied())?;
    let xs: Vec<_> = train.iter().map(|b| vectorize(b, &vocab, use_tfidf)).collect();
    let model = classifier::train(&xs, train_labels, vocab.len(), params)?;
    Ok(test
        .iter()
        .map(|b| model.predict(&vectorize(b, &vocab, use_tfidf)))
        .collect())
}

/// Cross-validation settings plus the shared normalizer.
#[derive(Debug, Clone)]
pub struct Evaluator {
    pub normalizer: Normalizer,
    pub folds: usize,
    pub seed: u64,
    pub params: TrainParams,
}

impl Evaluator {
    pub fn new(normalizer: Normalizer, seed: u64) -> Self {
        Evaluator {
            normalizer,
            folds: 5,
            seed,
            params: TrainParams {
                seed,
                ..TrainParams::default()
            },
        }
    }

    /// Stratified k-fold CV; scores come from the pooled confusion matrix.
    pub fn cross_validate(&self, docs: &[Document], config: &Configuration) -> Result<EvalResult, EvalError> {
        let labels: Vec<Label> = docs.iter().map(|d| d.label).collect();
        let folds = stratified_folds(&labels, self.folds, self.seed)?;
        let bags = featurize(docs, config, &self.normalizer);
        let use_tfidf = config.is_on(Flag::Tfidf);

        let mut held_out = vec![usize::MAX; docs.len()];
        for (f, fold) in folds.iter().enumerate() {
            for &i in fold {
                held_out[i] = f;
            }
        }
        let mut matrices = Vec::with_capacity(folds.len());
        for (f, fold) in folds.iter().enumerate() {
            let train_idx: Vec<usize> = (0..docs.len()).filter(|&i| held_out[i] != f).collect();
            let train: Vec<&TokenBag> = train_idx.iter().map(|&i| &bags[i]).collect();
            let train_labels: Vec<Label> = train_idx.iter().map(|&i| labels[i]).collect();
            let test: Vec<&TokenBag> = fold.iter().map(|&i| &bags[i]).collect();
            let gold: Vec<Label> = fold.iter().map(|&i| labels[i]).collect();
            let pred = fit_predict(&train, &train_labels, &test, use_tfidf, &self.params)?;
            matrices.push(ConfusionMatrix::from_pairs(&gold, &pred)?);
        }
        Ok(EvalResult::from_folds(matrices))
    }

    /// Trains on `train`, scores on `gold`; `per_fold` has a single entry.
    pub fn evaluate_gold(
        &self,
        train: &[Document],
        gold: &[Document],
        config: &Configuration,
    ) -> Result<EvalResult, EvalError> {
        let train_bags = featurize(train, config, &self.normalizer);
        let gold_bags = featurize(gold, config, &self.normalizer);
        let train_labels: Vec<Label> = train.iter().map(|d| d.label).collect();
        let gold_labels: Vec<Label> = gold.iter().map(|d| d.label).collect();
        let pred = fit_predict(
            &train_bags.iter().collect::<Vec<_>>(),
            &train_labels,
            &gold_bags.iter().collect::<Vec<_>>(),
            config.is_on(Flag::Tfidf),
            &self.params,
        )?;
        Ok(EvalResult::from_folds(vec![ConfusionMatrix::from_pairs(&gold_labels, &pred)?]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::*;

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[Positive, None], &[Positive, None]).unwrap(), 1.0);
        assert_eq!(accuracy(&[Positive, None], &[None, Positive]).unwrap(), 0.0);
        let gold = [Positive, Neutral, Negative, None];
        assert_eq!(accuracy(&gold, &[Positive, Neutral, Negative, Positive]).unwrap(), 0.75);
        assert!(matches!(accuracy(&gold, &gold[..2]), Err(EvalError::LengthMismatch { .. })));
        assert_eq!(accuracy(&[], &[]), Err(EvalError::Empty));
    }

    #[test]
    fn macro_f1_examples() {
        let all = Label::ALL;
        assert_eq!(macro_f1(&all, &all).unwrap(), 1.0);
        assert_eq!(macro_f1(&[Positive; 3], &[Negative; 3]).unwrap(), 0.0);
        let got = macro_f1(&[Positive, Positive, Negative, Negative], &[Positive, Negative, Negative, Negative]).unwrap();
        assert!((got - (2.0 / 3.0 + 0.8) / 4.0).abs() < 1e-12);
        assert!((got - 0.3667).abs() < 1e-4);
    }

    #[test]
    fn folds_balanced() {
        let labels: Vec<Label> = (0..10).map(|i| if i % 2 == 0 { Positive } else { Negative }).collect();
        let folds = stratified_folds(&labels, 5, 1).unwrap();
        for f in &folds {
            assert_eq!(f.len(), 2);
            assert_eq!(f.iter().filter(|&&i| labels[i] == Positive).count(), 1);
        }
    }

    #[test]
    fn fold_sizes_13_by_5() {
        let labels: Vec<Label> = (0..13).map(|i| Label::ALL[i % 3]).collect();
        let folds = stratified_folds(&labels, 5, 9).unwrap();
        let mut sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(sizes, vec![3, 3, 3, 2, 2]);
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..13).collect::<Vec<_>>());
        assert!(matches!(stratified_folds(&labels, 14, 0), Err(EvalError::TooManyFolds { .. })));
        assert!(stratified_folds(&labels, 1, 0).is_err());
    }

    #[test]
    fn pooled_confusion_sums() {
        let m = ConfusionMatrix::from_pairs(&[Positive, None, None], &[None, None, Neutral]).unwrap();
        assert_eq!(m.total(), 3);
        assert_eq!(m.trace(), 1);
        let r = EvalResult::from_folds(vec![m, m]);
        assert_eq!(r.confusion.total(), 6);
        assert!((r.accuracy - 1.0 / 3.0).abs() < 1e-12);
    }

    fn keyword_docs() -> Vec<Document> {
        let words = ["bueno", "regular", "malo", "anuncio"];
        (0..40)
            .map(|i| {
                let c = i % 4;
                Document::new(format!("d{i}"), Label::ALL[c], format!("texto {} numero{i}", words[c]))
            })
            .collect()
    }

    #[test]
    fn cross_validate_separable() {
        let ev = Evaluator::new(Normalizer::bundled(), 42);
        let config = Configuration::parse_fragment("tok=w1").unwrap();
        let r = ev.cross_validate(&keyword_docs(), &config).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.per_fold.len(), 5);
        assert_eq!(ev.cross_validate(&keyword_docs(), &config).unwrap(), r);
    }

    #[test]
    fn constant_text_gives_majority_share() {
        let docs: Vec<Document> = (0..20)
            .map(|i| Document::new(format!("d{i}"), if i < 15 { Positive } else { Negative }, "igual"))
            .collect();
        let ev = Evaluator::new(Normalizer::bundled(), 42);
        let r = ev.cross_validate(&docs, &Configuration::parse_fragment("tok=w1").unwrap()).unwrap();
        assert_eq!(r.accuracy, 0.75);
    }

    #[test]
    fn gold_split() {
        let docs = keyword_docs();
        let ev = Evaluator::new(Normalizer::bundled(), 42);
        let config = Configuration::parse_fragment("tok=w1+q3").unwrap();
        let r = ev.evaluate_gold(&docs[..20], &docs[20..], &config).unwrap();
        assert_eq!(r.confusion.total(), 20);
        assert_eq!(r.per_fold.len(), 1);
    }
}
