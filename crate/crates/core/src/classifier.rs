//! One-vs-rest linear classifier trained with a Pegasos-style stochastic
//! subgradient solver on the L2-regularized hinge loss.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Label;
use crate::vectorizer::SparseVector;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrainError {
    #[error("degenerate training set: {0}")]
    Degenerate(String),
    #[error("{vectors} vectors but {labels} labels")]
    LengthMismatch { vectors: usize, labels: usize },
    #[error("vector column {column} out of range for dimension {dim}")]
    DimensionMismatch { column: u32, dim: usize },
    #[error("epochs must be at least 1")]
    NoEpochs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    pub epochs: u32,
    pub seed: u64,
    /// Regularization strength; `None` means `1 / n_samples`.
    pub lambda: Option<f64>,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            epochs: 10,
            seed: 42,
            lambda: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub classes: Vec<Label>,
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub lambda: f64,
    pub epochs: u32,
    pub seed: u64,
}

impl LinearModel {
    pub fn dim(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    /// Decision value of every class, in `classes` order.
    pub fn decision_values(&self, v: &SparseVector) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| {
                v.entries()
                    .iter()
                    .filter(|(c, _)| (*c as usize) < w.len())
                    .map(|&(c, x)| x * w[c as usize])
                    .sum::<f64>()
                    + b
            })
            .collect()
    }

    /// Argmax of the decision values; ties go to the earliest class.
    pub fn predict(&self, v: &SparseVector) -> Label {
        let scores = self.decision_values(v);
        let mut best = 0;
        for (i, s) in scores.iter().enumerate().skip(1) {
            if *s > scores[best] {
                best = i;
            }
        }
        self.classes[best]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

pub fn predict(model: &LinearModel, v: &SparseVector) -> Label {
    model.predict(v)
}

/// Binary Pegasos on targets in {-1, +1}. The bias is an extra constant
/// feature and is regularized with the weights.
///
/// The weight vector is stored as `scale * v` so each step's shrinkage is
/// O(1) instead of O(dim).
struct Pegasos {
    v: Vec<f64>,
    v_bias: f64,
    scale: f64,
}

impl Pegasos {
    fn new(dim: usize) -> Self {
        Pegasos {
            v: vec![0.0; dim],
            v_bias: 0.0,
            scale: 1.0,
        }
    }

    fn margin(&self, x: &SparseVector) -> f64 {
        self.scale * (x.dot(&self.v) + self.v_bias)
    }

    fn step(&mut self, x: &SparseVector, y: f64, lambda: f64, t: u64) {
        let eta = 1.0 / (lambda * t as f64);
        let violated = y * self.margin(x) < 1.0;
        self.scale *= 1.0 - eta * lambda;
        if self.scale == 0.0 {
            // First step (t = 1) zeroes the weights exactly.
            self.v.iter_mut().for_each(|w| *w = 0.0);
            self.v_bias = 0.0;
            self.scale = 1.0;
        }
        if violated {
            let g = eta * y / self.scale;
            for &(c, xv) in x.entries() {
                self.v[c as usize] += g * xv;
            }
            self.v_bias += g;
        }
    }

    fn finish(self) -> (Vec<f64>, f64) {
        let s = self.scale;
        (self.v.into_iter().map(|w| w * s).collect(), self.v_bias * s)
    }
}

/// Trains one binary model per class in [`Label::ALL`] order.
///
/// Every epoch visits the samples in a fresh seeded permutation shared by
/// all classes, so the result depends only on the input order and the seed.
pub fn train(
    vectors: &[SparseVector],
    labels: &[Label],
    dim: usize,
    params: &TrainParams,
) -> Result<LinearModel, TrainError> {
    if vectors.len() != labels.len() {
        return Err(TrainError::LengthMismatch {
            vectors: vectors.len(),
            labels: labels.len(),
        });
    }
    if params.epochs == 0 {
        return Err(TrainError::NoEpochs);
    }
    if vectors.len() < 2 {
        return Err(TrainError::Degenerate("fewer than 2 samples".into()));
    }
    let first = labels[0];
    if labels.iter().all(|&l| l == first) {
        return Err(TrainError::Degenerate(format!("only class {first} present")));
    }
    for v in vectors {
        if let Some(column) = v.max_column() {
            if column as usize >= dim {
                return Err(TrainError::DimensionMismatch { column, dim });
            }
        }
    }

    let n = vectors.len();
    let lambda = params.lambda.unwrap_or(1.0 / n as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut solvers: Vec<Pegasos> = Label::ALL.iter().map(|_| Pegasos::new(dim)).collect();
    let mut t = 0u64;
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            for (solver, class) in solvers.iter_mut().zip(Label::ALL) {
                let y = if labels[i] == class { 1.0 } else { -1.0 };
                solver.step(&vectors[i], y, lambda, t);
            }
        }
    }

    let (weights, bias) = solvers.into_iter().map(Pegasos::finish).unzip();
    Ok(LinearModel {
        classes: Label::ALL.to_vec(),
        weights,
        bias,
        lambda,
        epochs: params.epochs,
        seed: params.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (Vec<SparseVector>, Vec<Label>) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for _ in 0..20 {
            xs.push(SparseVector::from_entries(vec![(0, 1.0)]));
            ys.push(Label::Positive);
            xs.push(SparseVector::from_entries(vec![(1, 1.0)]));
            ys.push(Label::Negative);
        }
        (xs, ys)
    }

    #[test]
    fn separable_toy_set() {
        let (xs, ys) = toy();
        let model = train(&xs, &ys, 2, &TrainParams::default()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(model.predict(x), *y);
        }
    }

    #[test]
    fn identical_vectors_predict_one_class() {
        let xs = vec![SparseVector::from_entries(vec![(0, 1.0)]); 10];
        let ys: Vec<Label> = (0..10)
            .map(|i| if i < 7 { Label::Neutral } else { Label::None })
            .collect();
        let model = train(&xs, &ys, 1, &TrainParams::default()).unwrap();
        let correct = xs.iter().zip(&ys).filter(|(x, y)| model.predict(x) == **y).count();
        assert_eq!(correct, 7);
    }

    #[test]
    fn deterministic() {
        let (xs, ys) = toy();
        let a = train(&xs, &ys, 2, &TrainParams::default()).unwrap();
        let b = train(&xs, &ys, 2, &TrainParams::default()).unwrap();
        assert_eq!(a, b);
        let probe = SparseVector::from_entries(vec![(0, 0.3), (1, 0.7)]);
        assert_eq!(
            a.decision_values(&probe)
                .iter()
                .map(|f| f.to_bits())
                .collect::<Vec<_>>(),
            b.decision_values(&probe)
                .iter()
                .map(|f| f.to_bits())
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn errors() {
        let x = vec![SparseVector::from_entries(vec![(0, 1.0)]); 3];
        assert!(matches!(
            train(&x, &[Label::Positive; 3], 1, &TrainParams::default()),
            Err(TrainError::Degenerate(_))
        ));
        assert!(matches!(
            train(&x, &[Label::Positive; 2], 1, &TrainParams::default()),
            Err(TrainError::LengthMismatch { .. })
        ));
        let ys = [Label::Positive, Label::None, Label::None];
        assert!(matches!(
            train(&x, &ys, 0, &TrainParams::default()),
            Err(TrainError::DimensionMismatch { .. })
        ));
        assert!(train(&x, &ys, 1, &TrainParams::default()).is_ok());
        let err = train(&x, &[Label::None; 3], 1, &TrainParams::default()).unwrap_err();
        assert!(err.to_string().starts_with("degenerate training set"));
    }

    #[test]
    fn empty_vector_uses_bias() {
        let model = LinearModel {
            classes: Label::ALL.to_vec(),
            weights: vec![vec![0.0]; 4],
            bias: vec![0.0, 0.5, 0.5, -1.0],
            lambda: 1.0,
            epochs: 1,
            seed: 0,
        };
        assert_eq!(model.predict(&SparseVector::default()), Label::Neutral);
        let zero = LinearModel {
            bias: vec![0.0; 4],
            ..model
        };
        assert_eq!(zero.predict(&SparseVector::default()), Label::Positive);
    }

    #[test]
    fn scaling_input_keeps_prediction_without_bias() {
        let model = LinearModel {
            classes: Label::ALL.to_vec(),
            weights: vec![vec![1.0, -2.0], vec![0.5, 0.5], vec![-1.0, 3.0], vec![0.0, 0.0]],
            bias: vec![0.0; 4],
            lambda: 1.0,
            epochs: 1,
            seed: 0,
        };
        let v = SparseVector::from_entries(vec![(0, 0.2), (1, 0.9)]);
        assert_eq!(model.predict(&v), model.predict(&v.scaled(2.0)));
    }

    #[test]
    fn json_round_trip() {
        let (xs, ys) = toy();
        let model = train(&xs, &ys, 2, &TrainParams::default()).unwrap();
        let back = LinearModel::from_json(&model.to_json()).unwrap();
        assert_eq!(back.classes, model.classes);
        assert_eq!(back.predict(&xs[0]), Label::Positive);
    }
}
