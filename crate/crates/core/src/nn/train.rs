use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::loss::{training_loss, Loss};
use super::model::{GradientSet, Link, Model};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
    pub loss: Loss,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 100,
            learning_rate: 0.05,
            batch_size: 1,
            seed: 0,
            loss: Loss::BinaryCrossEntropy,
        }
    }
}

/// Mini-batch SGD. Each epoch visits the rows in a seeded random order;
/// gradients are averaged over the batch. Returns the trained copy and the
/// mean training loss of every epoch.
pub fn train(model: &Model, data: &Dataset, cfg: &TrainConfig) -> Result<(Model, Vec<f64>)> {
    if data.is_empty() {
        return Err(Error::invalid("training set is empty"));
    }
    if data.dim() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim(),
            found: data.dim(),
        });
    }
    if cfg.batch_size == 0 {
        return Err(Error::invalid("batch size must be positive"));
    }
    if !(cfg.learning_rate > 0.0 && cfg.learning_rate.is_finite()) {
        return Err(Error::invalid("learning rate must be positive"));
    }
    if cfg.loss == Loss::BinaryCrossEntropy && model.link() != Link::Sigmoid {
        return Err(Error::invalid("cross-entropy loss needs a sigmoid link"));
    }
    let labels = data.labels()?;

    let mut model = model.clone();
    let mut rng = rng::seeded(cfg.seed, rng::stream::SHUFFLE);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let mut acc = GradientSet::zeros_like(&model);
            for &i in batch {
                let y_true = f64::from(labels[i]);
                let (out, cache) = model.forward(&data.features()[i])?;
                epoch_loss += training_loss(out[0], y_true, cfg.loss);
                acc.add_scaled(1.0, &model.backward(&cache, y_true, cfg.loss)?)?;
            }
            acc.scale(1.0 / batch.len() as f64);
            model.apply_sgd(&acc, cfg.learning_rate)?;
        }
        history.push(epoch_loss / data.len() as f64);
    }
    Ok((model, history))
}

/// Class-1 probabilities for each row.
pub fn predict_proba(model: &Model, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    if model.link() != Link::Sigmoid {
        return Err(Error::invalid("predict_proba needs a sigmoid-link model"));
    }
    if model.output_dim() != 1 {
        return Err(Error::invalid("predict_proba needs a scalar output"));
    }
    rows.iter().map(|x| Ok(model.predict(x)?[0])).collect()
}
