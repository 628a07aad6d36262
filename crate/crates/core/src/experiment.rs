//! Tropical versus ReLU comparisons on a shared train/test split.
//!
//! Both models get the same width, training schedule and seed; only the
//! first layer differs. The tropical network sees raw coordinates, the ReLU
//! network the same coordinates as Euclidean input.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::Result;
use crate::eval::{accuracy, auc, roc_curve, ScoredLabels};
use crate::init::InitPolicy;
use crate::nn::{build_model, predict_proba, train, BuildOptions, InputKind, Model, TrainConfig};
use crate::simulate::{gaussian_translated, make_coalescent_dataset, CoalescentConfig, GaussianConfig, MeansPreset};

pub fn tropical_arch(hidden: usize) -> String {
    format!("trop:{hidden},dense:1,sigmoid")
}

pub fn relu_arch(hidden: usize) -> String {
    format!("dense:{hidden},relu,dense:1,sigmoid")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub hidden: usize,
    pub train: TrainConfig,
    pub init: InitPolicy,
    /// Threshold used for the reported accuracy.
    pub threshold: f64,
}

impl CompareConfig {
    pub fn new(hidden: usize, train: TrainConfig) -> Self {
        CompareConfig {
            hidden,
            train,
            init: InitPolicy::Default,
            threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelReport {
    pub arch: String,
    pub accuracy: f64,
    pub auc: f64,
    pub roc: Vec<(f64, f64)>,
    pub model: Model,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub tropical: ModelReport,
    pub relu: ModelReport,
}

fn fit_and_score(
    arch: String,
    input: InputKind,
    train_set: &Dataset,
    test_set: &Dataset,
    cfg: &CompareConfig,
) -> Result<ModelReport> {
    let opts = BuildOptions {
        input,
        init: cfg.init,
        seed: cfg.train.seed,
    };
    let model = build_model(&arch, train_set.dim(), &opts)?;
    let (model, _) = train(&model, train_set, &cfg.train)?;
    let scores = predict_proba(&model, test_set.features())?;
    let scored = ScoredLabels::new(scores, test_set.labels()?.to_vec())?;
    Ok(ModelReport {
        arch,
        accuracy: accuracy(&scored, cfg.threshold),
        auc: auc(&scored)?,
        roc: roc_curve(&scored)?,
        model,
    })
}

/// Trains both models on `train_set` and scores them on `test_set`.
pub fn compare(train_set: &Dataset, test_set: &Dataset, cfg: &CompareConfig) -> Result<Comparison> {
    Ok(Comparison {
        tropical: fit_and_score(tropical_arch(cfg.hidden), InputKind::Tropical, train_set, test_set, cfg)?,
        relu: fit_and_score(relu_arch(cfg.hidden), InputKind::Euclidean, train_set, test_set, cfg)?,
    })
}

/// Gaussian trial: independent train and test draws of `n_train` and
/// `n_test` points per class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianTrial {
    pub preset: MeansPreset,
    pub dim: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub trans_std: f64,
}

impl GaussianTrial {
    /// 16 + 16 points in the plane, shift std 4.
    pub fn small() -> Self {
        GaussianTrial {
            preset: MeansPreset::Small,
            dim: 2,
            n_train: 16,
            n_test: 16,
            trans_std: 4.0,
        }
    }

    /// Zero-padded means in dimension `dim`, shift std 6.
    pub fn highdim(dim: usize) -> Self {
        GaussianTrial {
            preset: MeansPreset::Highdim,
            dim,
            n_train: 16,
            n_test: 16,
            trans_std: 6.0,
        }
    }

    pub fn data(&self, seed: u64) -> Result<(Dataset, Dataset)> {
        let draw = |n, s| gaussian_translated(&GaussianConfig::preset(self.preset, self.dim, n, self.trans_std, s)?);
        Ok((draw(self.n_train, 2 * seed)?, draw(self.n_test, 2 * seed + 1)?))
    }

    pub fn run(&self, seed: u64, cfg: &CompareConfig) -> Result<Comparison> {
        let (train_set, test_set) = self.data(seed)?;
        let cfg = CompareConfig {
            train: TrainConfig { seed, ..cfg.train },
            ..*cfg
        };
        compare(&train_set, &test_set, &cfg)
    }
}

/// Stratified split of a labelled dataset, then [`compare`]. `seed` drives
/// both the split and training.
pub fn coalescent_trial_on(data: &Dataset, test_fraction: f64, seed: u64, cfg: &CompareConfig) -> Result<Comparison> {
    let (train_set, test_set) = data.split(test_fraction, seed)?;
    let cfg = CompareConfig {
        train: TrainConfig { seed, ..cfg.train },
        ..*cfg
    };
    compare(&train_set, &test_set, &cfg)
}

/// Simulates a two-class coalescent dataset and runs [`coalescent_trial_on`].
pub fn coalescent_trial(sim: &CoalescentConfig, test_fraction: f64, cfg: &CompareConfig) -> Result<Comparison> {
    coalescent_trial_on(&make_coalescent_dataset(sim)?, test_fraction, sim.seed, cfg)
}

/// `model,arch,accuracy,auc` rows for a comparison.
pub fn summary_csv(c: &Comparison) -> String {
    let mut out = String::from("model,arch,accuracy,auc\n");
    for (name, r) in [("tropical", &c.tropical), ("relu", &c.relu)] {
        out.push_str(&format!("{name},\"{}\",{},{}\n", r.arch, r.accuracy, r.auc));
    }
    out
}
