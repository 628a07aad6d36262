//! Neural networks whose first layer embeds points of the tropical projective
//! torus `R^d / R1` through the tropical metric, together with the tooling to
//! train them on phylogenetic trees.
//!
//! * [`tropical`]: the tropical metric and canonical representatives.
//! * [`nn`]: layers, exact backpropagation, SGD, model files.
//! * [`init`]: extreme-value weight scales and a Monte Carlo check.
//! * [`phylo`]: Newick trees, cophenetic vectors, ultrametric checks.
//! * [`simulate`]: Gaussian and coalescent data generators.
//! * [`eval`]: accuracy, ROC and AUC.
//! * [`experiment`]: tropical-vs-ReLU comparisons used by the CLI.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod init;
pub mod nn;
pub mod phylo;
pub mod rng;
pub mod simulate;
pub mod tropical;

pub use dataset::Dataset;
pub use error::{Error, Result};
pub use nn::{build_model, Model, TrainConfig};
pub use tropical::{normalize, trop_distance, trop_inner_product, TropicalPoint};
