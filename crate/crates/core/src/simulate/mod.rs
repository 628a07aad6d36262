//! Synthetic data: translated Gaussian clouds and coalescent gene trees.
//!
//! All generators are pure functions of their config and seed.

mod coalescent;
mod gaussian;

pub use coalescent::{
    make_coalescent_dataset, msc_gene_trees, simulate_coalescent, yule_tree, CoalescentConfig,
    CoalescentSample,
};
pub use gaussian::{gaussian_translated, GaussianConfig, MeansPreset};
