//! Shared fixtures for the benchmarks.

use tropnn_core::nn::{build_model, BuildOptions, Model};
use tropnn_core::simulate::{gaussian_translated, GaussianConfig, MeansPreset};
use tropnn_core::Dataset;

/// Tropical classifier with `hidden` units on `dim` inputs.
pub fn tropical_model(dim: usize, hidden: usize) -> Model {
    build_model(&format!("trop:{hidden},dense:1,sigmoid"), dim, &BuildOptions::seeded(1)).expect("valid arch")
}

/// Two translated Gaussian classes in dimension `dim`.
pub fn gaussian_data(dim: usize, n_per_class: usize) -> Dataset {
    let cfg = GaussianConfig::preset(MeansPreset::Highdim, dim, n_per_class, 6.0, 1).expect("valid preset");
    gaussian_translated(&cfg).expect("valid config")
}

/// Deterministic point with distinct coordinates.
pub fn point(dim: usize) -> Vec<f64> {
    (0..dim).map(|i| ((i * 7919) % 101) as f64 / 10.0).collect()
}
