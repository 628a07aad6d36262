use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{self, stream};

/// Class means for the two built-in experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeansPreset {
    /// `(0.5, -0.5)` against `(-0.5, 0.5)`; requires `d = 2`.
    #[default]
    Small,
    /// The same two means padded with zeros to any `d >= 2`.
    Highdim,
}

impl MeansPreset {
    pub fn means(self, d: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        if self == MeansPreset::Small && d != 2 {
            return Err(Error::invalid(format!("preset `small` is two-dimensional, got dim {d}")));
        }
        if d < 2 {
            return Err(Error::invalid("dimension must be at least 2"));
        }
        let mut m0 = vec![0.0; d];
        let mut m1 = vec![0.0; d];
        m0[0] = 0.5;
        m0[1] = -0.5;
        m1[0] = -0.5;
        m1[1] = 0.5;
        Ok((m0, m1))
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(MeansPreset::Small),
            "highdim" => Ok(MeansPreset::Highdim),
            _ => Err(Error::invalid(format!("unknown means preset `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianConfig {
    pub dim: usize,
    pub n_per_class: usize,
    pub mean0: Vec<f64>,
    pub mean1: Vec<f64>,
    /// Standard deviation of the scalar shift applied along the all-ones vector.
    pub trans_std: f64,
    pub seed: u64,
}

impl GaussianConfig {
    pub fn preset(preset: MeansPreset, dim: usize, n_per_class: usize, trans_std: f64, seed: u64) -> Result<Self> {
        let (mean0, mean1) = preset.means(dim)?;
        Ok(GaussianConfig {
            dim,
            n_per_class,
            mean0,
            mean1,
            trans_std,
            seed,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::invalid("dimension must be at least 2"));
        }
        if self.n_per_class == 0 {
            return Err(Error::invalid("need at least one sample per class"));
        }
        for m in [&self.mean0, &self.mean1] {
            if m.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: m.len(),
                });
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("class mean"));
            }
        }
        if !(self.trans_std.is_finite() && self.trans_std >= 0.0) {
            return Err(Error::invalid("trans_std must be finite and non-negative"));
        }
        Ok(())
    }
}

/// `x = mean_k + eps + c 1` with `eps ~ N(0, I)` and `c ~ N(0, trans_std^2)`.
/// Class 0 rows come first.
pub fn gaussian_translated(cfg: &GaussianConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = rng::seeded(cfg.seed, stream::GAUSSIAN);
    let mut rows = Vec::with_capacity(2 * cfg.n_per_class);
    let mut labels = Vec::with_capacity(2 * cfg.n_per_class);
    for (label, mean) in [(0u8, &cfg.mean0), (1u8, &cfg.mean1)] {
        for _ in 0..cfg.n_per_class {
            let c: f64 = cfg.trans_std * rng.sample::<f64, _>(StandardNormal);
            let row = mean
                .iter()
                .map(|m| {
                    let e: f64 = StandardNormal.sample(&mut rng);
                    m + e + c
                })
                .collect();
            rows.push(row);
            labels.push(label);
        }
    }
    let mut ds = Dataset::with_default_names(rows, Some(labels))?;
    ds.provenance.insert("generator".into(), "gaussian".into());
    ds.provenance.insert("seed".into(), cfg.seed.to_string());
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_preset_shape() {
        let cfg = GaussianConfig::preset(MeansPreset::Small, 2, 16, 4.0, 1).unwrap();
        let ds = gaussian_translated(&cfg).unwrap();
        assert_eq!(ds.len(), 32);
        assert_eq!(ds.dim(), 2);
        let labels = ds.labels().unwrap();
        assert_eq!(labels.iter().filter(|&&l| l == 1).count(), 16);
    }

    #[test]
    fn presets() {
        assert!(MeansPreset::Small.means(3).is_err());
        let (m0, m1) = MeansPreset::Highdim.means(4).unwrap();
        assert_eq!(m0, vec![0.5, -0.5, 0.0, 0.0]);
        assert_eq!(m1, vec![-0.5, 0.5, 0.0, 0.0]);
        assert_eq!(MeansPreset::parse("highdim").unwrap(), MeansPreset::Highdim);
        assert!(MeansPreset::parse("big").is_err());
    }

    #[test]
    fn same_seed_same_data() {
        let cfg = GaussianConfig::preset(MeansPreset::Highdim, 10, 20, 6.0, 9).unwrap();
        assert_eq!(gaussian_translated(&cfg).unwrap(), gaussian_translated(&cfg).unwrap());
        let other = GaussianConfig { seed: 10, ..cfg.clone() };
        assert_ne!(gaussian_translated(&cfg).unwrap(), gaussian_translated(&other).unwrap());
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = GaussianConfig::preset(MeansPreset::Small, 2, 4, 1.0, 0).unwrap();
        cfg.n_per_class = 0;
        assert!(gaussian_translated(&cfg).is_err());
        cfg.n_per_class = 4;
        cfg.trans_std = -1.0;
        assert!(gaussian_translated(&cfg).is_err());
        cfg.trans_std = 1.0;
        cfg.mean1 = vec![0.0; 3];
        assert!(gaussian_translated(&cfg).is_err());
    }

    #[test]
    fn class_means_without_translation() {
        let n = 4000;
        let cfg = GaussianConfig::preset(MeansPreset::Small, 2, n, 0.0, 3).unwrap();
        let ds = gaussian_translated(&cfg).unwrap();
        let tol = 4.0 / (n as f64).sqrt();
        for (k, mean) in [(0u8, &cfg.mean0), (1, &cfg.mean1)] {
            for j in 0..2 {
                let vals: Vec<f64> = ds
                    .features()
                    .iter()
                    .zip(ds.labels().unwrap())
                    .filter(|(_, &l)| l == k)
                    .map(|(r, _)| r[j])
                    .collect();
                let avg = vals.iter().sum::<f64>() / vals.len() as f64;
                assert!((avg - mean[j]).abs() < tol, "class {k} coord {j}: {avg}");
            }
        }
    }
}
