//! Weight initialization grounded in extreme value statistics.
//!
//! For `x_i, w_i ~ N(0, 1)` the maximum of the `d` sums `x_i + w_i` is, after
//! the usual Gumbel normalization, approximately Gumbel(0, 1). That gives
//! closed-form approximations for the mean and spread of `d_tr(x, -w)` and a
//! weight scale that makes the embedding activity have unit variance.

use std::f64::consts::PI;

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::Matrix;
use crate::rng::{self, Rng};
use crate::tropical::arg_extrema;

pub const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// Standard deviation used by the fixed initialization policy.
pub const DEFAULT_STDDEV: f64 = 0.05;

/// Gumbel normalizing constants for the maximum of `d` standard normals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GumbelCoeffs {
    pub a: f64,
    pub b: f64,
    pub d: usize,
}

/// Mean and standard deviation of `d_tr(x, -w)`, predicted or simulated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtrMoments {
    pub mean: f64,
    pub std: f64,
    pub d: usize,
}

pub fn gumbel_coeffs(d: usize) -> Result<GumbelCoeffs> {
    if d < 2 {
        return Err(Error::invalid(format!("dimension must be at least 2, got {d}")));
    }
    let log_d = (d as f64).ln();
    let root = (2.0 * log_d).sqrt();
    let a = 1.0 / root;
    let b = root - (log_d.ln() + (4.0 * PI).ln()) / (2.0 * root);
    Ok(GumbelCoeffs { a, b, d })
}

/// Predicted moments of `d_tr(x, -w)` when `x_i, w_i ~ N(0, 1)`.
pub fn dtr_stats_standard(d: usize) -> Result<DtrMoments> {
    let g = gumbel_coeffs(d)?;
    let mean = 2.0 * 2f64.sqrt() * (g.a * EULER_MASCHERONI + g.b);
    let std = (PI * PI / (3.0 * (d as f64).ln())).sqrt();
    Ok(DtrMoments { mean, std, d })
}

/// Weight standard deviation giving `Var[d_tr(x, -w)] ~= 1` for `x ~ N(0, I_d)`.
///
/// Only defined for `d >= 6`; below that `6 ln d / pi^2 - 1` is negative.
pub fn unit_variance_stddev(d: usize) -> Result<f64> {
    let var = 6.0 * (d as f64).ln() / (PI * PI) - 1.0;
    if d < 2 || var <= 0.0 {
        return Err(Error::invalid(format!(
            "unit-variance scale is infeasible for d = {d} (needs d >= 6)"
        )));
    }
    Ok(var.sqrt())
}

/// Predicted moments under the unit-variance weight scale.
pub fn dtr_stats_unit_variance(d: usize) -> Result<DtrMoments> {
    let scale = (unit_variance_stddev(d)?.powi(2) + 1.0).sqrt();
    let g = gumbel_coeffs(d)?;
    Ok(DtrMoments {
        mean: 2.0 * scale * (g.a * EULER_MASCHERONI + g.b),
        std: 1.0,
        d,
    })
}

/// Samples `n_samples` values of `d_tr(x, -w)` with `x_i ~ N(0, sigma_x^2)` and
/// `w_i ~ N(0, sigma_w^2)` and returns their sample mean and standard deviation
/// (`n - 1` denominator).
pub fn monte_carlo_dtr(
    d: usize,
    n_samples: usize,
    sigma_x: f64,
    sigma_w: f64,
    seed: u64,
) -> Result<DtrMoments> {
    let samples = sample_dtr(d, n_samples, sigma_x, sigma_w, seed)?;
    let (mean, std) = mean_std(&samples);
    Ok(DtrMoments { mean, std, d })
}

/// The raw draws behind [`monte_carlo_dtr`].
pub fn sample_dtr(
    d: usize,
    n_samples: usize,
    sigma_x: f64,
    sigma_w: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if d < 2 {
        return Err(Error::invalid(format!("dimension must be at least 2, got {d}")));
    }
    if n_samples < 2 {
        return Err(Error::invalid("need at least 2 samples"));
    }
    if !(sigma_x >= 0.0 && sigma_x.is_finite() && sigma_w >= 0.0 && sigma_w.is_finite()) {
        return Err(Error::invalid("standard deviations must be finite and non-negative"));
    }
    let mut rng = rng::seeded(seed, rng::stream::MONTE_CARLO);
    let mut out = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        // x_i - (-w_i) = x_i + w_i
        let sums = (0..d).map(|_| {
            let x: f64 = rng.sample(StandardNormal);
            let w: f64 = rng.sample(StandardNormal);
            sigma_x * x + sigma_w * w
        });
        let (_, hi, _, lo) = arg_extrema(sums);
        out.push(hi - lo);
    }
    Ok(out)
}

pub(crate) fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// How tropical embedding weights are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitPolicy {
    /// `N(0, sigma^2)` with the given sigma.
    Fixed(f64),
    /// `N(0, 6 ln d / pi^2 - 1)` where `d` is the layer's input dimension.
    UnitVariance,
    /// `N(0, 0.05^2)`.
    #[default]
    Default,
}

impl InitPolicy {
    pub fn stddev(self, input_dim: usize) -> Result<f64> {
        match self {
            InitPolicy::Fixed(s) if s.is_finite() && s >= 0.0 => Ok(s),
            InitPolicy::Fixed(s) => Err(Error::invalid(format!("invalid init stddev {s}"))),
            InitPolicy::UnitVariance => unit_variance_stddev(input_dim),
            InitPolicy::Default => Ok(DEFAULT_STDDEV),
        }
    }
}

/// Draws a `rows x cols` matrix of i.i.d. normals with the policy's scale.
/// `cols` is the fan-in used by [`InitPolicy::UnitVariance`].
pub fn default_initializer(rows: usize, cols: usize, policy: InitPolicy, seed: u64) -> Result<Matrix> {
    let mut rng = rng::seeded(seed, rng::stream::INIT);
    init_matrix(rows, cols, policy, &mut rng)
}

pub(crate) fn init_matrix(rows: usize, cols: usize, policy: InitPolicy, rng: &mut Rng) -> Result<Matrix> {
    let sigma = policy.stddev(cols)?;
    let data = (0..rows * cols)
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Matrix::from_vec(rows, cols, data)
}
