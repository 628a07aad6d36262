//! Layer types and their forward/backward rules.

use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};
use crate::tropical::{arg_extrema, TropicalPoint};

/// Which order statistic a tropical neuron subtracts from its maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TropVariant {
    /// `max_i (x_i + w_ji) - min_i (x_i + w_ji)`, the tropical distance to `-w_j`.
    #[default]
    MaxMinusMin,
    /// `max - k-th max`; `k = 2` measures distance to the tropical hyperplane with apex `-w_j`.
    MaxMinusKthMax(usize),
}

impl TropVariant {
    pub fn name(self) -> String {
        match self {
            TropVariant::MaxMinusMin => "max-minus-min".to_string(),
            TropVariant::MaxMinusKthMax(k) => format!("max-minus-kth-max:{k}"),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s == "max-minus-min" {
            return Ok(TropVariant::MaxMinusMin);
        }
        s.strip_prefix("max-minus-kth-max:")
            .and_then(|k| k.parse().ok())
            .map(TropVariant::MaxMinusKthMax)
            .ok_or_else(|| Error::Model(format!("unknown tropical variant `{s}`")))
    }
}

/// Tropical embedding layer: `N` neurons over inputs in `R^d / R1`. No bias.
#[derive(Debug, Clone, PartialEq)]
pub struct TropEmbedLayer {
    weights: Matrix,
    variant: TropVariant,
}

/// Indices selected by one tropical forward evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct TropCache {
    input_dim: usize,
    /// Index of the maximum of `x + w_j`, per neuron.
    pub argmax: Vec<usize>,
    /// Index of the subtracted term (minimum, or k-th maximum), per neuron.
    pub argmin: Vec<usize>,
    /// Gap between the maximum and the runner-up, and between the subtracted
    /// term and its nearest competitor. Zero at ties.
    pub(crate) margin: Vec<f64>,
}

impl TropCache {
    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn units(&self) -> usize {
        self.argmax.len()
    }

    /// Smallest distance from a tie over all neurons; the layer is
    /// differentiable at this input when it is positive.
    pub fn min_margin(&self) -> f64 {
        self.margin.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl TropEmbedLayer {
    pub fn new(weights: Matrix, variant: TropVariant) -> Result<Self> {
        let (n, d) = weights.shape();
        if n == 0 {
            return Err(Error::invalid("tropical layer needs at least one unit"));
        }
        if d < 2 {
            return Err(Error::invalid(format!(
                "tropical layer input dimension must be at least 2, got {d}"
            )));
        }
        if let TropVariant::MaxMinusKthMax(k) = variant {
            if k < 2 || k > d {
                return Err(Error::invalid(format!("k-th max needs 2 <= k <= {d}, got {k}")));
            }
        }
        if !weights.is_finite() {
            return Err(Error::NonFinite("tropical weights"));
        }
        Ok(TropEmbedLayer { weights, variant })
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub(crate) fn weights_mut(&mut self) -> &mut Matrix {
        &mut self.weights
    }

    pub fn variant(&self) -> TropVariant {
        self.variant
    }

    pub fn units(&self) -> usize {
        self.weights.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn forward(&self, x: &[f64]) -> Result<(Vec<f64>, TropCache)> {
        let d = self.input_dim();
        if x.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: x.len(),
            });
        }
        let n = self.units();
        let mut z = Vec::with_capacity(n);
        let mut cache = TropCache {
            input_dim: d,
            argmax: Vec::with_capacity(n),
            argmin: Vec::with_capacity(n),
            margin: Vec::with_capacity(n),
        };
        let mut buf = vec![0.0; d];
        for j in 0..n {
            for ((b, xi), wi) in buf.iter_mut().zip(x).zip(self.weights.row(j)) {
                *b = xi + wi;
            }
            let (value, hi, lo, margin) = match self.variant {
                TropVariant::MaxMinusMin => max_minus_min(&buf),
                TropVariant::MaxMinusKthMax(k) => max_minus_kth(&buf, k),
            };
            z.push(value);
            cache.argmax.push(hi);
            cache.argmin.push(lo);
            cache.margin.push(margin);
        }
        Ok((z, cache))
    }

    /// Returns `(dW, dx)` given the upstream gradient on the layer output.
    pub fn backward(&self, cache: &TropCache, upstream: &[f64]) -> Result<(Matrix, Vec<f64>)> {
        if cache.input_dim != self.input_dim() || cache.units() != self.units() {
            return Err(Error::invalid("tropical cache does not match layer shape"));
        }
        trop_backward(cache, upstream)
    }
}

fn max_minus_min(v: &[f64]) -> (f64, usize, usize, f64) {
    let (imax, hi, imin, lo) = arg_extrema(v.iter().copied());
    let mut second_hi = f64::NEG_INFINITY;
    let mut second_lo = f64::INFINITY;
    for (i, &x) in v.iter().enumerate() {
        if i != imax {
            second_hi = second_hi.max(x);
        }
        if i != imin {
            second_lo = second_lo.min(x);
        }
    }
    let margin = (hi - second_hi).min(second_lo - lo);
    (hi - lo, imax, imin, margin)
}

fn max_minus_kth(v: &[f64], k: usize) -> (f64, usize, usize, f64) {
    // descending by value, ascending index among equals
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
    let top = order[0];
    let kth = order[k - 1];
    let mut margin = v[top] - v[order[1]];
    margin = margin.min(v[order[k - 2]] - v[kth]);
    if let Some(&next) = order.get(k) {
        margin = margin.min(v[kth] - v[next]);
    }
    (v[top] - v[kth], top, kth, margin)
}

fn trop_backward(cache: &TropCache, upstream: &[f64]) -> Result<(Matrix, Vec<f64>)> {
    if upstream.len() != cache.units() {
        return Err(Error::DimensionMismatch {
            expected: cache.units(),
            found: upstream.len(),
        });
    }
    let d = cache.input_dim;
    let mut dw = Matrix::zeros(cache.units(), d);
    let mut dx = vec![0.0; d];
    for (j, &g) in upstream.iter().enumerate() {
        let (hi, lo) = (cache.argmax[j], cache.argmin[j]);
        dw[(j, hi)] += g;
        dw[(j, lo)] -= g;
        dx[hi] += g;
        dx[lo] -= g;
    }
    Ok((dw, dx))
}

/// Forward evaluation of a tropical embedding layer on a torus point.
pub fn trop_embed_forward(x: &TropicalPoint, layer: &TropEmbedLayer) -> Result<(Vec<f64>, TropCache)> {
    layer.forward(x.coords())
}

/// Weight and input gradients of a tropical embedding layer.
pub fn trop_embed_backward(cache: &TropCache, upstream: &[f64]) -> Result<(Matrix, Vec<f64>)> {
    trop_backward(cache, upstream)
}

/// Fully connected layer `weights * z + bias`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineLayer {
    weights: Matrix,
    bias: Vec<f64>,
}

impl AffineLayer {
    pub fn new(weights: Matrix, bias: Vec<f64>) -> Result<Self> {
        if weights.rows() == 0 || weights.cols() == 0 {
            return Err(Error::invalid("affine layer must have non-empty shape"));
        }
        if bias.len() != weights.rows() {
            return Err(Error::DimensionMismatch {
                expected: weights.rows(),
                found: bias.len(),
            });
        }
        if !weights.is_finite() || bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite("affine parameters"));
        }
        Ok(AffineLayer { weights, bias })
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub(crate) fn params_mut(&mut self) -> (&mut Matrix, &mut Vec<f64>) {
        (&mut self.weights, &mut self.bias)
    }

    pub fn input_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn forward(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                found: z.len(),
            });
        }
        let mut out = self.weights.mul_vec(z);
        for (o, b) in out.iter_mut().zip(&self.bias) {
            *o += b;
        }
        Ok(out)
    }

    /// Returns `(dW, db, dz)`.
    pub fn backward(&self, input: &[f64], upstream: &[f64]) -> Result<(Matrix, Vec<f64>, Vec<f64>)> {
        if upstream.len() != self.output_dim() || input.len() != self.input_dim() {
            return Err(Error::invalid("affine cache does not match layer shape"));
        }
        let mut dw = Matrix::zeros(self.output_dim(), self.input_dim());
        for (i, &g) in upstream.iter().enumerate() {
            for (d, x) in dw.row_mut(i).iter_mut().zip(input) {
                *d = g * x;
            }
        }
        Ok((dw, upstream.to_vec(), self.weights.tr_mul_vec(upstream)))
    }
}

pub fn affine_forward(z: &[f64], layer: &AffineLayer) -> Result<Vec<f64>> {
    layer.forward(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Sigmoid,
}

impl Activation {
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Activation::Relu => v.max(0.0),
            Activation::Sigmoid => sigmoid(v),
        }
    }

    /// Derivative expressed through the activation's output.
    pub(crate) fn derivative_from_output(self, out: f64) -> f64 {
        match self {
            Activation::Relu => {
                if out > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => out * (1.0 - out),
        }
    }
}

pub fn sigmoid(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}
