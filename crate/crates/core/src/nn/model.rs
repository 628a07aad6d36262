use serde::{Deserialize, Serialize};

use super::layer::{sigmoid, Activation, AffineLayer, TropCache, TropEmbedLayer};
use super::loss::Loss;
use super::Matrix;
use crate::error::{Error, Result};
use crate::tropical::TropicalPoint;

#[derive(Debug, Clone, PartialEq)]
pub enum Layer {
    Trop(TropEmbedLayer),
    Affine(AffineLayer),
    Activation(Activation),
}

impl Layer {
    fn output_dim(&self, input: usize) -> usize {
        match self {
            Layer::Trop(l) => l.units(),
            Layer::Affine(l) => l.output_dim(),
            Layer::Activation(_) => input,
        }
    }

    fn expected_input(&self) -> Option<usize> {
        match self {
            Layer::Trop(l) => Some(l.input_dim()),
            Layer::Affine(l) => Some(l.input_dim()),
            Layer::Activation(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    /// Regression output.
    #[default]
    Identity,
    /// Binary classification probability.
    Sigmoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    #[default]
    None,
    /// Tropical logistic regression: two tropical neurons feeding one sigmoid
    /// output whose weights `v0, v1` satisfy `v0 * v1 <= 0`.
    TropLogistic,
}

/// Whether model inputs live on the tropical projective torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputKind {
    #[default]
    Tropical,
    Euclidean,
}

/// A feed-forward stack of layers with an output link.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    input_dim: usize,
    layers: Vec<Layer>,
    link: Link,
    constraint: Constraint,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LayerCache {
    Trop(TropCache),
    Affine { input: Vec<f64> },
    Activation {
        kind: Activation,
        input: Vec<f64>,
        output: Vec<f64>,
    },
}

/// Everything the backward pass needs from one forward evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardCache {
    pub input_dim: usize,
    pub layers: Vec<LayerCache>,
    /// Network output before the link function.
    pub pre_link: Vec<f64>,
    pub output: Vec<f64>,
}

impl ForwardCache {
    /// Smallest distance from a max/min tie across all tropical neurons and
    /// from zero across all ReLU units.
    pub fn min_margin(&self) -> f64 {
        let mut m = f64::INFINITY;
        for c in &self.layers {
            match c {
                LayerCache::Trop(t) => m = m.min(t.min_margin()),
                LayerCache::Activation {
                    kind: Activation::Relu,
                    input,
                    ..
                } => m = input.iter().fold(m, |acc, v| acc.min(v.abs())),
                _ => {}
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LayerGrad {
    Trop { weights: Matrix },
    Affine { weights: Matrix, bias: Vec<f64> },
    None,
}

/// Per-layer parameter gradients, shaped like the model.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    pub layers: Vec<LayerGrad>,
}

impl GradientSet {
    pub fn zeros_like(model: &Model) -> Self {
        let layers = model
            .layers
            .iter()
            .map(|l| match l {
                Layer::Trop(t) => LayerGrad::Trop {
                    weights: Matrix::zeros(t.units(), t.input_dim()),
                },
                Layer::Affine(a) => LayerGrad::Affine {
                    weights: Matrix::zeros(a.output_dim(), a.input_dim()),
                    bias: vec![0.0; a.output_dim()],
                },
                Layer::Activation(_) => LayerGrad::None,
            })
            .collect();
        GradientSet { layers }
    }

    /// `self += alpha * other`; shapes must agree.
    pub fn add_scaled(&mut self, alpha: f64, other: &GradientSet) -> Result<()> {
        if self.layers.len() != other.layers.len() {
            return Err(Error::invalid("gradient sets have different depth"));
        }
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            match (a, b) {
                (LayerGrad::Trop { weights: wa }, LayerGrad::Trop { weights: wb }) if wa.shape() == wb.shape() => {
                    wa.axpy(alpha, wb)
                }
                (
                    LayerGrad::Affine { weights: wa, bias: ba },
                    LayerGrad::Affine { weights: wb, bias: bb },
                ) if wa.shape() == wb.shape() => {
                    wa.axpy(alpha, wb);
                    for (x, y) in ba.iter_mut().zip(bb) {
                        *x += alpha * y;
                    }
                }
                (LayerGrad::None, LayerGrad::None) => {}
                _ => return Err(Error::invalid("gradient sets have different shapes")),
            }
        }
        Ok(())
    }

    pub fn scale(&mut self, alpha: f64) {
        for g in &mut self.layers {
            match g {
                LayerGrad::Trop { weights } => weights.as_mut_slice().iter_mut().for_each(|v| *v *= alpha),
                LayerGrad::Affine { weights, bias } => {
                    weights.as_mut_slice().iter_mut().for_each(|v| *v *= alpha);
                    bias.iter_mut().for_each(|v| *v *= alpha);
                }
                LayerGrad::None => {}
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().all(|g| match g {
            LayerGrad::Trop { weights } => weights.is_finite(),
            LayerGrad::Affine { weights, bias } => weights.is_finite() && bias.iter().all(|b| b.is_finite()),
            LayerGrad::None => true,
        })
    }

    /// All gradient entries flattened in parameter order (see [`Model::params`]).
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for g in &self.layers {
            match g {
                LayerGrad::Trop { weights } => out.extend_from_slice(weights.as_slice()),
                LayerGrad::Affine { weights, bias } => {
                    out.extend_from_slice(weights.as_slice());
                    out.extend_from_slice(bias);
                }
                LayerGrad::None => {}
            }
        }
        out
    }
}

impl Model {
    pub fn new(input_dim: usize, layers: Vec<Layer>, link: Link, constraint: Constraint) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::invalid("input dimension must be positive"));
        }
        if !layers.iter().any(|l| !matches!(l, Layer::Activation(_))) {
            return Err(Error::invalid("model needs at least one parametrized layer"));
        }
        let mut dim = input_dim;
        for (i, layer) in layers.iter().enumerate() {
            if let Some(expected) = layer.expected_input() {
                if expected != dim {
                    return Err(Error::invalid(format!(
                        "layer {i} expects input dimension {expected} but receives {dim}"
                    )));
                }
            }
            dim = layer.output_dim(dim);
        }
        let model = Model {
            input_dim,
            layers,
            link,
            constraint,
        };
        if constraint == Constraint::TropLogistic {
            model.check_trop_logistic_shape()?;
        }
        Ok(model)
    }

    /// Like [`Model::new`] but also enforces that tropical inputs enter a
    /// tropical embedding layer first.
    pub fn with_input_kind(
        input_dim: usize,
        layers: Vec<Layer>,
        link: Link,
        constraint: Constraint,
        kind: InputKind,
    ) -> Result<Self> {
        if kind == InputKind::Tropical && !matches!(layers.first(), Some(Layer::Trop(_))) {
            return Err(Error::invalid(
                "tropical inputs require a tropical embedding layer first",
            ));
        }
        Model::new(input_dim, layers, link, constraint)
    }

    fn check_trop_logistic_shape(&self) -> Result<()> {
        let ok = match self.layers.as_slice() {
            [Layer::Trop(t), Layer::Affine(a)] => {
                t.units() == 2 && a.output_dim() == 1 && self.link == Link::Sigmoid
            }
            _ => false,
        };
        if !ok {
            return Err(Error::invalid(
                "trop-logistic constraint needs exactly trop:2, dense:1 and a sigmoid link",
            ));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.iter().fold(self.input_dim, |d, l| l.output_dim(d))
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn link(&self) -> Link {
        self.link
    }

    pub fn constraint(&self) -> Constraint {
        self.constraint
    }

    pub fn is_tropical(&self) -> bool {
        matches!(self.layers.first(), Some(Layer::Trop(_)))
    }

    pub fn forward(&self, x: &[f64]) -> Result<(Vec<f64>, ForwardCache)> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("model input"));
        }
        let mut caches = Vec::with_capacity(self.layers.len());
        let mut h = x.to_vec();
        for layer in &self.layers {
            match layer {
                Layer::Trop(t) => {
                    let (z, c) = t.forward(&h)?;
                    caches.push(LayerCache::Trop(c));
                    h = z;
                }
                Layer::Affine(a) => {
                    let out = a.forward(&h)?;
                    caches.push(LayerCache::Affine { input: h });
                    h = out;
                }
                Layer::Activation(act) => {
                    let out: Vec<f64> = h.iter().map(|&v| act.apply(v)).collect();
                    caches.push(LayerCache::Activation {
                        kind: *act,
                        input: h,
                        output: out.clone(),
                    });
                    h = out;
                }
            }
        }
        let output: Vec<f64> = match self.link {
            Link::Identity => h.clone(),
            Link::Sigmoid => h.iter().map(|&v| sigmoid(v)).collect(),
        };
        let cache = ForwardCache {
            input_dim: self.input_dim,
            layers: caches,
            pre_link: h,
            output: output.clone(),
        };
        Ok((output, cache))
    }

    /// Output only, no cache.
    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward(x)?.0)
    }

    /// Gradient of the loss w.r.t. the pre-link output.
    fn output_delta(&self, cache: &ForwardCache, y_true: f64, loss: Loss) -> Result<Vec<f64>> {
        if cache.output.len() != 1 {
            return Err(Error::invalid(format!(
                "losses need a scalar output, model has {}",
                cache.output.len()
            )));
        }
        let y = cache.output[0];
        let delta = match (loss, self.link) {
            (Loss::Squared, Link::Identity) => y - y_true,
            (Loss::Squared, Link::Sigmoid) => (y - y_true) * y * (1.0 - y),
            (Loss::BinaryCrossEntropy, Link::Sigmoid) => y - y_true,
            (Loss::BinaryCrossEntropy, Link::Identity) => {
                return Err(Error::invalid("cross-entropy loss needs a sigmoid link"))
            }
        };
        Ok(vec![delta])
    }

    /// Exact parameter gradients of `loss(output, y_true)`.
    pub fn backward(&self, cache: &ForwardCache, y_true: f64, loss: Loss) -> Result<GradientSet> {
        if cache.input_dim != self.input_dim || cache.layers.len() != self.layers.len() {
            return Err(Error::invalid("forward cache does not belong to this model"));
        }
        let mut upstream = self.output_delta(cache, y_true, loss)?;
        let mut grads = vec![LayerGrad::None; self.layers.len()];
        for (i, (layer, lc)) in self.layers.iter().zip(&cache.layers).enumerate().rev() {
            match (layer, lc) {
                (Layer::Trop(t), LayerCache::Trop(c)) => {
                    let (dw, dx) = t.backward(c, &upstream)?;
                    grads[i] = LayerGrad::Trop { weights: dw };
                    upstream = dx;
                }
                (Layer::Affine(a), LayerCache::Affine { input }) => {
                    let (dw, db, dz) = a.backward(input, &upstream)?;
                    grads[i] = LayerGrad::Affine { weights: dw, bias: db };
                    upstream = dz;
                }
                (Layer::Activation(act), LayerCache::Activation { output, .. }) => {
                    if output.len() != upstream.len() {
                        return Err(Error::invalid("activation cache does not match"));
                    }
                    for (g, &o) in upstream.iter_mut().zip(output) {
                        *g *= act.derivative_from_output(o);
                    }
                }
                _ => return Err(Error::invalid("forward cache does not belong to this model")),
            }
        }
        Ok(GradientSet { layers: grads })
    }

    /// In-place `w <- w - lr * g` followed by constraint projection.
    /// Nothing is modified if the gradients are non-finite or mis-shaped.
    pub fn apply_sgd(&mut self, grads: &GradientSet, lr: f64) -> Result<()> {
        if !(lr > 0.0 && lr.is_finite()) {
            return Err(Error::invalid(format!("learning rate must be positive, got {lr}")));
        }
        if !grads.is_finite() {
            return Err(Error::NonFinite("gradient"));
        }
        if grads.layers.len() != self.layers.len() {
            return Err(Error::invalid("gradient set does not match model"));
        }
        for (layer, g) in self.layers.iter().zip(&grads.layers) {
            let ok = match (layer, g) {
                (Layer::Trop(t), LayerGrad::Trop { weights }) => t.weights().shape() == weights.shape(),
                (Layer::Affine(a), LayerGrad::Affine { weights, bias }) => {
                    a.weights().shape() == weights.shape() && a.bias().len() == bias.len()
                }
                (Layer::Activation(_), LayerGrad::None) => true,
                _ => false,
            };
            if !ok {
                return Err(Error::invalid("gradient set does not match model"));
            }
        }
        for (layer, g) in self.layers.iter_mut().zip(&grads.layers) {
            match (layer, g) {
                (Layer::Trop(t), LayerGrad::Trop { weights }) => t.weights_mut().axpy(-lr, weights),
                (Layer::Affine(a), LayerGrad::Affine { weights, bias }) => {
                    let (w, b) = a.params_mut();
                    w.axpy(-lr, weights);
                    for (x, y) in b.iter_mut().zip(bias) {
                        *x -= lr * y;
                    }
                }
                _ => {}
            }
        }
        self.project_constraint();
        Ok(())
    }

    /// Enforces `v0 * v1 <= 0` on the output weights by zeroing the
    /// smaller-magnitude one.
    pub(crate) fn project_constraint(&mut self) {
        if self.constraint != Constraint::TropLogistic {
            return;
        }
        if let Some(Layer::Affine(a)) = self.layers.get_mut(1) {
            let (w, _) = a.params_mut();
            let v = w.as_mut_slice();
            if v[0] * v[1] > 0.0 {
                if v[0].abs() <= v[1].abs() {
                    v[0] = 0.0;
                } else {
                    v[1] = 0.0;
                }
            }
        }
    }

    /// All parameters flattened: per layer, weights row-major then bias.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for l in &self.layers {
            match l {
                Layer::Trop(t) => out.extend_from_slice(t.weights().as_slice()),
                Layer::Affine(a) => {
                    out.extend_from_slice(a.weights().as_slice());
                    out.extend_from_slice(a.bias());
                }
                Layer::Activation(_) => {}
            }
        }
        out
    }

    /// Inverse of [`Model::params`].
    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        let total = self.params().len();
        if params.len() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: params.len(),
            });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("parameters"));
        }
        let mut rest = params;
        for l in &mut self.layers {
            match l {
                Layer::Trop(t) => {
                    let w = t.weights_mut().as_mut_slice();
                    let (head, tail) = rest.split_at(w.len());
                    w.copy_from_slice(head);
                    rest = tail;
                }
                Layer::Affine(a) => {
                    let (w, b) = a.params_mut();
                    let w = w.as_mut_slice();
                    let (head, tail) = rest.split_at(w.len());
                    w.copy_from_slice(head);
                    let (head, tail) = tail.split_at(b.len());
                    b.copy_from_slice(head);
                    rest = tail;
                }
                Layer::Activation(_) => {}
            }
        }
        Ok(())
    }
}

/// Runs the model on a torus point.
pub fn forward_pass(model: &Model, x: &TropicalPoint) -> Result<(Vec<f64>, ForwardCache)> {
    model.forward(x.coords())
}

pub fn backward_pass(model: &Model, cache: &ForwardCache, y_true: f64, loss: Loss) -> Result<GradientSet> {
    model.backward(cache, y_true, loss)
}

/// Returns an updated copy of `model`.
pub fn sgd_step(model: &Model, grads: &GradientSet, lr: f64) -> Result<Model> {
    let mut next = model.clone();
    next.apply_sgd(grads, lr)?;
    Ok(next)
}
