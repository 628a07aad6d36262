#![allow(dead_code)]

use rand::Rng as _;
use rand_distr::StandardNormal;
use tropnn_core::nn::{
    build_model, loss_eval, BuildOptions, InputKind, Loss, Matrix, Model, TropEmbedLayer, TropVariant,
};
use tropnn_core::rng::{seeded, Rng};

pub fn normal(rng: &mut Rng, sd: f64) -> f64 {
    sd * rng.sample::<f64, _>(StandardNormal)
}

pub fn normal_vec(rng: &mut Rng, n: usize, sd: f64) -> Vec<f64> {
    (0..n).map(|_| normal(rng, sd)).collect()
}

/// One tropical layer (1..=8 units) followed by one or two dense layers on
/// `d in 2..=10` inputs, with every parameter redrawn from N(0, 1).
pub fn random_model(rng: &mut Rng) -> Model {
    let d = rng.random_range(2..=10);
    let units = rng.random_range(1..=8);
    let spec = if rng.random_bool(0.5) {
        format!("trop:{units},dense:1,sigmoid")
    } else {
        format!("trop:{units},dense:{},relu,dense:1,sigmoid", rng.random_range(1..=6))
    };
    let mut model = build_model(&spec, d, &BuildOptions::seeded(rng.random())).unwrap();
    let n = model.params().len();
    model.set_params(&normal_vec(rng, n, 1.0)).unwrap();
    model
}

pub fn model_loss(model: &Model, x: &[f64], y_true: f64, loss: Loss) -> f64 {
    let y = model.predict(x).unwrap()[0];
    loss_eval(y, y_true, loss).unwrap()
}

/// Relative error `|a - n| / max(|a|, |n|, 1e-8)` (vector 2-norms) between
/// the analytic gradient and central differences with step `h`. The floor
/// keeps saturated outputs, whose gradients are pure round-off, from
/// dominating.
pub fn gradient_error(model: &Model, x: &[f64], y_true: f64, loss: Loss, h: f64) -> f64 {
    let (_, cache) = model.forward(x).unwrap();
    let analytic = model.backward(&cache, y_true, loss).unwrap().flatten();
    let params = model.params();
    let mut probe = model.clone();
    let mut numeric = Vec::with_capacity(params.len());
    for k in 0..params.len() {
        let mut p = params.clone();
        p[k] = params[k] + h;
        probe.set_params(&p).unwrap();
        let up = model_loss(&probe, x, y_true, loss);
        p[k] = params[k] - h;
        probe.set_params(&p).unwrap();
        let down = model_loss(&probe, x, y_true, loss);
        numeric.push((up - down) / (2.0 * h));
    }
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let diff: Vec<f64> = analytic.iter().zip(&numeric).map(|(a, b)| a - b).collect();
    norm(&diff) / norm(&analytic).max(norm(&numeric)).max(1e-8)
}

/// Input for `model` whose tropical ties and ReLU kinks are all at least
/// `margin` away and whose output is not saturated (`|pre-link| < 6`).
pub fn input_away_from_kinks(model: &Model, rng: &mut Rng, margin: f64) -> Option<Vec<f64>> {
    for _ in 0..1000 {
        let x = normal_vec(rng, model.input_dim(), 2.0);
        let (_, cache) = model.forward(&x).unwrap();
        if cache.min_margin() > margin && cache.pre_link[0].abs() < 6.0 {
            return Some(x);
        }
    }
    None
}

/// Largest `|f(x + c 1) - f(x)|` over `trials` random models, inputs and shifts.
pub fn worst_shift_gap(trials: usize, max_shift: f64, seed: u64) -> f64 {
    let mut rng = seeded(seed, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let model = random_model(&mut rng);
        let x = normal_vec(&mut rng, model.input_dim(), 3.0);
        let c = rng.random_range(-max_shift..=max_shift);
        let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
        let a = model.predict(&x).unwrap()[0];
        let b = model.predict(&shifted).unwrap()[0];
        worst = worst.max((a - b).abs());
    }
    worst
}

/// ReLU classifier with zero biases whose first-layer rows have positive sums.
pub fn positive_row_sum_relu(d: usize, hidden: usize, seed: u64) -> Model {
    let opts = BuildOptions {
        input: InputKind::Euclidean,
        ..BuildOptions::seeded(seed)
    };
    let mut model = build_model(&format!("dense:{hidden},relu,dense:1,sigmoid"), d, &opts).unwrap();
    let mut rng = seeded(seed, 0);
    let mut p = model.params();
    // first layer weights lead the parameter vector
    for j in 0..hidden {
        let row = &mut p[j * d..(j + 1) * d];
        for w in row.iter_mut() {
            *w = rng.random_range(0.01..1.0);
        }
    }
    for w in &mut p[hidden * d..hidden * d + hidden] {
        *w = 0.0;
    }
    model.set_params(&p).unwrap();
    model
}

/// Tropical layer with `d - 1` units, unit `j` weighting `+2M` on coordinate
/// `j` and `-2M` on the last coordinate.
pub fn uat_layer(d: usize, big_m: f64) -> TropEmbedLayer {
    let mut w = Matrix::zeros(d - 1, d);
    for j in 0..d - 1 {
        w[(j, j)] = 2.0 * big_m;
        w[(j, d - 1)] = -2.0 * big_m;
    }
    TropEmbedLayer::new(w, TropVariant::MaxMinusMin).unwrap()
}

/// Largest deviation of the UAT layer output from `x_j - x_d + 4M`.
pub fn worst_uat_error(seed: u64, per_dim: usize) -> f64 {
    let mut rng = seeded(seed, 0);
    let mut worst: f64 = 0.0;
    for d in 3..=20 {
        for _ in 0..per_dim {
            let big_m = rng.random_range(0.5..100.0);
            let layer = uat_layer(d, big_m);
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-big_m..=big_m)).collect();
            let (z, _) = layer.forward(&x).unwrap();
            for j in 0..d - 1 {
                worst = worst.max((z[j] - (x[j] - x[d - 1] + 4.0 * big_m)).abs());
            }
        }
    }
    worst
}

/// Single tropical neuron with zero weights feeding a unit-weight linear
/// output, identity link.
pub fn worked_example_model() -> Model {
    use tropnn_core::nn::{AffineLayer, Constraint, Layer, Link};
    let trop = TropEmbedLayer::new(Matrix::zeros(1, 3), TropVariant::MaxMinusMin).unwrap();
    let out = AffineLayer::new(Matrix::identity(1), vec![0.0]).unwrap();
    Model::new(3, vec![Layer::Trop(trop), Layer::Affine(out)], Link::Identity, Constraint::None).unwrap()
}

/// `(dW1, dw2)` for the worked example at `x = (1, 2, 3)`, `y_true = 0`.
pub fn worked_example_grads() -> (Vec<f64>, Vec<f64>) {
    use tropnn_core::nn::LayerGrad;
    let model = worked_example_model();
    let (_, cache) = model.forward(&[1.0, 2.0, 3.0]).unwrap();
    let g = model.backward(&cache, 0.0, Loss::Squared).unwrap();
    let dw1 = match &g.layers[0] {
        LayerGrad::Trop { weights } => weights.as_slice().to_vec(),
        other => panic!("unexpected {other:?}"),
    };
    let dw2 = match &g.layers[1] {
        LayerGrad::Affine { weights, .. } => weights.as_slice().to_vec(),
        other => panic!("unexpected {other:?}"),
    };
    (dw1, dw2)
}
