//! Tropical neural networks: layers, exact backpropagation, SGD training and
//! model files.

pub mod arch;
pub mod io;
pub mod layer;
pub mod loss;
mod matrix;
pub mod model;
pub mod train;

pub use arch::{build_from_spec, build_model, ArchSpec, ArchToken, BuildOptions};
pub use layer::{
    affine_forward, sigmoid, trop_embed_backward, trop_embed_forward, Activation, AffineLayer, TropCache,
    TropEmbedLayer, TropVariant,
};
pub use loss::{loss_eval, Loss};
pub use matrix::Matrix;
pub use model::{
    backward_pass, forward_pass, sgd_step, Constraint, ForwardCache, GradientSet, InputKind, Layer, LayerCache,
    LayerGrad, Link, Model,
};
pub use train::{predict_proba, train, TrainConfig};
