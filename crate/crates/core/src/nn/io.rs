//! JSON model files.
//!
//! ```json
//! {"version": 1, "input_dim": 3,
//!  "layers": [{"kind": "trop", "shape": [2, 3], "weights": [...], "variant": "max-minus-min"},
//!             {"kind": "dense", "shape": [1, 2], "weights": [...], "bias": [...]}],
//!  "link": "sigmoid", "constraint": "none"}
//! ```
//! Weights are row-major. Numbers are written in shortest round-trip form, so
//! reading a file back yields bit-identical parameters.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::layer::{Activation, AffineLayer, TropEmbedLayer, TropVariant};
use super::model::{Constraint, Layer, Link, Model};
use super::Matrix;
use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    version: u32,
    input_dim: usize,
    layers: Vec<LayerRecord>,
    link: Link,
    constraint: Constraint,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerRecord {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shape: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bias: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    variant: Option<String>,
}

impl LayerRecord {
    fn bare(kind: &str) -> Self {
        LayerRecord {
            kind: kind.to_string(),
            shape: None,
            weights: None,
            bias: None,
            variant: None,
        }
    }

    fn matrix(&self) -> Result<Matrix> {
        let [rows, cols] = self
            .shape
            .ok_or_else(|| Error::Model(format!("`{}` layer without shape", self.kind)))?;
        let w = self
            .weights
            .clone()
            .ok_or_else(|| Error::Model(format!("`{}` layer without weights", self.kind)))?;
        Matrix::from_vec(rows, cols, w).map_err(|e| Error::Model(format!("`{}` layer: {e}", self.kind)))
    }
}

impl Model {
    pub fn to_json(&self) -> Result<String> {
        let layers = self
            .layers()
            .iter()
            .map(|l| match l {
                Layer::Trop(t) => LayerRecord {
                    shape: Some([t.units(), t.input_dim()]),
                    weights: Some(t.weights().as_slice().to_vec()),
                    variant: Some(t.variant().name()),
                    ..LayerRecord::bare("trop")
                },
                Layer::Affine(a) => LayerRecord {
                    shape: Some([a.output_dim(), a.input_dim()]),
                    weights: Some(a.weights().as_slice().to_vec()),
                    bias: Some(a.bias().to_vec()),
                    ..LayerRecord::bare("dense")
                },
                Layer::Activation(Activation::Relu) => LayerRecord::bare("relu"),
                Layer::Activation(Activation::Sigmoid) => LayerRecord::bare("sigmoid"),
            })
            .collect();
        let file = ModelFile {
            version: MODEL_FORMAT_VERSION,
            input_dim: self.input_dim(),
            layers,
            link: self.link(),
            constraint: self.constraint(),
        };
        let mut s = serde_json::to_string_pretty(&file)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.version != MODEL_FORMAT_VERSION {
            return Err(Error::Model(format!("unsupported model version {}", file.version)));
        }
        let mut layers = Vec::with_capacity(file.layers.len());
        for rec in &file.layers {
            let layer = match rec.kind.as_str() {
                "trop" => {
                    let variant = match &rec.variant {
                        Some(v) => TropVariant::parse(v)?,
                        None => TropVariant::MaxMinusMin,
                    };
                    Layer::Trop(TropEmbedLayer::new(rec.matrix()?, variant)?)
                }
                "dense" => {
                    let w = rec.matrix()?;
                    let bias = rec.bias.clone().unwrap_or_else(|| vec![0.0; w.rows()]);
                    Layer::Affine(AffineLayer::new(w, bias)?)
                }
                "relu" => Layer::Activation(Activation::Relu),
                "sigmoid" => Layer::Activation(Activation::Sigmoid),
                other => return Err(Error::Model(format!("unknown layer kind `{other}`"))),
            };
            layers.push(layer);
        }
        Model::new(file.input_dim, layers, file.link, file.constraint)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Model::from_json(&text)
    }
}
