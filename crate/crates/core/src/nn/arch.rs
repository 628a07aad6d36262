//! Architecture strings: comma-separated `trop:<N>`, `dense:<N>`, `relu`,
//! `sigmoid`, or the preset `trop-logistic`. A trailing `sigmoid` becomes the
//! output link.

use super::layer::{Activation, AffineLayer, TropEmbedLayer, TropVariant};
use super::model::{Constraint, InputKind, Layer, Link, Model};
use crate::error::{Error, Result};
use crate::init::{init_matrix, InitPolicy};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArchToken {
    Trop(usize),
    Dense(usize),
    Relu,
    Sigmoid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchSpec {
    pub tokens: Vec<ArchToken>,
    pub link: Link,
    pub constraint: Constraint,
}

impl ArchSpec {
    pub fn parse(spec: &str) -> Result<Self> {
        let err = |message: String| Error::Architecture {
            spec: spec.to_string(),
            message,
        };
        let trimmed = spec.trim();
        if trimmed == "trop-logistic" {
            return Ok(ArchSpec {
                tokens: vec![ArchToken::Trop(2), ArchToken::Dense(1)],
                link: Link::Sigmoid,
                constraint: Constraint::TropLogistic,
            });
        }
        if trimmed.is_empty() {
            return Err(err("empty".into()));
        }
        let mut tokens = Vec::new();
        for raw in trimmed.split(',') {
            let tok = raw.trim();
            let sized = |prefix: &str| -> Option<Result<usize>> {
                tok.strip_prefix(prefix).map(|n| match n.parse::<usize>() {
                    Ok(0) => Err(err(format!("`{tok}` needs at least one unit"))),
                    Ok(n) => Ok(n),
                    Err(_) => Err(err(format!("`{tok}` has an invalid unit count"))),
                })
            };
            let parsed = if let Some(n) = sized("trop:") {
                ArchToken::Trop(n?)
            } else if let Some(n) = sized("dense:") {
                ArchToken::Dense(n?)
            } else if tok == "relu" {
                ArchToken::Relu
            } else if tok == "sigmoid" {
                ArchToken::Sigmoid
            } else if tok == "trop-logistic" {
                return Err(err("`trop-logistic` is a preset and must stand alone".into()));
            } else {
                return Err(err(format!("unknown token `{tok}`")));
            };
            tokens.push(parsed);
        }
        let link = if tokens.last() == Some(&ArchToken::Sigmoid) {
            tokens.pop();
            Link::Sigmoid
        } else {
            Link::Identity
        };
        if !tokens
            .iter()
            .any(|t| matches!(t, ArchToken::Trop(_) | ArchToken::Dense(_)))
        {
            return Err(err("no trop or dense layer".into()));
        }
        Ok(ArchSpec {
            tokens,
            link,
            constraint: Constraint::None,
        })
    }

    pub fn first_is_trop(&self) -> bool {
        matches!(self.tokens.first(), Some(ArchToken::Trop(_)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub input: InputKind,
    /// Scale of tropical embedding weights. Dense weights always use the
    /// fixed default scale and zero bias.
    pub init: InitPolicy,
    pub seed: u64,
}

impl BuildOptions {
    pub fn seeded(seed: u64) -> Self {
        BuildOptions {
            input: InputKind::Tropical,
            init: InitPolicy::Default,
            seed,
        }
    }
}

/// Builds a freshly initialized model for inputs of dimension `input_dim`.
pub fn build_model(spec: &str, input_dim: usize, opts: &BuildOptions) -> Result<Model> {
    build_from_spec(&ArchSpec::parse(spec)?, input_dim, opts)
}

pub fn build_from_spec(arch: &ArchSpec, input_dim: usize, opts: &BuildOptions) -> Result<Model> {
    if input_dim < 2 {
        return Err(Error::invalid(format!("input dimension must be at least 2, got {input_dim}")));
    }
    let mut rng = rng::seeded(opts.seed, rng::stream::INIT);
    let mut dim = input_dim;
    let mut layers = Vec::with_capacity(arch.tokens.len());
    for tok in &arch.tokens {
        match *tok {
            ArchToken::Trop(n) => {
                let w = init_matrix(n, dim, opts.init, &mut rng)?;
                layers.push(Layer::Trop(TropEmbedLayer::new(w, TropVariant::MaxMinusMin)?));
                dim = n;
            }
            ArchToken::Dense(n) => {
                let w = init_matrix(n, dim, InitPolicy::Default, &mut rng)?;
                layers.push(Layer::Affine(AffineLayer::new(w, vec![0.0; n])?));
                dim = n;
            }
            ArchToken::Relu => layers.push(Layer::Activation(Activation::Relu)),
            ArchToken::Sigmoid => layers.push(Layer::Activation(Activation::Sigmoid)),
        }
    }
    let mut model = Model::with_input_kind(input_dim, layers, arch.link, arch.constraint, opts.input)?;
    model.project_constraint();
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tokens() {
        let a = ArchSpec::parse("trop:16, dense:1 ,sigmoid").unwrap();
        assert_eq!(a.tokens, vec![ArchToken::Trop(16), ArchToken::Dense(1)]);
        assert_eq!(a.link, Link::Sigmoid);
        let b = ArchSpec::parse("dense:4,relu,dense:1").unwrap();
        assert_eq!(b.link, Link::Identity);
        assert_eq!(b.tokens.len(), 3);
        let c = ArchSpec::parse("trop:3,sigmoid,dense:1,sigmoid").unwrap();
        assert_eq!(c.tokens[1], ArchToken::Sigmoid);
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "trop", "trop:0", "trop:x", "conv:3", "relu", "sigmoid", "trop:2,trop-logistic", "dense:-1"] {
            assert!(ArchSpec::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn builds_tropical_classifier() {
        let m = build_model("trop:16,dense:1,sigmoid", 2, &BuildOptions::seeded(0)).unwrap();
        assert_eq!(m.layers().len(), 2);
        assert_eq!(m.link(), Link::Sigmoid);
        match (&m.layers()[0], &m.layers()[1]) {
            (Layer::Trop(t), Layer::Affine(a)) => {
                assert_eq!(t.weights().shape(), (16, 2));
                assert_eq!(a.weights().shape(), (1, 16));
                assert!(a.bias().iter().all(|&b| b == 0.0));
            }
            _ => panic!("unexpected layers"),
        }
    }

    #[test]
    fn trop_logistic_preset() {
        let m = build_model("trop-logistic", 3, &BuildOptions::seeded(4)).unwrap();
        assert_eq!(m.constraint(), Constraint::TropLogistic);
        assert_eq!(m.link(), Link::Sigmoid);
        let Layer::Affine(a) = &m.layers()[1] else { panic!() };
        assert_eq!(a.weights().shape(), (1, 2));
        let v = a.weights().as_slice();
        assert!(v[0] * v[1] <= 0.0);
        let Layer::Trop(t) = &m.layers()[0] else { panic!() };
        assert_eq!(t.weights().shape(), (2, 3));
    }

    #[test]
    fn tropical_input_requires_trop_first() {
        assert!(build_model("dense:4", 3, &BuildOptions::seeded(0)).is_err());
        let opts = BuildOptions {
            input: InputKind::Euclidean,
            ..BuildOptions::seeded(0)
        };
        assert!(build_model("dense:4", 3, &opts).is_ok());
    }

    #[test]
    fn input_dim_checked() {
        assert!(build_model("trop:4,dense:1", 1, &BuildOptions::seeded(0)).is_err());
    }

    #[test]
    fn same_seed_same_weights() {
        let a = build_model("trop:8,dense:4,relu,dense:1,sigmoid", 5, &BuildOptions::seeded(7)).unwrap();
        let b = build_model("trop:8,dense:4,relu,dense:1,sigmoid", 5, &BuildOptions::seeded(7)).unwrap();
        let c = build_model("trop:8,dense:4,relu,dense:1,sigmoid", 5, &BuildOptions::seeded(8)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn unit_variance_needs_wide_input() {
        let opts = BuildOptions {
            init: InitPolicy::UnitVariance,
            ..BuildOptions::seeded(0)
        };
        assert!(build_model("trop:4,dense:1", 5, &opts).is_err());
        assert!(build_model("trop:4,dense:1", 45, &opts).is_ok());
    }
}
