use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Clamp applied to probabilities inside the training loop only.
pub const PROB_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Loss {
    /// `(y - t)^2 / 2`
    Squared,
    /// `-[t ln y + (1 - t) ln(1 - y)]`
    #[default]
    #[serde(rename = "bce")]
    BinaryCrossEntropy,
}

impl std::str::FromStr for Loss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squared" => Ok(Loss::Squared),
            "bce" => Ok(Loss::BinaryCrossEntropy),
            other => Err(Error::invalid(format!("unknown loss `{other}`"))),
        }
    }
}

pub fn loss_eval(y: f64, y_true: f64, kind: Loss) -> Result<f64> {
    if !y.is_finite() || !y_true.is_finite() {
        return Err(Error::NonFinite("loss input"));
    }
    match kind {
        Loss::Squared => Ok(0.5 * (y - y_true).powi(2)),
        Loss::BinaryCrossEntropy => {
            if !(y > 0.0 && y < 1.0) {
                return Err(Error::invalid(format!(
                    "cross-entropy needs a probability in (0, 1), got {y}"
                )));
            }
            if y_true != 0.0 && y_true != 1.0 {
                return Err(Error::invalid(format!(
                    "cross-entropy needs a 0/1 target, got {y_true}"
                )));
            }
            Ok(bce(y, y_true))
        }
    }
}

fn bce(p: f64, t: f64) -> f64 {
    -(t * p.ln() + (1.0 - t) * (1.0 - p).ln())
}

/// Loss value used while training: probabilities are clamped away from 0 and 1.
pub(crate) fn training_loss(y: f64, y_true: f64, kind: Loss) -> f64 {
    match kind {
        Loss::Squared => 0.5 * (y - y_true).powi(2),
        Loss::BinaryCrossEntropy => bce(y.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP), y_true),
    }
}
