use super::spec::{Activation, Loss, BCE_EPSILON};
use crate::error::{Error, Result};

pub(crate) fn check_targets(loss: Loss, targets: &[f64]) -> Result<()> {
    if let Some(t) = targets.iter().find(|t| !t.is_finite()) {
        return Err(Error::Data(format!("non-finite target {t}")));
    }
    if loss == Loss::BinaryCrossEntropy {
        if let Some(t) = targets.iter().find(|&&t| t != 0.0 && t != 1.0) {
            return Err(Error::Data(format!(
                "binary cross-entropy targets must be 0 or 1, got {t}"
            )));
        }
    }
    Ok(())
}

/// Data term of the loss for a batch of `batch` rows.
pub fn data_loss(loss: Loss, pred: &[f64], target: &[f64], batch: usize) -> f64 {
    match loss {
        Loss::BinaryCrossEntropy => {
            let sum: f64 = pred
                .iter()
                .zip(target)
                .map(|(&y, &t)| {
                    let y = y.clamp(BCE_EPSILON, 1.0 - BCE_EPSILON);
                    -(t * y.ln() + (1.0 - t) * (1.0 - y).ln())
                })
                .sum();
            sum / batch as f64
        }
        Loss::MeanSquaredError => {
            let sum: f64 = pred.iter().zip(target).map(|(y, t)| (y - t) * (y - t)).sum();
            sum / pred.len().max(1) as f64
        }
    }
}

/// Gradient of [`data_loss`] with respect to the network output.
///
/// For a sigmoid output under cross-entropy the gradient is returned with
/// respect to the pre-activation instead, `(y - t) / batch`, which stays
/// informative when the sigmoid saturates. The flag reports which one it is.
pub(crate) fn output_grad(
    loss: Loss,
    last_activation: Option<Activation>,
    pred: &[f64],
    target: &[f64],
    batch: usize,
) -> (Vec<f64>, bool) {
    let b = batch as f64;
    match loss {
        Loss::BinaryCrossEntropy if last_activation == Some(Activation::Sigmoid) => {
            (pred.iter().zip(target).map(|(y, t)| (y - t) / b).collect(), true)
        }
        Loss::BinaryCrossEntropy => (
            pred.iter()
                .zip(target)
                .map(|(&y, &t)| {
                    if y <= BCE_EPSILON || y >= 1.0 - BCE_EPSILON {
                        0.0
                    } else {
                        (-t / y + (1.0 - t) / (1.0 - y)) / b
                    }
                })
                .collect(),
            false,
        ),
        Loss::MeanSquaredError => {
            let n = pred.len().max(1) as f64;
            (pred.iter().zip(target).map(|(y, t)| 2.0 * (y - t) / n).collect(), false)
        }
    }
}
