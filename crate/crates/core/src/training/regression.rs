//! Full-batch 1D function regression, used to watch which frequencies a
//! network picks up first.

use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::networks::{JetSpec, Network};
use crate::numerics::dft_real;

use super::adam::{adam_step, OptimizerState};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RegressionOptimizer {
    Adam { learning_rate: f64 },
    GradientDescent { learning_rate: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegressionLoss {
    /// `(1/N) Σ (f − y)²`
    MeanSquared,
    /// `½ Σ (f − y)²`
    HalfSum,
}

/// Loss, parameter gradient and predictions at the training inputs.
pub fn regression_loss_grad(
    net: &Network,
    theta: &[f64],
    x: &[f64],
    y: &[f64],
    loss: RegressionLoss,
) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    if net.input_dim() != 1 || net.output_dim() != 1 {
        return Err(Error::Shape("regression needs a scalar network of one input".into()));
    }
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::Shape(format!("{} inputs, {} targets", x.len(), y.len())));
    }
    let (jet, cache) = net.forward_jet(theta, x, &JetSpec::values(1))?;
    let pred = jet.value().to_vec();
    let scale = match loss {
        RegressionLoss::MeanSquared => 1.0 / x.len() as f64,
        RegressionLoss::HalfSum => 0.5,
    };
    let mut value = 0.0;
    let mut g = jet.zeros_like();
    for (i, (p, t)) in pred.iter().zip(y).enumerate() {
        let r = p - t;
        value += scale * r * r;
        g[i] = 2.0 * scale * r;
    }
    let mut grad = vec![0.0; theta.len()];
    net.backward(theta, &cache, &g, &mut grad)?;
    if !value.is_finite() {
        return Err(Error::NonFiniteLoss {
            term: "regression".into(),
        });
    }
    Ok((value, grad, pred))
}

#[derive(Clone, Debug)]
pub struct RegressionOutcome {
    pub theta: Vec<f64>,
    /// Loss before each epoch's update.
    pub losses: Vec<f64>,
    /// Predictions at the training inputs after the last epoch.
    pub predictions: Vec<f64>,
}

/// Runs `epochs` full-batch updates. `observer(epoch, θ, predictions)` sees
/// the state before each update and once more after the last one
/// (`epoch == epochs`); returning `false` stops early.
#[allow(clippy::too_many_arguments)]
pub fn fit_regression<F>(
    net: &Network,
    theta0: &[f64],
    x: &[f64],
    y: &[f64],
    epochs: usize,
    optimizer: RegressionOptimizer,
    loss: RegressionLoss,
    mut observer: F,
) -> Result<RegressionOutcome>
where
    F: FnMut(usize, &[f64], &[f64]) -> bool,
{
    let mut theta = theta0.to_vec();
    let mut state = OptimizerState::new(theta.len());
    let mut losses = Vec::with_capacity(epochs);
    for epoch in 0..epochs {
        let (value, grad, pred) = regression_loss_grad(net, &theta, x, y, loss)?;
        losses.push(value);
        if !observer(epoch, &theta, &pred) {
            return Ok(RegressionOutcome {
                theta,
                losses,
                predictions: pred,
            });
        }
        match optimizer {
            RegressionOptimizer::Adam { learning_rate } => {
                adam_step(&mut state, &mut theta, &grad, learning_rate)?
            }
            RegressionOptimizer::GradientDescent { learning_rate } => {
                for (t, g) in theta.iter_mut().zip(&grad) {
                    *t -= learning_rate * g;
                }
            }
        }
    }
    let predictions = net.predict(&theta, x)?;
    observer(epochs, &theta, &predictions);
    Ok(RegressionOutcome {
        theta,
        losses,
        predictions,
    })
}

/// Relative error of `pred` against `target` restricted to DFT bins in each
/// band: `‖P_k − T_k‖ / ‖T_k‖` over `k ∈ band`.
pub fn band_errors(pred: &[f64], target: &[f64], bands: &[RangeInclusive<usize>]) -> Result<Vec<f64>> {
    if pred.len() != target.len() {
        return Err(Error::Shape(format!("{} predictions, {} targets", pred.len(), target.len())));
    }
    let diff: Vec<f64> = pred.iter().zip(target).map(|(p, t)| p - t).collect();
    let d = dft_real(&diff)?;
    let t = dft_real(target)?;
    bands
        .iter()
        .map(|band| {
            if *band.end() >= t.len() {
                return Err(Error::Index {
                    index: *band.end(),
                    len: t.len(),
                });
            }
            let energy = |c: &[(f64, f64)]| -> f64 {
                band.clone().map(|k| c[k].0 * c[k].0 + c[k].1 * c[k].1).sum()
            };
            let te = energy(&t);
            if te == 0.0 {
                return Err(Error::ZeroNorm);
            }
            Ok((energy(&d) / te).sqrt())
        })
        .collect()
}
