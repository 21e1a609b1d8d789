//! Losses and their function-space derivatives.
//!
//! Conventions: the per-point MSE loss is (f - y)^2 summed over output
//! components, the batch loss is the mean over points, and the stored
//! per-point gradients are derivatives of the *batch* loss w.r.t. the
//! point's outputs (so they carry the 1/N factor). Cross-entropy takes
//! logits and a class index.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::Network;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Mse,
    CrossEntropy,
}

/// A supervised target: a real vector (regression / one-hot) or a class index.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Vector(Vec<f64>),
    Class(usize),
}

/// Batch loss plus per-point function-space derivatives d L / d f_i.
#[derive(Debug, Clone)]
pub struct LossGradients {
    pub batch_loss: f64,
    pub per_point: Vec<Vec<f64>>,
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / sum).collect()
}

/// Loss and gradients from precomputed outputs (one vector per point).
pub fn loss_from_outputs(
    outputs: &[Vec<f64>],
    targets: &[Target],
    kind: LossKind,
) -> Result<LossGradients> {
    if outputs.len() != targets.len() {
        return Err(Error::Dimension(format!(
            "{} outputs but {} targets",
            outputs.len(),
            targets.len()
        )));
    }
    if outputs.is_empty() {
        return Err(Error::Config("empty batch".into()));
    }
    let n = outputs.len() as f64;
    let mut total = 0.0;
    let mut per_point = Vec::with_capacity(outputs.len());
    for (f, t) in outputs.iter().zip(targets) {
        match (kind, t) {
            (LossKind::Mse, Target::Vector(y)) => {
                if y.len() != f.len() {
                    return Err(Error::Dimension(format!(
                        "target length {} does not match output length {}",
                        y.len(),
                        f.len()
                    )));
                }
                let mut loss_i = 0.0;
                let mut g = Vec::with_capacity(f.len());
                for (fo, yo) in f.iter().zip(y) {
                    let d = fo - yo;
                    loss_i += d * d;
                    g.push(2.0 * d / n);
                }
                total += loss_i;
                per_point.push(g);
            }
            (LossKind::CrossEntropy, Target::Class(c)) => {
                if *c >= f.len() {
                    return Err(Error::Dimension(format!(
                        "class index {} out of range for {} logits",
                        c,
                        f.len()
                    )));
                }
                let p = softmax(f);
                total += -p[*c].max(1e-300).ln();
                let mut g: Vec<f64> = p.iter().map(|&pi| pi / n).collect();
                g[*c] -= 1.0 / n;
                per_point.push(g);
            }
            (LossKind::Mse, Target::Class(_)) => {
                return Err(Error::Dimension(
                    "mse loss requires vector targets, got class index".into(),
                ))
            }
            (LossKind::CrossEntropy, Target::Vector(_)) => {
                return Err(Error::Dimension(
                    "cross_entropy loss requires class-index targets".into(),
                ))
            }
        }
    }
    Ok(LossGradients {
        batch_loss: total / n,
        per_point,
    })
}

/// Evaluate the network on every input and compute batch loss and
/// per-point function-space derivatives.
pub fn loss_and_gradients(
    network: &Network,
    inputs: &[&[f64]],
    targets: &[Target],
    kind: LossKind,
) -> Result<LossGradients> {
    let outputs = network.batch_forward(inputs)?;
    loss_from_outputs(&outputs, targets, kind)
}
