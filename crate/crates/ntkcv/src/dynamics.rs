//! Function-space dynamics diagnostics: predicted representation
//! velocity, lambda-scaled projection factors, the kinetic-energy
//! diagnostic, and an empirical consistency check against an actual
//! discrete training step.
//!
//! Sign convention: the descent (minus) sign is used throughout, so the
//! predicted velocity matches actual SGD steps.

use crate::error::{Error, Result};
use crate::nn::loss::{loss_and_gradients, LossKind, Target};
use crate::nn::optim::{Optimizer, OptimizerConfig};
use crate::nn::Network;
use crate::ntk::{compute_ntk, KernelMatrix};
use crate::spectral::Spectrum;

/// Predicted f-dot per data point (one entry per output component),
/// under the descent sign convention.
#[derive(Debug, Clone)]
pub struct VelocityVector {
    pub per_point: Vec<Vec<f64>>,
    /// true: velocities carry the descent (minus) sign.
    pub descent_sign: bool,
}

/// Per-mode update magnitudes: p~_n = lambda_n * <q_n, dL/df>.
#[derive(Debug, Clone)]
pub struct ProjectionFactors {
    pub factors: Vec<f64>,
}

/// Per-point kinetic energy E^k_i = |f-dot(x_i)|^2 / (2m).
#[derive(Debug, Clone)]
pub struct KineticEnergyReport {
    pub per_point: Vec<f64>,
    pub mass: f64,
}

/// f-dot_p = -sum_i Theta_pi * dL/df_i, applied per output component.
///
/// The output-summed kernel drops cross-output gradient correlations,
/// so this is first-order exact only for a single output head; with
/// more outputs it is the same diagonal approximation the collective
/// variables are built on.
pub fn predicted_velocity(
    ntk: &KernelMatrix,
    per_point_grads: &[Vec<f64>],
) -> Result<VelocityVector> {
    if per_point_grads.len() != ntk.n {
        return Err(Error::Dimension(format!(
            "{} loss gradients for a {}-point kernel",
            per_point_grads.len(),
            ntk.n
        )));
    }
    let o_dim = per_point_grads.first().map_or(0, |g| g.len());
    let mut per_point = Vec::with_capacity(ntk.n);
    for p in 0..ntk.n {
        let mut v = vec![0.0f64; o_dim];
        for (i, g) in per_point_grads.iter().enumerate() {
            if g.len() != o_dim {
                return Err(Error::Dimension("ragged loss gradients".into()));
            }
            let theta_pi = ntk.get(p, i);
            for (vo, go) in v.iter_mut().zip(g) {
                *vo -= theta_pi * go;
            }
        }
        per_point.push(v);
    }
    Ok(VelocityVector {
        per_point,
        descent_sign: true,
    })
}

/// p~_n = lambda_n * <q_n, g> for an N-vector of loss gradients
/// (single output component). With symmetric Theta, D^{-1} = D^T.
pub fn projection_factors(spectrum: &Spectrum, grads: &[f64]) -> Result<ProjectionFactors> {
    if grads.len() != spectrum.n {
        return Err(Error::Dimension(format!(
            "{} gradients for an {}-mode spectrum",
            grads.len(),
            spectrum.n
        )));
    }
    let n = spectrum.n;
    let mut factors = vec![0.0f64; n];
    for (m, f) in factors.iter_mut().enumerate() {
        let mut inner = 0.0;
        for (i, g) in grads.iter().enumerate() {
            inner += spectrum.eigenvectors[i * n + m] * g;
        }
        *f = spectrum.eigenvalues[m] * inner;
    }
    Ok(ProjectionFactors { factors })
}

/// Reassemble Theta * g from projection factors: (D * p~)_p.
pub fn apply_projection(spectrum: &Spectrum, factors: &ProjectionFactors) -> Vec<f64> {
    let n = spectrum.n;
    (0..n)
        .map(|p| {
            (0..n)
                .map(|m| spectrum.eigenvectors[p * n + m] * factors.factors[m])
                .sum()
        })
        .collect()
}

pub fn kinetic_energy(velocity: &VelocityVector, mass: f64) -> Result<KineticEnergyReport> {
    if !(mass > 0.0) {
        return Err(Error::Config(format!("mass must be > 0, got {mass}")));
    }
    let per_point = velocity
        .per_point
        .iter()
        .map(|v| v.iter().map(|x| x * x).sum::<f64>() / (2.0 * mass))
        .collect();
    Ok(KineticEnergyReport { per_point, mass })
}

/// Empirical first-order check of the predicted velocity: take one
/// full-batch SGD step of size eta on a clone of the network, measure
/// delta-f / eta, and return per-point relative residuals
/// |delta-f_p/eta - f-dot_p| / (|f-dot_p| + 1e-12).
pub fn velocity_consistency_check(
    network: &Network,
    inputs: &[&[f64]],
    targets: &[Target],
    loss_kind: LossKind,
    eta: f64,
) -> Result<Vec<f64>> {
    if !(eta > 0.0) {
        return Err(Error::Config(format!("eta must be > 0, got {eta}")));
    }
    let lg = loss_and_gradients(network, inputs, targets, loss_kind)?;
    let kernel = compute_ntk(network, inputs)?;
    let predicted = predicted_velocity(&kernel, &lg.per_point)?;

    let before = network.batch_forward(inputs)?;
    let grad = network.batch_gradient(inputs, &lg.per_point)?;
    let mut opt = Optimizer::new(OptimizerConfig::sgd(eta), network.param_count())?;
    let stepped = opt.step(network, &grad)?;
    let after = stepped.batch_forward(inputs)?;

    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut residuals = Vec::with_capacity(inputs.len());
    for p in 0..inputs.len() {
        let measured: Vec<f64> = after[p]
            .iter()
            .zip(&before[p])
            .map(|(a, b)| (a - b) / eta)
            .collect();
        let diff: Vec<f64> = measured
            .iter()
            .zip(&predicted.per_point[p])
            .map(|(m, v)| m - v)
            .collect();
        residuals.push(norm(&diff) / (norm(&predicted.per_point[p]) + 1e-12));
    }
    Ok(residuals)
}
