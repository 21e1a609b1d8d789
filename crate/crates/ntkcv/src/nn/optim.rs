//! SGD and Adam parameter updates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::Network;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sgd,
    Adam,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub method: Method,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
}

impl OptimizerConfig {
    pub fn sgd(learning_rate: f64) -> Self {
        OptimizerConfig {
            method: Method::Sgd,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 32,
        }
    }

    pub fn adam(learning_rate: f64) -> Self {
        OptimizerConfig {
            method: Method::Adam,
            ..OptimizerConfig::sgd(learning_rate)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config(format!(
                "optimizer.learning_rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::Config(format!(
                    "optimizer.{name} must lie in (0, 1), got {b}"
                )));
            }
        }
        if self.batch_size == 0 {
            return Err(Error::Config("optimizer.batch_size must be >= 1".into()));
        }
        Ok(())
    }
}

/// Optimizer state. SGD is stateless; Adam keeps first/second moments
/// and the step counter.
#[derive(Debug, Clone)]
pub struct Optimizer {
    cfg: OptimizerConfig,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Optimizer {
    pub fn new(cfg: OptimizerConfig, param_count: usize) -> Result<Self> {
        cfg.validate()?;
        let state_len = match cfg.method {
            Method::Sgd => 0,
            Method::Adam => param_count,
        };
        Ok(Optimizer {
            cfg,
            m: vec![0.0; state_len],
            v: vec![0.0; state_len],
            t: 0,
        })
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.cfg
    }

    /// One update; returns the network with new parameters.
    pub fn step(&mut self, network: &Network, grads: &[f64]) -> Result<Network> {
        if grads.len() != network.param_count() {
            return Err(Error::Dimension(format!(
                "gradient length {} does not match parameter count {}",
                grads.len(),
                network.param_count()
            )));
        }
        if let Some(index) = grads.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFinite {
                index,
                context: "gradient entry".into(),
            });
        }
        let eta = self.cfg.learning_rate;
        let mut theta = network.params().values.clone();
        match self.cfg.method {
            Method::Sgd => {
                for (p, g) in theta.iter_mut().zip(grads) {
                    *p -= eta * g;
                }
            }
            Method::Adam => {
                self.t += 1;
                let (b1, b2, eps) = (self.cfg.beta1, self.cfg.beta2, self.cfg.epsilon);
                let bc1 = 1.0 - b1.powi(self.t as i32);
                let bc2 = 1.0 - b2.powi(self.t as i32);
                for i in 0..theta.len() {
                    let g = grads[i];
                    self.m[i] = b1 * self.m[i] + (1.0 - b1) * g;
                    self.v[i] = b2 * self.v[i] + (1.0 - b2) * g * g;
                    let m_hat = self.m[i] / bc1;
                    let v_hat = self.v[i] / bc2;
                    theta[i] -= eta * m_hat / (v_hat.sqrt() + eps);
                }
            }
        }
        network.with_params(theta)
    }
}
