//! Empirical NTK assembly: Theta_pi = sum_o <df_o(x_p)/dtheta, df_o(x_i)/dtheta>,
//! built from per-sample Jacobian rows, exactly or via the subsampling
//! measurement protocol.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::Network;
use crate::spectral::{self, CollectiveVariables, Provenance, Split};

/// How output components are contracted into the scalar kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    SumOverOutputs,
}

/// The empirical NTK over an ordered dataset: square, symmetric, PSD.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    /// Row-major n x n entries.
    pub entries: Vec<f64>,
    pub n: usize,
    pub dataset_ids: Vec<usize>,
    pub reduction: Reduction,
}

impl KernelMatrix {
    pub fn get(&self, p: usize, i: usize) -> f64 {
        self.entries[p * self.n + i]
    }

    pub fn trace(&self) -> f64 {
        spectral::trace(&self.entries, self.n)
    }

    /// s x s submatrix restricted to the given (ascending) indices.
    pub fn submatrix(&self, indices: &[usize]) -> KernelMatrix {
        let s = indices.len();
        let mut entries = vec![0.0f64; s * s];
        for (a, &p) in indices.iter().enumerate() {
            for (b, &i) in indices.iter().enumerate() {
                entries[a * s + b] = self.get(p, i);
            }
        }
        KernelMatrix {
            entries,
            n: s,
            dataset_ids: indices.iter().map(|&i| self.dataset_ids[i]).collect(),
            reduction: self.reduction,
        }
    }
}

/// Subsampled measurement protocol: M independent draws of s points each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsampleConfig {
    pub num_samples: usize,
    pub sample_size: usize,
    pub seed: u64,
}

impl Default for SubsampleConfig {
    fn default() -> Self {
        SubsampleConfig {
            num_samples: 200,
            sample_size: 20,
            seed: 0,
        }
    }
}

/// Mean and standard deviation of entropy and trace over M subsamples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    pub entropy_mean: f64,
    pub entropy_std: f64,
    pub trace_mean: f64,
    pub trace_std: f64,
    pub num_samples: usize,
    pub sample_size: usize,
}

/// Default memory budget for materializing the stacked Jacobian (bytes).
/// Above this, rows are streamed in blocks and Theta accumulates via
/// block products.
pub const DEFAULT_JACOBIAN_BUDGET: usize = 1 << 30;

/// Assemble the kernel. Dense networks use the per-layer Gram
/// factorization (no Jacobian materialization); everything else goes
/// through stacked Jacobian rows under the default memory budget.
pub fn compute_ntk(network: &Network, inputs: &[&[f64]]) -> Result<KernelMatrix> {
    let n = inputs.len();
    if n == 0 {
        return Err(Error::Config("compute_ntk requires a nonempty dataset".into()));
    }
    if let Some(mut entries) = network.factored_kernel(inputs)? {
        for p in 0..n {
            if !entries[p * n + p].is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite kernel diagonal for data point {p}"
                )));
            }
            for i in p + 1..n {
                entries[i * n + p] = entries[p * n + i];
            }
        }
        return Ok(KernelMatrix {
            entries,
            n,
            dataset_ids: (0..n).collect(),
            reduction: Reduction::SumOverOutputs,
        });
    }
    compute_ntk_with_budget(network, inputs, DEFAULT_JACOBIAN_BUDGET)
}

/// Jacobian rows for samples [lo, hi), stacked row-major
/// ((hi-lo) x output_dim*|theta|).
fn jacobian_block(network: &Network, inputs: &[&[f64]], lo: usize, hi: usize) -> Result<Vec<f64>> {
    let row_len = network.spec().output_dim * network.param_count();
    let mut block = vec![0.0f64; (hi - lo) * row_len];
    for (r, idx) in (lo..hi).enumerate() {
        let g = network.per_sample_gradient(inputs[idx])?;
        if g.rows.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite per-sample gradient for data point {idx}"
            )));
        }
        block[r * row_len..(r + 1) * row_len].copy_from_slice(&g.rows);
    }
    Ok(block)
}

/// C_block (rows_a x rows_b) = A * B^T for two row-major blocks of width k.
fn block_product(a: &[f64], rows_a: usize, b: &[f64], rows_b: usize, k: usize) -> Vec<f64> {
    let mut c = vec![0.0f64; rows_a * rows_b];
    unsafe {
        matrixmultiply::dgemm(
            rows_a,
            k,
            rows_b,
            1.0,
            a.as_ptr(),
            k as isize,
            1,
            b.as_ptr(),
            1,
            k as isize,
            0.0,
            c.as_mut_ptr(),
            rows_b as isize,
            1,
        );
    }
    c
}

pub fn compute_ntk_with_budget(
    network: &Network,
    inputs: &[&[f64]],
    budget_bytes: usize,
) -> Result<KernelMatrix> {
    let n = inputs.len();
    if n == 0 {
        return Err(Error::Config("compute_ntk requires a nonempty dataset".into()));
    }
    let row_len = network.spec().output_dim * network.param_count();
    let mut entries = vec![0.0f64; n * n];

    let full_bytes = n * row_len * 8;
    if full_bytes <= budget_bytes {
        let jac = jacobian_block(network, inputs, 0, n)?;
        let prod = block_product(&jac, n, &jac, n, row_len);
        entries.copy_from_slice(&prod);
    } else {
        // two row-blocks in flight at a time
        let block_rows = (budget_bytes / (2 * row_len * 8)).max(1).min(n);
        let starts: Vec<usize> = (0..n).step_by(block_rows).collect();
        for (ai, &a_lo) in starts.iter().enumerate() {
            let a_hi = (a_lo + block_rows).min(n);
            let block_a = jacobian_block(network, inputs, a_lo, a_hi)?;
            // diagonal block
            let prod = block_product(&block_a, a_hi - a_lo, &block_a, a_hi - a_lo, row_len);
            for (r, p) in (a_lo..a_hi).enumerate() {
                for (c, i) in (a_lo..a_hi).enumerate() {
                    entries[p * n + i] = prod[r * (a_hi - a_lo) + c];
                }
            }
            for &b_lo in &starts[ai + 1..] {
                let b_hi = (b_lo + block_rows).min(n);
                let block_b = jacobian_block(network, inputs, b_lo, b_hi)?;
                let prod = block_product(&block_a, a_hi - a_lo, &block_b, b_hi - b_lo, row_len);
                for (r, p) in (a_lo..a_hi).enumerate() {
                    for (c, i) in (b_lo..b_hi).enumerate() {
                        entries[p * n + i] = prod[r * (b_hi - b_lo) + c];
                    }
                }
            }
        }
    }

    // exact symmetry: mirror the upper triangle
    for p in 0..n {
        for i in p + 1..n {
            entries[i * n + p] = entries[p * n + i];
        }
    }
    Ok(KernelMatrix {
        entries,
        n,
        dataset_ids: (0..n).collect(),
        reduction: Reduction::SumOverOutputs,
    })
}

/// Entropy and trace of a kernel matrix via eigendecomposition.
pub fn collective_variables(
    kernel: &KernelMatrix,
    split: Split,
    epoch: usize,
) -> Result<CollectiveVariables> {
    let spectrum = spectral::eigendecompose(&kernel.entries, kernel.n)?;
    let entropy = spectral::entropy(&spectrum.eigenvalues)?;
    Ok(CollectiveVariables {
        entropy,
        trace: kernel.trace(),
        n_points: kernel.n,
        provenance: Provenance::Exact,
        split,
        epoch,
    })
}

/// The subsampled measurement protocol: M draws of s points each
/// (uniform, without replacement within a draw), the s x s NTK of each
/// draw, and the mean/std of entropy and trace over the draws.
///
/// The full kernel is assembled once; each draw reads its submatrix.
pub fn subsampled_cv(
    network: &Network,
    inputs: &[&[f64]],
    cfg: &SubsampleConfig,
) -> Result<CvSummary> {
    let n = inputs.len();
    if cfg.sample_size == 0 || cfg.sample_size > n {
        return Err(Error::Config(format!(
            "subsample size {} must lie in 1..={n}",
            cfg.sample_size
        )));
    }
    if cfg.num_samples == 0 {
        return Err(Error::Config("subsample count must be >= 1".into()));
    }
    let kernel = compute_ntk(network, inputs)?;
    subsampled_cv_of_kernel(&kernel, cfg)
}

/// Same protocol, starting from an already-assembled kernel.
pub fn subsampled_cv_of_kernel(kernel: &KernelMatrix, cfg: &SubsampleConfig) -> Result<CvSummary> {
    let n = kernel.n;
    if cfg.sample_size == 0 || cfg.sample_size > n {
        return Err(Error::Config(format!(
            "subsample size {} must lie in 1..={n}",
            cfg.sample_size
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut entropies = Vec::with_capacity(cfg.num_samples);
    let mut traces = Vec::with_capacity(cfg.num_samples);
    for _ in 0..cfg.num_samples {
        let mut idx = rand::seq::index::sample(&mut rng, n, cfg.sample_size).into_vec();
        idx.sort_unstable();
        let sub = kernel.submatrix(&idx);
        let spectrum = spectral::eigendecompose(&sub.entries, sub.n)?;
        entropies.push(spectral::entropy(&spectrum.eigenvalues)?);
        traces.push(sub.trace());
    }
    let mean_std = |v: &[f64]| -> (f64, f64) {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64;
        (m, var.sqrt())
    };
    let (entropy_mean, entropy_std) = mean_std(&entropies);
    let (trace_mean, trace_std) = mean_std(&traces);
    Ok(CvSummary {
        entropy_mean,
        entropy_std,
        trace_mean,
        trace_std,
        num_samples: cfg.num_samples,
        sample_size: cfg.sample_size,
    })
}
