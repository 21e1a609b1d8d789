//! Eigendecomposition of symmetric matrices (cyclic Jacobi rotations)
//! and the collective variables derived from a kernel spectrum: spectral
//! entropy and trace.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFFDIAG_TOL: f64 = 1e-12;
/// Eigenvalues below this fraction of the largest are dropped before
/// entropy normalization.
const EIGENVALUE_FLOOR: f64 = 1e-12;

/// Eigenvalues (descending) and matching orthonormal eigenvectors
/// (column n of `eigenvectors` pairs with `eigenvalues[n]`).
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Row-major N x N; column n is the n-th eigenvector.
    pub eigenvectors: Vec<f64>,
    pub n: usize,
}

impl Spectrum {
    pub fn eigenvector(&self, n: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.eigenvectors[i * self.n + n]).collect()
    }
}

/// Where a collective-variable measurement came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    Subsampled { m: usize, s: usize },
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::Exact => write!(f, "exact"),
            Provenance::Subsampled { m, s } => write!(f, "subsampled({m},{s})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Split::Train => write!(f, "train"),
            Split::Test => write!(f, "test"),
        }
    }
}

/// Entropy and trace of one NTK measurement, with provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollectiveVariables {
    pub entropy: f64,
    pub trace: f64,
    pub n_points: usize,
    pub provenance: Provenance,
    pub split: Split,
    pub epoch: usize,
}

/// Jacobi eigendecomposition of a symmetric matrix (row-major, n x n).
/// The input is symmetrized as (A + A^T)/2 first. Rotations run in
/// cyclic sweeps until the off-diagonal Frobenius norm falls below
/// 1e-12 * ||A||_F, up to 100 sweeps.
pub fn eigendecompose(matrix: &[f64], n: usize) -> Result<Spectrum> {
    if matrix.len() != n * n {
        return Err(Error::Dimension(format!(
            "matrix length {} is not {n}x{n}",
            matrix.len()
        )));
    }
    if n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let mut a = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (matrix[i * n + j] + matrix[j * n + i]);
        }
    }
    let norm_a = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut q = vec![0.0f64; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }

    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut residual = off_norm(&a);
    let mut sweeps = 0;
    while residual > OFFDIAG_TOL * norm_a && norm_a > 0.0 {
        if sweeps >= MAX_SWEEPS {
            return Err(Error::NoConvergence { residual, sweeps });
        }
        for p in 0..n - 1 {
            for r in p + 1..n {
                let apr = a[p * n + r];
                if apr == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let arr = a[r * n + r];
                // rotation angle annihilating a[p][r]
                let tau = (arr - app) / (2.0 * apr);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // rows/columns p and r of A
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akr = a[k * n + r];
                    a[k * n + p] = c * akp - s * akr;
                    a[k * n + r] = s * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let ark = a[r * n + k];
                    a[p * n + k] = c * apk - s * ark;
                    a[r * n + k] = s * apk + c * ark;
                }
                for k in 0..n {
                    let qkp = q[k * n + p];
                    let qkr = q[k * n + r];
                    q[k * n + p] = c * qkp - s * qkr;
                    q[k * n + r] = s * qkp + c * qkr;
                }
            }
        }
        sweeps += 1;
        residual = off_norm(&a);
    }

    // sort descending, carry columns along
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j * n + j]
            .partial_cmp(&a[i * n + i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let mut eigenvectors = vec![0.0f64; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        // sign convention: largest-magnitude component nonnegative
        let mut max_abs = 0.0;
        let mut sign = 1.0;
        for i in 0..n {
            let v = q[i * n + old_col];
            if v.abs() > max_abs {
                max_abs = v.abs();
                sign = if v < 0.0 { -1.0 } else { 1.0 };
            }
        }
        for i in 0..n {
            eigenvectors[i * n + new_col] = sign * q[i * n + old_col];
        }
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        n,
    })
}

/// Shannon entropy of the normalized eigenvalue distribution, in nats.
/// Negative eigenvalues are clipped to zero and values below
/// 1e-12 * lambda_max are discarded before normalization.
pub fn entropy(eigenvalues: &[f64]) -> Result<f64> {
    let lambda_max = eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    if lambda_max <= 0.0 {
        return Err(Error::DegenerateSpectrum(
            "no positive eigenvalue after clipping".into(),
        ));
    }
    let floor = EIGENVALUE_FLOOR * lambda_max;
    let kept: Vec<f64> = eigenvalues
        .iter()
        .map(|&l| l.max(0.0))
        .filter(|&l| l >= floor)
        .collect();
    let sum: f64 = kept.iter().sum();
    let mut s = 0.0;
    for l in kept {
        let p = l / sum;
        if p > 0.0 {
            s -= p * p.ln();
        }
    }
    Ok(s.max(0.0))
}

/// Sum of the diagonal of a row-major n x n matrix.
pub fn trace(matrix: &[f64], n: usize) -> f64 {
    (0..n).map(|i| matrix[i * n + i]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reconstruction_residual(spec: &Spectrum, a: &[f64]) -> f64 {
        let n = spec.n;
        let mut err = 0.0f64;
        let mut norm = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut v = 0.0;
                for k in 0..n {
                    v += spec.eigenvectors[i * n + k]
                        * spec.eigenvalues[k]
                        * spec.eigenvectors[j * n + k];
                }
                let d = v - a[i * n + j];
                err += d * d;
                norm += a[i * n + j] * a[i * n + j];
            }
        }
        (err / norm.max(1e-300)).sqrt()
    }

    fn orthogonality_residual(spec: &Spectrum) -> f64 {
        let n = spec.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut v = 0.0;
                for k in 0..n {
                    v += spec.eigenvectors[k * n + i] * spec.eigenvectors[k * n + j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }

    #[test]
    fn analytic_2x2_case() {
        // [[2,1],[1,2]] -> eigenvalues (3,1), eigenvectors (1,1)/sqrt2, (1,-1)/sqrt2
        let a = [2.0, 1.0, 1.0, 2.0];
        let spec = eigendecompose(&a, 2).unwrap();
        assert!((spec.eigenvalues[0] - 3.0).abs() < 1e-12);
        assert!((spec.eigenvalues[1] - 1.0).abs() < 1e-12);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = spec.eigenvector(0);
        let v1 = spec.eigenvector(1);
        assert!((v0[0] - inv_sqrt2).abs() < 1e-12 && (v0[1] - inv_sqrt2).abs() < 1e-12);
        assert!((v1[0].abs() - inv_sqrt2).abs() < 1e-12 && (v1[1].abs() - inv_sqrt2).abs() < 1e-12);
        assert!((v1[0] * v1[1] + inv_sqrt2 * inv_sqrt2).abs() < 1e-12); // opposite signs
    }

    #[test]
    fn diagonal_matrix_passthrough() {
        let a = [4.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0];
        let spec = eigendecompose(&a, 3).unwrap();
        assert_eq!(spec.eigenvalues, vec![4.0, 2.0, 1.0]);
        for (n, axis) in [(0usize, 0usize), (1, 1), (2, 2)] {
            let v = spec.eigenvector(n);
            for (i, &vi) in v.iter().enumerate() {
                let want = if i == axis { 1.0 } else { 0.0 };
                assert!((vi - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_symmetric_50x50_residuals() {
        let n = 50;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut a = vec![0.0f64; n * n];
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.gen_range(-1.0..1.0);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        let spec = eigendecompose(&a, n).unwrap();
        assert!(reconstruction_residual(&spec, &a) <= 1e-8);
        assert!(orthogonality_residual(&spec) <= 1e-8);
        for w in spec.eigenvalues.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn entropy_uniform_spectrum_is_ln_n() {
        for n in [2usize, 4, 16, 256] {
            let s = entropy(&vec![1.0; n]).unwrap();
            assert!((s - (n as f64).ln()).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn entropy_rank_one_is_zero() {
        assert_eq!(entropy(&[5.0, 0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn entropy_hand_arithmetic_3_1() {
        // -(0.75 ln 0.75 + 0.25 ln 0.25) = 0.562335...
        let s = entropy(&[3.0, 1.0]).unwrap();
        assert!((s - 0.562335).abs() < 1e-6);
    }

    #[test]
    fn entropy_all_nonpositive_is_degenerate() {
        assert!(entropy(&[0.0, -1.0]).is_err());
    }

    #[test]
    fn entropy_scale_invariance() {
        let lam = [3.0, 1.0, 0.5, 0.01];
        let s1 = entropy(&lam).unwrap();
        let scaled: Vec<f64> = lam.iter().map(|l| l * 773.25).collect();
        let s2 = entropy(&scaled).unwrap();
        assert!((s1 - s2).abs() < 1e-12);
    }

    #[test]
    fn trace_cases() {
        let eye3 = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        assert_eq!(trace(&eye3, 3), 3.0);
        let a = [2.0, 1.0, 1.0, 2.0];
        assert_eq!(trace(&a, 2), 4.0);
        // linear-model NTK on (1,0) and (0,2), no bias: diag(1,4)
        let theta = [1.0, 0.0, 0.0, 4.0];
        assert_eq!(trace(&theta, 2), 5.0);
    }

    #[test]
    fn trace_matches_eigenvalue_sum() {
        let n = 20;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut a = vec![0.0f64; n * n];
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.gen_range(-1.0..1.0);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        let spec = eigendecompose(&a, n).unwrap();
        let sum: f64 = spec.eigenvalues.iter().sum();
        let tr = trace(&a, n);
        assert!((sum - tr).abs() <= 1e-8 * tr.abs().max(1.0));
    }
}
