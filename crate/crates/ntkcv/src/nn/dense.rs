//! Dense MLP forward/backward. Weights for layer l are row-major
//! (out x in) at the layout offset, followed by the bias vector.

use super::Network;

/// (weight offset, bias offset, in, out) per layer, from the layout.
fn layer_geometry(net: &Network) -> Vec<(usize, usize, usize, usize)> {
    let dims = net.spec.dense_dims();
    let layout = &net.params.layout;
    (0..dims.len() - 1)
        .map(|l| {
            let w = &layout[2 * l];
            let b = &layout[2 * l + 1];
            (w.offset, b.offset, dims[l], dims[l + 1])
        })
        .collect()
}

pub(super) fn forward(net: &Network, x: &[f64]) -> Vec<f64> {
    let geom = layer_geometry(net);
    let last = geom.len() - 1;
    let theta = &net.params.values;
    let mut a: Vec<f64> = x.to_vec();
    for (l, &(wo, bo, n_in, n_out)) in geom.iter().enumerate() {
        let mut next = vec![0.0f64; n_out];
        for o in 0..n_out {
            let row = &theta[wo + o * n_in..wo + (o + 1) * n_in];
            let mut acc = theta[bo + o];
            for (wi, xi) in row.iter().zip(&a) {
                acc += wi * xi;
            }
            next[o] = if l < last {
                net.spec.activation.apply(acc)
            } else {
                acc
            };
        }
        a = next;
    }
    a
}

/// Single-sample forward keeping preactivations and activations.
fn forward_cached(net: &Network, x: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let geom = layer_geometry(net);
    let last = geom.len() - 1;
    let theta = &net.params.values;
    let mut acts: Vec<Vec<f64>> = vec![x.to_vec()];
    let mut pres: Vec<Vec<f64>> = Vec::with_capacity(geom.len());
    for (l, &(wo, bo, n_in, n_out)) in geom.iter().enumerate() {
        let a = acts.last().unwrap();
        let mut pre = vec![0.0f64; n_out];
        for o in 0..n_out {
            let row = &theta[wo + o * n_in..wo + (o + 1) * n_in];
            let mut acc = theta[bo + o];
            for (wi, xi) in row.iter().zip(a) {
                acc += wi * xi;
            }
            pre[o] = acc;
        }
        let act: Vec<f64> = if l < last {
            pre.iter().map(|&p| net.spec.activation.apply(p)).collect()
        } else {
            pre.clone()
        };
        pres.push(pre);
        acts.push(act);
    }
    (acts, pres)
}

pub(super) fn seeded_gradient(net: &Network, x: &[f64], seed: &[f64]) -> Vec<f64> {
    let geom = layer_geometry(net);
    let theta = &net.params.values;
    let (acts, pres) = forward_cached(net, x);
    let mut grad = vec![0.0f64; theta.len()];
    let mut delta: Vec<f64> = seed.to_vec();
    for l in (0..geom.len()).rev() {
        let (wo, bo, n_in, n_out) = geom[l];
        let a_in = &acts[l];
        for o in 0..n_out {
            let d = delta[o];
            grad[bo + o] = d;
            let g_row = &mut grad[wo + o * n_in..wo + (o + 1) * n_in];
            for (g, xi) in g_row.iter_mut().zip(a_in) {
                *g = d * xi;
            }
        }
        if l > 0 {
            let mut prev = vec![0.0f64; n_in];
            for o in 0..n_out {
                let d = delta[o];
                let row = &theta[wo + o * n_in..wo + (o + 1) * n_in];
                for (p, wi) in prev.iter_mut().zip(row) {
                    *p += d * wi;
                }
            }
            for (p, &pre) in prev.iter_mut().zip(&pres[l - 1]) {
                *p *= net.spec.activation.deriv(pre);
            }
            delta = prev;
        }
    }
    grad
}

/// C (m x n, row-major) += A (m x k) * B (k x n) with explicit strides.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    rsa: isize,
    csa: isize,
    b: &[f64],
    rsb: isize,
    csb: isize,
    beta: f64,
    c: &mut [f64],
) {
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa,
            csa,
            b.as_ptr(),
            rsb,
            csb,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// Batched forward: one GEMM per layer over the whole batch.
/// Returns per-sample outputs.
pub(super) fn batch_forward(net: &Network, xs: &[&[f64]]) -> Vec<Vec<f64>> {
    let (acts, _) = batch_forward_cached(net, xs);
    let out = acts.last().unwrap();
    let n_out = net.spec.output_dim;
    xs.iter()
        .enumerate()
        .map(|(i, _)| out[i * n_out..(i + 1) * n_out].to_vec())
        .collect()
}

/// Batched forward keeping per-layer activation and preactivation
/// matrices (batch x dim, row-major). acts[0] is the input matrix.
fn batch_forward_cached(net: &Network, xs: &[&[f64]]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let geom = layer_geometry(net);
    let last = geom.len() - 1;
    let theta = &net.params.values;
    let bsz = xs.len();
    let n_in0 = net.spec.input_dim.len();
    let mut x0 = vec![0.0f64; bsz * n_in0];
    for (i, x) in xs.iter().enumerate() {
        x0[i * n_in0..(i + 1) * n_in0].copy_from_slice(x);
    }
    let mut acts: Vec<Vec<f64>> = vec![x0];
    let mut pres: Vec<Vec<f64>> = Vec::with_capacity(geom.len());
    for (l, &(wo, bo, n_in, n_out)) in geom.iter().enumerate() {
        let a = acts.last().unwrap();
        let mut pre = vec![0.0f64; bsz * n_out];
        for i in 0..bsz {
            pre[i * n_out..(i + 1) * n_out].copy_from_slice(&theta[bo..bo + n_out]);
        }
        // pre += A (bsz x n_in) * W^T (n_in x n_out); W is row-major (n_out x n_in)
        gemm(
            bsz,
            n_in,
            n_out,
            a,
            n_in as isize,
            1,
            &theta[wo..wo + n_out * n_in],
            1,
            n_in as isize,
            1.0,
            &mut pre,
        );
        let act: Vec<f64> = if l < last {
            pre.iter().map(|&p| net.spec.activation.apply(p)).collect()
        } else {
            pre.clone()
        };
        pres.push(pre);
        acts.push(act);
    }
    (acts, pres)
}

/// Exact tangent-kernel entries (row-major bsz x bsz, summed over
/// outputs) via the per-layer Gram factorization: the layer-l weight
/// gradient for output o is an outer product delta_l^o (x) a_{l-1}, so
///
///   Theta(i,j) = sum_l Gdelta_l(i,j) * (Ga_{l-1}(i,j) + 1)
///
/// with Gdelta_l(i,j) = sum_o <delta_l^o(x_i), delta_l^o(x_j)> and
/// Ga_l the activation Gram; the +1 is the bias contribution. This
/// avoids materializing the (bsz*out x |theta|) Jacobian entirely and
/// costs O(bsz^2 * width) per layer instead of O(bsz^2 * |theta|).
pub(super) fn ntk_kernel(net: &Network, xs: &[&[f64]]) -> Vec<f64> {
    let geom = layer_geometry(net);
    let theta = &net.params.values;
    let bsz = xs.len();
    let o_dim = net.spec.output_dim;
    let rows = bsz * o_dim;
    let (acts, pres) = batch_forward_cached(net, xs);
    // head seeds: row (i, o) = e_o, so the deltas start sample independent
    let n_last = geom[geom.len() - 1].3;
    let mut delta = vec![0.0f64; rows * n_last];
    for i in 0..bsz {
        for o in 0..o_dim {
            delta[(i * o_dim + o) * n_last + o] = 1.0;
        }
    }
    let mut kernel = vec![0.0f64; bsz * bsz];
    let mut gd = vec![0.0f64; bsz * bsz];
    let mut ga = vec![0.0f64; bsz * bsz];
    for l in (0..geom.len()).rev() {
        let (wo, _bo, n_in, n_out) = geom[l];
        // Gdelta = M M^T where M is delta reshaped to bsz x (o_dim*n_out);
        // sample-major row order makes the reshape a no-op and the plain
        // Gram sums over output components exactly
        let k = o_dim * n_out;
        gemm(bsz, k, bsz, &delta, k as isize, 1, &delta, 1, k as isize, 0.0, &mut gd);
        gemm(
            bsz,
            n_in,
            bsz,
            &acts[l],
            n_in as isize,
            1,
            &acts[l],
            1,
            n_in as isize,
            0.0,
            &mut ga,
        );
        for ((kv, &gdv), &gav) in kernel.iter_mut().zip(&gd).zip(&ga) {
            *kv += gdv * (gav + 1.0);
        }
        if l > 0 {
            // Delta_prev = Delta * W, then gate by act'(pre_{l-1}) per sample
            let mut prev = vec![0.0f64; rows * n_in];
            gemm(
                rows,
                n_out,
                n_in,
                &delta,
                n_out as isize,
                1,
                &theta[wo..wo + n_out * n_in],
                n_in as isize,
                1,
                0.0,
                &mut prev,
            );
            let pre = &pres[l - 1];
            for i in 0..bsz {
                let gate = &pre[i * n_in..(i + 1) * n_in];
                for o in 0..o_dim {
                    let row = &mut prev[(i * o_dim + o) * n_in..(i * o_dim + o + 1) * n_in];
                    for (p, &pr) in row.iter_mut().zip(gate) {
                        *p *= net.spec.activation.deriv(pr);
                    }
                }
            }
            delta = prev;
        }
    }
    kernel
}

/// sum_i J(x_i)^T * delta_i via one batched backward pass.
pub(super) fn batch_gradient(net: &Network, xs: &[&[f64]], deltas: &[Vec<f64>]) -> Vec<f64> {
    let geom = layer_geometry(net);
    let theta = &net.params.values;
    let bsz = xs.len();
    let (acts, pres) = batch_forward_cached(net, xs);
    let mut grad = vec![0.0f64; theta.len()];
    let n_out_last = net.spec.output_dim;
    let mut delta = vec![0.0f64; bsz * n_out_last];
    for (i, d) in deltas.iter().enumerate() {
        delta[i * n_out_last..(i + 1) * n_out_last].copy_from_slice(d);
    }
    for l in (0..geom.len()).rev() {
        let (wo, bo, n_in, n_out) = geom[l];
        // weight grad (n_out x n_in) = Delta^T (n_out x bsz) * A (bsz x n_in)
        gemm(
            n_out,
            bsz,
            n_in,
            &delta,
            1,
            n_out as isize,
            &acts[l],
            n_in as isize,
            1,
            1.0,
            &mut grad[wo..wo + n_out * n_in],
        );
        for o in 0..n_out {
            let mut acc = 0.0;
            for i in 0..bsz {
                acc += delta[i * n_out + o];
            }
            grad[bo + o] = acc;
        }
        if l > 0 {
            // Delta_prev (bsz x n_in) = Delta (bsz x n_out) * W (n_out x n_in)
            let mut prev = vec![0.0f64; bsz * n_in];
            gemm(
                bsz,
                n_out,
                n_in,
                &delta,
                n_out as isize,
                1,
                &theta[wo..wo + n_out * n_in],
                n_in as isize,
                1,
                0.0,
                &mut prev,
            );
            for (p, &pre) in prev.iter_mut().zip(&pres[l - 1]) {
                *p *= net.spec.activation.deriv(pre);
            }
            delta = prev;
        }
    }
    grad
}
