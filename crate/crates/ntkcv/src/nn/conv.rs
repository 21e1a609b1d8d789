//! Small convolutional net: a stack of 3x3 same-padded conv layers
//! (stride 1), one 2x2 average pool, then a dense head. Feature maps are
//! channel-major: idx = ch*H*W + y*W + x.

use super::Network;

struct Geometry {
    h: usize,
    w: usize,
    c_in0: usize,
    depth: usize,
    width: usize,
    flat: usize,
    n_out: usize,
    /// (kernel offset, bias offset, c_in, c_out) per conv layer.
    conv: Vec<(usize, usize, usize, usize)>,
    head_w: usize,
    head_b: usize,
}

fn geometry(net: &Network) -> Geometry {
    let (h, w, c) = net.spec.image_dims();
    let layout = &net.params.layout;
    let depth = net.spec.depth;
    let mut conv = Vec::with_capacity(depth);
    let mut c_in = c;
    for l in 0..depth {
        conv.push((layout[2 * l].offset, layout[2 * l + 1].offset, c_in, net.spec.width));
        c_in = net.spec.width;
    }
    Geometry {
        h,
        w,
        c_in0: c,
        depth,
        width: net.spec.width,
        flat: net.spec.flatten_len(),
        n_out: net.spec.output_dim,
        conv,
        head_w: layout[2 * depth].offset,
        head_b: layout[2 * depth + 1].offset,
    }
}

/// 3x3 same-padded convolution of one input stack into one output stack.
fn conv3x3(
    input: &[f64],
    c_in: usize,
    c_out: usize,
    h: usize,
    w: usize,
    kernel: &[f64],
    bias: &[f64],
    out: &mut [f64],
) {
    for co in 0..c_out {
        for y in 0..h {
            for x in 0..w {
                let mut acc = bias[co];
                for ci in 0..c_in {
                    let k_base = ((co * c_in) + ci) * 9;
                    let i_base = ci * h * w;
                    for dy in 0..3usize {
                        let yy = y as isize + dy as isize - 1;
                        if yy < 0 || yy >= h as isize {
                            continue;
                        }
                        for dx in 0..3usize {
                            let xx = x as isize + dx as isize - 1;
                            if xx < 0 || xx >= w as isize {
                                continue;
                            }
                            acc += kernel[k_base + dy * 3 + dx]
                                * input[i_base + yy as usize * w + xx as usize];
                        }
                    }
                }
                out[co * h * w + y * w + x] = acc;
            }
        }
    }
}

struct Cache {
    /// Input to each conv layer (acts[0] = x), plus the final activated stack.
    acts: Vec<Vec<f64>>,
    /// Preactivations per conv layer.
    pres: Vec<Vec<f64>>,
    flat: Vec<f64>,
}

fn forward_cached(net: &Network, x: &[f64]) -> (Cache, Vec<f64>) {
    let g = geometry(net);
    let theta = &net.params.values;
    let mut acts: Vec<Vec<f64>> = vec![x.to_vec()];
    let mut pres: Vec<Vec<f64>> = Vec::with_capacity(g.depth);
    for &(ko, bo, c_in, c_out) in &g.conv {
        let input = acts.last().unwrap();
        let mut pre = vec![0.0f64; c_out * g.h * g.w];
        conv3x3(
            input,
            c_in,
            c_out,
            g.h,
            g.w,
            &theta[ko..ko + c_out * c_in * 9],
            &theta[bo..bo + c_out],
            &mut pre,
        );
        let act: Vec<f64> = pre.iter().map(|&p| net.spec.activation.apply(p)).collect();
        pres.push(pre);
        acts.push(act);
    }
    // 2x2 average pool, floor division on each spatial dim
    let last = acts.last().unwrap();
    let ch = if g.depth == 0 { g.c_in0 } else { g.width };
    let (h2, w2) = (g.h / 2, g.w / 2);
    let mut flat = vec![0.0f64; g.flat];
    for c in 0..ch {
        for y in 0..h2 {
            for x2 in 0..w2 {
                let base = c * g.h * g.w;
                let s = last[base + 2 * y * g.w + 2 * x2]
                    + last[base + 2 * y * g.w + 2 * x2 + 1]
                    + last[base + (2 * y + 1) * g.w + 2 * x2]
                    + last[base + (2 * y + 1) * g.w + 2 * x2 + 1];
                flat[c * h2 * w2 + y * w2 + x2] = 0.25 * s;
            }
        }
    }
    let mut out = vec![0.0f64; g.n_out];
    for o in 0..g.n_out {
        let row = &theta[g.head_w + o * g.flat..g.head_w + (o + 1) * g.flat];
        let mut acc = theta[g.head_b + o];
        for (wi, fi) in row.iter().zip(&flat) {
            acc += wi * fi;
        }
        out[o] = acc;
    }
    (Cache { acts, pres, flat }, out)
}

pub(super) fn forward(net: &Network, x: &[f64]) -> Vec<f64> {
    forward_cached(net, x).1
}

pub(super) fn seeded_gradient(net: &Network, x: &[f64], seed: &[f64]) -> Vec<f64> {
    let g = geometry(net);
    let theta = &net.params.values;
    let (cache, _) = forward_cached(net, x);
    let mut grad = vec![0.0f64; theta.len()];

    // head
    let mut d_flat = vec![0.0f64; g.flat];
    for o in 0..g.n_out {
        let s = seed[o];
        grad[g.head_b + o] = s;
        let g_row = &mut grad[g.head_w + o * g.flat..g.head_w + (o + 1) * g.flat];
        for (gi, fi) in g_row.iter_mut().zip(&cache.flat) {
            *gi = s * fi;
        }
        let w_row = &theta[g.head_w + o * g.flat..g.head_w + (o + 1) * g.flat];
        for (d, wi) in d_flat.iter_mut().zip(w_row) {
            *d += s * wi;
        }
    }

    // unpool: each pooled cell spreads its delta over the 2x2 window
    let ch = if g.depth == 0 { g.c_in0 } else { g.width };
    let (h2, w2) = (g.h / 2, g.w / 2);
    let mut d_act = vec![0.0f64; ch * g.h * g.w];
    for c in 0..ch {
        for y in 0..h2 {
            for x2 in 0..w2 {
                let d = 0.25 * d_flat[c * h2 * w2 + y * w2 + x2];
                let base = c * g.h * g.w;
                d_act[base + 2 * y * g.w + 2 * x2] = d;
                d_act[base + 2 * y * g.w + 2 * x2 + 1] = d;
                d_act[base + (2 * y + 1) * g.w + 2 * x2] = d;
                d_act[base + (2 * y + 1) * g.w + 2 * x2 + 1] = d;
            }
        }
    }

    // conv stack, reversed
    for l in (0..g.depth).rev() {
        let (ko, bo, c_in, c_out) = g.conv[l];
        let pre = &cache.pres[l];
        let input = &cache.acts[l];
        let mut d_pre = d_act;
        for (d, &p) in d_pre.iter_mut().zip(pre) {
            *d *= net.spec.activation.deriv(p);
        }
        let mut d_in = vec![0.0f64; c_in * g.h * g.w];
        for co in 0..c_out {
            let mut b_acc = 0.0;
            for y in 0..g.h {
                for x2 in 0..g.w {
                    b_acc += d_pre[co * g.h * g.w + y * g.w + x2];
                }
            }
            grad[bo + co] = b_acc;
            for ci in 0..c_in {
                let k_base = ko + ((co * c_in) + ci) * 9;
                let i_base = ci * g.h * g.w;
                for dy in 0..3usize {
                    for dx in 0..3usize {
                        let mut acc = 0.0;
                        for y in 0..g.h {
                            let yy = y as isize + dy as isize - 1;
                            if yy < 0 || yy >= g.h as isize {
                                continue;
                            }
                            for x2 in 0..g.w {
                                let xx = x2 as isize + dx as isize - 1;
                                if xx < 0 || xx >= g.w as isize {
                                    continue;
                                }
                                let d = d_pre[co * g.h * g.w + y * g.w + x2];
                                acc += d * input[i_base + yy as usize * g.w + xx as usize];
                                d_in[i_base + yy as usize * g.w + xx as usize] +=
                                    d * theta[k_base + dy * 3 + dx];
                            }
                        }
                        grad[k_base + dy * 3 + dx] = acc;
                    }
                }
            }
        }
        d_act = d_in;
    }
    grad
}
