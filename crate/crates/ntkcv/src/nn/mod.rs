//! Minimal neural-network engine: two fixed architecture families
//! (dense MLP, small conv net), forward evaluation, per-sample parameter
//! gradients, losses, and optimizer steps. Everything is f64.

mod conv;
mod dense;
pub mod loss;
pub mod optim;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
    Linear,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            Activation::Tanh => x.tanh(),
            Activation::Linear => x,
        }
    }

    /// Derivative as a function of the preactivation. ReLU at exactly 0
    /// uses derivative 0.
    #[inline]
    pub fn deriv(self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => {
                let t = x.tanh();
                1.0 - t * t
            }
            Activation::Linear => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetKind {
    Dense,
    #[serde(rename = "conv")]
    Conv,
}

/// Input shape: flat feature vector or an image (height, width, channels).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputDim {
    Flat(usize),
    Image { h: usize, w: usize, c: usize },
}

impl InputDim {
    pub fn len(&self) -> usize {
        match *self {
            InputDim::Flat(n) => n,
            InputDim::Image { h, w, c } => h * w * c,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub kind: NetKind,
    /// Hidden units per layer (dense) or channels per conv layer.
    pub width: usize,
    /// Number of hidden layers; depth 0 is a plain linear map.
    pub depth: usize,
    pub activation: Activation,
    pub input_dim: InputDim,
    pub output_dim: usize,
}

impl NetworkSpec {
    pub fn validate(&self) -> Result<()> {
        if self.width < 1 {
            return Err(Error::Config(format!(
                "network.width must be >= 1, got {}",
                self.width
            )));
        }
        if self.output_dim < 1 {
            return Err(Error::Config("network.output_dim must be >= 1".into()));
        }
        if self.input_dim.len() == 0 {
            return Err(Error::Config("network.input_dim must be nonzero".into()));
        }
        if self.kind == NetKind::Conv {
            match self.input_dim {
                InputDim::Image { h, w, c } if h >= 2 && w >= 2 && c >= 1 => {}
                _ => {
                    return Err(Error::Config(
                        "conv networks require an image-shaped input_dim of at least 2x2".into(),
                    ))
                }
            }
        }
        Ok(())
    }

    /// Ordered (name, shape) descriptors for every parameter tensor.
    pub fn layout(&self) -> Vec<LayerShape> {
        let mut layers = Vec::new();
        let mut offset = 0usize;
        let mut push = |name: String, shape: Vec<usize>, offset: &mut usize| {
            let len: usize = shape.iter().product();
            layers.push(LayerShape {
                name,
                shape,
                offset: *offset,
            });
            *offset += len;
        };
        match self.kind {
            NetKind::Dense => {
                let dims = self.dense_dims();
                for l in 0..dims.len() - 1 {
                    push(format!("dense{l}.w"), vec![dims[l + 1], dims[l]], &mut offset);
                    push(format!("dense{l}.b"), vec![dims[l + 1]], &mut offset);
                }
            }
            NetKind::Conv => {
                let (_, _, c) = self.image_dims();
                let mut c_in = c;
                for l in 0..self.depth {
                    push(format!("conv{l}.k"), vec![self.width, c_in, 3, 3], &mut offset);
                    push(format!("conv{l}.b"), vec![self.width], &mut offset);
                    c_in = self.width;
                }
                push("head.w".into(), vec![self.output_dim, self.flatten_len()], &mut offset);
                push("head.b".into(), vec![self.output_dim], &mut offset);
            }
        }
        layers
    }

    pub fn param_count(&self) -> usize {
        self.layout()
            .iter()
            .map(|l| l.shape.iter().product::<usize>())
            .sum()
    }

    pub(crate) fn dense_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.depth + 2);
        dims.push(self.input_dim.len());
        for _ in 0..self.depth {
            dims.push(self.width);
        }
        dims.push(self.output_dim);
        dims
    }

    pub(crate) fn image_dims(&self) -> (usize, usize, usize) {
        match self.input_dim {
            InputDim::Image { h, w, c } => (h, w, c),
            InputDim::Flat(_) => unreachable!("validated: conv requires image input"),
        }
    }

    /// Length of the flattened features entering the dense head
    /// (after the 2x2 average pool).
    pub(crate) fn flatten_len(&self) -> usize {
        let (h, w, c) = self.image_dims();
        let ch = if self.depth == 0 { c } else { self.width };
        ch * (h / 2) * (w / 2)
    }
}

/// (name, shape, flat offset) descriptor of one parameter tensor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerShape {
    pub name: String,
    pub shape: Vec<usize>,
    pub offset: usize,
}

/// Flat parameter state plus the layout mapping offsets to layer tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    pub values: Vec<f64>,
    pub layout: Vec<LayerShape>,
}

impl ParamVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Per-sample Jacobian: for each output component, the gradient of that
/// output w.r.t. every parameter, stored row-major (output_dim x |theta|).
#[derive(Debug, Clone)]
pub struct SampleGradient {
    pub rows: Vec<f64>,
    pub output_dim: usize,
    pub param_count: usize,
}

impl SampleGradient {
    pub fn row(&self, o: usize) -> &[f64] {
        &self.rows[o * self.param_count..(o + 1) * self.param_count]
    }

    /// Squared Euclidean norm of the stacked Jacobian.
    pub fn squared_norm(&self) -> f64 {
        self.rows.iter().map(|g| g * g).sum()
    }
}

/// An instantiated network: spec plus parameters. Immutable during
/// evaluation; optimizer steps produce a new parameter state.
#[derive(Debug, Clone)]
pub struct Network {
    spec: NetworkSpec,
    params: ParamVector,
}

/// Build a network with LeCun-normal weights (std = 1/sqrt(fan_in)) and
/// zero biases, deterministically from (spec, seed).
pub fn build_network(spec: &NetworkSpec, seed: u64) -> Result<Network> {
    spec.validate()?;
    let layout = spec.layout();
    let total: usize = layout.iter().map(|l| l.shape.iter().product::<usize>()).sum();
    let mut values = vec![0.0f64; total];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for layer in &layout {
        let len: usize = layer.shape.iter().product();
        if layer.name.ends_with(".b") {
            continue; // biases start at zero
        }
        // fan_in: product of all shape dims past the first (out) axis.
        let fan_in: usize = layer.shape[1..].iter().product();
        let std = 1.0 / (fan_in as f64).sqrt();
        let normal = Normal::new(0.0, std).expect("std > 0");
        for v in &mut values[layer.offset..layer.offset + len] {
            *v = normal.sample(&mut rng);
        }
    }
    Ok(Network {
        spec: spec.clone(),
        params: ParamVector {
            values,
            layout,
        },
    })
}

impl Network {
    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn params(&self) -> &ParamVector {
        &self.params
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    /// Replace the parameter state, keeping the spec.
    pub fn with_params(&self, values: Vec<f64>) -> Result<Network> {
        if values.len() != self.params.len() {
            return Err(Error::Dimension(format!(
                "parameter vector length {} does not match network ({})",
                values.len(),
                self.params.len()
            )));
        }
        Ok(Network {
            spec: self.spec.clone(),
            params: ParamVector {
                values,
                layout: self.params.layout.clone(),
            },
        })
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        let expect = self.spec.input_dim.len();
        if x.len() != expect {
            return Err(Error::Dimension(format!(
                "input length {} does not match input_dim {}",
                x.len(),
                expect
            )));
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        Ok(match self.spec.kind {
            NetKind::Dense => dense::forward(self, x),
            NetKind::Conv => conv::forward(self, x),
        })
    }

    /// Jacobian-transpose-vector product: sum_o seed[o] * d f_o(x)/d theta.
    pub fn seeded_gradient(&self, x: &[f64], seed: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        if seed.len() != self.spec.output_dim {
            return Err(Error::Dimension(format!(
                "seed length {} does not match output_dim {}",
                seed.len(),
                self.spec.output_dim
            )));
        }
        Ok(match self.spec.kind {
            NetKind::Dense => dense::seeded_gradient(self, x, seed),
            NetKind::Conv => conv::seeded_gradient(self, x, seed),
        })
    }

    /// Full per-sample Jacobian, one backward pass per output component.
    pub fn per_sample_gradient(&self, x: &[f64]) -> Result<SampleGradient> {
        self.check_input(x)?;
        let o_dim = self.spec.output_dim;
        let p = self.param_count();
        let mut rows = vec![0.0f64; o_dim * p];
        let mut seed = vec![0.0f64; o_dim];
        for o in 0..o_dim {
            seed[o] = 1.0;
            let g = self.seeded_gradient(x, &seed)?;
            rows[o * p..(o + 1) * p].copy_from_slice(&g);
            seed[o] = 0.0;
        }
        Ok(SampleGradient {
            rows,
            output_dim: o_dim,
            param_count: p,
        })
    }

    /// Tangent-kernel entries (row-major n x n) without materializing
    /// Jacobian rows; available for dense networks only.
    pub(crate) fn factored_kernel(&self, xs: &[&[f64]]) -> Result<Option<Vec<f64>>> {
        if self.spec.kind != NetKind::Dense {
            return Ok(None);
        }
        for x in xs {
            self.check_input(x)?;
        }
        Ok(Some(dense::ntk_kernel(self, xs)))
    }

    /// Batched forward over many inputs. Dense networks go through one
    /// GEMM per layer; conv networks evaluate per sample.
    pub fn batch_forward(&self, xs: &[&[f64]]) -> Result<Vec<Vec<f64>>> {
        for x in xs {
            self.check_input(x)?;
        }
        Ok(match self.spec.kind {
            NetKind::Dense => dense::batch_forward(self, xs),
            NetKind::Conv => xs.iter().map(|x| conv::forward(self, x)).collect(),
        })
    }

    /// Aggregated parameter gradient sum_i J(x_i)^T * delta_i, computed by
    /// direct backpropagation (one backward pass per sample, GEMM-batched
    /// for dense networks).
    pub fn batch_gradient(&self, xs: &[&[f64]], deltas: &[Vec<f64>]) -> Result<Vec<f64>> {
        if xs.len() != deltas.len() {
            return Err(Error::Dimension(format!(
                "{} inputs but {} output deltas",
                xs.len(),
                deltas.len()
            )));
        }
        for x in xs {
            self.check_input(x)?;
        }
        for d in deltas {
            if d.len() != self.spec.output_dim {
                return Err(Error::Dimension(format!(
                    "delta length {} does not match output_dim {}",
                    d.len(),
                    self.spec.output_dim
                )));
            }
        }
        match self.spec.kind {
            NetKind::Dense => Ok(dense::batch_gradient(self, xs, deltas)),
            NetKind::Conv => {
                let p = self.param_count();
                let mut acc = vec![0.0f64; p];
                for (x, d) in xs.iter().zip(deltas) {
                    let g = conv::seeded_gradient(self, x, d);
                    for (a, gi) in acc.iter_mut().zip(&g) {
                        *a += gi;
                    }
                }
                Ok(acc)
            }
        }
    }
}
