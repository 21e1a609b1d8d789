//! Desk-scale datasets: IDX loading, a synthetic tabular regression
//! task, a bundled digit-image fixture, splits, and normalization.

pub mod fixture;
pub mod idx;
pub mod synth;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::loss::Target;
use crate::nn::InputDim;

/// Normalization applied to the inputs, recorded so it can be inverted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Normalization {
    PerFeatureStandard { means: Vec<f64>, stds: Vec<f64> },
    PixelUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormScheme {
    PerFeatureStandard,
    PixelUnit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<Target>,
    pub input_dim: InputDim,
    /// Set for classification data.
    pub num_classes: Option<usize>,
    pub normalization: Option<Normalization>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_refs(&self) -> Vec<&[f64]> {
        self.inputs.iter().map(|x| x.as_slice()).collect()
    }

    /// Class index of point i, if this is classification data.
    fn class_of(&self, i: usize) -> Option<usize> {
        match &self.targets[i] {
            Target::Class(c) => Some(*c),
            Target::Vector(_) => None,
        }
    }

    fn take_indices(&self, indices: &[usize]) -> Dataset {
        Dataset {
            inputs: indices.iter().map(|&i| self.inputs[i].clone()).collect(),
            targets: indices.iter().map(|&i| self.targets[i].clone()).collect(),
            input_dim: self.input_dim,
            num_classes: self.num_classes,
            normalization: self.normalization.clone(),
        }
    }
}

const STD_FLOOR: f64 = 1e-8;

/// Normalize inputs; the parameters are recorded on the result.
pub fn normalize(dataset: &Dataset, scheme: NormScheme) -> Result<Dataset> {
    if dataset.is_empty() {
        return Err(Error::Config("cannot normalize an empty dataset".into()));
    }
    let d = dataset.inputs[0].len();
    let mut out = dataset.clone();
    match scheme {
        NormScheme::PixelUnit => {
            for x in &mut out.inputs {
                for v in x.iter_mut() {
                    *v /= 255.0;
                }
            }
            out.normalization = Some(Normalization::PixelUnit);
        }
        NormScheme::PerFeatureStandard => {
            let n = dataset.len() as f64;
            let mut means = vec![0.0f64; d];
            for x in &dataset.inputs {
                for (m, v) in means.iter_mut().zip(x) {
                    *m += v;
                }
            }
            for m in &mut means {
                *m /= n;
            }
            let mut stds = vec![0.0f64; d];
            for x in &dataset.inputs {
                for ((s, v), m) in stds.iter_mut().zip(x).zip(&means) {
                    *s += (v - m) * (v - m);
                }
            }
            for s in &mut stds {
                *s = (*s / n).sqrt().max(STD_FLOOR);
            }
            for x in &mut out.inputs {
                for ((v, m), s) in x.iter_mut().zip(&means).zip(&stds) {
                    *v = (*v - m) / s;
                }
            }
            out.normalization = Some(Normalization::PerFeatureStandard { means, stds });
        }
    }
    Ok(out)
}

/// Invert the recorded normalization.
pub fn denormalize(dataset: &Dataset) -> Result<Dataset> {
    let mut out = dataset.clone();
    match &dataset.normalization {
        None => return Err(Error::Config("dataset carries no normalization record".into())),
        Some(Normalization::PixelUnit) => {
            for x in &mut out.inputs {
                for v in x.iter_mut() {
                    *v *= 255.0;
                }
            }
        }
        Some(Normalization::PerFeatureStandard { means, stds }) => {
            for x in &mut out.inputs {
                for ((v, m), s) in x.iter_mut().zip(means).zip(stds) {
                    *v = *v * s + m;
                }
            }
        }
    }
    out.normalization = None;
    Ok(out)
}

/// Deterministic uniform sample of k points without replacement.
/// Classification data with k >= num_classes is stratified by class
/// (largest-remainder allocation).
pub fn subset(dataset: &Dataset, k: usize, seed: u64) -> Result<Dataset> {
    let n = dataset.len();
    if k > n {
        return Err(Error::Config(format!("subset size {k} exceeds dataset size {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let indices: Vec<usize> = match dataset.num_classes {
        Some(classes) if k >= classes => {
            let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); classes];
            for i in 0..n {
                if let Some(c) = dataset.class_of(i) {
                    by_class[c].push(i);
                }
            }
            // largest-remainder allocation proportional to class sizes
            let mut alloc: Vec<usize> = Vec::with_capacity(classes);
            let mut remainders: Vec<(f64, usize)> = Vec::with_capacity(classes);
            let mut assigned = 0usize;
            for (c, members) in by_class.iter().enumerate() {
                let exact = k as f64 * members.len() as f64 / n as f64;
                let base = (exact.floor() as usize).min(members.len());
                alloc.push(base);
                assigned += base;
                remainders.push((exact - exact.floor(), c));
            }
            remainders.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
            let mut r = 0;
            while assigned < k {
                let c = remainders[r % classes].1;
                if alloc[c] < by_class[c].len() {
                    alloc[c] += 1;
                    assigned += 1;
                }
                r += 1;
            }
            let mut picked = Vec::with_capacity(k);
            for (c, members) in by_class.iter().enumerate() {
                let mut pool = members.clone();
                pool.shuffle(&mut rng);
                picked.extend(pool.into_iter().take(alloc[c]));
            }
            picked.sort_unstable();
            picked
        }
        _ => {
            let mut idx = rand::seq::index::sample(&mut rng, n, k).into_vec();
            idx.sort_unstable();
            idx
        }
    };
    Ok(dataset.take_indices(&indices))
}

/// Disjoint train/test split: n_train points to train, the rest to test,
/// after a seeded shuffle.
pub fn split_train_test(dataset: &Dataset, n_train: usize, seed: u64) -> Result<(Dataset, Dataset)> {
    let n = dataset.len();
    if n_train == 0 || n_train >= n {
        return Err(Error::Config(format!(
            "train size {n_train} must lie in 1..{n}"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    let (train_idx, test_idx) = idx.split_at(n_train);
    let mut train_idx = train_idx.to_vec();
    let mut test_idx = test_idx.to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((dataset.take_indices(&train_idx), dataset.take_indices(&test_idx)))
}
