//! TOML experiment configuration: documented schema, defaults,
//! validation, and canonical config hashing.
//!
//! Schema (all sections except `[network]` and `[data]` optional):
//!
//! ```toml
//! epochs = 50              # default 1
//! seed = 0                 # default 0
//!
//! [network]
//! kind = "dense"           # dense | conv
//! width = 64
//! depth = 2
//! activation = "relu"      # relu | tanh | linear; default relu
//! input_dim = 784          # or [28, 28, 1]; default from data name
//! output_dim = 10          # default from data name
//!
//! [optimizer]
//! method = "adam"          # adam | sgd; default adam
//! learning_rate = 1e-3     # default 1e-3
//! beta1 = 0.9
//! beta2 = 0.999
//! epsilon = 1e-8
//! batch_size = 32
//!
//! [data]
//! name = "mnist-fixture"   # mnist-fixture | mnist | synthetic-regression
//! subset = 500             # training-set size; default 200
//! seed = 0                 # default: top-level seed
//! loss = "cross_entropy"   # default by task
//!
//! [measurement]
//! cadence = 1
//! mode = "exact"           # exact | subsampled
//! subsample_m = 200
//! subsample_s = 20
//! splits = ["train", "test"]
//! pool_size = 128
//!
//! [scan]                   # presence turns the config into a grid
//! widths = [32, 64]
//! depths = [1, 2]
//! activations = ["relu"]
//! ```

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::harness::{
    DataConfig, ExperimentConfig, MeasurementConfig, NtkMode, ScanGrid,
};
use crate::nn::loss::LossKind;
use crate::nn::optim::{Method, OptimizerConfig};
use crate::nn::{Activation, InputDim, NetKind, NetworkSpec};
use crate::spectral::Split;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    epochs: Option<usize>,
    seed: Option<u64>,
    network: RawNetwork,
    optimizer: Option<RawOptimizer>,
    data: RawData,
    measurement: Option<RawMeasurement>,
    scan: Option<RawScan>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    kind: NetKind,
    width: i64,
    depth: i64,
    activation: Option<Activation>,
    input_dim: Option<toml::Value>,
    output_dim: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptimizer {
    method: Option<Method>,
    learning_rate: Option<f64>,
    beta1: Option<f64>,
    beta2: Option<f64>,
    epsilon: Option<f64>,
    batch_size: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawData {
    name: String,
    subset: Option<i64>,
    seed: Option<u64>,
    loss: Option<LossKind>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasurement {
    cadence: Option<i64>,
    mode: Option<String>,
    subsample_m: Option<i64>,
    subsample_s: Option<i64>,
    splits: Option<Vec<Split>>,
    pool_size: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScan {
    widths: Vec<i64>,
    depths: Vec<i64>,
    activations: Option<Vec<Activation>>,
}

/// A parsed configuration: one experiment, optionally with a scan grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedConfig {
    pub experiment: ExperimentConfig,
    pub scan: Option<ScanGrid>,
}

fn positive(value: i64, key: &str) -> Result<usize> {
    usize::try_from(value)
        .ok()
        .filter(|&v| v >= 1)
        .ok_or_else(|| Error::Config(format!("`{key}` must be a positive integer, got {value}")))
}

fn toml_line(text: &str, err: &toml::de::Error) -> usize {
    err.span()
        .map(|span| text[..span.start.min(text.len())].matches('\n').count() + 1)
        .unwrap_or(0)
}

fn toml_key(err: &toml::de::Error) -> String {
    // toml reports "unknown field `x`" / "missing field `x`"; pull the
    // backticked name when present
    let msg = err.message();
    msg.split('`').nth(1).unwrap_or("").to_string()
}

/// Parse and validate a configuration document, applying all defaults.
/// Unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
        line: toml_line(text, &e),
        key: toml_key(&e),
        message: e.message().to_string(),
    })?;

    let seed = raw.seed.unwrap_or(0);
    let data_name = raw.data.name.clone();
    let is_image = data_name.starts_with("mnist");

    let width = positive(raw.network.width, "network.width")?;
    let depth = usize::try_from(raw.network.depth)
        .map_err(|_| Error::Config(format!("`network.depth` must be >= 0, got {}", raw.network.depth)))?;

    let input_dim = match &raw.network.input_dim {
        Some(toml::Value::Integer(n)) => InputDim::Flat(positive(*n, "network.input_dim")?),
        Some(toml::Value::Array(arr)) if arr.len() == 3 => {
            let mut dims = [0usize; 3];
            for (i, v) in arr.iter().enumerate() {
                let n = v
                    .as_integer()
                    .ok_or_else(|| Error::Config("network.input_dim entries must be integers".into()))?;
                dims[i] = positive(n, "network.input_dim")?;
            }
            InputDim::Image {
                h: dims[0],
                w: dims[1],
                c: dims[2],
            }
        }
        Some(_) => {
            return Err(Error::Config(
                "network.input_dim must be an integer or a [h, w, c] triple".into(),
            ))
        }
        None => match (raw.network.kind, is_image) {
            (NetKind::Conv, true) => InputDim::Image { h: 28, w: 28, c: 1 },
            (NetKind::Dense, true) => InputDim::Flat(784),
            (_, false) if data_name == "synthetic-regression" => InputDim::Flat(7),
            _ => {
                return Err(Error::Config(format!(
                    "network.input_dim required for dataset `{data_name}`"
                )))
            }
        },
    };
    let output_dim = match raw.network.output_dim {
        Some(n) => positive(n, "network.output_dim")?,
        None if is_image => 10,
        None if data_name == "synthetic-regression" => 1,
        None => return Err(Error::Config("network.output_dim required".into())),
    };

    let network = NetworkSpec {
        kind: raw.network.kind,
        width,
        depth,
        activation: raw.network.activation.unwrap_or(Activation::Relu),
        input_dim,
        output_dim,
    };

    let opt_raw = raw.optimizer;
    let defaults = OptimizerConfig::adam(1e-3);
    let optimizer = OptimizerConfig {
        method: opt_raw.as_ref().and_then(|o| o.method).unwrap_or(Method::Adam),
        learning_rate: opt_raw
            .as_ref()
            .and_then(|o| o.learning_rate)
            .unwrap_or(defaults.learning_rate),
        beta1: opt_raw.as_ref().and_then(|o| o.beta1).unwrap_or(defaults.beta1),
        beta2: opt_raw.as_ref().and_then(|o| o.beta2).unwrap_or(defaults.beta2),
        epsilon: opt_raw.as_ref().and_then(|o| o.epsilon).unwrap_or(defaults.epsilon),
        batch_size: match opt_raw.as_ref().and_then(|o| o.batch_size) {
            Some(b) => positive(b, "optimizer.batch_size")?,
            None => defaults.batch_size,
        },
    };

    let loss = raw.data.loss.unwrap_or(if is_image {
        LossKind::CrossEntropy
    } else {
        LossKind::Mse
    });
    let data = DataConfig {
        name: data_name,
        subset: match raw.data.subset {
            Some(s) => positive(s, "data.subset")?,
            None => 200,
        },
        seed: raw.data.seed.unwrap_or(seed),
        loss,
    };

    let meas_defaults = MeasurementConfig::default();
    let measurement = match raw.measurement {
        None => meas_defaults,
        Some(m) => MeasurementConfig {
            cadence: match m.cadence {
                Some(c) => positive(c, "measurement.cadence")?,
                None => meas_defaults.cadence,
            },
            mode: match m.mode.as_deref() {
                None | Some("exact") => NtkMode::Exact,
                Some("subsampled") => NtkMode::Subsampled {
                    m: match m.subsample_m {
                        Some(v) => positive(v, "measurement.subsample_m")?,
                        None => 200,
                    },
                    s: match m.subsample_s {
                        Some(v) => positive(v, "measurement.subsample_s")?,
                        None => 20,
                    },
                },
                Some(other) => {
                    return Err(Error::Config(format!(
                        "measurement.mode must be `exact` or `subsampled`, got `{other}`"
                    )))
                }
            },
            splits: m.splits.unwrap_or(meas_defaults.splits),
            pool_size: match m.pool_size {
                Some(p) => positive(p, "measurement.pool_size")?,
                None => meas_defaults.pool_size,
            },
        },
    };

    let scan = match raw.scan {
        None => None,
        Some(s) => {
            let widths = s
                .widths
                .iter()
                .map(|&w| positive(w, "scan.widths"))
                .collect::<Result<Vec<_>>>()?;
            let depths = s
                .depths
                .iter()
                .map(|&d| {
                    usize::try_from(d)
                        .map_err(|_| Error::Config(format!("`scan.depths` must be >= 0, got {d}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let grid = ScanGrid {
                widths,
                depths,
                activations: s.activations.unwrap_or_else(|| vec![network.activation]),
            };
            grid.validate()?;
            Some(grid)
        }
    };

    let experiment = ExperimentConfig {
        network,
        optimizer,
        data,
        epochs: raw.epochs.unwrap_or(1),
        measurement,
        seed,
    };
    experiment.validate()?;
    Ok(ParsedConfig { experiment, scan })
}

/// Canonical text form of a parsed config (fixed key order), used for
/// config hashing and for re-emission.
pub fn canonical_text(cfg: &ParsedConfig) -> String {
    serde_json::to_string_pretty(cfg).expect("config serializes")
}

/// SHA-256 over the canonicalized config text, hex-encoded.
pub fn config_hash(cfg: &ParsedConfig) -> String {
    let digest = Sha256::digest(canonical_text(cfg).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[network]
kind = "dense"
width = 64
depth = 2

[data]
name = "mnist-fixture"
"#;

    #[test]
    fn minimal_config_gets_documented_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        let e = &cfg.experiment;
        assert_eq!(e.optimizer.method, Method::Adam);
        assert_eq!(e.optimizer.learning_rate, 1e-3);
        assert_eq!(e.measurement.cadence, 1);
        assert_eq!(e.network.input_dim, InputDim::Flat(784));
        assert_eq!(e.network.output_dim, 10);
        assert_eq!(e.data.loss, LossKind::CrossEntropy);
        assert!(cfg.scan.is_none());
    }

    #[test]
    fn negative_width_is_named_in_error() {
        let text = MINIMAL.replace("width = 64", "width = -3");
        match parse_config(&text) {
            Err(Error::Config(msg)) => assert!(msg.contains("network.width"), "{msg}"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_key_rejected_with_line_and_key() {
        let text = format!("{MINIMAL}\n[measurement]\nfrequency = 3\n");
        match parse_config(&text) {
            Err(Error::Parse { key, line, .. }) => {
                assert_eq!(key, "frequency");
                assert!(line > 0);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn key_order_does_not_change_hash() {
        let a = parse_config(MINIMAL).unwrap();
        let reordered = r#"
[data]
name = "mnist-fixture"

[network]
depth = 2
kind = "dense"
width = 64
"#;
        let b = parse_config(reordered).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let a = parse_config(MINIMAL).unwrap();
        let text1 = canonical_text(&a);
        let b: ParsedConfig = serde_json::from_str(&text1).unwrap();
        assert_eq!(canonical_text(&b), text1);
    }

    #[test]
    fn scan_section_parses() {
        let text = format!("{MINIMAL}\n[scan]\nwidths = [32, 64]\ndepths = [1, 2]\n");
        let cfg = parse_config(&text).unwrap();
        let grid = cfg.scan.unwrap();
        assert_eq!(grid.widths, vec![32, 64]);
        assert_eq!(grid.depths, vec![1, 2]);
        assert_eq!(grid.activations, vec![Activation::Relu]);
    }

    #[test]
    fn subsampled_mode_parses_with_defaults() {
        let text = format!("{MINIMAL}\n[measurement]\nmode = \"subsampled\"\n");
        let cfg = parse_config(&text).unwrap();
        assert_eq!(
            cfg.experiment.measurement.mode,
            NtkMode::Subsampled { m: 200, s: 20 }
        );
    }
}
