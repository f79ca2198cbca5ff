//! Experiment configuration in a flat `key = value` text format.
//!
//! ```text
//! # comments start with '#'
//! model = CVPNN
//! hidden_width = 512
//! hidden_layers = 3
//! transform = color        # none | window | color
//! color_n = 0.0938
//! optimizer = adam         # adam | sgd
//! lr = 0.001
//! beta1 = 0.9
//! beta2 = 0.999
//! epsilon = 1e-8
//! batch_frames = 128
//! epochs = 100
//! seed = 0
//! filter_len = 512
//! data_root = data/synth
//! ```
//!
//! Keys that are not set take the model's defaults (hidden width per model,
//! transform matching the model).

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::eval::DEFAULT_FILTER_LEN;
use crate::network::ModelKind;
use crate::optim::AdamConfig;
use crate::transform::{ColorParams, TransformKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizerKind {
    Adam,
    Sgd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub hidden_width: usize,
    pub hidden_layers: usize,
    pub transform: TransformKind,
    pub optimizer: OptimizerKind,
    pub adam: AdamConfig,
    pub batch_frames: usize,
    pub epochs: usize,
    pub seed: u64,
    pub filter_len: usize,
    pub data_root: Option<PathBuf>,
}

pub const DEFAULT_EPOCHS: usize = 100;
pub const DEFAULT_BATCH_FRAMES: usize = 128;

impl ExperimentConfig {
    /// Defaults for one of the five architectures.
    pub fn for_model(model: ModelKind) -> Self {
        ExperimentConfig {
            model,
            hidden_width: model.default_hidden_width(),
            hidden_layers: ModelKind::DEFAULT_HIDDEN_LAYERS,
            transform: default_transform(model),
            optimizer: OptimizerKind::Adam,
            adam: AdamConfig::default(),
            batch_frames: DEFAULT_BATCH_FRAMES,
            epochs: DEFAULT_EPOCHS,
            seed: 0,
            filter_len: DEFAULT_FILTER_LEN,
            data_root: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let pairs = parse_pairs(text)?;
        let model = match pairs.iter().find(|(k, _)| k == "model") {
            Some((_, v)) => v.parse()?,
            None => ModelKind::Cvpnn,
        };
        let mut cfg = ExperimentConfig::for_model(model);
        for (k, v) in &pairs {
            if k != "model" {
                cfg.set(k, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ExperimentConfig::parse(&text)
    }

    /// Applies one `key = value` override. Changing `model` resets the width
    /// and transform to that model's defaults.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("invalid {what} `{value}` for key `{key}`"));
        match key {
            "model" => {
                let m: ModelKind = value.parse()?;
                self.model = m;
                self.hidden_width = m.default_hidden_width();
                self.transform = default_transform(m);
            }
            "hidden_width" => self.hidden_width = value.parse().map_err(|_| bad("integer"))?,
            "hidden_layers" => self.hidden_layers = value.parse().map_err(|_| bad("integer"))?,
            "transform" => {
                let n = match self.transform {
                    TransformKind::Color(p) => p,
                    _ => ColorParams::default(),
                };
                self.transform = match value {
                    "none" => TransformKind::Identity,
                    "window" if self.model.is_vector() => TransformKind::Window,
                    "window" => TransformKind::ContextStack,
                    "color" => TransformKind::Color(n),
                    _ => return Err(bad("transform")),
                };
            }
            "color_n" => {
                let n: f64 = value.parse().map_err(|_| bad("number"))?;
                let p = ColorParams::new(n).map_err(|e| Error::Config(e.to_string()))?;
                if let TransformKind::Color(_) = self.transform {
                    self.transform = TransformKind::Color(p);
                } else {
                    return Err(Error::Config(format!(
                        "color_n given but transform is `{}`",
                        self.transform.name()
                    )));
                }
            }
            "optimizer" => {
                self.optimizer = match value {
                    "adam" => OptimizerKind::Adam,
                    "sgd" => OptimizerKind::Sgd,
                    _ => return Err(bad("optimizer")),
                }
            }
            "lr" => self.adam.lr = value.parse().map_err(|_| bad("number"))?,
            "beta1" => self.adam.beta1 = value.parse().map_err(|_| bad("number"))?,
            "beta2" => self.adam.beta2 = value.parse().map_err(|_| bad("number"))?,
            "epsilon" => self.adam.epsilon = value.parse().map_err(|_| bad("number"))?,
            "batch_frames" => self.batch_frames = value.parse().map_err(|_| bad("integer"))?,
            "epochs" => self.epochs = value.parse().map_err(|_| bad("integer"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("integer"))?,
            "filter_len" => self.filter_len = value.parse().map_err(|_| bad("integer"))?,
            "data_root" => self.data_root = Some(PathBuf::from(value)),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let expected = default_transform(self.model);
        let consistent = matches!(
            (expected, self.transform),
            (TransformKind::Identity, TransformKind::Identity)
                | (TransformKind::ContextStack, TransformKind::ContextStack)
                | (TransformKind::Window, TransformKind::Window)
                | (TransformKind::Color(_), TransformKind::Color(_))
        );
        if !consistent {
            return Err(Error::Config(format!(
                "model {} cannot use transform `{}` (expected `{}`)",
                self.model,
                config_transform_name(self.transform),
                config_transform_name(expected)
            )));
        }
        if self.hidden_width == 0 {
            return Err(Error::Config("hidden_width must be > 0".into()));
        }
        if self.batch_frames == 0 {
            return Err(Error::Config("batch_frames must be > 0".into()));
        }
        if self.filter_len == 0 {
            return Err(Error::Config("filter_len must be > 0".into()));
        }
        self.adam.validate().map_err(|e| Error::Config(e.to_string()))
    }

    /// Input→output widths for `bins` frequency bins.
    pub fn widths(&self, bins: usize) -> Vec<usize> {
        self.model.widths(bins, self.hidden_width, self.hidden_layers)
    }

    /// The `key = value` text that [`ExperimentConfig::parse`] reads back.
    pub fn to_text(&self) -> String {
        let mut lines = vec![
            format!("model = {}", self.model),
            format!("hidden_width = {}", self.hidden_width),
            format!("hidden_layers = {}", self.hidden_layers),
            format!("transform = {}", config_transform_name(self.transform)),
        ];
        if let TransformKind::Color(p) = self.transform {
            lines.push(format!("color_n = {}", p.n()));
        }
        lines.push(format!(
            "optimizer = {}",
            match self.optimizer {
                OptimizerKind::Adam => "adam",
                OptimizerKind::Sgd => "sgd",
            }
        ));
        lines.push(format!("lr = {}", self.adam.lr));
        lines.push(format!("beta1 = {}", self.adam.beta1));
        lines.push(format!("beta2 = {}", self.adam.beta2));
        lines.push(format!("epsilon = {}", self.adam.epsilon));
        lines.push(format!("batch_frames = {}", self.batch_frames));
        lines.push(format!("epochs = {}", self.epochs));
        lines.push(format!("seed = {}", self.seed));
        lines.push(format!("filter_len = {}", self.filter_len));
        if let Some(root) = &self.data_root {
            lines.push(format!("data_root = {}", root.display()));
        }
        lines.join("\n") + "\n"
    }
}

fn default_transform(model: ModelKind) -> TransformKind {
    match model {
        ModelKind::Dnn1 | ModelKind::Dnn2 => TransformKind::Identity,
        ModelKind::Dnn3 => TransformKind::ContextStack,
        ModelKind::Wvpnn => TransformKind::Window,
        ModelKind::Cvpnn => TransformKind::Color(ColorParams::default()),
    }
}

/// Config-file spelling: both context transforms are `window`.
fn config_transform_name(t: TransformKind) -> &'static str {
    match t {
        TransformKind::Identity => "none",
        TransformKind::ContextStack | TransformKind::Window => "window",
        TransformKind::Color(_) => "color",
    }
}

/// Splits `key = value` lines, dropping blanks and `#` comments.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                return None;
            }
            Some(match line.split_once('=') {
                Some((k, v)) => Ok((k.trim().to_string(), v.trim().to_string())),
                None => Err(Error::Config(format!(
                    "line {}: expected key = value, got `{raw}`",
                    i + 1
                ))),
            })
        })
        .collect()
}
