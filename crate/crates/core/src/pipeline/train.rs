//! Minibatch training of a separation model on the stacked two-source
//! objective.

use crate::audio::NUM_BINS;
use crate::error::{Error, Result};
use crate::network::{
    real_backward, real_forward, stacked_loss, stacked_loss_real, vp_backward, vp_forward, ModelKind, Network,
};
use crate::optim::{AdamState, Optimizer};
use crate::transform::TransformKind;

use super::checkpoint::ModelCheckpoint;
use super::config::{ExperimentConfig, OptimizerKind};
use super::dataset::{build_training_set, DatasetManifest, TrainingSet};
use super::features::Features;

/// A network together with the transform its inputs and outputs live in.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationModel {
    pub kind: ModelKind,
    pub network: Network,
    pub transform: TransformKind,
}

impl SeparationModel {
    /// Freshly initialized model for `config` at the standard STFT size.
    pub fn init(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        Ok(SeparationModel {
            kind: config.model,
            network: Network::init(config.model, &config.widths(NUM_BINS), config.seed)?,
            transform: config.transform,
        })
    }

    /// Frequency bins per source in the stacked output.
    pub fn bins(&self) -> usize {
        self.network.widths().last().copied().unwrap_or(0) / 2
    }

    pub fn input_rows(&self) -> usize {
        self.network.widths()[0]
    }

    pub fn forward(&self, input: &Features) -> Result<Features> {
        match (&self.network, input) {
            (Network::Vector(net), Features::Vector(x)) => Ok(Features::Vector(vp_forward(net, x)?.0)),
            (Network::Real(net), Features::Real(x)) => Ok(Features::Real(real_forward(net, x)?.0)),
            _ => Err(kind_mismatch()),
        }
    }

    /// Sum of `J` over the columns of one batch, and one optimizer step.
    fn train_step(&mut self, input: &Features, target: &Features, opt: &mut Optimizer) -> Result<f64> {
        match (&mut self.network, input, target) {
            (Network::Vector(net), Features::Vector(x), Features::Vector(z)) => {
                let (y, cache) = vp_forward(net, x)?;
                let (j, grad) = stacked_loss(&y, z)?;
                if j.is_finite() {
                    let grads = vp_backward(net, &cache, &grad)?;
                    opt.step(net, &grads)?;
                }
                Ok(j)
            }
            (Network::Real(net), Features::Real(x), Features::Real(z)) => {
                let (y, cache) = real_forward(net, x)?;
                let (j, grad) = stacked_loss_real(&y, z)?;
                if j.is_finite() {
                    let grads = real_backward(net, &cache, &grad)?;
                    opt.step(net, &grads)?;
                }
                Ok(j)
            }
            _ => Err(kind_mismatch()),
        }
    }
}

fn kind_mismatch() -> Error {
    Error::InvalidParameter("feature kind does not match the network family".into())
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub checkpoint: ModelCheckpoint,
    /// Mean `J` per frame for each epoch, in order.
    pub history: Vec<f64>,
}

/// Loads the train split and trains a fresh model.
pub fn train(config: &ExperimentConfig, manifest: &DatasetManifest) -> Result<TrainOutcome> {
    let set = build_training_set(manifest, config)?;
    train_on(config, &set)
}

/// Trains a fresh model on an already encoded training set.
pub fn train_on(config: &ExperimentConfig, set: &TrainingSet) -> Result<TrainOutcome> {
    let mut model = SeparationModel::init(config)?;
    if set.inputs.rows() != model.input_rows() {
        return Err(Error::ShapeMismatch {
            op: "train_on",
            left: (model.input_rows(), 0),
            right: (set.inputs.rows(), set.frames()),
        });
    }
    let mut opt = match config.optimizer {
        OptimizerKind::Adam => Optimizer::Adam(AdamState::new(config.adam, &model.network)?),
        OptimizerKind::Sgd => Optimizer::Sgd { lr: config.adam.lr },
    };
    let frames = set.frames() as f64;
    let mut history = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let mut total = 0.0;
        for cols in set.batch_order(config.batch_frames, epoch as u64) {
            let (x, z) = set.batch(&cols);
            let j = model.train_step(&x, &z, &mut opt)?;
            if !j.is_finite() {
                return Err(Error::Divergence { epoch, value: j });
            }
            total += j;
        }
        history.push(total / frames);
    }
    Ok(TrainOutcome {
        checkpoint: ModelCheckpoint::new(model, config.epochs, history.last().copied()),
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::Waveform;
    use crate::pipeline::dataset::ClipAudio;
    use crate::pipeline::synth::synth_clip;

    fn clips(n: u64) -> Vec<ClipAudio> {
        (0..n)
            .map(|i| {
                let (v, m) = synth_clip(0, i, 8000).unwrap();
                ClipAudio {
                    id: format!("c{i}"),
                    mix: v.mix(&m).unwrap(),
                    vocal: Some(v),
                    music: Some(m),
                }
            })
            .collect()
    }

    fn small(model: ModelKind) -> ExperimentConfig {
        let mut c = ExperimentConfig::for_model(model);
        c.hidden_width = 8;
        c.hidden_layers = 1;
        c.epochs = 3;
        c
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let mut c = small(ModelKind::Cvpnn);
        c.epochs = 0;
        let set = TrainingSet::from_clips(&clips(1), c.transform, c.seed).unwrap();
        let out = train_on(&c, &set).unwrap();
        assert!(out.history.is_empty());
        assert_eq!(out.checkpoint.model, SeparationModel::init(&c).unwrap());
        assert_eq!(out.checkpoint.final_j, None);
    }

    #[test]
    fn history_length_and_determinism() {
        for kind in ModelKind::ALL {
            let c = small(kind);
            let set = TrainingSet::from_clips(&clips(2), c.transform, c.seed).unwrap();
            let a = train_on(&c, &set).unwrap();
            let b = train_on(&c, &set).unwrap();
            assert_eq!(a.history.len(), 3, "{kind}");
            assert_eq!(a.history, b.history);
            assert_eq!(a.checkpoint.model, b.checkpoint.model);
            assert!(a.history.iter().all(|j| j.is_finite() && *j >= 0.0));
        }
    }

    #[test]
    fn silent_clip_encodes_to_zero_targets() {
        let silent = ClipAudio {
            id: "s".into(),
            mix: Waveform::silence(4000, 16000),
            vocal: Some(Waveform::silence(4000, 16000)),
            music: Some(Waveform::silence(4000, 16000)),
        };
        let set = TrainingSet::from_clips(&[silent], TransformKind::Identity, 0).unwrap();
        match (&set.inputs, &set.targets) {
            (Features::Real(x), Features::Real(z)) => {
                assert!(x.iter().chain(z.iter()).all(|&v| v == 0.0));
                assert_eq!(z.nrows(), 2 * NUM_BINS);
            }
            _ => panic!("real features expected"),
        }
    }

    #[test]
    fn batch_order_depends_on_seed_and_epoch() {
        let set = TrainingSet::from_clips(&clips(1), TransformKind::Window, 5).unwrap();
        assert_eq!(set.batch_order(16, 0), set.batch_order(16, 0));
        assert_ne!(set.batch_order(16, 0), set.batch_order(16, 1));
        let mut all: Vec<usize> = set.batch_order(16, 2).concat();
        all.sort_unstable();
        assert_eq!(all, (0..set.frames()).collect::<Vec<_>>());
    }
}
