//! Data handling, training, separation and evaluation on top of the model
//! and signal primitives.

pub mod checkpoint;
pub mod config;
pub mod dataset;
pub mod evaluate;
pub mod features;
pub mod framing;
pub mod separate;
pub mod synth;
pub mod train;

pub use checkpoint::{checkpoint_load, checkpoint_load_as, checkpoint_save, ModelCheckpoint};
pub use config::{ExperimentConfig, OptimizerKind};
pub use dataset::{build_training_set, ClipAudio, ClipEntry, DatasetManifest, Split, TrainingSet};
pub use evaluate::{
    evaluate, evaluate_clip, ClipReport, EvaluationReport, IdealSoftMask, ModelLabel, Separator,
};
pub use features::{decode_output, encode_input, encode_target, Features};
pub use framing::{analysis_stft, Framing};
pub use separate::{separate, separate_file, separate_with_magnitudes, Separation};
pub use synth::{synth_dataset, SynthSpec};
pub use train::{train, train_on, SeparationModel, TrainOutcome};
