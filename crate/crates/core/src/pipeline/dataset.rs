//! Paired-stem corpus layout and training-set construction.
//!
//! ```text
//! <root>/manifest.tsv            clip_id <TAB> split <TAB> duration
//! <root>/<clip_id>/vocal.wav
//! <root>/<clip_id>/music.wav
//! <root>/<clip_id>/mix.wav       optional when both stems exist
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::features::{encode_input, encode_target, Features};
use super::framing::{analysis_stft, Framing};
use crate::audio::{resample_to_16k, wav_read, Waveform};
use crate::error::{Error, Result};
use crate::transform::{normalize, normalize_with_scale, MagnitudeMatrix, TransformKind};

pub const MANIFEST_FILE: &str = "manifest.tsv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            _ => Err(Error::Dataset(format!("unknown split `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipEntry {
    pub clip_id: String,
    pub split: Split,
    /// Seconds.
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    root: PathBuf,
    clips: Vec<ClipEntry>,
}

/// One clip at 16 kHz. `mix` is the sample-wise stem sum when stems exist.
#[derive(Debug, Clone)]
pub struct ClipAudio {
    pub id: String,
    pub mix: Waveform,
    pub vocal: Option<Waveform>,
    pub music: Option<Waveform>,
}

impl ClipAudio {
    pub fn references(&self) -> Option<[&Waveform; 2]> {
        match (&self.vocal, &self.music) {
            (Some(v), Some(m)) => Some([v, m]),
            _ => None,
        }
    }
}

impl DatasetManifest {
    pub fn new(root: impl Into<PathBuf>, clips: Vec<ClipEntry>) -> Self {
        DatasetManifest {
            root: root.into(),
            clips,
        }
    }

    pub fn load(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref();
        let path = root.join(MANIFEST_FILE);
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .from_path(&path)
            .map_err(|e| Error::Dataset(format!("{}: {e}", path.display())))?;
        let clips = reader
            .deserialize()
            .collect::<Result<Vec<ClipEntry>, _>>()
            .map_err(|e| Error::Dataset(format!("{}: {e}", path.display())))?;
        Ok(DatasetManifest::new(root, clips))
    }

    pub fn save(&self) -> Result<()> {
        let path = self.root.join(MANIFEST_FILE);
        let mut writer = csv::WriterBuilder::new()
            .delimiter(b'\t')
            .from_path(&path)
            .map_err(|e| Error::Dataset(format!("{}: {e}", path.display())))?;
        for c in &self.clips {
            writer
                .serialize(c)
                .map_err(|e| Error::Dataset(format!("{}: {e}", path.display())))?;
        }
        writer.flush().map_err(|e| Error::io(&path, e))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn clips(&self) -> &[ClipEntry] {
        &self.clips
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &ClipEntry> {
        self.clips.iter().filter(move |c| c.split == split)
    }

    pub fn clip_dir(&self, clip: &ClipEntry) -> PathBuf {
        self.root.join(&clip.clip_id)
    }

    /// Reads and resamples a clip. Stems win over `mix.wav` when present.
    pub fn load_clip(&self, clip: &ClipEntry) -> Result<ClipAudio> {
        let dir = self.clip_dir(clip);
        let (vocal_path, music_path, mix_path) =
            (dir.join("vocal.wav"), dir.join("music.wav"), dir.join("mix.wav"));
        if vocal_path.exists() && music_path.exists() {
            let vocal = wav_read(&vocal_path)?;
            let music = wav_read(&music_path)?;
            if vocal.len() != music.len() || vocal.sample_rate() != music.sample_rate() {
                return Err(Error::Dataset(format!(
                    "clip {}: stems differ in length or rate ({} vs {} samples)",
                    clip.clip_id,
                    vocal.len(),
                    music.len()
                )));
            }
            let vocal = resample_to_16k(&vocal)?;
            let music = resample_to_16k(&music)?;
            let mix = vocal.mix(&music)?;
            Ok(ClipAudio {
                id: clip.clip_id.clone(),
                mix,
                vocal: Some(vocal),
                music: Some(music),
            })
        } else if mix_path.exists() {
            Ok(ClipAudio {
                id: clip.clip_id.clone(),
                mix: resample_to_16k(&wav_read(&mix_path)?)?,
                vocal: None,
                music: None,
            })
        } else {
            Err(Error::Dataset(format!(
                "clip {}: no stems or mixture under {}",
                clip.clip_id,
                dir.display()
            )))
        }
    }
}

/// Normalized magnitudes of a clip's mixture and stems on a shared scale.
#[derive(Debug, Clone)]
pub struct ClipMagnitudes {
    pub mix: MagnitudeMatrix,
    pub vocal: MagnitudeMatrix,
    pub music: MagnitudeMatrix,
}

pub fn clip_magnitudes(clip: &ClipAudio) -> Result<ClipMagnitudes> {
    let [vocal, music] = clip
        .references()
        .ok_or_else(|| Error::Dataset(format!("clip {} has no reference stems", clip.id)))?;
    let framing = Framing::for_len(clip.mix.len());
    let mix = normalize(&analysis_stft(&clip.mix, &framing)?.magnitude())?;
    let scale = mix.scale();
    let vocal = normalize_with_scale(&analysis_stft(vocal, &framing)?.magnitude(), scale)?;
    let music = normalize_with_scale(&analysis_stft(music, &framing)?.magnitude(), scale)?;
    Ok(ClipMagnitudes { mix, vocal, music })
}

/// Encoded inputs and stacked `[vocal; music]` targets, one column per frame.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    pub inputs: Features,
    pub targets: Features,
    pub clip_ids: Vec<String>,
    seed: u64,
}

impl TrainingSet {
    pub fn from_clips(clips: &[ClipAudio], transform: TransformKind, seed: u64) -> Result<Self> {
        if clips.is_empty() {
            return Err(Error::Dataset("training split is empty".into()));
        }
        let mut inputs = Vec::with_capacity(clips.len());
        let mut targets = Vec::with_capacity(clips.len());
        for clip in clips {
            let m = clip_magnitudes(clip)?;
            inputs.push(encode_input(&m.mix, transform)?);
            targets.push(encode_target(&m.vocal, &m.music, transform)?);
        }
        Ok(TrainingSet {
            inputs: Features::hstack(&inputs)?,
            targets: Features::hstack(&targets)?,
            clip_ids: clips.iter().map(|c| c.id.clone()).collect(),
            seed,
        })
    }

    pub fn frames(&self) -> usize {
        self.inputs.cols()
    }

    /// Frame indices shuffled for `epoch` and cut into batches. Depends only
    /// on the seed and the epoch number.
    pub fn batch_order(&self, batch_frames: usize, epoch: u64) -> Vec<Vec<usize>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(epoch);
        let mut order: Vec<usize> = (0..self.frames()).collect();
        order.shuffle(&mut rng);
        order.chunks(batch_frames.max(1)).map(<[usize]>::to_vec).collect()
    }

    pub fn batch(&self, cols: &[usize]) -> (Features, Features) {
        (self.inputs.select_cols(cols), self.targets.select_cols(cols))
    }
}

/// Loads the train split and encodes it for the configured model. Test
/// clips are never read.
pub fn build_training_set(manifest: &DatasetManifest, config: &ExperimentConfig) -> Result<TrainingSet> {
    config.validate()?;
    let clips = manifest
        .split(Split::Train)
        .map(|c| manifest.load_clip(c))
        .collect::<Result<Vec<_>>>()?;
    TrainingSet::from_clips(&clips, config.transform, config.seed)
}
