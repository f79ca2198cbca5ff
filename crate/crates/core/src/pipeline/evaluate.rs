//! Test-split scoring and report tables.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::dataset::{ClipAudio, DatasetManifest, Split};
use super::framing::analysis_stft;
use super::separate::{separate, separate_with_magnitudes, Separation};
use super::train::SeparationModel;
use crate::error::{Error, Result};
use crate::eval::{aggregate_global, BssEvaluator, ClipMetrics, GlobalMetrics};

pub const TABLE_HEADER: &str = "model\tarch\tcontext\tGNSDR\tGSIR\tGSAR";
pub const CLIP_HEADER: &str =
    "clip_id\tsamples\tvocal_nsdr\tvocal_sir\tvocal_sar\tmusic_nsdr\tmusic_sir\tmusic_sar";
pub const TABLE_FILE: &str = "table.tsv";
pub const CLIPS_FILE: &str = "clips.tsv";

/// Row identity in the results table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelLabel {
    pub model: String,
    pub arch: String,
    pub context: usize,
}

/// Anything that can split a clip's mixture into vocal and music.
pub trait Separator: Sync {
    fn label(&self) -> ModelLabel;
    fn separate_clip(&self, clip: &ClipAudio) -> Result<Separation>;
}

impl Separator for SeparationModel {
    fn label(&self) -> ModelLabel {
        let widths = self.network.widths();
        let hidden = &widths[1..widths.len() - 1];
        let arch = match hidden {
            [] => "none".to_string(),
            [first, ..] if hidden.iter().all(|w| w == first) => format!("{first}x{}", hidden.len()),
            _ => hidden.iter().map(usize::to_string).collect::<Vec<_>>().join("-"),
        };
        ModelLabel {
            model: self.kind.name().to_string(),
            arch,
            context: self.kind.context(),
        }
    }

    fn separate_clip(&self, clip: &ClipAudio) -> Result<Separation> {
        separate(self, &clip.mix)
    }
}

/// Soft masks built from the true stem magnitudes. An upper bound for any
/// model that masks the mixture spectrogram.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdealSoftMask;

impl Separator for IdealSoftMask {
    fn label(&self) -> ModelLabel {
        ModelLabel {
            model: "IdealSoftMask".into(),
            arch: "oracle".into(),
            context: 1,
        }
    }

    fn separate_clip(&self, clip: &ClipAudio) -> Result<Separation> {
        let [vocal, music] = clip.references().ok_or_else(|| missing_refs(&clip.id))?;
        separate_with_magnitudes(&clip.mix, |framing| {
            Ok((
                analysis_stft(vocal, framing)?.magnitude(),
                analysis_stft(music, framing)?.magnitude(),
            ))
        })
    }
}

fn missing_refs(id: &str) -> Error {
    Error::Dataset(format!("test clip {id} has no reference stems"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClipReport {
    pub clip_id: String,
    /// Length at 16 kHz, the aggregation weight.
    pub samples: usize,
    pub vocal: ClipMetrics,
    pub music: ClipMetrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub label: ModelLabel,
    pub clips: Vec<ClipReport>,
    pub vocal: GlobalMetrics,
    pub music: GlobalMetrics,
}

impl EvaluationReport {
    pub fn from_clips(label: ModelLabel, clips: Vec<ClipReport>) -> Result<Self> {
        let lengths: Vec<usize> = clips.iter().map(|c| c.samples).collect();
        let vocal: Vec<ClipMetrics> = clips.iter().map(|c| c.vocal).collect();
        let music: Vec<ClipMetrics> = clips.iter().map(|c| c.music).collect();
        Ok(EvaluationReport {
            vocal: aggregate_global(&vocal, &lengths)?,
            music: aggregate_global(&music, &lengths)?,
            label,
            clips,
        })
    }

    /// Header plus one row of vocal global metrics. Reals are written in
    /// shortest round-trip form.
    pub fn table_tsv(&self) -> String {
        let l = &self.label;
        let g = &self.vocal;
        format!(
            "{TABLE_HEADER}\n{}\t{}\t{}\t{}\t{}\t{}\n",
            l.model, l.arch, l.context, g.gnsdr, g.gsir, g.gsar
        )
    }

    pub fn clips_tsv(&self) -> String {
        let mut out = format!("{CLIP_HEADER}\n");
        for c in &self.clips {
            let (v, m) = (&c.vocal, &c.music);
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                c.clip_id, c.samples, v.nsdr, v.sir, v.sar, m.nsdr, m.sir, m.sar
            )
            .expect("writing to a String");
        }
        out
    }

    /// Writes `table.tsv` and `clips.tsv` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<[PathBuf; 2]> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let paths = [dir.join(TABLE_FILE), dir.join(CLIPS_FILE)];
        std::fs::write(&paths[0], self.table_tsv()).map_err(|e| Error::io(&paths[0], e))?;
        std::fs::write(&paths[1], self.clips_tsv()).map_err(|e| Error::io(&paths[1], e))?;
        Ok(paths)
    }
}

/// Separates and scores one clip against its stems.
pub fn evaluate_clip(separator: &dyn Separator, clip: &ClipAudio, filter_len: usize) -> Result<ClipReport> {
    let [vocal, music] = clip.references().ok_or_else(|| missing_refs(&clip.id))?;
    let sep = separator.separate_clip(clip)?;
    let bss = BssEvaluator::new(&[vocal.clone(), music.clone()], filter_len)?;
    Ok(ClipReport {
        clip_id: clip.id.clone(),
        samples: clip.mix.len(),
        vocal: bss.clip_metrics(&sep.vocal, &clip.mix, 0)?,
        music: bss.clip_metrics(&sep.music, &clip.mix, 1)?,
    })
}

/// Scores every test clip in parallel; rows keep manifest order.
pub fn evaluate(
    separator: &dyn Separator,
    manifest: &DatasetManifest,
    filter_len: usize,
) -> Result<EvaluationReport> {
    let entries: Vec<_> = manifest.split(Split::Test).collect();
    if entries.is_empty() {
        return Err(Error::Dataset(format!(
            "test split of {} is empty",
            manifest.root().display()
        )));
    }
    let clips = entries
        .par_iter()
        .map(|e| evaluate_clip(separator, &manifest.load_clip(e)?, filter_len))
        .collect::<Result<Vec<_>>>()?;
    EvaluationReport::from_clips(separator.label(), clips)
}
