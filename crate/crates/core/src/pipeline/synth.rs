//! Synthetic paired-stem corpus with an easily separable vocal and
//! accompaniment.
//!
//! The "vocal" is a sequence of half-second vibrato notes between 200 and
//! 400 Hz with two harmonics, some of them rests. The "music" is a sustained
//! low triad (80 to 160 Hz) plus band-limited noise centred near 3 kHz.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dataset::{ClipEntry, DatasetManifest, Split};
use crate::audio::{wav_write, Waveform, TARGET_RATE};
use crate::error::{Error, Result};

const NOTE_SECS: f64 = 0.5;
const REST_PROBABILITY: f64 = 0.2;
const FADE_SECS: f64 = 0.01;
const VIBRATO_HZ: f64 = 5.5;
const VIBRATO_DEPTH: f64 = 0.02;
const VOCAL_GAIN: f64 = 0.25;
const TRIAD_GAIN: f64 = 0.1;
const NOISE_GAIN: f64 = 0.15;
const NOISE_CENTRE_HZ: f64 = 3000.0;
const NOISE_Q: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub seed: u64,
    pub train_clips: usize,
    pub test_clips: usize,
    pub duration_s: f64,
}

/// Writes `vocal.wav`, `music.wav`, `mix.wav` per clip (PCM16, 16 kHz) and a
/// manifest under `root`. Output depends only on `spec`.
pub fn synth_dataset(root: impl AsRef<Path>, spec: &SynthSpec) -> Result<DatasetManifest> {
    if !spec.duration_s.is_finite() || spec.duration_s < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "clip duration must be at least 1 s, got {}",
            spec.duration_s
        )));
    }
    let root = root.as_ref();
    let len = (spec.duration_s * TARGET_RATE as f64).round() as usize;
    let mut entries = Vec::with_capacity(spec.train_clips + spec.test_clips);
    let splits = std::iter::repeat_n(Split::Train, spec.train_clips)
        .chain(std::iter::repeat_n(Split::Test, spec.test_clips));
    for (index, split) in splits.enumerate() {
        let clip_id = format!("{split}_{index:03}");
        let (vocal, music) = synth_clip(spec.seed, index as u64, len)?;
        let dir = root.join(&clip_id);
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        wav_write(dir.join("vocal.wav"), &vocal)?;
        wav_write(dir.join("music.wav"), &music)?;
        wav_write(dir.join("mix.wav"), &vocal.mix(&music)?)?;
        entries.push(ClipEntry {
            clip_id,
            split,
            duration: len as f64 / TARGET_RATE as f64,
        });
    }
    let manifest = DatasetManifest::new(root, entries);
    manifest.save()?;
    Ok(manifest)
}

/// The `(vocal, music)` pair for clip `index` of a corpus seeded by `seed`.
pub fn synth_clip(seed: u64, index: u64, len: usize) -> Result<(Waveform, Waveform)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let vocal = synth_vocal(&mut rng, len);
    let music = synth_music(&mut rng, len);
    Ok((
        Waveform::new(vocal, TARGET_RATE)?,
        Waveform::new(music, TARGET_RATE)?,
    ))
}

fn synth_vocal(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let fs = TARGET_RATE as f64;
    let note_len = (NOTE_SECS * fs) as usize;
    let fade = (FADE_SECS * fs) as usize;
    let mut out = vec![0.0; len];
    for (n, chunk) in out.chunks_mut(note_len).enumerate() {
        let rest = rng.gen_bool(REST_PROBABILITY) && n > 0;
        let f0 = rng.gen_range(200.0..400.0);
        let vib_phase = rng.gen_range(0.0..2.0 * PI);
        if rest {
            continue;
        }
        let mut phase = 0.0;
        let m = chunk.len();
        for (i, y) in chunk.iter_mut().enumerate() {
            let t = i as f64 / fs;
            let f = f0 * (1.0 + VIBRATO_DEPTH * (2.0 * PI * VIBRATO_HZ * t + vib_phase).sin());
            phase += 2.0 * PI * f / fs;
            let env = (i.min(m - 1 - i) as f64 / fade as f64).min(1.0);
            *y = VOCAL_GAIN * env * (phase.sin() + 0.5 * (2.0 * phase).sin() + 0.25 * (3.0 * phase).sin());
        }
    }
    out
}

fn synth_music(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let fs = TARGET_RATE as f64;
    let root = rng.gen_range(80.0..106.0);
    let triad = [root, root * 1.26, root * 1.5];
    let phases: Vec<f64> = triad.iter().map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    let noise: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let filtered = bandpass(&noise, NOISE_CENTRE_HZ, NOISE_Q, fs);
    (0..len)
        .map(|i| {
            let t = i as f64 / fs;
            let tones: f64 = triad
                .iter()
                .zip(&phases)
                .map(|(f, p)| (2.0 * PI * f * t + p).sin())
                .sum();
            TRIAD_GAIN * tones + NOISE_GAIN * filtered[i]
        })
        .collect()
}

/// Constant 0 dB peak-gain biquad band-pass (audio EQ cookbook form).
fn bandpass(x: &[f64], centre: f64, q: f64, fs: f64) -> Vec<f64> {
    let w0 = 2.0 * PI * centre / fs;
    let alpha = w0.sin() / (2.0 * q);
    let a0 = 1.0 + alpha;
    let (b0, b2) = (alpha / a0, -alpha / a0);
    let (a1, a2) = (-2.0 * w0.cos() / a0, (1.0 - alpha) / a0);
    let (mut x1, mut x2, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0);
    x.iter()
        .map(|&x0| {
            let y0 = b0 * x0 + b2 * x2 - a1 * y1 - a2 * y2;
            (x2, x1, y2, y1) = (x1, x0, y1, y0);
            y0
        })
        .collect()
}
