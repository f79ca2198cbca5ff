use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use super::Waveform;
use crate::error::{Error, Result};

/// PCM16 full scale. Reading divides by it and writing multiplies by it, so
/// PCM16 data survives a read/write cycle unchanged.
const PCM16_SCALE: f64 = 32768.0;

/// Channel of a stereo file. Stereo stems keep their channels as separate
/// signals (e.g. accompaniment left, vocal right).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Left,
    Right,
}

fn wav_err(path: &Path) -> impl FnOnce(hound::Error) -> Error + '_ {
    move |source| Error::Wav {
        path: path.to_path_buf(),
        source,
    }
}

/// All channels of a PCM16 or float32 WAV file, de-interleaved.
pub fn wav_read_channels(path: impl AsRef<Path>) -> Result<Vec<Waveform>> {
    let path = path.as_ref();
    let mut reader = WavReader::open(path).map_err(wav_err(path))?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(Error::UnsupportedFormat("zero channels".into()));
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / PCM16_SCALE))
            .collect::<Result<_, _>>()
            .map_err(wav_err(path))?,
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<Result<_, _>>()
            .map_err(wav_err(path))?,
        (fmt, bits) => {
            return Err(Error::UnsupportedFormat(format!(
                "{}: {bits}-bit {fmt:?} (expected PCM16 or float32)",
                path.display()
            )))
        }
    };
    (0..channels)
        .map(|c| {
            let samples = interleaved.iter().skip(c).step_by(channels).copied().collect();
            Waveform::new(samples, spec.sample_rate)
        })
        .collect()
}

/// First channel of the file (the only one for mono files).
pub fn wav_read(path: impl AsRef<Path>) -> Result<Waveform> {
    wav_read_channel(path, Channel::Left)
}

pub fn wav_read_channel(path: impl AsRef<Path>, channel: Channel) -> Result<Waveform> {
    let path = path.as_ref();
    let mut channels = wav_read_channels(path)?;
    match channel {
        Channel::Left => Ok(channels.swap_remove(0)),
        Channel::Right if channels.len() >= 2 => Ok(channels.swap_remove(1)),
        Channel::Right => Err(Error::UnsupportedFormat(format!(
            "{} is mono; no right channel",
            path.display()
        ))),
    }
}

/// Mono PCM16. Samples outside `[-1, 1)` are clipped.
pub fn wav_write(path: impl AsRef<Path>, w: &Waveform) -> Result<()> {
    let path = path.as_ref();
    let spec = WavSpec {
        channels: 1,
        sample_rate: w.sample_rate(),
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut writer = WavWriter::create(path, spec).map_err(wav_err(path))?;
    for &s in w.samples() {
        let q = (s * PCM16_SCALE).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16;
        writer.write_sample(q).map_err(wav_err(path))?;
    }
    writer.finalize().map_err(wav_err(path))
}

/// Mono float32.
pub fn wav_write_f32(path: impl AsRef<Path>, w: &Waveform) -> Result<()> {
    let path = path.as_ref();
    let spec = WavSpec {
        channels: 1,
        sample_rate: w.sample_rate(),
        bits_per_sample: 32,
        sample_format: SampleFormat::Float,
    };
    let mut writer = WavWriter::create(path, spec).map_err(wav_err(path))?;
    for &s in w.samples() {
        writer.write_sample(s as f32).map_err(wav_err(path))?;
    }
    writer.finalize().map_err(wav_err(path))
}
