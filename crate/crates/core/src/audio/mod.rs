//! Waveforms, WAV I/O, resampling, STFT, and soft masking.

mod mask;
mod resample;
mod stft;
mod wav;

use crate::error::{Error, Result};

pub use mask::{apply_mask_and_reconstruct, soft_mask, MaskPair, MASK_EPSILON};
pub use resample::{resample, resample_to_16k, TARGET_RATE};
pub use stft::{hann, istft, stft, stft_with, ComplexSpectrogram, HOP, NUM_BINS, WINDOW_LEN};
pub use wav::{wav_read, wav_read_channel, wav_read_channels, wav_write, wav_write_f32, Channel};

/// A mono signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidParameter("sample rate must be > 0".into()));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("waveform samples"));
        }
        Ok(Waveform { samples, sample_rate })
    }

    pub fn silence(len: usize, sample_rate: u32) -> Self {
        Waveform {
            samples: vec![0.0; len],
            sample_rate,
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s * s).sum()
    }

    /// Sample-wise sum of two equally long signals at the same rate.
    pub fn mix(&self, other: &Waveform) -> Result<Waveform> {
        if self.sample_rate != other.sample_rate || self.len() != other.len() {
            return Err(Error::InvalidParameter(format!(
                "cannot mix {} samples @ {} Hz with {} samples @ {} Hz",
                self.len(),
                self.sample_rate,
                other.len(),
                other.sample_rate
            )));
        }
        Ok(Waveform {
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
            sample_rate: self.sample_rate,
        })
    }

    pub fn scaled(&self, gain: f64) -> Waveform {
        Waveform {
            samples: self.samples.iter().map(|s| s * gain).collect(),
            sample_rate: self.sample_rate,
        }
    }
}
