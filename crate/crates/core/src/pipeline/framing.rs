//! Padding bookkeeping around the STFT.
//!
//! The analysis frames start at sample 0 with no centering, so the first and
//! last `window_len − hop` samples of a signal sit under partial window
//! overlap. Before analysis the pipeline pads the signal with zeros so that
//! every original sample lies in the fully overlapped interior, then trims the
//! padding after resynthesis.

use crate::audio::{stft_with, ComplexSpectrogram, Waveform, HOP, WINDOW_LEN};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Framing {
    pub window_len: usize,
    pub hop: usize,
    pub pad_front: usize,
    pub padded_len: usize,
    pub original_len: usize,
}

impl Framing {
    pub fn for_len(original_len: usize) -> Self {
        Framing::with_geometry(original_len, WINDOW_LEN, HOP)
    }

    pub fn with_geometry(original_len: usize, window_len: usize, hop: usize) -> Self {
        let margin = window_len - hop;
        // covered span must reach margin past the last original sample
        let needed = original_len + 2 * margin;
        let extra = needed.saturating_sub(window_len);
        let padded_len = window_len + extra.div_ceil(hop) * hop;
        Framing {
            window_len,
            hop,
            pad_front: margin,
            padded_len,
            original_len,
        }
    }

    pub fn frames(&self) -> usize {
        1 + (self.padded_len - self.window_len) / self.hop
    }

    pub fn pad(&self, w: &Waveform) -> Result<Waveform> {
        if w.len() != self.original_len {
            return Err(Error::InvalidParameter(format!(
                "framing built for {} samples, got {}",
                self.original_len,
                w.len()
            )));
        }
        let mut samples = vec![0.0; self.padded_len];
        samples[self.pad_front..self.pad_front + w.len()].copy_from_slice(w.samples());
        Waveform::new(samples, w.sample_rate())
    }

    pub fn trim(&self, padded: &Waveform) -> Result<Waveform> {
        if padded.len() != self.padded_len {
            return Err(Error::InvalidParameter(format!(
                "expected {} padded samples, got {}",
                self.padded_len,
                padded.len()
            )));
        }
        Waveform::new(
            padded.samples()[self.pad_front..self.pad_front + self.original_len].to_vec(),
            padded.sample_rate(),
        )
    }
}

pub fn analysis_stft(w: &Waveform, framing: &Framing) -> Result<ComplexSpectrogram> {
    stft_with(&framing.pad(w)?, framing.window_len, framing.hop)
}
