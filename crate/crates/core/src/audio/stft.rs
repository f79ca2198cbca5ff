//! Hann-windowed STFT and weighted overlap-add inverse.
//!
//! Frame `t` covers samples `t·hop .. t·hop + window_len`; there is no
//! centering padding and trailing samples that do not fill a whole frame are
//! not analysed.

use std::f64::consts::PI;
use std::ops::Range;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{Waveform, TARGET_RATE};
use crate::error::{Error, Result};

pub const WINDOW_LEN: usize = 1024;
pub const HOP: usize = 256;
pub const NUM_BINS: usize = WINDOW_LEN / 2 + 1;

/// Periodic Hann window; satisfies constant overlap-add at hop `len / 4`.
pub fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / len as f64).cos()))
        .collect()
}

/// One-sided complex spectrogram, `bins × frames`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrogram {
    bins: Array2<Complex64>,
    window_len: usize,
    hop: usize,
    original_len: usize,
    sample_rate: u32,
}

impl ComplexSpectrogram {
    pub fn new(
        bins: Array2<Complex64>,
        window_len: usize,
        hop: usize,
        original_len: usize,
        sample_rate: u32,
    ) -> Result<Self> {
        if hop == 0 || window_len == 0 || hop > window_len {
            return Err(Error::InvalidParameter(format!(
                "invalid geometry: window {window_len}, hop {hop}"
            )));
        }
        if bins.nrows() != window_len / 2 + 1 {
            return Err(Error::InvalidParameter(format!(
                "{} bins for a {window_len}-sample window",
                bins.nrows()
            )));
        }
        if original_len < window_len || bins.ncols() != frame_count(original_len, window_len, hop) {
            return Err(Error::InvalidParameter(format!(
                "{} frames inconsistent with {original_len} samples",
                bins.ncols()
            )));
        }
        Ok(ComplexSpectrogram {
            bins,
            window_len,
            hop,
            original_len,
            sample_rate,
        })
    }

    pub fn bins(&self) -> &Array2<Complex64> {
        &self.bins
    }

    pub fn num_bins(&self) -> usize {
        self.bins.nrows()
    }

    pub fn frames(&self) -> usize {
        self.bins.ncols()
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn original_len(&self) -> usize {
        self.original_len
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn magnitude(&self) -> Array2<f64> {
        self.bins.mapv(|c| c.norm())
    }

    /// Same geometry, new coefficients.
    pub fn with_bins(&self, bins: Array2<Complex64>) -> Result<Self> {
        if bins.dim() != self.bins.dim() {
            return Err(Error::ShapeMismatch {
                op: "ComplexSpectrogram::with_bins",
                left: self.bins.dim(),
                right: bins.dim(),
            });
        }
        Ok(ComplexSpectrogram { bins, ..self.clone() })
    }

    /// Samples covered by the full window overlap, where reconstruction does
    /// not depend on the window edges.
    pub fn interior(&self) -> Range<usize> {
        let covered = (self.frames() - 1) * self.hop + self.window_len;
        let margin = self.window_len - self.hop;
        margin..covered.saturating_sub(margin).max(margin)
    }
}

fn frame_count(len: usize, window_len: usize, hop: usize) -> usize {
    1 + (len - window_len) / hop
}

/// Analysis with the standard 1024/256 geometry at 16 kHz.
pub fn stft(w: &Waveform) -> Result<ComplexSpectrogram> {
    if w.sample_rate() != TARGET_RATE {
        return Err(Error::InvalidParameter(format!(
            "stft expects {TARGET_RATE} Hz input, got {} Hz",
            w.sample_rate()
        )));
    }
    stft_with(w, WINDOW_LEN, HOP)
}

pub fn stft_with(w: &Waveform, window_len: usize, hop: usize) -> Result<ComplexSpectrogram> {
    if hop == 0 || hop > window_len {
        return Err(Error::InvalidParameter(format!(
            "invalid hop {hop} for window {window_len}"
        )));
    }
    let x = w.samples();
    if x.len() < window_len {
        return Err(Error::SignalTooShort {
            len: x.len(),
            window: window_len,
        });
    }
    let frames = frame_count(x.len(), window_len, hop);
    let nbins = window_len / 2 + 1;
    let window = hann(window_len);
    let fft = FftPlanner::new().plan_fft_forward(window_len);

    let mut bins = Array2::zeros((nbins, frames));
    let mut buf = vec![Complex64::new(0.0, 0.0); window_len];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for t in 0..frames {
        let start = t * hop;
        for (i, b) in buf.iter_mut().enumerate() {
            *b = Complex64::new(x[start + i] * window[i], 0.0);
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for k in 0..nbins {
            bins[[k, t]] = buf[k];
        }
    }
    ComplexSpectrogram::new(bins, window_len, hop, x.len(), w.sample_rate())
}

/// Weighted overlap-add: each frame is windowed again and the sum divided by
/// `Σ w²`. Samples outside the analysed span come back as zero.
pub fn istft(s: &ComplexSpectrogram) -> Result<Waveform> {
    let n = s.window_len;
    let window = hann(n);
    let ifft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_inverse(n);
    let mut out = vec![0.0; s.original_len];
    let mut norm = vec![0.0; s.original_len];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); ifft.get_inplace_scratch_len()];

    for t in 0..s.frames() {
        for (b, &c) in buf.iter_mut().zip(s.bins.column(t)) {
            *b = c;
        }
        // Hermitian completion of the one-sided spectrum
        for k in s.num_bins()..n {
            buf[k] = buf[n - k].conj();
        }
        buf[0].im = 0.0;
        if n.is_multiple_of(2) {
            buf[n / 2].im = 0.0;
        }
        ifft.process_with_scratch(&mut buf, &mut scratch);
        let start = t * s.hop;
        for i in 0..n {
            out[start + i] += buf[i].re / n as f64 * window[i];
            norm[start + i] += window[i] * window[i];
        }
    }
    for (y, &d) in out.iter_mut().zip(&norm) {
        *y = if d > 1e-20 { *y / d } else { 0.0 };
    }
    Waveform::new(out, s.sample_rate)
}
