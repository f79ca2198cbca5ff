//! Band-limited downsampling with a Kaiser-windowed sinc polyphase filter.

use std::f64::consts::PI;

use num_integer::gcd;

use super::Waveform;
use crate::error::{Error, Result};

pub const TARGET_RATE: u32 = 16_000;

const TAPS_PER_PHASE: usize = 64;
const KAISER_BETA: f64 = 8.0;

pub fn resample_to_16k(w: &Waveform) -> Result<Waveform> {
    resample(w, TARGET_RATE)
}

/// Resamples to `to` Hz, which must not exceed the source rate. The lowpass
/// cutoff sits at the new Nyquist frequency.
pub fn resample(w: &Waveform, to: u32) -> Result<Waveform> {
    let from = w.sample_rate();
    if to == from {
        return Ok(w.clone());
    }
    if to > from || to == 0 {
        return Err(Error::Upsampling { from, to });
    }
    let g = gcd(from, to);
    let up = (to / g) as usize;
    let down = (from / g) as usize;
    let table = PolyphaseTable::new(up, to as f64 / from as f64);

    let input = w.samples();
    let out_len = (input.len() * up + down / 2) / down;
    let half = (TAPS_PER_PHASE / 2) as isize;
    let out = (0..out_len)
        .map(|n| {
            let pos = n * down;
            let base = (pos / up) as isize;
            let taps = table.phase(pos % up);
            // tap k sits at input index base - half + 1 + k
            let first = base - half + 1;
            taps.iter()
                .enumerate()
                .filter_map(|(k, &h)| {
                    let idx = first + k as isize;
                    (idx >= 0 && (idx as usize) < input.len()).then(|| h * input[idx as usize])
                })
                .sum()
        })
        .collect();
    Waveform::new(out, to)
}

struct PolyphaseTable {
    coeffs: Vec<f64>,
}

impl PolyphaseTable {
    fn new(phases: usize, cutoff: f64) -> Self {
        let half = (TAPS_PER_PHASE / 2) as f64;
        let i0_beta = bessel_i0(KAISER_BETA);
        let mut coeffs = Vec::with_capacity(phases * TAPS_PER_PHASE);
        for p in 0..phases {
            let frac = p as f64 / phases as f64;
            let start = coeffs.len();
            for k in 0..TAPS_PER_PHASE {
                // distance from the output instant to the tap, in input samples
                let tau = frac + half - 1.0 - k as f64;
                let x = tau / half;
                let window = if x.abs() <= 1.0 {
                    bessel_i0(KAISER_BETA * (1.0 - x * x).sqrt()) / i0_beta
                } else {
                    0.0
                };
                coeffs.push(cutoff * sinc(cutoff * tau) * window);
            }
            let sum: f64 = coeffs[start..].iter().sum();
            for c in &mut coeffs[start..] {
                *c /= sum;
            }
        }
        PolyphaseTable { coeffs }
    }

    fn phase(&self, p: usize) -> &[f64] {
        &self.coeffs[p * TAPS_PER_PHASE..(p + 1) * TAPS_PER_PHASE]
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Zeroth-order modified Bessel function of the first kind (power series).
fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > sum * 1e-17 {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}
