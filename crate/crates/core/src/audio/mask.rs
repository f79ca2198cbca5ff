use ndarray::{Array2, Zip};

use super::{istft, ComplexSpectrogram, Waveform};
use crate::error::{check_shape, Error, Result};

pub const MASK_EPSILON: f64 = 1e-12;

/// Complementary soft masks, `m1 + m2 = 1` in every t-f unit.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskPair {
    m1: Array2<f64>,
    m2: Array2<f64>,
}

impl MaskPair {
    pub fn new(m1: Array2<f64>, m2: Array2<f64>) -> Result<Self> {
        check_shape("MaskPair::new", m1.dim(), m2.dim())?;
        for (&a, &b) in m1.iter().zip(&m2) {
            if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || (a + b - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "mask values ({a}, {b}) are not complementary in [0, 1]"
                )));
            }
        }
        Ok(MaskPair { m1, m2 })
    }

    /// `m1` as given, `m2 = 1 − m1`.
    pub fn from_first(m1: Array2<f64>) -> Result<Self> {
        let m2 = m1.mapv(|v| 1.0 - v);
        MaskPair::new(m1, m2)
    }

    pub fn m1(&self) -> &Array2<f64> {
        &self.m1
    }

    pub fn m2(&self) -> &Array2<f64> {
        &self.m2
    }
}

/// Ratio masks from two raw magnitude estimates. Units where both estimates
/// are zero are split evenly.
pub fn soft_mask(mag1: &Array2<f64>, mag2: &Array2<f64>) -> Result<MaskPair> {
    check_shape("soft_mask", mag1.dim(), mag2.dim())?;
    if mag1.iter().chain(mag2.iter()).any(|v| v.is_nan() || *v < 0.0) {
        return Err(Error::InvalidParameter(
            "soft_mask needs nonnegative magnitudes".into(),
        ));
    }
    let mut m1 = Array2::zeros(mag1.dim());
    let mut m2 = Array2::zeros(mag1.dim());
    Zip::from(&mut m1)
        .and(&mut m2)
        .and(mag1)
        .and(mag2)
        .for_each(|m1, m2, &a, &b| {
            let denom = a + b + MASK_EPSILON;
            let (r1, r2) = (a / denom, b / denom);
            let total = r1 + r2;
            let first = if total > 0.0 {
                (r1 / total).clamp(0.0, 1.0)
            } else {
                0.5
            };
            *m1 = first;
            *m2 = 1.0 - first;
        });
    Ok(MaskPair { m1, m2 })
}

/// Masks the mixture magnitude, keeps the mixture phase, and inverts both
/// sources.
pub fn apply_mask_and_reconstruct(
    mix: &ComplexSpectrogram,
    masks: &MaskPair,
) -> Result<(Waveform, Waveform)> {
    check_shape("apply_mask_and_reconstruct", mix.bins().dim(), masks.m1.dim())?;
    let masked = |m: &Array2<f64>| {
        let mut bins = mix.bins().clone();
        Zip::from(&mut bins).and(m).for_each(|c, &g| *c *= g);
        mix.with_bins(bins)
    };
    let s1 = istft(&masked(&masks.m1)?)?;
    let s2 = istft(&masked(&masks.m2)?)?;
    Ok((s1, s2))
}
