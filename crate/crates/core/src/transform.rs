//! Maps between real magnitude spectrograms and `Vec3`-valued inputs.
//!
//! Two encodings are provided:
//!
//! * **Context window**: each t-f unit becomes (previous frame, current frame,
//!   next frame). Decoding reads the middle component.
//! * **Spectral color**: each magnitude `x ∈ [0, 1]` becomes an RGB triple on
//!   a piecewise-linear "hot" color curve with breakpoints at `n` and `2n`.
//!   Decoding projects an arbitrary RGB triple onto the nearest point of the
//!   curve, which inverts the encoding exactly for on-curve points.

use std::fmt;

use ndarray::{s, Array2, Axis};

use crate::error::{Error, Result};
use crate::vecmat::VecMatrix;

/// Smallest normalization scale; keeps silent clips finite.
pub const SCALE_FLOOR: f64 = 1e-12;

/// Normalized magnitudes in `[0, 1]` plus the factor that maps them back.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeMatrix {
    data: Array2<f64>,
    scale: f64,
}

impl MagnitudeMatrix {
    pub fn new(data: Array2<f64>, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale must be > 0, got {scale}")));
        }
        if let Some(&bad) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::OutOfRange {
                op: "MagnitudeMatrix::new",
                value: bad,
            });
        }
        Ok(MagnitudeMatrix { data, scale })
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn with_scale(self, scale: f64) -> Result<Self> {
        MagnitudeMatrix::new(self.data, scale)
    }

    pub fn bins(&self) -> usize {
        self.data.nrows()
    }

    pub fn frames(&self) -> usize {
        self.data.ncols()
    }
}

/// Divides by the clip maximum (floored at [`SCALE_FLOOR`]).
pub fn normalize(mag: &Array2<f64>) -> Result<MagnitudeMatrix> {
    let max = mag.iter().copied().fold(0.0, f64::max);
    normalize_with_scale(mag, max.max(SCALE_FLOOR))
}

/// Divides by a given scale (usually the mixture maximum) and clamps to
/// `[0, 1]`. Used for source targets, which may exceed the mixture peak.
pub fn normalize_with_scale(mag: &Array2<f64>, scale: f64) -> Result<MagnitudeMatrix> {
    if let Some(&bad) = mag.iter().find(|v| v.is_nan() || **v < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "negative or NaN magnitude {bad}"
        )));
    }
    let scale = scale.max(SCALE_FLOOR);
    MagnitudeMatrix::new(mag.mapv(|v| (v / scale).clamp(0.0, 1.0)), scale)
}

pub fn denormalize(s: &MagnitudeMatrix) -> Array2<f64> {
    &s.data * s.scale
}

/// Plane 1 = previous frame, plane 2 = current, plane 3 = next. Edge frames
/// are replicated.
pub fn window_encode(s: &MagnitudeMatrix) -> Result<VecMatrix> {
    let (prev, next) = shifted_frames(&s.data)?;
    VecMatrix::from_planes(prev, s.data.clone(), next)
}

/// Middle component, clamped to `[0, 1]`. The result carries scale 1.
pub fn window_decode(v: &VecMatrix) -> MagnitudeMatrix {
    MagnitudeMatrix {
        data: v.p2().mapv(clamp_unit),
        scale: 1.0,
    }
}

/// Previous, current, and next frames stacked into a `3F × T` real matrix,
/// the real-valued counterpart of [`window_encode`].
pub fn context_stack(s: &MagnitudeMatrix) -> Result<Array2<f64>> {
    let (prev, next) = shifted_frames(&s.data)?;
    Ok(
        ndarray::concatenate(Axis(0), &[prev.view(), s.data.view(), next.view()])
            .expect("planes share column count"),
    )
}

fn shifted_frames(data: &Array2<f64>) -> Result<(Array2<f64>, Array2<f64>)> {
    let t = data.ncols();
    if t == 0 || data.nrows() == 0 {
        return Err(Error::EmptyInput("context window"));
    }
    let mut prev = data.clone();
    let mut next = data.clone();
    if t > 1 {
        prev.slice_mut(s![.., 1..]).assign(&data.slice(s![.., ..t - 1]));
        next.slice_mut(s![.., ..t - 1]).assign(&data.slice(s![.., 1..]));
    }
    Ok((prev, next))
}

fn clamp_unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

/// Breakpoint of the color curve; must lie in `(0, 0.5)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorParams {
    n: f64,
}

impl ColorParams {
    pub const DEFAULT_N: f64 = 0.0938;

    pub fn new(n: f64) -> Result<Self> {
        if n > 0.0 && n < 0.5 {
            Ok(ColorParams { n })
        } else {
            Err(Error::InvalidParameter(format!(
                "color breakpoint n must be in (0, 0.5), got {n}"
            )))
        }
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    /// RGB triple for one magnitude.
    pub fn encode(&self, x: f64) -> [f64; 3] {
        let n = self.n;
        [
            (x / n).clamp(0.0, 1.0),
            ((x - n) / n).clamp(0.0, 1.0),
            ((x - 2.0 * n) / (1.0 - 2.0 * n)).clamp(0.0, 1.0),
        ]
    }

    /// Magnitude whose color is nearest (Euclidean) to `rgb`.
    ///
    /// The curve is three axis-aligned segments:
    /// `(0,0,0)→(1,0,0)` over `[0, n]`, `(1,0,0)→(1,1,0)` over `[n, 2n]`,
    /// `(1,1,0)→(1,1,1)` over `[2n, 1]`. Each is projected onto in closed
    /// form; ties go to the smaller magnitude.
    pub fn decode(&self, rgb: [f64; 3]) -> f64 {
        let n = self.n;
        let [r, g, b] = rgb.map(|v| if v.is_nan() { 0.0 } else { v });
        let candidates = [
            {
                let u = r.clamp(0.0, 1.0);
                ((r - u).powi(2) + g * g + b * b, u * n)
            },
            {
                let u = g.clamp(0.0, 1.0);
                ((r - 1.0).powi(2) + (g - u).powi(2) + b * b, n + u * n)
            },
            {
                let u = b.clamp(0.0, 1.0);
                (
                    (r - 1.0).powi(2) + (g - 1.0).powi(2) + (b - u).powi(2),
                    2.0 * n + u * (1.0 - 2.0 * n),
                )
            },
        ];
        let mut best = candidates[0];
        for c in &candidates[1..] {
            if c.0 < best.0 {
                best = *c;
            }
        }
        best.1.clamp(0.0, 1.0)
    }
}

impl Default for ColorParams {
    fn default() -> Self {
        ColorParams { n: Self::DEFAULT_N }
    }
}

pub fn color_encode(s: &MagnitudeMatrix, p: ColorParams) -> Result<VecMatrix> {
    color_encode_array(&s.data, p)
}

/// [`color_encode`] on a bare matrix, which must already lie in `[0, 1]`.
pub fn color_encode_array(data: &Array2<f64>, p: ColorParams) -> Result<VecMatrix> {
    if let Some(&bad) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::OutOfRange {
            op: "color_encode",
            value: bad,
        });
    }
    let mut v = VecMatrix::zeros(data.nrows(), data.ncols());
    {
        let [r, g, b] = v.planes_mut();
        ndarray::Zip::from(r)
            .and(g)
            .and(b)
            .and(data)
            .for_each(|r, g, b, &x| {
                [*r, *g, *b] = p.encode(x);
            });
    }
    Ok(v)
}

/// Nearest-curve inverse of [`color_encode`]. The result carries scale 1.
pub fn color_decode(v: &VecMatrix, p: ColorParams) -> MagnitudeMatrix {
    let mut data = Array2::zeros(v.dim());
    ndarray::Zip::from(&mut data)
        .and(v.p1())
        .and(v.p2())
        .and(v.p3())
        .for_each(|x, &r, &g, &b| *x = p.decode([r, g, b]));
    MagnitudeMatrix { data, scale: 1.0 }
}

/// How magnitudes are presented to a network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransformKind {
    /// One real value per t-f unit.
    Identity,
    /// Three context frames stacked as real rows (`3F` inputs).
    ContextStack,
    /// Context-window vectors.
    Window,
    /// Spectral-color vectors.
    Color(ColorParams),
}

impl TransformKind {
    pub fn name(&self) -> &'static str {
        match self {
            TransformKind::Identity => "none",
            TransformKind::ContextStack => "stack",
            TransformKind::Window => "window",
            TransformKind::Color(_) => "color",
        }
    }

    pub fn is_vector(&self) -> bool {
        matches!(self, TransformKind::Window | TransformKind::Color(_))
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformKind::Color(p) => write!(f, "color(n={})", p.n()),
            other => f.write_str(other.name()),
        }
    }
}
