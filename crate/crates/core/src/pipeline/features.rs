//! Network-facing encodings of normalized magnitudes.

use ndarray::{s, Array2, Axis};

use crate::error::{Error, Result};
use crate::transform::{
    color_decode, color_encode, context_stack, window_decode, window_encode, MagnitudeMatrix, TransformKind,
};
use crate::vecmat::VecMatrix;

/// A batch of frames: real rows or `Vec3` rows, one column per frame.
#[derive(Debug, Clone, PartialEq)]
pub enum Features {
    Vector(VecMatrix),
    Real(Array2<f64>),
}

impl Features {
    pub fn rows(&self) -> usize {
        match self {
            Features::Vector(v) => v.rows(),
            Features::Real(r) => r.nrows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Features::Vector(v) => v.cols(),
            Features::Real(r) => r.ncols(),
        }
    }

    pub fn select_cols(&self, cols: &[usize]) -> Features {
        match self {
            Features::Vector(v) => Features::Vector(v.select_cols(cols)),
            Features::Real(r) => Features::Real(r.select(Axis(1), cols)),
        }
    }

    pub fn hstack(parts: &[Features]) -> Result<Features> {
        match parts.first() {
            None => Err(Error::EmptyInput("Features::hstack")),
            Some(Features::Vector(_)) => {
                let vs = parts
                    .iter()
                    .map(|p| match p {
                        Features::Vector(v) => Ok(v.clone()),
                        Features::Real(_) => Err(mixed()),
                    })
                    .collect::<Result<Vec<_>>>()?;
                VecMatrix::hstack(&vs).map(Features::Vector)
            }
            Some(Features::Real(_)) => {
                let views = parts
                    .iter()
                    .map(|p| match p {
                        Features::Real(r) => Ok(r.view()),
                        Features::Vector(_) => Err(mixed()),
                    })
                    .collect::<Result<Vec<_>>>()?;
                ndarray::concatenate(Axis(1), &views)
                    .map(Features::Real)
                    .map_err(|e| Error::InvalidParameter(e.to_string()))
            }
        }
    }
}

fn mixed() -> Error {
    Error::InvalidParameter("cannot concatenate real and vector features".into())
}

pub fn encode_input(mix: &MagnitudeMatrix, transform: TransformKind) -> Result<Features> {
    Ok(match transform {
        TransformKind::Identity => Features::Real(mix.data().clone()),
        TransformKind::ContextStack => Features::Real(context_stack(mix)?),
        TransformKind::Window => Features::Vector(window_encode(mix)?),
        TransformKind::Color(p) => Features::Vector(color_encode(mix, p)?),
    })
}

/// Stacked `[vocal; music]` target, encoded the same way as the input.
pub fn encode_target(
    vocal: &MagnitudeMatrix,
    music: &MagnitudeMatrix,
    transform: TransformKind,
) -> Result<Features> {
    Ok(match transform {
        TransformKind::Identity | TransformKind::ContextStack => Features::Real(
            ndarray::concatenate(Axis(0), &[vocal.data().view(), music.data().view()])
                .map_err(|e| Error::InvalidParameter(e.to_string()))?,
        ),
        TransformKind::Window => {
            Features::Vector(VecMatrix::vstack(&window_encode(vocal)?, &window_encode(music)?)?)
        }
        TransformKind::Color(p) => Features::Vector(VecMatrix::vstack(
            &color_encode(vocal, p)?,
            &color_encode(music, p)?,
        )?),
    })
}

/// Splits a stacked network output into normalized vocal and music
/// magnitudes in `[0, 1]`.
pub fn decode_output(output: &Features, transform: TransformKind) -> Result<(Array2<f64>, Array2<f64>)> {
    let data = match (output, transform) {
        (Features::Real(r), TransformKind::Identity | TransformKind::ContextStack) => {
            r.mapv(|v| if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) })
        }
        (Features::Vector(v), TransformKind::Window) => window_decode(v).data().clone(),
        (Features::Vector(v), TransformKind::Color(p)) => color_decode(v, p).data().clone(),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "output kind does not match transform `{}`",
                transform.name()
            )))
        }
    };
    if data.nrows() % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "stacked output has odd row count {}",
            data.nrows()
        )));
    }
    let half = data.nrows() / 2;
    Ok((
        data.slice(s![..half, ..]).to_owned(),
        data.slice(s![half.., ..]).to_owned(),
    ))
}
