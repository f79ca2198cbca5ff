//! Self-describing binary model files.
//!
//! ```text
//! "VPNNCKPT"                   8-byte magic
//! u32 version                  currently 1
//! u32 n, n bytes               UTF-8 `key = value` metadata lines
//! u32 planes
//!   per plane: u32 rows, u32 cols, rows·cols f64 in row-major order
//! u32 crc32 of every preceding byte
//! ```
//!
//! All integers and reals are little-endian.

use std::path::Path;

use ndarray::Array2;

use super::config::parse_pairs;
use super::train::SeparationModel;
use crate::error::{Error, Result};
use crate::network::{ModelKind, Network, Params};
use crate::transform::{ColorParams, TransformKind};

pub const MAGIC: &[u8; 8] = b"VPNNCKPT";
pub const FORMAT_VERSION: u32 = 1;
/// The only normalization policy: per-clip division by the mixture maximum.
pub const NORMALIZATION: &str = "mixture_max";

#[derive(Debug, Clone, PartialEq)]
pub struct ModelCheckpoint {
    pub model: SeparationModel,
    pub epochs: usize,
    /// Mean `J` per frame of the last epoch, absent for an untrained model.
    pub final_j: Option<f64>,
}

impl ModelCheckpoint {
    pub fn new(model: SeparationModel, epochs: usize, final_j: Option<f64>) -> Self {
        ModelCheckpoint {
            model,
            epochs,
            final_j,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let m = &self.model;
        let widths: Vec<String> = m.network.widths().iter().map(usize::to_string).collect();
        let mut meta = vec![
            format!("model = {}", m.kind),
            format!("widths = {}", widths.join(",")),
            format!("transform = {}", m.transform.name()),
        ];
        if let TransformKind::Color(p) = m.transform {
            meta.push(format!("color_n = {}", p.n()));
        }
        meta.push(format!("normalization = {NORMALIZATION}"));
        meta.push(format!("epochs = {}", self.epochs));
        meta.push(format!(
            "final_j = {}",
            self.final_j.map_or_else(|| "none".to_string(), |j| j.to_string())
        ));
        let meta = meta.join("\n") + "\n";

        let planes = m.network.planes();
        let mut out = Vec::with_capacity(64 + meta.len() + 8 * crate::network::param_count(&m.network));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(meta.len() as u32).to_le_bytes());
        out.extend_from_slice(meta.as_bytes());
        out.extend_from_slice(&(planes.len() as u32).to_le_bytes());
        for p in planes {
            out.extend_from_slice(&(p.nrows() as u32).to_le_bytes());
            out.extend_from_slice(&(p.ncols() as u32).to_le_bytes());
            for v in p.iter() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() + 8 || &bytes[..MAGIC.len()] != MAGIC {
            return Err(Error::Checkpoint("not a model checkpoint".into()));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 4);
        let stored = u32::from_le_bytes(tail.try_into().expect("4 bytes"));
        let computed = crc32fast::hash(body);
        let mut r = Reader {
            buf: body,
            pos: MAGIC.len(),
        };
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported format version {version} (expected {FORMAT_VERSION})"
            )));
        }
        if stored != computed {
            return Err(Error::Checksum { stored, computed });
        }
        let meta_len = r.u32()? as usize;
        let meta = std::str::from_utf8(r.take(meta_len)?)
            .map_err(|_| Error::Checkpoint("metadata is not UTF-8".into()))?;
        let meta = Metadata::parse(meta)?;

        let count = r.u32()? as usize;
        let mut planes = Vec::with_capacity(count);
        for _ in 0..count {
            let rows = r.u32()? as usize;
            let cols = r.u32()? as usize;
            let raw = r.take(
                rows.checked_mul(cols)
                    .and_then(|n| n.checked_mul(8))
                    .ok_or_else(truncated)?,
            )?;
            let values = raw
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                .collect();
            planes.push(Array2::from_shape_vec((rows, cols), values).expect("length checked"));
        }
        if r.pos != body.len() {
            return Err(Error::Checkpoint(format!(
                "{} trailing bytes",
                body.len() - r.pos
            )));
        }

        let mut network = Network::init(meta.model, &meta.widths, 0)
            .map_err(|e| Error::Checkpoint(format!("bad architecture: {e}")))?;
        let shapes = network.plane_shapes();
        if shapes.len() != planes.len() || shapes.iter().zip(&planes).any(|(s, p)| *s != p.dim()) {
            return Err(Error::Checkpoint(format!(
                "stored planes do not match a {} network with widths {:?}",
                meta.model, meta.widths
            )));
        }
        for (dst, src) in network.planes_mut().into_iter().zip(planes) {
            *dst = src;
        }
        Ok(ModelCheckpoint {
            model: SeparationModel {
                kind: meta.model,
                network,
                transform: meta.transform,
            },
            epochs: meta.epochs,
            final_j: meta.final_j,
        })
    }
}

struct Metadata {
    model: ModelKind,
    widths: Vec<usize>,
    transform: TransformKind,
    epochs: usize,
    final_j: Option<f64>,
}

impl Metadata {
    fn parse(text: &str) -> Result<Self> {
        let pairs = parse_pairs(text).map_err(|e| Error::Checkpoint(e.to_string()))?;
        let get = |key: &str| {
            pairs
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::Checkpoint(format!("missing metadata key `{key}`")))
        };
        let bad = |key: &str| Error::Checkpoint(format!("invalid metadata value for `{key}`"));
        let model: ModelKind = get("model")?.parse().map_err(|_| bad("model"))?;
        let widths = get("widths")?
            .split(',')
            .map(|w| w.trim().parse::<usize>().map_err(|_| bad("widths")))
            .collect::<Result<Vec<_>>>()?;
        let transform = match get("transform")? {
            "none" => TransformKind::Identity,
            "stack" => TransformKind::ContextStack,
            "window" => TransformKind::Window,
            "color" => {
                let n: f64 = get("color_n")?.parse().map_err(|_| bad("color_n"))?;
                TransformKind::Color(ColorParams::new(n).map_err(|_| bad("color_n"))?)
            }
            _ => return Err(bad("transform")),
        };
        if transform.is_vector() != model.is_vector() {
            return Err(Error::Checkpoint(format!(
                "model {model} cannot use transform `{}`",
                transform.name()
            )));
        }
        if get("normalization")? != NORMALIZATION {
            return Err(bad("normalization"));
        }
        let epochs = get("epochs")?.parse().map_err(|_| bad("epochs"))?;
        let final_j = match get("final_j")? {
            "none" => None,
            v => Some(v.parse().map_err(|_| bad("final_j"))?),
        };
        Ok(Metadata {
            model,
            widths,
            transform,
            epochs,
            final_j,
        })
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(truncated)?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
}

fn truncated() -> Error {
    Error::Checkpoint("file is truncated".into())
}

pub fn checkpoint_save(path: impl AsRef<Path>, ckpt: &ModelCheckpoint) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, ckpt.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn checkpoint_load(path: impl AsRef<Path>) -> Result<ModelCheckpoint> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    ModelCheckpoint::from_bytes(&bytes)
}

/// Loads a checkpoint and insists that it holds a `kind` model.
pub fn checkpoint_load_as(path: impl AsRef<Path>, kind: ModelKind) -> Result<ModelCheckpoint> {
    let ckpt = checkpoint_load(path)?;
    if ckpt.model.kind != kind {
        return Err(Error::Checkpoint(format!(
            "checkpoint holds a {} model, not {kind}",
            ckpt.model.kind
        )));
    }
    Ok(ckpt)
}
