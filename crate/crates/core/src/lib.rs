//! Vector-product neural networks, where every weight, bias and activation
//! is a three-dimensional vector and neurons combine inputs with the cross
//! product, plus a complete monaural singing-voice separation pipeline built
//! on them.
//!
//! The crate is layered bottom-up:
//!
//! - [`vecmat`]: `Vec3`, vector-valued matrices and their cross-product matmul
//! - [`network`]: vector-product and real-valued sigmoid networks, forward and backward passes
//! - [`optim`]: Adam and SGD over parameter planes
//! - [`transform`]: context-window and spectral-color encodings of magnitude spectra
//! - [`audio`]: WAV I/O, resampling, STFT and soft-mask resynthesis
//! - [`eval`]: SDR/SIR/SAR scoring and length-weighted aggregation
//! - [`pipeline`]: corpora, training, checkpoints, separation and evaluation
//! - [`cli`]: the `vpnn` command-line tool

pub mod audio;
pub mod cli;
pub mod error;
pub mod eval;
pub mod network;
pub mod optim;
pub mod pipeline;
pub mod transform;
pub mod vecmat;

pub use error::{Error, Result};
