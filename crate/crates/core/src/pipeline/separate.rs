//! Inference: mixture in, vocal and accompaniment estimates out.

use std::path::{Path, PathBuf};

use ndarray::Array2;

use super::features::{decode_output, encode_input};
use super::framing::{analysis_stft, Framing};
use super::train::SeparationModel;
use crate::audio::{
    apply_mask_and_reconstruct, resample_to_16k, soft_mask, wav_read, wav_write_f32, Waveform,
};
use crate::error::{Error, Result};
use crate::transform::normalize;

/// Two source estimates at 16 kHz, each as long as the resampled mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct Separation {
    pub vocal: Waveform,
    pub music: Waveform,
}

/// Resamples, predicts both magnitude spectra, and resynthesises each source
/// through complementary soft masks on the mixture spectrogram.
pub fn separate(model: &SeparationModel, mixture: &Waveform) -> Result<Separation> {
    let mix = resample_to_16k(mixture)?;
    if mix.is_empty() {
        return Err(Error::EmptyInput("mixture"));
    }
    let framing = Framing::for_len(mix.len());
    let spec = analysis_stft(&mix, &framing)?;
    if spec.num_bins() != model.bins() {
        return Err(Error::ShapeMismatch {
            op: "separate (bins per frame vs model output)",
            left: (model.bins(), 1),
            right: (spec.num_bins(), 1),
        });
    }
    let normalized = normalize(&spec.magnitude())?;
    let scale = normalized.scale();
    let input = encode_input(&normalized, model.transform)?;
    if input.rows() != model.input_rows() {
        return Err(Error::ShapeMismatch {
            op: "separate (encoded input vs model input)",
            left: (model.input_rows(), 1),
            right: (input.rows(), input.cols()),
        });
    }
    let output = model.forward(&input)?;
    let (vocal, music) = decode_output(&output, model.transform)?;
    let masks = soft_mask(&(vocal * scale), &(music * scale))?;
    let (vocal, music) = apply_mask_and_reconstruct(&spec, &masks)?;
    Ok(Separation {
        vocal: framing.trim(&vocal)?,
        music: framing.trim(&music)?,
    })
}

/// Separation driven by known magnitude estimates rather than a network,
/// e.g. the clean stems for an oracle upper bound.
pub fn separate_with_magnitudes<F>(mixture: &Waveform, estimate: F) -> Result<Separation>
where
    F: FnOnce(&Framing) -> Result<(Array2<f64>, Array2<f64>)>,
{
    let framing = Framing::for_len(mixture.len());
    let spec = analysis_stft(mixture, &framing)?;
    let (a, b) = estimate(&framing)?;
    let masks = soft_mask(&a, &b)?;
    let (vocal, music) = apply_mask_and_reconstruct(&spec, &masks)?;
    Ok(Separation {
        vocal: framing.trim(&vocal)?,
        music: framing.trim(&music)?,
    })
}

/// Reads `input`, separates it, and writes `vocal.wav` and `music.wav`
/// (32-bit float) into `out_dir`. Returns the written paths.
pub fn separate_file(
    model: &SeparationModel,
    input: impl AsRef<Path>,
    out_dir: impl AsRef<Path>,
) -> Result<[PathBuf; 2]> {
    let out_dir = out_dir.as_ref();
    let sep = separate(model, &wav_read(input)?)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let paths = [out_dir.join("vocal.wav"), out_dir.join("music.wav")];
    wav_write_f32(&paths[0], &sep.vocal)?;
    wav_write_f32(&paths[1], &sep.music)?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::ModelKind;
    use crate::pipeline::config::ExperimentConfig;
    use crate::pipeline::synth::synth_clip;

    fn model(kind: ModelKind) -> SeparationModel {
        let mut c = ExperimentConfig::for_model(kind);
        c.hidden_width = 4;
        c.hidden_layers = 1;
        SeparationModel::init(&c).unwrap()
    }

    #[test]
    fn outputs_conserve_mixture_and_length() {
        let (v, m) = synth_clip(0, 0, 5000).unwrap();
        let mix = v.mix(&m).unwrap();
        for kind in ModelKind::ALL {
            let sep = separate(&model(kind), &mix).unwrap();
            assert_eq!(sep.vocal.len(), mix.len());
            assert_eq!(sep.music.len(), mix.len());
            let err: f64 = (0..mix.len())
                .map(|i| (sep.vocal.samples()[i] + sep.music.samples()[i] - mix.samples()[i]).powi(2))
                .sum();
            assert!((err / mix.energy()).sqrt() < 1e-6, "{kind}");
        }
    }

    #[test]
    fn deterministic() {
        let (v, m) = synth_clip(1, 0, 3000).unwrap();
        let mix = v.mix(&m).unwrap();
        let net = model(ModelKind::Cvpnn);
        assert_eq!(separate(&net, &mix).unwrap(), separate(&net, &mix).unwrap());
    }

    #[test]
    fn resamples_and_handles_short_input() {
        let mix = Waveform::new((0..441).map(|i| (i as f64 * 0.05).sin() * 0.3).collect(), 44100).unwrap();
        let sep = separate(&model(ModelKind::Dnn1), &mix).unwrap();
        assert_eq!(sep.vocal.len(), 160);
        assert_eq!(sep.vocal.sample_rate(), 16000);
    }

    #[test]
    fn geometry_mismatch_rejected() {
        let mut c = ExperimentConfig::for_model(ModelKind::Dnn1);
        c.hidden_width = 4;
        let mut m = SeparationModel::init(&c).unwrap();
        m.network = crate::network::Network::init(ModelKind::Dnn1, &[100, 4, 200], 0).unwrap();
        assert!(matches!(
            separate(&m, &Waveform::silence(2000, 16000)),
            Err(Error::ShapeMismatch { .. })
        ));
    }
}
