//! Separates a WAV file with a saved checkpoint.
//!
//! ```text
//! cargo run --release --example separate_file -- model.ckpt song.wav out/
//! ```
//!
//! Without arguments it synthesises a clip and uses an untrained CVPNN, which
//! is enough to see the plumbing work (the estimates are poor).

use std::path::PathBuf;

use vpnn::audio::wav_write;
use vpnn::network::ModelKind;
use vpnn::pipeline::synth::synth_clip;
use vpnn::pipeline::{checkpoint_load, separate_file, ExperimentConfig, SeparationModel};

fn main() -> vpnn::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (model, input, out) = match args.as_slice() {
        [ckpt, input, out] => (
            checkpoint_load(ckpt)?.model,
            PathBuf::from(input),
            PathBuf::from(out),
        ),
        [] => {
            let dir = std::env::temp_dir().join("vpnn-separate-example");
            std::fs::create_dir_all(&dir).map_err(|e| vpnn::Error::Io {
                path: dir.clone(),
                source: e,
            })?;
            let (v, m) = synth_clip(0, 0, 32000)?;
            let input = dir.join("mix.wav");
            wav_write(&input, &v.mix(&m)?)?;
            let model = SeparationModel::init(&ExperimentConfig::for_model(ModelKind::Cvpnn))?;
            (model, input, dir)
        }
        _ => {
            eprintln!("usage: separate_file [CHECKPOINT INPUT.wav OUT_DIR]");
            std::process::exit(2);
        }
    };
    for path in separate_file(&model, &input, &out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
