//! Desk-scale training run: synthesise a corpus, train a small CVPNN, save
//! it, and score it against the ideal soft mask.
//!
//! Run with `cargo run --release --example train_cvpnn`.

use vpnn::network::{param_count, ModelKind};
use vpnn::pipeline::{
    checkpoint_load, checkpoint_save, evaluate, synth_dataset, train, ExperimentConfig, IdealSoftMask,
    SynthSpec,
};

fn main() -> vpnn::Result<()> {
    let root = std::env::temp_dir().join("vpnn-train-example");
    let manifest = synth_dataset(
        &root,
        &SynthSpec {
            seed: 0,
            train_clips: 6,
            test_clips: 4,
            duration_s: 4.0,
        },
    )?;

    let mut config = ExperimentConfig::for_model(ModelKind::Cvpnn);
    config.hidden_width = 64;
    config.hidden_layers = 2;
    config.epochs = 50;
    let outcome = train(&config, &manifest)?;
    for (epoch, j) in outcome.history.iter().enumerate().step_by(10) {
        println!("epoch {:>3}  J {j:.4}", epoch + 1);
    }
    println!("final J {:.4}", outcome.history.last().unwrap());

    let path = root.join("cvpnn.ckpt");
    checkpoint_save(&path, &outcome.checkpoint)?;
    let model = checkpoint_load(&path)?.model;
    println!(
        "{} parameters saved to {}",
        param_count(&model.network),
        path.display()
    );

    print!("{}", evaluate(&model, &manifest, config.filter_len)?.table_tsv());
    print!(
        "{}",
        evaluate(&IdealSoftMask, &manifest, config.filter_len)?.table_tsv()
    );
    Ok(())
}
