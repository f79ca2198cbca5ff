//! Trains all five architectures on one corpus and prints a results table
//! with the `model / arch / context / GNSDR / GSIR / GSAR` columns.
//!
//! ```text
//! cargo run --release --example compare_architectures -- [CORPUS_DIR] [WIDTH_SCALE]
//! ```
//!
//! With no corpus a synthetic one is generated. Hidden widths are the
//! standard 512 or 1536 divided by `WIDTH_SCALE` (default 8), which keeps
//! the parameter ratio between models intact.

use vpnn::network::{param_count, ModelKind};
use vpnn::pipeline::evaluate::TABLE_HEADER;
use vpnn::pipeline::{evaluate, synth_dataset, train, DatasetManifest, ExperimentConfig, SynthSpec};

fn main() -> vpnn::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let manifest = match args.first() {
        Some(dir) => DatasetManifest::load(dir)?,
        None => synth_dataset(
            std::env::temp_dir().join("vpnn-compare-example"),
            &SynthSpec {
                seed: 0,
                train_clips: 6,
                test_clips: 4,
                duration_s: 4.0,
            },
        )?,
    };
    let scale: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(8);

    let mut rows = Vec::new();
    for kind in [
        ModelKind::Dnn1,
        ModelKind::Dnn2,
        ModelKind::Cvpnn,
        ModelKind::Dnn3,
        ModelKind::Wvpnn,
    ] {
        let mut config = ExperimentConfig::for_model(kind);
        config.hidden_width = (kind.default_hidden_width() / scale).max(1);
        config.epochs = 30;
        let outcome = train(&config, &manifest)?;
        let model = outcome.checkpoint.model;
        eprintln!(
            "{kind}: {} parameters, final J {:.4}",
            param_count(&model.network),
            outcome.history.last().unwrap()
        );
        let report = evaluate(&model, &manifest, config.filter_len)?;
        rows.push(report.table_tsv().lines().nth(1).unwrap().to_string());
    }
    println!("{TABLE_HEADER}");
    for row in rows {
        println!("{row}");
    }
    Ok(())
}
