//! Command-line front end for the `vpnn` binary.

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::network::{param_count, ModelKind};
use crate::pipeline::{
    checkpoint_load, checkpoint_load_as, checkpoint_save, evaluate, separate_file, synth_dataset, train,
    DatasetManifest, ExperimentConfig, IdealSoftMask, ModelCheckpoint, Separator, SynthSpec,
};

#[derive(Debug, Parser)]
#[command(
    name = "vpnn",
    version,
    about = "Vector-product networks for singing-voice separation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic paired-stem corpus.
    Synth(SynthArgs),
    /// Train a model on the train split of a corpus.
    Train(TrainArgs),
    /// Split a mixture WAV into vocal.wav and music.wav.
    Separate(SeparateArgs),
    /// Score a model (or the ideal soft mask) on the test split.
    Evaluate(EvaluateArgs),
    /// Print a checkpoint's architecture and parameter count.
    Info { checkpoint: PathBuf },
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    train_clips: usize,
    #[arg(long, default_value_t = 4)]
    test_clips: usize,
    /// Seconds per clip.
    #[arg(long, default_value_t = 4.0)]
    duration: f64,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Corpus root; overrides `data_root` from the config file.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Extra `key=value` config overrides, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Checkpoint path to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SeparateArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    input: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Refuse checkpoints holding a different model.
    #[arg(long)]
    model: Option<ModelKind>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long, required_unless_present = "oracle", conflicts_with = "oracle")]
    checkpoint: Option<PathBuf>,
    /// Score the ideal soft mask instead of a model.
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = crate::eval::DEFAULT_FILTER_LEN)]
    filter_len: usize,
    /// Report directory for table.tsv and clips.tsv.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    model: Option<ModelKind>,
}

/// Parses `args` (program name first) and runs the command. Errors are
/// printed as `error[kind]: message` and map to exit code 1.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            ExitCode::from(1)
        }
    }
}

fn load_checkpoint(path: &PathBuf, model: Option<ModelKind>) -> Result<ModelCheckpoint> {
    match model {
        Some(kind) => checkpoint_load_as(path, kind),
        None => checkpoint_load(path),
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => {
            let spec = SynthSpec {
                seed: a.seed,
                train_clips: a.train_clips,
                test_clips: a.test_clips,
                duration_s: a.duration,
            };
            let manifest = synth_dataset(&a.out, &spec)?;
            println!("wrote {} clips to {}", manifest.clips().len(), a.out.display());
        }
        Command::Train(a) => {
            let config = train_config(&a)?;
            let root = config
                .data_root
                .clone()
                .ok_or_else(|| Error::Config("no corpus given (use --data or data_root)".into()))?;
            let manifest = DatasetManifest::load(&root)?;
            let outcome = train(&config, &manifest)?;
            for (epoch, j) in outcome.history.iter().enumerate() {
                println!("epoch\t{}\t{j}", epoch + 1);
            }
            checkpoint_save(&a.out, &outcome.checkpoint)?;
            println!("saved {}", a.out.display());
        }
        Command::Separate(a) => {
            let ckpt = load_checkpoint(&a.checkpoint, a.model)?;
            let [v, m] = separate_file(&ckpt.model, &a.input, &a.out)?;
            println!("{}\n{}", v.display(), m.display());
        }
        Command::Evaluate(a) => {
            let manifest = DatasetManifest::load(&a.data)?;
            let ckpt = match &a.checkpoint {
                Some(path) => Some(load_checkpoint(path, a.model)?),
                None => None,
            };
            let separator: &dyn Separator = match &ckpt {
                Some(c) => &c.model,
                None => &IdealSoftMask,
            };
            let report = evaluate(separator, &manifest, a.filter_len)?;
            print!("{}", report.table_tsv());
            if let Some(dir) = &a.out {
                report.write(dir)?;
            }
        }
        Command::Info { checkpoint } => {
            let ckpt = checkpoint_load(&checkpoint)?;
            let m = &ckpt.model;
            let label = m.label();
            let widths: Vec<String> = m.network.widths().iter().map(usize::to_string).collect();
            println!("model\t{}", m.kind);
            println!("arch\t{}", label.arch);
            println!("context\t{}", label.context);
            println!("widths\t{}", widths.join("-"));
            println!("transform\t{}", m.transform);
            println!("param_count\t{}", param_count(&m.network));
            println!("epochs\t{}", ckpt.epochs);
            if let Some(j) = ckpt.final_j {
                println!("final_j\t{j}");
            }
        }
    }
    Ok(())
}

/// Config file, then `--model`, then `--set` pairs, then the dedicated flags.
fn train_config(a: &TrainArgs) -> Result<ExperimentConfig> {
    let mut config = match &a.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::for_model(a.model.unwrap_or(ModelKind::Cvpnn)),
    };
    if let Some(model) = a.model {
        if model != config.model {
            config.set("model", model.name())?;
        }
    }
    for pair in &a.overrides {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected KEY=VALUE, got `{pair}`")))?;
        config.set(k.trim(), v.trim())?;
    }
    if let Some(e) = a.epochs {
        config.epochs = e;
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    if let Some(d) = &a.data {
        config.data_root = Some(d.clone());
    }
    config.validate()?;
    Ok(config)
}
