use std::path::Path;

use vpnn::audio::{stft, wav_read, wav_write, Waveform};
use vpnn::eval::BssEvaluator;
use vpnn::network::ModelKind;
use vpnn::pipeline::dataset::build_training_set;
use vpnn::pipeline::synth::synth_clip;
use vpnn::pipeline::{
    analysis_stft, checkpoint_load, checkpoint_save, separate, separate_file, separate_with_magnitudes,
    synth_dataset, ClipEntry, DatasetManifest, ExperimentConfig, Features, ModelCheckpoint, SeparationModel,
    Split, SynthSpec, TrainingSet,
};
use vpnn::Error;

fn spec(seed: u64, train: usize, test: usize) -> SynthSpec {
    SynthSpec {
        seed,
        train_clips: train,
        test_clips: test,
        duration_s: 1.0,
    }
}

fn small_config(kind: ModelKind) -> ExperimentConfig {
    let mut c = ExperimentConfig::for_model(kind);
    c.hidden_width = 8;
    c.hidden_layers = 1;
    c.epochs = 2;
    c
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in walk(dir) {
        out.push((
            entry.strip_prefix(dir).unwrap().display().to_string(),
            std::fs::read(&entry).unwrap(),
        ));
    }
    out.sort();
    out
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    std::fs::read_dir(dir)
        .unwrap()
        .flat_map(|e| {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(&p)
            } else {
                vec![p]
            }
        })
        .collect()
}

#[test]
fn synth_is_bit_identical_per_seed() {
    let (a, b, c) = (
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
    );
    synth_dataset(a.path(), &spec(9, 2, 1)).unwrap();
    synth_dataset(b.path(), &spec(9, 2, 1)).unwrap();
    synth_dataset(c.path(), &spec(10, 2, 1)).unwrap();
    assert_eq!(files(a.path()), files(b.path()));
    assert_ne!(files(a.path()), files(c.path()));
}

#[test]
fn synth_stems_survive_wav_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let m = synth_dataset(dir.path(), &spec(0, 1, 0)).unwrap();
    let path = m.clip_dir(&m.clips()[0]).join("vocal.wav");
    let first = wav_read(&path).unwrap();
    let again = dir.path().join("again.wav");
    wav_write(&again, &first).unwrap();
    assert_eq!(wav_read(&again).unwrap(), first);
    let (v, _) = synth_clip(0, 0, 16_000).unwrap();
    let max_err = v
        .samples()
        .iter()
        .zip(first.samples())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(max_err <= 1.0 / 32768.0);
}

#[test]
fn ideal_binary_mask_separates_synthetic_clip() {
    let (v, m) = synth_clip(0, 3, 48_000).unwrap();
    let mix = v.mix(&m).unwrap();
    let sep = separate_with_magnitudes(&mix, |framing| {
        let a = analysis_stft(&v, framing)?.magnitude();
        let b = analysis_stft(&m, framing)?.magnitude();
        let binary = ndarray::Zip::from(&a)
            .and(&b)
            .map_collect(|x, y| f64::from(u8::from(x > y)));
        let complement = binary.mapv(|x| 1.0 - x);
        Ok((binary, complement))
    })
    .unwrap();
    let bss = BssEvaluator::new(&[v, m], 512).unwrap();
    let nsdr = bss.clip_metrics(&sep.vocal, &mix, 0).unwrap().nsdr;
    assert!(nsdr > 5.0, "binary-mask NSDR {nsdr}");
}

#[test]
fn training_never_reads_test_clips() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth_dataset(dir.path(), &spec(1, 2, 2)).unwrap();
    let config = small_config(ModelKind::Cvpnn);
    let full = build_training_set(&manifest, &config).unwrap();
    for clip in manifest.split(Split::Test) {
        std::fs::remove_dir_all(manifest.clip_dir(clip)).unwrap();
    }
    let again = build_training_set(&manifest, &config).unwrap();
    assert_eq!(again.frames(), full.frames());
    assert_eq!(again.clip_ids, ["train_000", "train_001"]);
    let out = vpnn::pipeline::train(&config, &manifest).unwrap();
    assert_eq!(out.history.len(), 2);
}

#[test]
fn cvpnn_batches_have_expected_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth_dataset(dir.path(), &spec(2, 1, 0)).unwrap();
    let mut config = small_config(ModelKind::Cvpnn);
    config.batch_frames = 16;
    let set = build_training_set(&manifest, &config).unwrap();
    let order = set.batch_order(config.batch_frames, 0);
    let (x, z) = set.batch(&order[0]);
    match (x, z) {
        (Features::Vector(x), Features::Vector(z)) => {
            assert_eq!(x.dim(), (513, 16));
            assert_eq!(z.dim(), (1026, 16));
        }
        _ => panic!("vector features expected"),
    }
}

#[test]
fn cancelling_stems_give_clamped_targets() {
    let (v, _) = synth_clip(0, 0, 8000).unwrap();
    let clip = vpnn::pipeline::ClipAudio {
        id: "cancel".into(),
        mix: Waveform::silence(8000, 16_000),
        music: Some(v.scaled(-1.0)),
        vocal: Some(v),
    };
    let set = TrainingSet::from_clips(&[clip], vpnn::transform::TransformKind::Identity, 0).unwrap();
    match &set.targets {
        Features::Real(z) => {
            assert!(z.iter().all(|&t| (0.0..=1.0).contains(&t)));
            assert!(z.iter().any(|&t| t == 1.0));
        }
        _ => panic!("real targets expected"),
    }
}

#[test]
fn mismatched_stems_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let clip_dir = dir.path().join("bad");
    std::fs::create_dir_all(&clip_dir).unwrap();
    wav_write(clip_dir.join("vocal.wav"), &Waveform::silence(2000, 16_000)).unwrap();
    wav_write(clip_dir.join("music.wav"), &Waveform::silence(2100, 16_000)).unwrap();
    let manifest = DatasetManifest::new(
        dir.path(),
        vec![ClipEntry {
            clip_id: "bad".into(),
            split: Split::Train,
            duration: 0.13,
        }],
    );
    assert!(matches!(
        manifest.load_clip(&manifest.clips()[0]),
        Err(Error::Dataset(_))
    ));
    let missing = DatasetManifest::new(
        dir.path(),
        vec![ClipEntry {
            clip_id: "nowhere".into(),
            split: Split::Train,
            duration: 1.0,
        }],
    );
    assert!(build_training_set(&missing, &small_config(ModelKind::Dnn1)).is_err());
}

#[test]
fn saved_checkpoint_separates_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth_dataset(dir.path().join("data"), &spec(3, 1, 0)).unwrap();
    let (v, m) = synth_clip(77, 0, 12_000).unwrap();
    let mix = v.mix(&m).unwrap();
    for kind in ModelKind::ALL {
        let out = vpnn::pipeline::train(&small_config(kind), &manifest).unwrap();
        let path = dir.path().join(format!("{kind}.ckpt"));
        checkpoint_save(&path, &out.checkpoint).unwrap();
        let loaded: ModelCheckpoint = checkpoint_load(&path).unwrap();
        assert_eq!(loaded, out.checkpoint);
        assert_eq!(
            separate(&loaded.model, &mix).unwrap(),
            separate(&out.checkpoint.model, &mix).unwrap()
        );
    }
}

#[test]
fn separated_files_sum_to_resampled_input() {
    let dir = tempfile::tempdir().unwrap();
    let (v, m) = synth_clip(5, 0, 22_050).unwrap();
    // pretend the clip was recorded at 22.05 kHz
    let mix = Waveform::new(v.mix(&m).unwrap().into_samples(), 22_050).unwrap();
    let input = dir.path().join("mix.wav");
    vpnn::audio::wav_write_f32(&input, &mix).unwrap();
    let model = SeparationModel::init(&small_config(ModelKind::Wvpnn)).unwrap();
    let [vp, mp] = separate_file(&model, &input, dir.path().join("out")).unwrap();
    let (vo, mo) = (wav_read(vp).unwrap(), wav_read(mp).unwrap());
    let reference = vpnn::audio::resample_to_16k(&wav_read(&input).unwrap()).unwrap();
    assert_eq!(vo.len(), reference.len());
    assert_eq!(vo.sample_rate(), 16_000);
    let err: f64 = (0..reference.len())
        .map(|i| (vo.samples()[i] + mo.samples()[i] - reference.samples()[i]).powi(2))
        .sum();
    assert!((err / reference.energy()).sqrt() < 1e-6);
}

#[test]
fn all_five_configurations_train_from_config_text() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth_dataset(dir.path(), &spec(4, 1, 0)).unwrap();
    for kind in ModelKind::ALL {
        let text = format!("model = {kind}\nhidden_width = 4\nhidden_layers = 1\nepochs = 1\n");
        let config = ExperimentConfig::parse(&text).unwrap();
        let out = vpnn::pipeline::train(&config, &manifest).unwrap();
        assert_eq!(out.checkpoint.model.kind, kind);
    }
    // the stft used by separation is the standard one
    assert_eq!(stft(&Waveform::silence(2048, 16_000)).unwrap().num_bins(), 513);
}
