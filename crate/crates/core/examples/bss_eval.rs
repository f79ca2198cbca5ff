//! Scores a few hand-made estimates with SDR, SIR and SAR.
//!
//! Run with `cargo run --example bss_eval`.

use std::f64::consts::PI;

use vpnn::audio::Waveform;
use vpnn::eval::BssEvaluator;

fn tone(freq: f64, len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| (2.0 * PI * freq * i as f64 / 16000.0).sin())
        .collect()
}

fn main() -> vpnn::Result<()> {
    let len = 16000;
    let vocal = Waveform::new(tone(330.0, len), 16000)?;
    let music = Waveform::new(tone(110.0, len).iter().map(|v| 0.5 * v).collect(), 16000)?;
    let mix = vocal.mix(&music)?;
    let bss = BssEvaluator::new(&[vocal.clone(), music.clone()], 512)?;

    let leaky = vocal.mix(&music.scaled(0.1))?;
    let noisy = Waveform::new(
        vocal
            .samples()
            .iter()
            .enumerate()
            .map(|(i, v)| v + 0.05 * ((i * 7919 % 97) as f64 / 48.0 - 1.0))
            .collect(),
        16000,
    )?;
    for (name, est) in [
        ("mixture", &mix),
        ("10% leakage", &leaky),
        ("added noise", &noisy),
        ("perfect", &vocal),
    ] {
        let r = bss.score(est, 0)?;
        let m = bss.clip_metrics(est, &mix, 0)?;
        println!(
            "{name:<12} SDR {:>7.2}  SIR {:>7.2}  SAR {:>7.2}  NSDR {:>7.2}",
            r.sdr, r.sir, r.sar, m.nsdr
        );
    }
    Ok(())
}
