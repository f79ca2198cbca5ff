//! Maps magnitudes to RGB-like triples and back.
//!
//! Run with `cargo run --example spectral_coloring`.

use ndarray::array;
use vpnn::transform::{color_decode, color_encode, normalize, window_decode, window_encode, ColorParams};

fn main() -> vpnn::Result<()> {
    let p = ColorParams::default();
    println!("n = {}", p.n());
    for x in [0.0, 0.05, p.n(), 0.15, 2.0 * p.n(), 0.5, 1.0] {
        let rgb = p.encode(x);
        println!(
            "{x:>8.4} -> [{:.4}, {:.4}, {:.4}] -> {:.4}",
            rgb[0],
            rgb[1],
            rgb[2],
            p.decode(rgb)
        );
    }

    // A point off the curve decodes to the nearest curve point.
    println!("decode([1.0, 0.3, 0.4]) = {:.4}", p.decode([1.0, 0.3, 0.4]));

    let mag = array![[0.0, 2.0, 4.0], [1.0, 3.0, 8.0]];
    let s = normalize(&mag)?;
    let colored = color_encode(&s, p)?;
    println!(
        "color planes:\n{}\n{}\n{}",
        colored.p1(),
        colored.p2(),
        colored.p3()
    );
    println!("color roundtrip:\n{}", color_decode(&colored, p).data());

    let windowed = window_encode(&s)?;
    println!(
        "context (previous, current, next) of unit (0, 1): {:?}",
        windowed.get(0, 1)
    );
    println!("window roundtrip:\n{}", window_decode(&windowed).data());
    Ok(())
}
