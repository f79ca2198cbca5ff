//! The FFT/Cholesky projections in `eval` against an explicit delayed-copy
//! design matrix solved by SVD least squares.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vpnn::audio::Waveform;
use vpnn::eval::{bss_decompose, sdr_sir_sar};

fn design(refs: &[Vec<f64>], filter_len: usize) -> DMatrix<f64> {
    let n = refs[0].len();
    let rows = n + filter_len - 1;
    let mut a = DMatrix::zeros(rows, refs.len() * filter_len);
    for (r, sig) in refs.iter().enumerate() {
        for d in 0..filter_len {
            for (i, &v) in sig.iter().enumerate() {
                a[(i + d, r * filter_len + d)] = v;
            }
        }
    }
    a
}

fn project(a: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let coef = a.clone().svd(true, true).solve(y, 1e-12).unwrap();
    a * coef
}

fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

#[test]
fn decomposition_matches_least_squares() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (n, l) = (240, 6);
    let refs: Vec<Vec<f64>> = (0..2)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    // an estimate with a filtered target, some leakage and some noise
    let est: Vec<f64> = (0..n)
        .map(|i| {
            let delayed = if i >= 2 { 0.4 * refs[0][i - 2] } else { 0.0 };
            refs[0][i] + delayed + 0.3 * refs[1][i] + 0.1 * rng.gen_range(-1.0..1.0)
        })
        .collect();
    let waves: Vec<Waveform> = refs
        .iter()
        .map(|r| Waveform::new(r.clone(), 16_000).unwrap())
        .collect();
    let d = bss_decompose(&Waveform::new(est.clone(), 16_000).unwrap(), &waves, 0, l).unwrap();

    let mut padded = est.clone();
    padded.resize(n + l - 1, 0.0);
    let y = DVector::from_vec(padded.clone());
    let joint = project(&design(&refs, l), &y);
    let target = project(&design(&refs[..1], l), &y);

    assert!(max_rel(&d.s_target, target.as_slice()) < 1e-8);
    let interf: Vec<f64> = joint.iter().zip(target.iter()).map(|(j, t)| j - t).collect();
    assert!(max_rel(&d.e_interf, &interf) < 1e-8);
    let artif: Vec<f64> = padded.iter().zip(joint.iter()).map(|(p, j)| p - j).collect();
    assert!(max_rel(&d.e_artif, &artif) < 1e-8);

    let energy = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    let sdr = 10.0
        * (energy(target.as_slice())
            / energy(&interf.iter().zip(&artif).map(|(a, b)| a + b).collect::<Vec<_>>()))
        .log10();
    assert!((sdr_sir_sar(&d).sdr - sdr).abs() < 1e-6);
}

#[test]
fn sir_of_known_leakage_matches_closed_form() {
    // with one tap and orthogonal references the projections are scalar
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 4000;
    let s1: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let c = dot(&raw, &s1) / dot(&s1, &s1);
    let s2: Vec<f64> = raw.iter().zip(&s1).map(|(r, s)| r - c * s).collect();
    let g = 0.25;
    let est: Vec<f64> = s1.iter().zip(&s2).map(|(a, b)| a + g * b).collect();
    let waves = [
        Waveform::new(s1.clone(), 16_000).unwrap(),
        Waveform::new(s2.clone(), 16_000).unwrap(),
    ];
    let r = sdr_sir_sar(&bss_decompose(&Waveform::new(est, 16_000).unwrap(), &waves, 0, 1).unwrap());
    let expected = 10.0 * (dot(&s1, &s1) / (g * g * dot(&s2, &s2))).log10();
    assert!((r.sir - expected).abs() < 1e-6, "{} vs {expected}", r.sir);
    assert_eq!(r.sar, 100.0);
}
