//! Separation quality metrics: SDR, SIR, and SAR from a least-squares
//! decomposition of an estimate against the reference sources, plus NSDR and
//! length-weighted global aggregates.
//!
//! An estimate `ŝ` of source `j` is split as
//!
//! ```text
//! ŝ = s_target + e_interf + e_artif
//! ```
//!
//! where `s_target` is the projection of `ŝ` onto the span of `L`-tap delayed
//! copies of source `j`, `s_target + e_interf` is the projection onto the
//! joint span of all references, and `e_artif` is what remains. All three
//! signals are `len + L − 1` samples long (the estimate is zero-padded).

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::audio::Waveform;
use crate::error::{Error, Result};

pub const DEFAULT_FILTER_LEN: usize = 512;

/// Ratios are capped to this magnitude (dB) so aggregates stay finite.
pub const DB_CAP: f64 = 100.0;

const ENERGY_FLOOR: f64 = 1e-20;
const GRAM_JITTER: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub s_target: Vec<f64>,
    pub e_interf: Vec<f64>,
    pub e_artif: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BssResult {
    pub sdr: f64,
    pub sir: f64,
    pub sar: f64,
}

/// Per-clip scores for one source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClipMetrics {
    pub nsdr: f64,
    pub sir: f64,
    pub sar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalMetrics {
    pub gnsdr: f64,
    pub gsir: f64,
    pub gsar: f64,
}

/// Precomputed reference correlations and Cholesky factors, reusable for
/// every estimate scored against the same references.
pub struct BssEvaluator {
    filter_len: usize,
    len: usize,
    nfft: usize,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    ref_spectra: Vec<Vec<Complex64>>,
    joint: Cholesky,
    single: Vec<Cholesky>,
}

impl BssEvaluator {
    pub fn new(refs: &[Waveform], filter_len: usize) -> Result<Self> {
        let first = refs.first().ok_or(Error::EmptyInput("reference list"))?;
        if filter_len == 0 {
            return Err(Error::InvalidParameter("filter_len must be >= 1".into()));
        }
        let len = first.len();
        for r in refs {
            if r.len() != len {
                return Err(Error::InvalidParameter(format!(
                    "reference lengths differ: {} vs {}",
                    len,
                    r.len()
                )));
            }
        }
        for (i, r) in refs.iter().enumerate() {
            if r.samples().iter().all(|&v| v == 0.0) {
                return Err(Error::DegenerateReference(i));
            }
        }
        let nfft = (len + filter_len).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(nfft);
        let ifft = planner.plan_fft_inverse(nfft);
        let ref_spectra: Vec<_> = refs.iter().map(|r| spectrum(&fft, r.samples(), nfft)).collect();

        // xcorr[i][j][k] = Σ_s ref_i[s] ref_j[s + k], k in −(L−1)..=(L−1)
        let lags = |i: usize, j: usize| correlate(&ifft, &ref_spectra[i], &ref_spectra[j], nfft);
        let nref = refs.len();
        let xcorr: Vec<Vec<Vec<f64>>> = (0..nref)
            .map(|i| (0..nref).map(|j| lags(i, j)).collect())
            .collect();
        let lag = |c: &[f64], k: isize| c[k.rem_euclid(nfft as isize) as usize];

        let size = nref * filter_len;
        let mut gram = vec![0.0; size * size];
        for i in 0..nref {
            for j in 0..nref {
                for a in 0..filter_len {
                    for b in 0..filter_len {
                        gram[(i * filter_len + a) * size + j * filter_len + b] =
                            lag(&xcorr[i][j], a as isize - b as isize);
                    }
                }
            }
        }
        let joint = Cholesky::factor(gram, size)?;
        let single = (0..nref)
            .map(|i| {
                let mut g = vec![0.0; filter_len * filter_len];
                for a in 0..filter_len {
                    for b in 0..filter_len {
                        g[a * filter_len + b] = lag(&xcorr[i][i], a as isize - b as isize);
                    }
                }
                Cholesky::factor(g, filter_len)
            })
            .collect::<Result<_>>()?;

        Ok(BssEvaluator {
            filter_len,
            len,
            nfft,
            fft,
            ifft,
            ref_spectra,
            joint,
            single,
        })
    }

    pub fn filter_len(&self) -> usize {
        self.filter_len
    }

    pub fn num_refs(&self) -> usize {
        self.ref_spectra.len()
    }

    pub fn decompose(&self, est: &Waveform, target: usize) -> Result<Decomposition> {
        if est.len() != self.len {
            return Err(Error::InvalidParameter(format!(
                "estimate has {} samples, references {}",
                est.len(),
                self.len
            )));
        }
        if target >= self.num_refs() {
            return Err(Error::InvalidParameter(format!(
                "target {target} out of range for {} references",
                self.num_refs()
            )));
        }
        let l = self.filter_len;
        let out_len = self.len + l - 1;
        let est_spec = spectrum(&self.fft, est.samples(), self.nfft);
        let cross: Vec<Vec<f64>> = self
            .ref_spectra
            .iter()
            .map(|r| correlate(&self.ifft, r, &est_spec, self.nfft)[..l].to_vec())
            .collect();

        let target_proj = {
            let coeffs = self.single[target].solve(&cross[target]);
            self.synthesize(&[(target, coeffs)], out_len)
        };
        let joint_proj = {
            let rhs: Vec<f64> = cross.concat();
            let coeffs = self.joint.solve(&rhs);
            let parts: Vec<_> = (0..self.num_refs())
                .map(|i| (i, coeffs[i * l..(i + 1) * l].to_vec()))
                .collect();
            self.synthesize(&parts, out_len)
        };

        let mut padded = est.samples().to_vec();
        padded.resize(out_len, 0.0);
        let e_interf = joint_proj.iter().zip(&target_proj).map(|(a, b)| a - b).collect();
        let e_artif = padded.iter().zip(&joint_proj).map(|(a, b)| a - b).collect();
        Ok(Decomposition {
            s_target: target_proj,
            e_interf,
            e_artif,
        })
    }

    /// `Σ_i coeffs_i * ref_i`, truncated to `out_len`.
    fn synthesize(&self, parts: &[(usize, Vec<f64>)], out_len: usize) -> Vec<f64> {
        let mut acc = vec![Complex64::new(0.0, 0.0); self.nfft];
        for (i, coeffs) in parts {
            let c = spectrum(&self.fft, coeffs, self.nfft);
            for ((a, x), r) in acc.iter_mut().zip(&c).zip(&self.ref_spectra[*i]) {
                *a += x * r;
            }
        }
        self.ifft.process(&mut acc);
        acc[..out_len].iter().map(|c| c.re / self.nfft as f64).collect()
    }

    /// Metrics for `est` as an estimate of reference `target`.
    pub fn score(&self, est: &Waveform, target: usize) -> Result<BssResult> {
        Ok(sdr_sir_sar(&self.decompose(est, target)?))
    }

    /// Scores `est`, and `mix` as a do-nothing baseline, against `target`.
    pub fn clip_metrics(&self, est: &Waveform, mix: &Waveform, target: usize) -> Result<ClipMetrics> {
        let e = self.score(est, target)?;
        let m = self.score(mix, target)?;
        Ok(ClipMetrics {
            nsdr: e.sdr - m.sdr,
            sir: e.sir,
            sar: e.sar,
        })
    }
}

fn spectrum(fft: &Arc<dyn Fft<f64>>, x: &[f64], nfft: usize) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    buf.resize(nfft, Complex64::new(0.0, 0.0));
    fft.process(&mut buf);
    buf
}

/// Circular cross-correlation `c[k] = Σ_s a[s] b[s + k]` from spectra.
fn correlate(ifft: &Arc<dyn Fft<f64>>, a: &[Complex64], b: &[Complex64], nfft: usize) -> Vec<f64> {
    let mut buf: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x.conj() * y).collect();
    ifft.process(&mut buf);
    buf.iter().map(|c| c.re / nfft as f64).collect()
}

/// Lower-triangular factor of a symmetric positive definite matrix (row-major).
struct Cholesky {
    l: Vec<f64>,
    n: usize,
}

impl Cholesky {
    fn factor(mut a: Vec<f64>, n: usize) -> Result<Self> {
        let mean_diag = (0..n).map(|i| a[i * n + i]).sum::<f64>() / n as f64;
        let jitter = GRAM_JITTER * mean_diag.max(f64::MIN_POSITIVE);
        for i in 0..n {
            a[i * n + i] += jitter;
        }
        for j in 0..n {
            let d = a[j * n + j] - a[j * n..j * n + j].iter().map(|v| v * v).sum::<f64>();
            if d.is_nan() || d <= 0.0 {
                return Err(Error::InvalidParameter(
                    "reference Gram matrix is not positive definite".into(),
                ));
            }
            let d = d.sqrt();
            a[j * n + j] = d;
            for i in j + 1..n {
                let dot: f64 = (0..j).map(|k| a[i * n + k] * a[j * n + k]).sum();
                a[i * n + j] = (a[i * n + j] - dot) / d;
            }
        }
        Ok(Cholesky { l: a, n })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let l = &self.l;
        let mut y = b.to_vec();
        for i in 0..n {
            let dot: f64 = (0..i).map(|k| l[i * n + k] * y[k]).sum();
            y[i] = (y[i] - dot) / l[i * n + i];
        }
        for i in (0..n).rev() {
            let dot: f64 = (i + 1..n).map(|k| l[k * n + i] * y[k]).sum();
            y[i] = (y[i] - dot) / l[i * n + i];
        }
        y
    }
}

/// Decomposes `est` against `refs`, with `refs[target]` as the true source.
pub fn bss_decompose(
    est: &Waveform,
    refs: &[Waveform],
    target: usize,
    filter_len: usize,
) -> Result<Decomposition> {
    BssEvaluator::new(refs, filter_len)?.decompose(est, target)
}

fn energy(x: impl Iterator<Item = f64>) -> f64 {
    x.map(|v| v * v).sum()
}

fn ratio_db(num: f64, den: f64) -> f64 {
    if den < ENERGY_FLOOR {
        return DB_CAP;
    }
    if num <= 0.0 {
        return -DB_CAP;
    }
    (10.0 * (num / den).log10()).clamp(-DB_CAP, DB_CAP)
}

pub fn sdr_sir_sar(d: &Decomposition) -> BssResult {
    let target = energy(d.s_target.iter().copied());
    let interf = energy(d.e_interf.iter().copied());
    let artif = energy(d.e_artif.iter().copied());
    let distortion = energy(d.e_interf.iter().zip(&d.e_artif).map(|(a, b)| a + b));
    let filtered = energy(d.s_target.iter().zip(&d.e_interf).map(|(a, b)| a + b));
    BssResult {
        sdr: ratio_db(target, distortion),
        sir: ratio_db(target, interf),
        sar: ratio_db(filtered, artif),
    }
}

/// SDR improvement of `est` over using the mixture itself as the estimate.
pub fn nsdr(
    est: &Waveform,
    mix: &Waveform,
    refs: &[Waveform],
    target: usize,
    filter_len: usize,
) -> Result<f64> {
    Ok(BssEvaluator::new(refs, filter_len)?
        .clip_metrics(est, mix, target)?
        .nsdr)
}

/// Length-weighted means of per-clip metrics.
pub fn aggregate_global(clips: &[ClipMetrics], lengths: &[usize]) -> Result<GlobalMetrics> {
    if clips.is_empty() {
        return Err(Error::EmptyInput("clip list"));
    }
    if clips.len() != lengths.len() {
        return Err(Error::InvalidParameter(format!(
            "{} clips but {} lengths",
            clips.len(),
            lengths.len()
        )));
    }
    let total: usize = lengths.iter().sum();
    if total == 0 {
        return Err(Error::InvalidParameter("total clip length is zero".into()));
    }
    let mut g = GlobalMetrics {
        gnsdr: 0.0,
        gsir: 0.0,
        gsar: 0.0,
    };
    for (m, &len) in clips.iter().zip(lengths) {
        let w = len as f64 / total as f64;
        g.gnsdr += w * m.nsdr;
        g.gsir += w * m.sir;
        g.gsar += w * m.sar;
    }
    Ok(g)
}
