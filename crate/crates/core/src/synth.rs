//! Synthetic labelled speech-like material for tests, demos and desk-scale
//! experiments when no real corpus is at hand.
//!
//! Sonorant-like segments are glottal pulse trains shaped by a low-pass
//! source and formant resonators; fricative-like segments are Gaussian noise
//! pushed through a high-frequency resonator and a first difference.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::corpus::{PhoneLabel, SplitTag, Utterance};
use crate::frames::AudioBuffer;

const SONORANTS: [&str; 6] = ["aa", "iy", "eh", "m", "n", "l"];
const FRICATIVES: [&str; 4] = ["s", "sh", "z", "f"];

/// Two-pole resonator at `freq` Hz with bandwidth `bw` Hz, unity peak-ish gain.
fn resonate(x: &[f64], freq: f64, bw: f64, rate: f64) -> Vec<f64> {
    let r = (-PI * bw / rate).exp();
    let theta = 2.0 * PI * freq / rate;
    let (b1, b2) = (2.0 * r * theta.cos(), -r * r);
    let gain = 1.0 - r;
    let (mut y1, mut y2) = (0.0, 0.0);
    x.iter()
        .map(|&v| {
            let y = gain * v + b1 * y1 + b2 * y2;
            y2 = y1;
            y1 = y;
            y
        })
        .collect()
}

fn one_pole_lowpass(x: &[f64], pole: f64) -> Vec<f64> {
    let mut y = 0.0;
    x.iter()
        .map(|&v| {
            y = v + pole * y;
            y
        })
        .collect()
}

fn normalize_rms(x: &mut [f64], rms: f64) {
    let cur = (x.iter().map(|v| v * v).sum::<f64>() / x.len().max(1) as f64).sqrt();
    if cur > 0.0 {
        let g = rms / cur;
        x.iter_mut().for_each(|v| *v *= g);
    }
}

fn gaussian(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(&mut *rng)).collect()
}

/// Voiced, low-pass, periodic segment of `n` samples at the given RMS level.
pub fn sonorant_like(n: usize, rate: u32, rms: f64, rng: &mut impl Rng) -> Vec<f64> {
    let fs = rate as f64;
    let f0 = rng.random_range(90.0..220.0);
    let period = fs / f0;
    let phase = rng.random_range(0.0..period);
    let mut src = vec![0.0; n];
    let mut t = phase;
    while (t as usize) < n {
        src[t as usize] = 1.0;
        t += period * rng.random_range(0.98..1.02);
    }
    // glottal roll-off, then three formants
    let mut y = one_pole_lowpass(&one_pole_lowpass(&src, 0.97), 0.9);
    let nyq = fs / 2.0;
    let f1 = rng.random_range(250.0..800.0);
    let f2 = rng.random_range(900.0..2200.0f64).min(0.45 * nyq);
    let f3 = rng.random_range(2300.0..3200.0f64).min(0.8 * nyq);
    let formants = [(f1, 90.0), (f2, 120.0), (f3, 180.0)];
    let mut out = vec![0.0; n];
    for (i, &(f, bw)) in formants.iter().enumerate() {
        let weight = [1.0, 0.5, 0.25][i];
        for (o, v) in out.iter_mut().zip(resonate(&y, f, bw, fs)) {
            *o += weight * v;
        }
    }
    // a little aspiration noise
    let breath = gaussian(n, rng);
    y = out;
    normalize_rms(&mut y, rms);
    for (v, b) in y.iter_mut().zip(breath) {
        *v += 0.01 * rms * b;
    }
    y
}

/// Turbulent, high-pass noise segment of `n` samples at the given RMS level.
pub fn fricative_like(n: usize, rate: u32, rms: f64, rng: &mut impl Rng) -> Vec<f64> {
    let fs = rate as f64;
    let nyq = fs / 2.0;
    let white = gaussian(n + 1, rng);
    let centre = rng.random_range(0.45..0.85) * nyq;
    let bw = rng.random_range(0.15..0.4) * nyq;
    let shaped = resonate(&white, centre, bw, fs);
    let mut y: Vec<f64> = shaped
        .windows(2)
        .zip(white.windows(2))
        .map(|(s, w)| (s[1] - s[0]) + 0.3 * (w[1] - w[0]))
        .collect();
    normalize_rms(&mut y, rms);
    y
}

/// Near-silent background.
pub fn silence_like(n: usize, rms: f64, rng: &mut impl Rng) -> Vec<f64> {
    gaussian(n, rng).into_iter().map(|v| v * rms).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    Sonorant,
    Fricative,
    Silence,
}

/// One piece of a constructed utterance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub kind: SegmentKind,
    pub duration_ms: f64,
}

/// Concatenates pieces; returns the audio and the construction boundaries in samples.
pub fn concatenate(pieces: &[Piece], rate: u32, seed: u64) -> (AudioBuffer, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::new();
    let mut bounds = Vec::new();
    for p in pieces {
        let n = (p.duration_ms * rate as f64 / 1000.0).round() as usize;
        let seg = match p.kind {
            SegmentKind::Sonorant => sonorant_like(n, rate, 0.15, &mut rng),
            SegmentKind::Fricative => fricative_like(n, rate, 0.05, &mut rng),
            SegmentKind::Silence => silence_like(n, 1e-4, &mut rng),
        };
        samples.extend(seg);
        bounds.push(samples.len());
    }
    bounds.pop();
    let buf = AudioBuffer::new(samples, rate).expect("rate is positive");
    (buf, bounds)
}

/// A labelled utterance alternating silence, sonorant and fricative stretches.
pub fn synth_utterance(key: &str, split: SplitTag, rate: u32, seed: u64) -> Utterance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ms = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| {
        (rng.random_range(lo..hi) * rate as f64 / 1000.0).round() as usize
    };
    let mut samples: Vec<f64> = Vec::new();
    let mut labels: Vec<PhoneLabel> = Vec::new();
    let mut push = |samples: &mut Vec<f64>, seg: Vec<f64>, symbol: &str| {
        let start = samples.len();
        samples.extend(seg);
        labels.push(PhoneLabel {
            start_sample: start,
            end_sample: samples.len(),
            symbol: symbol.to_string(),
        });
    };

    let n = ms(&mut rng, 80.0, 150.0);
    push(&mut samples, silence_like(n, 2e-4, &mut rng), "h#");
    let segments = rng.random_range(6..10);
    let mut fricative_next = rng.random_bool(0.5);
    for _ in 0..segments {
        if fricative_next {
            let n = ms(&mut rng, 70.0, 200.0);
            let sym = FRICATIVES[rng.random_range(0..FRICATIVES.len())];
            let rms = rng.random_range(0.02..0.08);
            push(&mut samples, fricative_like(n, rate, rms, &mut rng), sym);
        } else {
            let n = ms(&mut rng, 80.0, 250.0);
            let sym = SONORANTS[rng.random_range(0..SONORANTS.len())];
            let rms = rng.random_range(0.08..0.25);
            push(&mut samples, sonorant_like(n, rate, rms, &mut rng), sym);
        }
        fricative_next = !fricative_next;
        if rng.random_bool(0.2) {
            let n = ms(&mut rng, 20.0, 60.0);
            push(&mut samples, silence_like(n, 2e-4, &mut rng), "pau");
        }
    }
    let n = ms(&mut rng, 80.0, 150.0);
    push(&mut samples, silence_like(n, 2e-4, &mut rng), "h#");

    Utterance {
        key: key.to_string(),
        split,
        audio: AudioBuffer::new(samples, rate).expect("rate is positive"),
        labels,
    }
}

/// `count` utterances at `rate`; every fifth one is tagged as the dev split.
pub fn synth_corpus(count: usize, rate: u32, seed: u64) -> Vec<Utterance> {
    (0..count)
        .map(|i| {
            let split = if i % 5 == 0 {
                SplitTag::Dev
            } else {
                SplitTag::Full
            };
            let item_seed = seed
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(i as u64);
            synth_utterance(&format!("synth/utt{i:03}.wav"), split, rate, item_seed)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_tile_the_utterance() {
        let u = synth_utterance("x", SplitTag::Full, 16_000, 3);
        assert_eq!(u.labels[0].start_sample, 0);
        assert_eq!(u.labels.last().unwrap().end_sample, u.audio.len());
        for w in u.labels.windows(2) {
            assert_eq!(w[0].end_sample, w[1].start_sample);
        }
        assert!(u.audio.samples().iter().all(|v| v.abs() < 1.0));
    }

    #[test]
    fn corpus_is_reproducible() {
        let a = synth_corpus(3, 8000, 42);
        let b = synth_corpus(3, 8000, 42);
        assert_eq!(a, b);
        assert_eq!(a[0].split, SplitTag::Dev);
        assert_eq!(a[1].split, SplitTag::Full);
        assert_ne!(a[0].audio, a[1].audio);
    }

    #[test]
    fn concatenation_reports_boundaries() {
        let pieces = [
            Piece {
                kind: SegmentKind::Sonorant,
                duration_ms: 300.0,
            },
            Piece {
                kind: SegmentKind::Fricative,
                duration_ms: 200.0,
            },
            Piece {
                kind: SegmentKind::Silence,
                duration_ms: 100.0,
            },
        ];
        let (buf, bounds) = concatenate(&pieces, 16_000, 1);
        assert_eq!(buf.len(), 9600);
        assert_eq!(bounds, vec![4800, 8000]);
    }
}
