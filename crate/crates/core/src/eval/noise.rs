use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::frames::AudioBuffer;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Global SNR in dB; `f64::INFINITY` leaves the signal untouched.
    pub target_snr_db: f64,
    pub rng_seed: u64,
}

/// A row condition of the noise experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseLevel {
    Clean,
    Snr(f64),
}

impl NoiseLevel {
    pub fn snr_db(self) -> f64 {
        match self {
            NoiseLevel::Clean => f64::INFINITY,
            NoiseLevel::Snr(db) => db,
        }
    }

    /// Parses `clean` or a dB value such as `20` or `20dB`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("clean") || s.eq_ignore_ascii_case("orig") {
            return Some(NoiseLevel::Clean);
        }
        let num = s
            .strip_suffix("dB")
            .or_else(|| s.strip_suffix("db"))
            .unwrap_or(s)
            .trim();
        num.parse::<f64>().ok().filter(|v| !v.is_nan()).map(|v| {
            if v.is_infinite() && v > 0.0 {
                NoiseLevel::Clean
            } else {
                NoiseLevel::Snr(v)
            }
        })
    }
}

impl fmt::Display for NoiseLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseLevel::Clean => f.write_str("clean"),
            NoiseLevel::Snr(db) => write!(f, "{db}dB"),
        }
    }
}

impl serde::Serialize for NoiseLevel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Seed for one file, independent of traversal order.
pub fn file_seed(master_seed: u64, key: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master_seed.to_le_bytes());
    h.update(key.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

/// Unit-variance Gaussian noise from the seeded generator.
pub fn gaussian_noise(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Adds white Gaussian noise scaled so the global SNR over the whole buffer
/// equals the target, measured against the realised noise power.
pub fn add_white_noise(buffer: &AudioBuffer, spec: &NoiseSpec) -> Result<AudioBuffer> {
    if spec.target_snr_db == f64::INFINITY {
        return Ok(buffer.clone());
    }
    let signal_power = buffer.power();
    if !(signal_power > 0.0) {
        return Err(Error::ZeroSignalPower);
    }
    if !spec.target_snr_db.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "SNR {} dB",
            spec.target_snr_db
        )));
    }
    let noise = gaussian_noise(buffer.len(), spec.rng_seed);
    let noise_power = noise.iter().map(|x| x * x).sum::<f64>() / noise.len() as f64;
    let gain = (signal_power / (noise_power * 10f64.powf(spec.target_snr_db / 10.0))).sqrt();
    let samples = buffer
        .samples()
        .iter()
        .zip(&noise)
        .map(|(s, n)| s + gain * n)
        .collect();
    AudioBuffer::new(samples, buffer.sample_rate_hz())
}
