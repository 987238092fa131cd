//! Framing and per-frame conditioning of the input waveform.
//!
//! The analysis chain for one frame is mean removal, then preemphasis, then
//! windowing. Frame energy for the silence gate is taken after mean removal
//! only, so it tracks signal level rather than spectral tilt.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A mono waveform with full-scale samples in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if sample_rate_hz == 0 {
            return Err(Error::InvalidSampleRate(sample_rate_hz));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_ms(&self) -> f64 {
        self.samples.len() as f64 * 1000.0 / self.sample_rate_hz as f64
    }

    /// Mean power over the whole buffer.
    pub fn power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|x| x * x).sum::<f64>() / self.samples.len() as f64
    }

    /// Returns a copy with every sample multiplied by `gain`.
    pub fn scaled(&self, gain: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|x| x * gain).collect(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    Hanning,
    Rectangular,
}

/// Frame geometry and conditioning parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FrameSpec {
    pub frame_len_ms: f64,
    pub hop_ms: f64,
    pub preemphasis_alpha: f64,
    pub window: Window,
}

impl Default for FrameSpec {
    fn default() -> Self {
        Self {
            frame_len_ms: 20.0,
            hop_ms: 5.0,
            preemphasis_alpha: 0.97,
            window: Window::Hanning,
        }
    }
}

impl FrameSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.hop_ms.is_finite() && self.frame_len_ms.is_finite()) {
            return Err(Error::InvalidFrameSpec("durations must be finite".into()));
        }
        if !(self.hop_ms > 0.0 && self.hop_ms <= self.frame_len_ms) {
            return Err(Error::InvalidFrameSpec(format!(
                "need 0 < hop ({} ms) <= frame length ({} ms)",
                self.hop_ms, self.frame_len_ms
            )));
        }
        if !(0.0..1.0).contains(&self.preemphasis_alpha) {
            return Err(Error::InvalidFrameSpec(format!(
                "preemphasis coefficient {} outside [0, 1)",
                self.preemphasis_alpha
            )));
        }
        Ok(())
    }

    pub fn frame_len_samples(&self, sample_rate_hz: u32) -> usize {
        ms_to_samples(self.frame_len_ms, sample_rate_hz)
    }

    pub fn hop_samples(&self, sample_rate_hz: u32) -> usize {
        ms_to_samples(self.hop_ms, sample_rate_hz)
    }

    /// Frame and hop lengths in samples, checked for this rate.
    pub fn geometry(&self, sample_rate_hz: u32) -> Result<(usize, usize)> {
        self.validate()?;
        let len = self.frame_len_samples(sample_rate_hz);
        let hop = self.hop_samples(sample_rate_hz);
        if len < 2 {
            return Err(Error::InvalidFrameSpec(format!(
                "frame of {} ms is {len} samples at {sample_rate_hz} Hz; need at least 2",
                self.frame_len_ms
            )));
        }
        if hop == 0 || hop > len {
            return Err(Error::InvalidFrameSpec(format!(
                "hop of {} ms is {hop} samples at {sample_rate_hz} Hz",
                self.hop_ms
            )));
        }
        Ok((len, hop))
    }

    /// Number of whole frames that fit in `n` samples.
    pub fn frame_count(&self, n: usize, sample_rate_hz: u32) -> Result<usize> {
        let (len, hop) = self.geometry(sample_rate_hz)?;
        Ok(if n < len { 0 } else { (n - len) / hop + 1 })
    }

    /// Sample at the midpoint of the middle hop interval, relative to frame start.
    pub fn center_offset(&self, sample_rate_hz: u32) -> Result<usize> {
        let (len, hop) = self.geometry(sample_rate_hz)?;
        Ok((len - hop) / 2 + hop / 2)
    }
}

fn ms_to_samples(ms: f64, sample_rate_hz: u32) -> usize {
    (ms * sample_rate_hz as f64 / 1000.0).round() as usize
}

/// One analysis frame; samples are raw copies of the buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub index: usize,
    pub start_sample: usize,
    pub samples: Vec<f64>,
    /// Middle hop interval `(start_ms, end_ms)`; the frame's value is held over it.
    pub center_interval: (f64, f64),
}

/// Timing of the middle hop interval of frame `index`.
pub fn center_interval(
    start_sample: usize,
    len: usize,
    hop: usize,
    sample_rate_hz: u32,
) -> (f64, f64) {
    let per_ms = sample_rate_hz as f64 / 1000.0;
    let start = (start_sample as f64 + (len - hop) as f64 / 2.0) / per_ms;
    (start, start + hop as f64 / per_ms)
}

pub fn frame_signal(buffer: &AudioBuffer, spec: &FrameSpec) -> Result<Vec<Frame>> {
    let rate = buffer.sample_rate_hz();
    let (len, hop) = spec.geometry(rate)?;
    if buffer.len() < len {
        return Err(Error::EmptySignal(format!(
            "{} samples is shorter than one {len}-sample frame",
            buffer.len()
        )));
    }
    let count = (buffer.len() - len) / hop + 1;
    Ok((0..count)
        .map(|index| {
            let start = index * hop;
            Frame {
                index,
                start_sample: start,
                samples: buffer.samples()[start..start + len].to_vec(),
                center_interval: center_interval(start, len, hop, rate),
            }
        })
        .collect())
}

pub fn remove_mean(samples: &[f64]) -> Vec<f64> {
    if samples.is_empty() {
        return Vec::new();
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    samples.iter().map(|x| x - mean).collect()
}

/// First-order preemphasis `y[n] = x[n] - alpha * x[n-1]`, with `y[0] = x[0]`.
pub fn preemphasize(samples: &[f64], alpha: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut prev = 0.0;
    for (n, &x) in samples.iter().enumerate() {
        out.push(if n == 0 { x } else { x - alpha * prev });
        prev = x;
    }
    out
}

/// Symmetric Hanning window, zero at both endpoints.
pub fn hanning_window(len: usize) -> Result<Vec<f64>> {
    if len < 2 {
        return Err(Error::InvalidWindow(len));
    }
    let denom = (len - 1) as f64;
    let mut w: Vec<f64> = (0..len)
        .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / denom).cos())
        .collect();
    // cos() is not exactly symmetric in floating point; mirror the first half.
    for n in 0..len / 2 {
        w[len - 1 - n] = w[n];
    }
    Ok(w)
}

pub fn window_coefficients(window: Window, len: usize) -> Result<Vec<f64>> {
    match window {
        Window::Hanning => hanning_window(len),
        Window::Rectangular if len >= 2 => Ok(vec![1.0; len]),
        Window::Rectangular => Err(Error::InvalidWindow(len)),
    }
}

pub fn frame_energy(samples: &[f64]) -> f64 {
    samples.iter().map(|x| x * x).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn buffer(n: usize, rate: u32) -> AudioBuffer {
        AudioBuffer::new((0..n).map(|i| (i as f64 * 0.01).sin()).collect(), rate).unwrap()
    }

    #[test]
    fn single_frame_when_buffer_matches_frame_length() {
        let frames = frame_signal(&buffer(320, 16_000), &FrameSpec::default()).unwrap();
        assert_eq!(frames.len(), 1);
        assert_eq!(frames[0].samples.len(), 320);
        assert_eq!(frames[0].center_interval, (7.5, 12.5));
    }

    #[test]
    fn two_frames_from_400_samples() {
        let frames = frame_signal(&buffer(400, 16_000), &FrameSpec::default()).unwrap();
        let starts: Vec<_> = frames.iter().map(|f| f.start_sample).collect();
        assert_eq!(starts, vec![0, 80]);
    }

    #[test]
    fn one_second_gives_197_frames() {
        // enumerate admissible start offsets directly
        let expected = (0..16_000)
            .step_by(80)
            .filter(|s| s + 320 <= 16_000)
            .count();
        assert_eq!(expected, 197);
        let frames = frame_signal(&buffer(16_000, 16_000), &FrameSpec::default()).unwrap();
        assert_eq!(frames.len(), expected);
    }

    #[test]
    fn short_buffer_is_empty_signal() {
        let err = frame_signal(&buffer(319, 16_000), &FrameSpec::default()).unwrap_err();
        assert!(matches!(err, Error::EmptySignal(_)));
    }

    #[test]
    fn frame_spec_rejects_bad_hop() {
        let spec = FrameSpec {
            hop_ms: 25.0,
            ..FrameSpec::default()
        };
        assert!(matches!(spec.validate(), Err(Error::InvalidFrameSpec(_))));
        let spec = FrameSpec {
            hop_ms: 0.0,
            ..FrameSpec::default()
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn mean_removal_examples() {
        assert_eq!(remove_mean(&[0.5; 8]), vec![0.0; 8]);
        assert_eq!(remove_mean(&[0.0; 4]), vec![0.0; 4]);
        assert_eq!(
            remove_mean(&[1.0, 2.0, 3.0, 4.0]),
            vec![-1.5, -0.5, 0.5, 1.5]
        );
    }

    #[test]
    fn preemphasis_examples() {
        let x = [0.3, -0.2, 0.9];
        assert_eq!(preemphasize(&x, 0.0), x.to_vec());
        assert_eq!(preemphasize(&[1.0, 1.0, 1.0], 1.0), vec![1.0, 0.0, 0.0]);
        assert_eq!(preemphasize(&[1.0, 0.0, 0.0], 0.97), vec![1.0, -0.97, 0.0]);
    }

    #[test]
    fn hanning_examples() {
        let w3 = hanning_window(3).unwrap();
        assert!((w3[0]).abs() < 1e-15 && (w3[1] - 1.0).abs() < 1e-15 && w3[2].abs() < 1e-15);
        let w5 = hanning_window(5).unwrap();
        for (got, want) in w5.iter().zip([0.0, 0.5, 1.0, 0.5, 0.0]) {
            assert!((got - want).abs() < 1e-15, "{w5:?}");
        }
        assert!(matches!(hanning_window(1), Err(Error::InvalidWindow(1))));
    }

    #[test]
    fn energy_examples() {
        assert_eq!(frame_energy(&[0.0; 10]), 0.0);
        assert_eq!(frame_energy(&[1.0, -1.0]), 2.0);
    }

    proptest! {
        #[test]
        fn frame_count_matches_formula(n in 2usize..5000, len in 2usize..400, hop_frac in 0.01f64..=1.0) {
            let hop = ((len as f64 * hop_frac).round() as usize).clamp(1, len);
            prop_assume!(n >= len);
            let rate = 1000;
            let spec = FrameSpec {
                frame_len_ms: len as f64,
                hop_ms: hop as f64,
                ..FrameSpec::default()
            };
            let buf = AudioBuffer::new(vec![0.1; n], rate).unwrap();
            let frames = frame_signal(&buf, &spec).unwrap();
            prop_assert_eq!(frames.len(), (n - len) / hop + 1);
            for (i, f) in frames.iter().enumerate() {
                prop_assert_eq!(f.start_sample, i * hop);
                prop_assert!(f.start_sample + len <= n);
                let (a, b) = f.center_interval;
                prop_assert!((b - a - hop as f64).abs() < 1e-9);
            }
        }

        #[test]
        fn mean_removal_is_idempotent(x in proptest::collection::vec(-1.0f64..1.0, 1..512)) {
            let once = remove_mean(&x);
            let twice = remove_mean(&once);
            let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
            prop_assert!(once.iter().sum::<f64>().abs() <= 1e-12 * scale * x.len() as f64);
            for (a, b) in once.iter().zip(&twice) {
                prop_assert!((a - b).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn hanning_is_symmetric_and_bounded(len in 2usize..=4096) {
            let w = hanning_window(len).unwrap();
            for n in 0..len {
                prop_assert!((0.0..=1.0).contains(&w[n]));
                prop_assert_eq!(w[n], w[len - 1 - n]);
            }
        }

        #[test]
        fn zero_preemphasis_is_identity(x in proptest::collection::vec(-1.0f64..1.0, 0..256)) {
            prop_assert_eq!(preemphasize(&x, 0.0), x);
        }

        #[test]
        fn energy_is_order_free_and_quadratic(
            x in proptest::collection::vec(-1.0f64..1.0, 1..256),
            c in 0.01f64..100.0,
        ) {
            let e = frame_energy(&x);
            let mut rev = x.clone();
            rev.reverse();
            prop_assert!((frame_energy(&rev) - e).abs() <= 1e-12 * e.max(1e-300));
            let scaled: Vec<f64> = x.iter().map(|v| v * c).collect();
            prop_assert!((frame_energy(&scaled) - c * c * e).abs() <= 1e-10 * c * c * e.max(1e-300));
        }
    }
}
