//! Linear prediction by the autocorrelation method, and the discrimination
//! index built on it.
//!
//! The inverse filter is `A(z) = 1 + a1 z^-1 + ... + aM z^-M`. Its gain at
//! zero frequency, `A(1) = 1 + sum(a)`, is low for sonorants and high for
//! fricatives; `T(1) = atan(A(1))` compresses it into `(-pi/2, pi/2)`.

use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::frames::{
    center_interval, frame_energy, preemphasize, remove_mean, window_coefficients, AudioBuffer,
    FrameSpec,
};

/// Prediction order for a sampling rate: the rate in kHz (rounded) plus two.
pub fn model_order(sample_rate_hz: u32) -> Result<usize> {
    if sample_rate_hz < 1000 {
        return Err(Error::UnsupportedRate(sample_rate_hz));
    }
    let khz = (sample_rate_hz as f64 / 1000.0).round() as usize;
    Ok(khz + 2)
}

/// Biased autocorrelation `r[0..=max_lag]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocorrelationSeq {
    pub values: Vec<f64>,
}

impl AutocorrelationSeq {
    pub fn max_lag(&self) -> usize {
        self.values.len().saturating_sub(1)
    }
}

pub fn autocorrelation(samples: &[f64], max_lag: usize) -> Result<AutocorrelationSeq> {
    if max_lag >= samples.len() {
        return Err(Error::InvalidLag {
            max_lag,
            len: samples.len(),
        });
    }
    let values = (0..=max_lag)
        .map(|k| {
            samples[..samples.len() - k]
                .iter()
                .zip(&samples[k..])
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect();
    Ok(AutocorrelationSeq { values })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpcModel {
    pub order: usize,
    /// `a1..aM` of the inverse filter.
    pub coefficients: Vec<f64>,
    pub residual_energy: f64,
    /// `k1..kM`; `|k| < 1` for every stage of a stable model.
    pub reflection_coefficients: Vec<f64>,
}

impl LpcModel {
    pub fn a_one(&self) -> f64 {
        a_one(self)
    }

    pub fn is_stable(&self) -> bool {
        self.reflection_coefficients.iter().all(|k| k.abs() < 1.0)
    }
}

/// Levinson-Durbin recursion on the order-`order` normal equations.
pub fn levinson_durbin(acf: &AutocorrelationSeq, order: usize) -> Result<LpcModel> {
    let r = &acf.values;
    if r.len() < order + 1 {
        return Err(Error::InvalidLag {
            max_lag: order,
            len: r.len(),
        });
    }
    if !(r[0] > 0.0) {
        return Err(Error::DegenerateFrame(r[0]));
    }

    let mut a = vec![0.0; order];
    let mut scratch = vec![0.0; order];
    let mut reflection = Vec::with_capacity(order);
    let mut err = r[0];

    for i in 0..order {
        let mut acc = r[i + 1];
        for j in 0..i {
            acc += a[j] * r[i - j];
        }
        let k = -acc / err;
        let shrink = 1.0 - k * k;
        if !k.is_finite() || !(shrink > 0.0) {
            return Err(Error::NumericalBreakdown {
                order: i + 1,
                reflection: k,
            });
        }
        scratch[..i].copy_from_slice(&a[..i]);
        for j in 0..i {
            a[j] = scratch[j] + k * scratch[i - 1 - j];
        }
        a[i] = k;
        reflection.push(k);
        err *= shrink;
    }

    Ok(LpcModel {
        order,
        coefficients: a,
        residual_energy: err,
        reflection_coefficients: reflection,
    })
}

/// Inverse-filter gain at zero frequency, `1 + a1 + ... + aM`.
pub fn a_one(model: &LpcModel) -> f64 {
    let mut sum = 1.0;
    for a in &model.coefficients {
        sum += a;
    }
    sum
}

/// The discrimination index, `atan(A(1))` in radians.
pub fn t_one(a1: f64) -> f64 {
    a1.atan()
}

/// Knobs for pathological inputs; the defaults leave the analysis untouched.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct LpcOptions {
    /// Frames whose zero-lag autocorrelation is at or below this value are degenerate.
    pub r0_floor: f64,
}

/// Per-frame result of the full analysis chain.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameAnalysis {
    /// `None` for degenerate frames.
    pub model: Option<LpcModel>,
    pub energy: f64,
}

impl FrameAnalysis {
    pub fn a_one(&self) -> f64 {
        self.model.as_ref().map_or(1.0, a_one)
    }

    pub fn is_degenerate(&self) -> bool {
        self.model.is_none()
    }
}

/// Precomputed per-rate state for analysing frames.
#[derive(Debug, Clone)]
pub struct FrameAnalyzer {
    order: usize,
    alpha: f64,
    window: Vec<f64>,
    options: LpcOptions,
}

impl FrameAnalyzer {
    pub fn new(spec: &FrameSpec, sample_rate_hz: u32, options: LpcOptions) -> Result<Self> {
        let (len, _) = spec.geometry(sample_rate_hz)?;
        let order = model_order(sample_rate_hz)?;
        if order >= len {
            return Err(Error::InvalidLag {
                max_lag: order,
                len,
            });
        }
        Ok(Self {
            order,
            alpha: spec.preemphasis_alpha,
            window: window_coefficients(spec.window, len)?,
            options,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Mean removal, preemphasis, windowing, autocorrelation and Levinson on one frame.
    pub fn analyze(&self, samples: &[f64]) -> Result<FrameAnalysis> {
        assert_eq!(samples.len(), self.window.len(), "frame length mismatch");
        let centered = remove_mean(samples);
        let energy = frame_energy(&centered);
        let shaped: Vec<f64> = preemphasize(&centered, self.alpha)
            .iter()
            .zip(&self.window)
            .map(|(x, w)| x * w)
            .collect();
        let acf = autocorrelation(&shaped, self.order)?;
        if acf.values[0] <= self.options.r0_floor {
            return Ok(FrameAnalysis {
                model: None,
                energy,
            });
        }
        let model = levinson_durbin(&acf, self.order)?;
        Ok(FrameAnalysis {
            model: Some(model),
            energy,
        })
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ContourFrame {
    pub index: usize,
    pub start_sample: usize,
    pub center_start_ms: f64,
    pub center_end_ms: f64,
    pub a_one: f64,
    pub t_one: f64,
    pub energy: f64,
    pub degenerate: bool,
}

/// Staircase contour: each frame's value covers its middle hop interval.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SfdiContour {
    pub frames: Vec<ContourFrame>,
    pub hop_ms: f64,
    pub sample_rate_hz: u32,
}

impl SfdiContour {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn t_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.frames.iter().map(|f| f.t_one)
    }

    pub fn max_energy(&self) -> f64 {
        self.frames.iter().fold(0.0, |m, f| m.max(f.energy))
    }
}

pub fn sfdi_contour(buffer: &AudioBuffer, spec: &FrameSpec) -> Result<SfdiContour> {
    sfdi_contour_with(buffer, spec, LpcOptions::default())
}

pub fn sfdi_contour_with(
    buffer: &AudioBuffer,
    spec: &FrameSpec,
    options: LpcOptions,
) -> Result<SfdiContour> {
    let rate = buffer.sample_rate_hz();
    let (len, hop) = spec.geometry(rate)?;
    if buffer.len() < len {
        return Err(Error::EmptySignal(format!(
            "{} samples is shorter than one {len}-sample frame",
            buffer.len()
        )));
    }
    let analyzer = FrameAnalyzer::new(spec, rate, options)?;
    let count = (buffer.len() - len) / hop + 1;
    let mut frames = Vec::with_capacity(count);
    for index in 0..count {
        let start = index * hop;
        let analysis = analyzer.analyze(&buffer.samples()[start..start + len])?;
        let (center_start_ms, center_end_ms) = center_interval(start, len, hop, rate);
        let (a1, t1) = match &analysis.model {
            Some(model) => {
                let a1 = a_one(model);
                (a1, t_one(a1))
            }
            None => (1.0, FRAC_PI_4),
        };
        frames.push(ContourFrame {
            index,
            start_sample: start,
            center_start_ms,
            center_end_ms,
            a_one: a1,
            t_one: t1,
            energy: analysis.energy,
            degenerate: analysis.is_degenerate(),
        });
    }
    Ok(SfdiContour {
        frames,
        hop_ms: hop as f64 * 1000.0 / rate as f64,
        sample_rate_hz: rate,
    })
}
