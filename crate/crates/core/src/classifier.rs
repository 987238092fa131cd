//! Threshold decision and silence gating, producing the three-level
//! segmentation trace.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::lpc::SfdiContour;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ClassifierConfig {
    /// Decision threshold on the index, radians.
    pub threshold_t: f64,
    /// Frames below this fraction of the utterance's peak frame energy are silence.
    pub silence_ratio: f64,
    /// Majority-vote smoothing window in frames; 0 or 1 disables it.
    pub smoothing_window: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            threshold_t: 1.1,
            silence_ratio: 0.0004,
            smoothing_window: 0,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold_t > 0.0 && self.threshold_t < FRAC_PI_2) {
            return Err(Error::InvalidConfig(format!(
                "threshold {} outside (0, pi/2)",
                self.threshold_t
            )));
        }
        if !(0.0..1.0).contains(&self.silence_ratio) {
            return Err(Error::InvalidConfig(format!(
                "silence ratio {} outside [0, 1)",
                self.silence_ratio
            )));
        }
        Ok(())
    }

    /// True when the frame passes the energy gate.
    pub fn is_audible(&self, energy: f64, max_energy: f64) -> bool {
        max_energy > 0.0 && energy >= self.silence_ratio * max_energy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum FrameClass {
    /// Index above threshold.
    Fricative,
    Sonorant,
    Silence,
}

impl FrameClass {
    pub fn level(self) -> f64 {
        match self {
            FrameClass::Fricative => 0.5,
            FrameClass::Sonorant => -0.5,
            FrameClass::Silence => 0.0,
        }
    }

    pub fn from_level(level: f64) -> Option<Self> {
        if level == 0.5 {
            Some(FrameClass::Fricative)
        } else if level == -0.5 {
            Some(FrameClass::Sonorant)
        } else if level == 0.0 {
            Some(FrameClass::Silence)
        } else {
            None
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FrameClass::Fricative => "fricative",
            FrameClass::Sonorant => "sonorant",
            FrameClass::Silence => "silence",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "fricative" => Some(FrameClass::Fricative),
            "sonorant" => Some(FrameClass::Sonorant),
            "silence" => Some(FrameClass::Silence),
            _ => None,
        }
    }
}

pub fn classify_frame(
    t_one: f64,
    energy: f64,
    max_energy: f64,
    config: &ClassifierConfig,
) -> FrameClass {
    if !config.is_audible(energy, max_energy) {
        FrameClass::Silence
    } else if t_one > config.threshold_t {
        FrameClass::Fricative
    } else {
        FrameClass::Sonorant
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Segment {
    pub class: FrameClass,
    pub first_frame: usize,
    pub frame_count: usize,
    pub start_ms: f64,
    pub end_ms: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SegmentationTrace {
    pub classes: Vec<FrameClass>,
    pub levels: Vec<f64>,
    pub segments: Vec<Segment>,
    /// Start of frame 0's center interval.
    pub origin_ms: f64,
    pub hop_ms: f64,
}

impl SegmentationTrace {
    pub fn from_classes(classes: Vec<FrameClass>, origin_ms: f64, hop_ms: f64) -> Self {
        let levels = classes.iter().map(|c| c.level()).collect();
        let segments = run_lengths(&classes, origin_ms, hop_ms);
        Self {
            classes,
            levels,
            segments,
            origin_ms,
            hop_ms,
        }
    }

    /// Expands the segment list back to per-frame classes.
    pub fn classes_from_segments(segments: &[Segment]) -> Vec<FrameClass> {
        segments
            .iter()
            .flat_map(|s| std::iter::repeat_n(s.class, s.frame_count))
            .collect()
    }

    /// Rebuilds a trace from per-frame levels.
    pub fn from_levels(levels: &[f64], origin_ms: f64, hop_ms: f64) -> Option<Self> {
        let classes = levels
            .iter()
            .map(|&l| FrameClass::from_level(l))
            .collect::<Option<Vec<_>>>()?;
        Some(Self::from_classes(classes, origin_ms, hop_ms))
    }
}

fn run_lengths(classes: &[FrameClass], origin_ms: f64, hop_ms: f64) -> Vec<Segment> {
    let mut segments: Vec<Segment> = Vec::new();
    for (i, &class) in classes.iter().enumerate() {
        match segments.last_mut() {
            Some(seg) if seg.class == class => {
                seg.frame_count += 1;
                seg.end_ms = origin_ms + (i + 1) as f64 * hop_ms;
            }
            _ => segments.push(Segment {
                class,
                first_frame: i,
                frame_count: 1,
                start_ms: origin_ms + i as f64 * hop_ms,
                end_ms: origin_ms + (i + 1) as f64 * hop_ms,
            }),
        }
    }
    segments
}

/// Majority vote over a centered window of `window` frames; ties keep the
/// original class.
pub fn smooth_classes(classes: &[FrameClass], window: usize) -> Vec<FrameClass> {
    if window <= 1 || classes.is_empty() {
        return classes.to_vec();
    }
    let half = window / 2;
    (0..classes.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + window - half).min(classes.len());
            let mut counts = [0usize; 3];
            for c in &classes[lo..hi] {
                counts[*c as usize] += 1;
            }
            let own = classes[i] as usize;
            let best = (0..3).max_by_key(|&k| (counts[k], k == own)).unwrap();
            if counts[best] > counts[own] {
                [
                    FrameClass::Fricative,
                    FrameClass::Sonorant,
                    FrameClass::Silence,
                ][best]
            } else {
                classes[i]
            }
        })
        .collect()
}

pub fn classify_contour(contour: &SfdiContour, config: &ClassifierConfig) -> Vec<FrameClass> {
    let max_energy = contour.max_energy();
    let raw: Vec<FrameClass> = contour
        .frames
        .iter()
        .map(|f| classify_frame(f.t_one, f.energy, max_energy, config))
        .collect();
    smooth_classes(&raw, config.smoothing_window)
}

pub fn segment(contour: &SfdiContour, config: &ClassifierConfig) -> SegmentationTrace {
    let classes = classify_contour(contour, config);
    let origin = contour.frames.first().map_or(0.0, |f| f.center_start_ms);
    SegmentationTrace::from_classes(classes, origin, contour.hop_ms)
}
