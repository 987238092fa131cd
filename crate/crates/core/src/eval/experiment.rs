use crate::corpus::PhoneClassMap;
use crate::error::Result;

use super::noise::NoiseLevel;
use super::pools::{collect_levels, ClassPools, EvalConfig, FileFailure, UtteranceSource};
use super::sweep::{boundary_errors, frame_accuracy, threshold_grid, threshold_sweep, GRID_MAX};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct FrameCounts {
    pub sonorant: usize,
    pub fricative: usize,
}

impl From<&ClassPools> for FrameCounts {
    fn from(p: &ClassPools) -> Self {
        Self {
            sonorant: p.sonorant.len(),
            fricative: p.fricative.len(),
        }
    }
}

/// One noise condition: calibrated threshold and accuracies in percent.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ReportRow {
    pub level: NoiseLevel,
    pub threshold: f64,
    pub crossover_error_pct: f64,
    /// `None` when the corpus has no dev split.
    pub dev_accuracy_pct: Option<f64>,
    pub full_accuracy_pct: f64,
    pub dev_frames: FrameCounts,
    pub full_frames: FrameCounts,
    /// Full-set errors within one frame of a label change, and all full-set errors.
    pub boundary_errors: usize,
    pub total_errors: usize,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AccuracyReport {
    pub rows: Vec<ReportRow>,
    /// Split the thresholds were calibrated on: `dev`, or `full` when no dev split exists.
    pub calibration_split: &'static str,
    pub files_processed: usize,
    pub failures: Vec<FileFailure>,
}

impl AccuracyReport {
    pub fn row(&self, level: NoiseLevel) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.level == level)
    }
}

/// Per level: add noise per file, pool, calibrate the cross-over threshold on
/// the dev split (or the full set when there is none) and score both sets.
pub fn run_noise_experiment<S: UtteranceSource + ?Sized>(
    source: &S,
    map: &PhoneClassMap,
    config: &EvalConfig,
    levels: &[NoiseLevel],
    seed: u64,
) -> Result<AccuracyReport> {
    let run = collect_levels(source, map, config, levels, seed)?;
    let grid = threshold_grid(config.grid_step, GRID_MAX);
    let mut rows = Vec::with_capacity(levels.len());
    for (level, pools) in &run.levels {
        let calibration = if run.has_dev { &pools.dev } else { &pools.full };
        let sweep = threshold_sweep(calibration, &grid)?;
        let t = sweep.crossover_threshold;
        let (near, total) = boundary_errors(&pools.full, t);
        rows.push(ReportRow {
            level: *level,
            threshold: t,
            crossover_error_pct: 100.0 * sweep.crossover_error,
            dev_accuracy_pct: run.has_dev.then(|| 100.0 * frame_accuracy(&pools.dev, t)),
            full_accuracy_pct: 100.0 * frame_accuracy(&pools.full, t),
            dev_frames: (&pools.dev).into(),
            full_frames: (&pools.full).into(),
            boundary_errors: near,
            total_errors: total,
        });
    }
    Ok(AccuracyReport {
        rows,
        calibration_split: if run.has_dev { "dev" } else { "full" },
        files_processed: run.processed,
        failures: run.failures,
    })
}
