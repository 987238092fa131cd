//! Error-rate curves against the decision threshold and their cross-over.
//!
//! A frame with index `> T` is called fricative, so at threshold `T` the
//! sonorant error is the share of sonorant values above `T` and the
//! fricative error is the share of fricative values at or below `T`.

use crate::error::{Error, Result};

use super::pools::ClassPools;

/// Upper end of the default grid, just under pi/2.
pub const GRID_MAX: f64 = 1.57;

/// `0, step, 2 step, ...` up to `max` inclusive.
pub fn threshold_grid(step: f64, max: f64) -> Vec<f64> {
    let n = (max / step + 1e-9).floor() as usize;
    (0..=n).map(|i| i as f64 * step).collect()
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SweepResult {
    pub thresholds: Vec<f64>,
    pub sonorant_error_rate: Vec<f64>,
    pub fricative_error_rate: Vec<f64>,
    pub crossover_threshold: f64,
    pub crossover_error: f64,
    pub sonorant_frames: usize,
    pub fricative_frames: usize,
}

/// Sorted copies of the two pools, for repeated threshold queries.
#[derive(Debug, Clone)]
pub struct SortedPools {
    sonorant: Vec<f64>,
    fricative: Vec<f64>,
}

impl SortedPools {
    pub fn new(pools: &ClassPools) -> Self {
        let sort = |v: &[f64]| {
            let mut v = v.to_vec();
            v.sort_by(f64::total_cmp);
            v
        };
        Self {
            sonorant: sort(&pools.sonorant),
            fricative: sort(&pools.fricative),
        }
    }

    fn at_or_below(values: &[f64], t: f64) -> usize {
        values.partition_point(|&v| v <= t)
    }

    /// Sonorant values classified fricative (`> t`).
    pub fn sonorant_errors(&self, t: f64) -> usize {
        self.sonorant.len() - Self::at_or_below(&self.sonorant, t)
    }

    /// Fricative values classified sonorant (`<= t`).
    pub fn fricative_errors(&self, t: f64) -> usize {
        Self::at_or_below(&self.fricative, t)
    }

    pub fn sonorant_error_rate(&self, t: f64) -> f64 {
        rate(self.sonorant_errors(t), self.sonorant.len())
    }

    pub fn fricative_error_rate(&self, t: f64) -> f64 {
        rate(self.fricative_errors(t), self.fricative.len())
    }
}

fn rate(errors: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        errors as f64 / total as f64
    }
}

pub fn threshold_sweep(pools: &ClassPools, grid: &[f64]) -> Result<SweepResult> {
    if pools.sonorant.is_empty() {
        return Err(Error::UndefinedSweep("sonorant"));
    }
    if pools.fricative.is_empty() {
        return Err(Error::UndefinedSweep("fricative"));
    }
    if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidConfig(
            "threshold grid must be non-empty and ascending".into(),
        ));
    }
    let sorted = SortedPools::new(pools);
    let son: Vec<f64> = grid
        .iter()
        .map(|&t| sorted.sonorant_error_rate(t))
        .collect();
    let fri: Vec<f64> = grid
        .iter()
        .map(|&t| sorted.fricative_error_rate(t))
        .collect();
    let (crossover_threshold, crossover_error) = crossover(grid, &son, &fri, &sorted);
    Ok(SweepResult {
        thresholds: grid.to_vec(),
        sonorant_error_rate: son,
        fricative_error_rate: fri,
        crossover_threshold,
        crossover_error,
        sonorant_frames: pools.sonorant.len(),
        fricative_frames: pools.fricative.len(),
    })
}

/// The difference `son - fri` is non-increasing along the grid. Where it
/// touches zero on a run of grid points the midpoint of that run is used;
/// where it jumps across zero the crossing is interpolated linearly.
fn crossover(grid: &[f64], son: &[f64], fri: &[f64], sorted: &SortedPools) -> (f64, f64) {
    let diff: Vec<f64> = son.iter().zip(fri).map(|(s, f)| s - f).collect();
    let Some(first) = diff.iter().position(|&d| d <= 0.0) else {
        let last = grid.len() - 1;
        return (grid[last], 0.5 * (son[last] + fri[last]));
    };
    if diff[first] == 0.0 {
        let end = first + diff[first..].iter().take_while(|&&d| d == 0.0).count() - 1;
        let t = 0.5 * (grid[first] + grid[end]);
        let err = 0.5 * (sorted.sonorant_error_rate(t) + sorted.fricative_error_rate(t));
        return (t, err);
    }
    if first == 0 {
        return (grid[0], 0.5 * (son[0] + fri[0]));
    }
    let (lo, hi) = (first - 1, first);
    let frac = diff[lo] / (diff[lo] - diff[hi]);
    let t = grid[lo] + frac * (grid[hi] - grid[lo]);
    let err = son[lo] + frac * (son[hi] - son[lo]);
    (t, err)
}

/// Share of pooled frames on the correct side of `threshold`.
pub fn frame_accuracy(pools: &ClassPools, threshold: f64) -> f64 {
    let total = pools.total();
    if total == 0 {
        return 0.0;
    }
    let correct_son = pools.sonorant.iter().filter(|&&v| v <= threshold).count();
    let correct_fri = pools.fricative.iter().filter(|&&v| v > threshold).count();
    (correct_son + correct_fri) as f64 / total as f64
}

/// Misclassified frames within one frame of a label change, and all misclassified frames.
pub fn boundary_errors(pools: &ClassPools, threshold: f64) -> (usize, usize) {
    let wrong = |son: &[f64], fri: &[f64]| {
        son.iter().filter(|&&v| v > threshold).count()
            + fri.iter().filter(|&&v| v <= threshold).count()
    };
    (
        wrong(
            &pools.sonorant_near_boundary,
            &pools.fricative_near_boundary,
        ),
        wrong(&pools.sonorant, &pools.fricative),
    )
}
