use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

use super::pools::ClassPools;

/// Histogram on a grid anchored at 0 and covering `[0, pi/2]`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Histogram {
    pub bin_width: f64,
    /// `counts.len() + 1` edges.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Counts divided by the class total; all zero for an empty class.
    pub normalized_counts: Vec<f64>,
}

impl Histogram {
    pub fn build(values: &[f64], bin_width: f64) -> Result<Self> {
        if !(bin_width > 0.0 && bin_width.is_finite()) {
            return Err(Error::InvalidConfig(format!("bin width {bin_width}")));
        }
        let bins = (FRAC_PI_2 / bin_width).ceil().max(1.0) as usize;
        let mut counts = vec![0usize; bins];
        for &v in values {
            // out-of-range values land in the edge bins
            let idx = (v / bin_width).floor();
            let idx = if idx.is_nan() || idx < 0.0 {
                0
            } else {
                (idx as usize).min(bins - 1)
            };
            counts[idx] += 1;
        }
        let total = values.len();
        let normalized_counts = counts
            .iter()
            .map(|&c| {
                if total == 0 {
                    0.0
                } else {
                    c as f64 / total as f64
                }
            })
            .collect();
        Ok(Self {
            bin_width,
            bin_edges: (0..=bins).map(|i| i as f64 * bin_width).collect(),
            counts,
            normalized_counts,
        })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn bin_left(&self, i: usize) -> f64 {
        self.bin_edges[i]
    }
}

/// Sonorant and fricative histograms on a shared grid.
pub fn class_histograms(pools: &ClassPools, bin_width: f64) -> Result<(Histogram, Histogram)> {
    Ok((
        Histogram::build(&pools.sonorant, bin_width)?,
        Histogram::build(&pools.fricative, bin_width)?,
    ))
}

/// Shared mass of two normalized histograms: the sum of per-bin minima.
pub fn overlap_mass(a: &Histogram, b: &Histogram) -> f64 {
    a.normalized_counts
        .iter()
        .zip(&b.normalized_counts)
        .map(|(x, y)| x.min(*y))
        .sum()
}
