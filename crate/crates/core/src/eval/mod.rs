//! Corpus experiments: class pools, histograms, threshold sweeps, noise
//! robustness and accuracy reports.

mod experiment;
mod histogram;
mod noise;
mod pools;
mod sweep;

pub use experiment::{run_noise_experiment, AccuracyReport, FrameCounts, ReportRow};
pub use histogram::{class_histograms, overlap_mass, Histogram};
pub use noise::{add_white_noise, file_seed, gaussian_noise, NoiseLevel, NoiseSpec};
pub use pools::{
    collect_levels, collect_sfdi_by_class, utterance_pools, ClassPools, CorpusPools, EvalConfig,
    FileFailure, SplitPools, UtteranceSource,
};
pub use sweep::{
    boundary_errors, frame_accuracy, threshold_grid, threshold_sweep, SortedPools, SweepResult,
    GRID_MAX,
};
