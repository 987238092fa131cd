//! Sonorant/fricative discrimination from the zero-frequency gain of the
//! linear-prediction inverse filter.
//!
//! For each 20 ms frame the inverse filter `A(z)` is estimated by the
//! autocorrelation method. Its gain at `z = 1`, the sum of the predictor
//! coefficients plus one, is small for sonorants and large for fricatives;
//! the index `atan(A(1))` separates the two with a single threshold.
//!
//! ```
//! use sfdi::{frames::{AudioBuffer, FrameSpec}, lpc::sfdi_contour};
//!
//! let tone: Vec<f64> = (0..1600).map(|n| (n as f64 * 0.05).sin()).collect();
//! let contour = sfdi_contour(&AudioBuffer::new(tone, 16_000)?, &FrameSpec::default())?;
//! assert_eq!(contour.len(), 17);
//! assert!(contour.t_values().all(|t| t < 1.1));
//! # Ok::<(), sfdi::Error>(())
//! ```

pub mod classifier;
pub mod cli;
pub mod corpus;
mod error;
pub mod eval;
pub mod frames;
pub mod lpc;
pub mod synth;

pub use error::{Error, Result};
