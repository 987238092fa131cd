//! The `sfdi` command-line tool.
//!
//! Exit codes: 0 success, 2 input error, 3 empty corpus, 4 numeric failure.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{parse_snr_list, RunConfig, CORPUS_ENV, DEFAULT_SNR_LIST};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EMPTY_CORPUS: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "sfdi",
    version,
    about = "Sonorant/fricative discrimination from LPC sums"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-frame A(1) and index contour of one file.
    Analyze {
        audio: PathBuf,
        #[command(flatten)]
        opts: Options,
    },
    /// Three-level sonorant/fricative/silence trace of one file.
    Segment {
        audio: PathBuf,
        #[command(flatten)]
        opts: Options,
    },
    /// Frame-wise accuracy over a labelled corpus.
    Evaluate {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Score at the cross-over threshold calibrated on the dev split
        /// instead of --threshold.
        #[arg(long)]
        calibrate: bool,
        #[command(flatten)]
        opts: Options,
    },
    /// Error rates of both classes against the threshold.
    Sweep {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        opts: Options,
    },
    /// Normalized per-class histograms of the index.
    Histogram {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        opts: Options,
    },
    /// Accuracy and calibrated threshold under additive white noise.
    Noise {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        opts: Options,
    },
    /// Write a synthetic labelled corpus (WAV + PHN + manifest).
    Synth {
        /// Number of utterances.
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 16_000)]
        rate: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CorpusArgs {
    /// Corpus root scanned for *.wav with sibling *.phn; falls back to the
    /// config file, then $SFDI_CORPUS_ROOT.
    pub corpus: Option<PathBuf>,
    /// Manifest of `audio<TAB>labels<TAB>split` rows; takes precedence over the root.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Which pools to sweep or histogram: `full` or `dev`.
    #[arg(long, default_value = "full")]
    pub split: String,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// key=value config file applied before the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub frame_ms: Option<f64>,
    #[arg(long)]
    pub hop_ms: Option<f64>,
    #[arg(long)]
    pub preemph: Option<f64>,
    /// hanning or rectangular.
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub silence_ratio: Option<f64>,
    /// Majority-vote smoothing window in frames (segment only; 0 disables).
    #[arg(long)]
    pub smoothing: Option<usize>,
    #[arg(long)]
    pub bin_width: Option<f64>,
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Comma-separated levels, e.g. `clean,20,15,10,5,0`.
    #[arg(long)]
    pub snr_list: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub phone_map: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads for corpus runs; 0 uses all cores.
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl Options {
    /// Defaults, then the config file, then these flags.
    pub fn resolve(&self) -> crate::Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let mut set = |key: &str, value: Option<String>| match value {
            Some(v) => cfg.set(key, &v),
            None => Ok(()),
        };
        let s = |v: Option<f64>| v.map(|x| x.to_string());
        set("frame-ms", s(self.frame_ms))?;
        set("hop-ms", s(self.hop_ms))?;
        set("preemph", s(self.preemph))?;
        set("window", self.window.clone())?;
        set("threshold", s(self.threshold))?;
        set("silence-ratio", s(self.silence_ratio))?;
        set("smoothing", self.smoothing.map(|v| v.to_string()))?;
        set("bin-width", s(self.bin_width))?;
        set("grid-step", s(self.grid_step))?;
        set("snr-list", self.snr_list.clone())?;
        set("seed", self.seed.map(|v| v.to_string()))?;
        set("jobs", self.jobs.map(|v| v.to_string()))?;
        let p = |v: &Option<PathBuf>| v.as_ref().map(|p| p.to_string_lossy().into_owned());
        set("phone-map", p(&self.phone_map))?;
        set("out-dir", p(&self.out_dir))?;
        Ok(cfg)
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::EmptyCorpus => EXIT_EMPTY_CORPUS,
        Error::NumericalBreakdown { .. } | Error::DegenerateFrame(_) => EXIT_NUMERIC,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match commands::dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}
