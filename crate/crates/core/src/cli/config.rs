//! Run configuration: built-in defaults, then a `key=value` config file,
//! then command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::classifier::ClassifierConfig;
use crate::error::{Error, Result};
use crate::eval::{EvalConfig, NoiseLevel};
use crate::frames::{FrameSpec, Window};
use crate::lpc::LpcOptions;

pub const CORPUS_ENV: &str = "SFDI_CORPUS_ROOT";

pub const DEFAULT_SNR_LIST: &str = "clean,20,15,10,5,0";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub frame: FrameSpec,
    pub classifier: ClassifierConfig,
    pub lpc: LpcOptions,
    pub bin_width: f64,
    pub grid_step: f64,
    pub snr_list: Vec<NoiseLevel>,
    pub seed: u64,
    pub jobs: usize,
    pub corpus_root: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub phone_map: Option<PathBuf>,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let eval = EvalConfig::default();
        Self {
            frame: eval.frame,
            classifier: eval.classifier,
            lpc: eval.lpc,
            bin_width: eval.bin_width,
            grid_step: eval.grid_step,
            snr_list: parse_snr_list(DEFAULT_SNR_LIST).expect("default list parses"),
            seed: 0,
            jobs: 0,
            corpus_root: None,
            manifest: None,
            phone_map: None,
            out_dir: PathBuf::from("."),
        }
    }
}

pub fn parse_snr_list(s: &str) -> Result<Vec<NoiseLevel>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            NoiseLevel::parse(p).ok_or_else(|| Error::InvalidConfig(format!("bad SNR level {p:?}")))
        })
        .collect()
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("{key}: cannot parse {value:?}")))
}

impl RunConfig {
    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            frame: self.frame,
            classifier: self.classifier,
            lpc: self.lpc,
            bin_width: self.bin_width,
            grid_step: self.grid_step,
            jobs: self.jobs,
        }
    }

    /// Applies one `key=value` setting; keys match the long flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "frame-ms" => self.frame.frame_len_ms = parse_num(key, value)?,
            "hop-ms" => self.frame.hop_ms = parse_num(key, value)?,
            "preemph" => self.frame.preemphasis_alpha = parse_num(key, value)?,
            "window" => {
                self.frame.window = match value {
                    "hanning" | "hann" => Window::Hanning,
                    "rectangular" | "rect" => Window::Rectangular,
                    other => return Err(Error::InvalidConfig(format!("unknown window {other:?}"))),
                }
            }
            "threshold" => self.classifier.threshold_t = parse_num(key, value)?,
            "silence-ratio" => self.classifier.silence_ratio = parse_num(key, value)?,
            "smoothing" => self.classifier.smoothing_window = parse_num(key, value)?,
            "r0-floor" => self.lpc.r0_floor = parse_num(key, value)?,
            "bin-width" => self.bin_width = parse_num(key, value)?,
            "grid-step" => self.grid_step = parse_num(key, value)?,
            "snr-list" => self.snr_list = parse_snr_list(value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "jobs" => self.jobs = parse_num(key, value)?,
            "corpus" => self.corpus_root = Some(PathBuf::from(value)),
            "manifest" => self.manifest = Some(PathBuf::from(value)),
            "phone-map" => self.phone_map = Some(PathBuf::from(value)),
            "out-dir" => self.out_dir = PathBuf::from(value),
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown config key {other:?}"
                )))
            }
        }
        Ok(())
    }

    /// Applies a config file: one `key=value` per line, `#` comments.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("config line {}: expected key=value", i + 1))
            })?;
            self.set(key, value)
                .map_err(|e| Error::InvalidConfig(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        self.apply_text(&text).map_err(|e| e.in_file(path))
    }

    pub fn validate(&self) -> Result<()> {
        self.eval_config().validate()?;
        for (what, path) in [
            ("manifest", &self.manifest),
            ("phone map", &self.phone_map),
            ("corpus root", &self.corpus_root),
        ] {
            if let Some(p) = path {
                if !p.exists() {
                    return Err(Error::InvalidConfig(format!(
                        "{what} {} does not exist",
                        p.display()
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_settings() {
        let c = RunConfig::default();
        assert_eq!(c.frame.frame_len_ms, 20.0);
        assert_eq!(c.frame.hop_ms, 5.0);
        assert_eq!(c.frame.preemphasis_alpha, 0.97);
        assert_eq!(c.classifier.threshold_t, 1.1);
        assert_eq!(c.classifier.silence_ratio, 0.0004);
        assert_eq!(c.bin_width, 0.025);
        assert_eq!(c.snr_list.len(), 6);
        assert_eq!(c.snr_list[0], NoiseLevel::Clean);
        assert_eq!(c.snr_list[5], NoiseLevel::Snr(0.0));
    }

    #[test]
    fn config_text_overrides_defaults() {
        let mut c = RunConfig::default();
        c.apply_text("# comment\nthreshold = 0.62\nsnr-list=clean,10\nwindow=rect\n")
            .unwrap();
        assert_eq!(c.classifier.threshold_t, 0.62);
        assert_eq!(c.snr_list, vec![NoiseLevel::Clean, NoiseLevel::Snr(10.0)]);
        assert_eq!(c.frame.window, Window::Rectangular);
        assert!(c.apply_text("bogus=1\n").is_err());
        assert!(c.apply_text("threshold\n").is_err());
        assert!(c.apply_text("seed=abc\n").is_err());
    }

    #[test]
    fn missing_paths_fail_validation() {
        let c = RunConfig {
            manifest: Some(PathBuf::from("/definitely/not/here.tsv")),
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
