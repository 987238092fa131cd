//! Per-class pools of index values gathered over labelled utterances.

use std::borrow::Cow;

use rayon::prelude::*;

use crate::classifier::ClassifierConfig;
use crate::corpus::{
    boundary_adjacent, label_frames, Corpus, PhoneClass, PhoneClassMap, SplitTag, Utterance,
};
use crate::error::{Error, Result};
use crate::frames::FrameSpec;
use crate::lpc::{sfdi_contour_with, LpcOptions};

use super::noise::{add_white_noise, file_seed, NoiseLevel, NoiseSpec};

/// Index values of labelled sonorant and fricative frames.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClassPools {
    pub sonorant: Vec<f64>,
    pub fricative: Vec<f64>,
    /// Subsets of the pools above: frames within one frame of a label change.
    pub sonorant_near_boundary: Vec<f64>,
    pub fricative_near_boundary: Vec<f64>,
}

impl ClassPools {
    pub fn new(sonorant: Vec<f64>, fricative: Vec<f64>) -> Self {
        Self {
            sonorant,
            fricative,
            ..Default::default()
        }
    }

    pub fn extend(&mut self, other: &ClassPools) {
        self.sonorant.extend_from_slice(&other.sonorant);
        self.fricative.extend_from_slice(&other.fricative);
        self.sonorant_near_boundary
            .extend_from_slice(&other.sonorant_near_boundary);
        self.fricative_near_boundary
            .extend_from_slice(&other.fricative_near_boundary);
    }

    pub fn total(&self) -> usize {
        self.sonorant.len() + self.fricative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }
}

/// Everything that shapes a corpus run besides the corpus itself.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EvalConfig {
    pub frame: FrameSpec,
    pub classifier: ClassifierConfig,
    pub lpc: LpcOptions,
    pub bin_width: f64,
    pub grid_step: f64,
    /// Worker threads; 0 lets the pool pick.
    pub jobs: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            frame: FrameSpec::default(),
            classifier: ClassifierConfig::default(),
            lpc: LpcOptions::default(),
            bin_width: 0.025,
            grid_step: 0.005,
            jobs: 0,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        self.frame.validate()?;
        self.classifier.validate()?;
        if !(self.bin_width > 0.0 && self.bin_width.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "bin width {}",
                self.bin_width
            )));
        }
        if !(self.grid_step > 0.0 && self.grid_step.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "grid step {}",
                self.grid_step
            )));
        }
        Ok(())
    }
}

/// Pools for one utterance: labelled, audible, sonorant or fricative frames only.
pub fn utterance_pools(
    utt: &Utterance,
    map: &PhoneClassMap,
    config: &EvalConfig,
    noise: Option<&NoiseSpec>,
) -> Result<ClassPools> {
    let noisy;
    let audio = match noise {
        Some(spec) if spec.target_snr_db != f64::INFINITY => {
            noisy = add_white_noise(&utt.audio, spec)?;
            &noisy
        }
        _ => &utt.audio,
    };
    let contour = sfdi_contour_with(audio, &config.frame, config.lpc)?;
    let symbols = label_frames(
        &utt.labels,
        contour.len(),
        &config.frame,
        audio.sample_rate_hz(),
    )?;
    let near = boundary_adjacent(&symbols);
    let max_energy = contour.max_energy();
    let mut pools = ClassPools::default();
    for ((frame, symbol), near) in contour.frames.iter().zip(&symbols).zip(near) {
        if !config.classifier.is_audible(frame.energy, max_energy) {
            continue;
        }
        let (pool, edge) = match map.class_of(symbol) {
            PhoneClass::Sonorant => (&mut pools.sonorant, &mut pools.sonorant_near_boundary),
            PhoneClass::Fricative => (&mut pools.fricative, &mut pools.fricative_near_boundary),
            PhoneClass::Excluded | PhoneClass::Other => continue,
        };
        pool.push(frame.t_one);
        if near {
            edge.push(frame.t_one);
        }
    }
    Ok(pools)
}

/// Anything that can hand out labelled utterances by index.
pub trait UtteranceSource: Sync {
    fn len(&self) -> usize;
    fn key(&self, index: usize) -> &str;
    fn split_tag(&self, index: usize) -> &SplitTag;
    fn load(&self, index: usize) -> Result<Cow<'_, Utterance>>;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl UtteranceSource for Corpus {
    fn len(&self) -> usize {
        self.entries.len()
    }

    fn key(&self, index: usize) -> &str {
        &self.entries[index].key
    }

    fn split_tag(&self, index: usize) -> &SplitTag {
        &self.entries[index].split
    }

    fn load(&self, index: usize) -> Result<Cow<'_, Utterance>> {
        Utterance::load(&self.entries[index]).map(Cow::Owned)
    }
}

impl UtteranceSource for [Utterance] {
    fn len(&self) -> usize {
        <[Utterance]>::len(self)
    }

    fn key(&self, index: usize) -> &str {
        &self[index].key
    }

    fn split_tag(&self, index: usize) -> &SplitTag {
        &self[index].split
    }

    fn load(&self, index: usize) -> Result<Cow<'_, Utterance>> {
        Ok(Cow::Borrowed(&self[index]))
    }
}

impl UtteranceSource for Vec<Utterance> {
    fn len(&self) -> usize {
        self.as_slice().len()
    }

    fn key(&self, index: usize) -> &str {
        self.as_slice().key(index)
    }

    fn split_tag(&self, index: usize) -> &SplitTag {
        UtteranceSource::split_tag(self.as_slice(), index)
    }

    fn load(&self, index: usize) -> Result<Cow<'_, Utterance>> {
        self.as_slice().load(index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct FileFailure {
    pub key: String,
    pub message: String,
}

/// Dev-split and full-corpus pools for one noise condition.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SplitPools {
    pub dev: ClassPools,
    pub full: ClassPools,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusPools {
    /// One entry per requested level, in request order.
    pub levels: Vec<(NoiseLevel, SplitPools)>,
    pub processed: usize,
    pub failures: Vec<FileFailure>,
    pub has_dev: bool,
}

impl CorpusPools {
    pub fn attempted(&self) -> usize {
        self.processed + self.failures.len()
    }
}

/// Analyses every utterance once per level. A file that fails at any level
/// is recorded as a failure and contributes to no level.
pub fn collect_levels<S: UtteranceSource + ?Sized>(
    source: &S,
    map: &PhoneClassMap,
    config: &EvalConfig,
    levels: &[NoiseLevel],
    master_seed: u64,
) -> Result<CorpusPools> {
    config.validate()?;
    let work = |i: usize| -> Result<Vec<ClassPools>> {
        let utt = source.load(i)?;
        let seed = file_seed(master_seed, source.key(i));
        levels
            .iter()
            .map(|level| {
                let spec = NoiseSpec {
                    target_snr_db: level.snr_db(),
                    rng_seed: seed,
                };
                utterance_pools(&utt, map, config, Some(&spec))
            })
            .collect()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let results: Vec<Result<Vec<ClassPools>>> =
        pool.install(|| (0..source.len()).into_par_iter().map(work).collect());

    let mut out: Vec<(NoiseLevel, SplitPools)> =
        levels.iter().map(|&l| (l, SplitPools::default())).collect();
    let mut processed = 0;
    let mut failures = Vec::new();
    let mut has_dev = false;
    for (i, result) in results.into_iter().enumerate() {
        match result {
            Ok(per_level) => {
                processed += 1;
                let is_dev = *source.split_tag(i) == SplitTag::Dev;
                has_dev |= is_dev;
                for ((_, split), pools) in out.iter_mut().zip(&per_level) {
                    split.full.extend(pools);
                    if is_dev {
                        split.dev.extend(pools);
                    }
                }
            }
            Err(e) => failures.push(FileFailure {
                key: source.key(i).to_string(),
                message: e.to_string(),
            }),
        }
    }
    Ok(CorpusPools {
        levels: out,
        processed,
        failures,
        has_dev,
    })
}

/// Clean-speech pools over the whole source.
pub fn collect_sfdi_by_class<S: UtteranceSource + ?Sized>(
    source: &S,
    map: &PhoneClassMap,
    config: &EvalConfig,
) -> Result<(ClassPools, Vec<FileFailure>)> {
    let mut run = collect_levels(source, map, config, &[NoiseLevel::Clean], 0)?;
    let (_, split) = run.levels.pop().expect("one level requested");
    Ok((split.full, run.failures))
}
