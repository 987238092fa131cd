//! Corpus input: audio containers, phone labels, class maps and file discovery.

mod audio;
mod labels;
mod manifest;

use std::fs;

pub use audio::{decode_audio, encode_sphere, encode_wav, read_audio, write_wav, ByteOrder};
pub use labels::{
    boundary_adjacent, label_frames, parse_phn, phone_class, serialize_phn, PhoneClass,
    PhoneClassMap, PhoneLabel, UNCOVERED,
};
pub use manifest::{Corpus, CorpusEntry, SplitTag};

use crate::error::{Error, Result};
use crate::frames::AudioBuffer;

/// An utterance with its ground-truth labels, in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Utterance {
    pub key: String,
    pub split: SplitTag,
    pub audio: AudioBuffer,
    pub labels: Vec<PhoneLabel>,
}

impl Utterance {
    pub fn load(entry: &CorpusEntry) -> Result<Self> {
        let audio = read_audio(&entry.audio_path)?;
        let text = fs::read_to_string(&entry.label_path)
            .map_err(|e| Error::from(e).in_file(&entry.label_path))?;
        let labels = parse_phn(&text).map_err(|e| e.in_file(&entry.label_path))?;
        Ok(Self {
            key: entry.key.clone(),
            split: entry.split.clone(),
            audio,
            labels,
        })
    }
}
