//! TIMIT-style phone labels and the phone-to-class map.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::frames::FrameSpec;

/// Symbol given to frames whose center falls outside every label.
pub const UNCOVERED: &str = "?";

const DEFAULT_MAP: &str = include_str!("../../assets/timit_phone_classes.txt");

/// One labelled interval `[start_sample, end_sample)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhoneLabel {
    pub start_sample: usize,
    pub end_sample: usize,
    pub symbol: String,
}

impl PhoneLabel {
    pub fn contains(&self, sample: usize) -> bool {
        (self.start_sample..self.end_sample).contains(&sample)
    }
}

/// Parses "start end symbol" lines (LF or CRLF). Blank lines are skipped.
pub fn parse_phn(text: &str) -> Result<Vec<PhoneLabel>> {
    let mut labels: Vec<PhoneLabel> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let [start, end, symbol] = fields[..] else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 3 fields, found {}", fields.len()),
            });
        };
        let num = |s: &str, what: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("{what} {s:?} is not a non-negative integer"),
            })
        };
        let label = PhoneLabel {
            start_sample: num(start, "start")?,
            end_sample: num(end, "end")?,
            symbol: symbol.to_ascii_lowercase(),
        };
        if label.start_sample >= label.end_sample {
            return Err(Error::InvalidLabels(format!(
                "line {line_no}: start {} is not before end {}",
                label.start_sample, label.end_sample
            )));
        }
        if let Some(prev) = labels.last() {
            if label.start_sample < prev.end_sample {
                return Err(Error::InvalidLabels(format!(
                    "line {line_no}: starts at {} before previous label ends at {}",
                    label.start_sample, prev.end_sample
                )));
            }
        }
        labels.push(label);
    }
    Ok(labels)
}

pub fn serialize_phn(labels: &[PhoneLabel]) -> String {
    let mut out = String::new();
    for l in labels {
        let _ = writeln!(out, "{} {} {}", l.start_sample, l.end_sample, l.symbol);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhoneClass {
    Sonorant,
    Fricative,
    Excluded,
    Other,
}

impl PhoneClass {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "sonorant" => Some(PhoneClass::Sonorant),
            "fricative" => Some(PhoneClass::Fricative),
            "excluded" => Some(PhoneClass::Excluded),
            "other" => Some(PhoneClass::Other),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PhoneClass::Sonorant => "sonorant",
            PhoneClass::Fricative => "fricative",
            PhoneClass::Excluded => "excluded",
            PhoneClass::Other => "other",
        }
    }
}

/// Symbol-to-class lookup; symbols not listed are [`PhoneClass::Other`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhoneClassMap {
    classes: BTreeMap<String, PhoneClass>,
}

impl Default for PhoneClassMap {
    fn default() -> Self {
        Self::parse(DEFAULT_MAP).expect("bundled phone map is valid")
    }
}

impl PhoneClassMap {
    /// Parses "symbol class" lines; lines starting with `#` are comments. A symbol listed
    /// twice with different classes is rejected, so the sets stay disjoint.
    pub fn parse(text: &str) -> Result<Self> {
        let mut classes = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::PhoneMap {
                line: i + 1,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [symbol, class] = fields[..] else {
                return Err(err(format!("expected \"symbol class\", got {line:?}")));
            };
            let class = PhoneClass::parse(&class.to_ascii_lowercase())
                .ok_or_else(|| err(format!("unknown class {class:?}")))?;
            let symbol = symbol.to_ascii_lowercase();
            match classes.insert(symbol.clone(), class) {
                Some(prev) if prev != class => {
                    return Err(err(format!(
                        "{symbol} is both {} and {}",
                        prev.name(),
                        class.name()
                    )))
                }
                _ => {}
            }
        }
        Ok(Self { classes })
    }

    pub fn class_of(&self, symbol: &str) -> PhoneClass {
        self.classes
            .get(symbol)
            .or_else(|| self.classes.get(&symbol.to_ascii_lowercase()))
            .copied()
            .unwrap_or(PhoneClass::Other)
    }

    pub fn symbols(&self, class: PhoneClass) -> impl Iterator<Item = &str> {
        self.classes
            .iter()
            .filter(move |(_, c)| **c == class)
            .map(|(s, _)| s.as_str())
    }

    /// Canonical text form, sorted by symbol.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (s, c) in &self.classes {
            let _ = writeln!(out, "{s} {}", c.name());
        }
        out
    }
}

pub fn phone_class(symbol: &str, map: &PhoneClassMap) -> PhoneClass {
    map.class_of(symbol)
}

/// Assigns each frame the label containing its center sample.
pub fn label_frames(
    labels: &[PhoneLabel],
    frame_count: usize,
    spec: &FrameSpec,
    sample_rate_hz: u32,
) -> Result<Vec<String>> {
    let (_, hop) = spec.geometry(sample_rate_hz)?;
    let offset = spec.center_offset(sample_rate_hz)?;
    Ok((0..frame_count)
        .map(|i| {
            let center = i * hop + offset;
            // labels are sorted and disjoint
            let idx = labels.partition_point(|l| l.end_sample <= center);
            match labels.get(idx) {
                Some(l) if l.contains(center) => l.symbol.clone(),
                _ => UNCOVERED.to_string(),
            }
        })
        .collect())
}

/// Marks frames whose neighbour (one frame either side) carries a different symbol.
pub fn boundary_adjacent(symbols: &[String]) -> Vec<bool> {
    (0..symbols.len())
        .map(|i| {
            (i > 0 && symbols[i - 1] != symbols[i])
                || (i + 1 < symbols.len() && symbols[i + 1] != symbols[i])
        })
        .collect()
}
