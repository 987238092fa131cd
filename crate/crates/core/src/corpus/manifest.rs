//! Corpus discovery: directory scans and manifest files.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use walkdir::WalkDir;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SplitTag {
    Dev,
    Full,
    Custom(String),
}

impl SplitTag {
    pub fn parse(s: &str) -> Self {
        match s.to_ascii_lowercase().as_str() {
            "dev" => SplitTag::Dev,
            "full" | "" => SplitTag::Full,
            other => SplitTag::Custom(other.to_string()),
        }
    }
}

impl fmt::Display for SplitTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitTag::Dev => f.write_str("dev"),
            SplitTag::Full => f.write_str("full"),
            SplitTag::Custom(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub audio_path: PathBuf,
    pub label_path: PathBuf,
    pub split: SplitTag,
    /// Stable identifier, relative to the corpus root with `/` separators.
    pub key: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn new(mut entries: Vec<CorpusEntry>) -> Self {
        entries.sort_by(|a, b| a.key.cmp(&b.key));
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has_dev_split(&self) -> bool {
        self.entries.iter().any(|e| e.split == SplitTag::Dev)
    }

    /// SHA-256 over the sorted `key<TAB>split` lines.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for e in &self.entries {
            h.update(e.key.as_bytes());
            h.update(b"\t");
            h.update(e.split.to_string().as_bytes());
            h.update(b"\n");
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Walks `root` pairing every `*.wav` with a sibling `*.phn` (either case).
    pub fn discover(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref();
        if !root.is_dir() {
            return Err(Error::InvalidConfig(format!(
                "corpus root {} is not a directory",
                root.display()
            )));
        }
        let mut entries = Vec::new();
        for item in WalkDir::new(root).sort_by_file_name() {
            let item = item.map_err(|e| Error::Io(e.into()))?;
            let path = item.path();
            if !item.file_type().is_file() || !has_ext(path, "wav") {
                continue;
            }
            let Some(label_path) = sibling_with_ext(path, "phn") else {
                continue;
            };
            entries.push(CorpusEntry {
                key: relative_key(root, path),
                audio_path: path.to_path_buf(),
                label_path,
                split: SplitTag::Full,
            });
        }
        Ok(Self::new(entries))
    }

    /// Reads a manifest of `audio<TAB>labels<TAB>split` rows; relative paths
    /// resolve against the manifest's directory.
    pub fn from_manifest(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse_manifest(&text, base)
    }

    pub fn parse_manifest(text: &str, base: &Path) -> Result<Self> {
        let mut entries = Vec::new();
        let mut seen = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if !(2..=3).contains(&fields.len()) {
                return Err(Error::Manifest {
                    line: i + 1,
                    message: format!(
                        "expected 2 or 3 tab-separated fields, found {}",
                        fields.len()
                    ),
                });
            }
            let audio_rel = Path::new(fields[0].trim());
            let audio_path = base.join(audio_rel);
            let label_path = base.join(fields[1].trim());
            let split = SplitTag::parse(fields.get(2).map_or("", |s| s.trim()));
            let key = path_key(audio_rel);
            if let Some(prev) = seen.insert(key.clone(), i + 1) {
                return Err(Error::Manifest {
                    line: i + 1,
                    message: format!("{key} already listed on line {prev}"),
                });
            }
            entries.push(CorpusEntry {
                audio_path,
                label_path,
                split,
                key,
            });
        }
        Ok(Self::new(entries))
    }

    pub fn to_manifest(&self, base: &Path) -> String {
        let rel = |p: &Path| path_key(p.strip_prefix(base).unwrap_or(p));
        self.entries
            .iter()
            .map(|e| {
                format!(
                    "{}\t{}\t{}\n",
                    rel(&e.audio_path),
                    rel(&e.label_path),
                    e.split
                )
            })
            .collect()
    }
}

fn has_ext(path: &Path, ext: &str) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

fn sibling_with_ext(path: &Path, ext: &str) -> Option<PathBuf> {
    [ext.to_string(), ext.to_ascii_uppercase()]
        .into_iter()
        .map(|e| path.with_extension(e))
        .find(|p| p.is_file())
}

fn path_key(path: &Path) -> String {
    path.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

fn relative_key(root: &Path, path: &Path) -> String {
    path_key(path.strip_prefix(root).unwrap_or(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_rows_and_splits() {
        let text = "# comment\na/x.wav\ta/x.phn\tdev\r\nb/y.wav\tb/y.phn\n\nc.wav\tc.phn\ttest\n";
        let c = Corpus::parse_manifest(text, Path::new("/data")).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.entries[0].key, "a/x.wav");
        assert_eq!(c.entries[0].split, SplitTag::Dev);
        assert_eq!(c.entries[0].audio_path, Path::new("/data/a/x.wav"));
        assert_eq!(c.entries[1].split, SplitTag::Full);
        assert_eq!(c.entries[2].split, SplitTag::Custom("test".into()));
        assert!(c.has_dev_split());
    }

    #[test]
    fn manifest_errors() {
        assert!(matches!(
            Corpus::parse_manifest("only-one-field\n", Path::new(".")),
            Err(Error::Manifest { line: 1, .. })
        ));
        assert!(matches!(
            Corpus::parse_manifest("a.wav\ta.phn\na.wav\ta.phn\n", Path::new(".")),
            Err(Error::Manifest { line: 2, .. })
        ));
    }

    #[test]
    fn digest_ignores_listing_order() {
        let a =
            Corpus::parse_manifest("a.wav\ta.phn\nb.wav\tb.phn\tdev\n", Path::new(".")).unwrap();
        let b =
            Corpus::parse_manifest("b.wav\tb.phn\tdev\na.wav\ta.phn\n", Path::new(".")).unwrap();
        assert_eq!(a.digest(), b.digest());
        let c = Corpus::parse_manifest("b.wav\tb.phn\na.wav\ta.phn\n", Path::new(".")).unwrap();
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn discovery_pairs_case_insensitively() {
        let dir = tempfile::tempdir().unwrap();
        let sub = dir.path().join("DR1/SPK");
        fs::create_dir_all(&sub).unwrap();
        fs::write(sub.join("SA1.WAV"), b"x").unwrap();
        fs::write(sub.join("SA1.PHN"), b"x").unwrap();
        fs::write(sub.join("lonely.wav"), b"x").unwrap();
        fs::write(dir.path().join("b.wav"), b"x").unwrap();
        fs::write(dir.path().join("b.phn"), b"x").unwrap();
        let c = Corpus::discover(dir.path()).unwrap();
        let keys: Vec<_> = c.entries.iter().map(|e| e.key.as_str()).collect();
        assert_eq!(keys, vec!["DR1/SPK/SA1.WAV", "b.wav"]);
        let round = Corpus::parse_manifest(&c.to_manifest(dir.path()), dir.path()).unwrap();
        assert_eq!(round, c);
    }
}
