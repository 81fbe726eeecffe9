//! Dataset manifests: CSV listings that map image files to subject labels.
//!
//! A manifest is a CSV file with the header `path,subject_id,index`. Paths are
//! resolved relative to the manifest's own directory, `subject_id` is an
//! opaque label, and `index` numbers a subject's images 1..=n. Entries are
//! kept sorted by (subject_id, index) so every traversal order downstream is
//! reproducible regardless of how the file was written.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Image path as written in the CSV (possibly relative).
    pub path: PathBuf,
    pub subject_id: String,
    /// 1-based position of this image within its subject.
    pub index: u32,
}

#[derive(Debug, Clone)]
pub struct DatasetManifest {
    entries: Vec<ManifestEntry>,
    base_dir: PathBuf,
}

impl DatasetManifest {
    /// Read and validate a manifest CSV.
    pub fn load(path: &Path) -> Result<Self> {
        let err = |reason: String| Error::Manifest {
            path: path.to_owned(),
            reason,
        };
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| match e.kind() {
                csv::ErrorKind::Io(_) => err(format!("cannot open: {e}")),
                _ => err(e.to_string()),
            })?;

        let headers = reader.headers().map_err(|e| err(e.to_string()))?.clone();
        let expected = ["path", "subject_id", "index"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(err(format!(
                "header must be `path,subject_id,index`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }

        let mut entries = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(|e| err(e.to_string()))?;
            let line = row + 2; // header is line 1
            if record.len() != 3 {
                return Err(err(format!("line {line}: expected 3 fields, got {}", record.len())));
            }
            let raw_path = &record[0];
            if raw_path.is_empty() {
                return Err(err(format!("line {line}: empty path")));
            }
            let subject_id = record[1].to_string();
            if subject_id.is_empty() {
                return Err(err(format!("line {line}: empty subject_id")));
            }
            let index: u32 = record[2]
                .parse()
                .map_err(|_| err(format!("line {line}: index `{}` is not a positive integer", &record[2])))?;
            if index == 0 {
                return Err(err(format!("line {line}: index must be >= 1")));
            }
            entries.push(ManifestEntry {
                path: PathBuf::from(raw_path),
                subject_id,
                index,
            });
        }

        let base_dir = path.parent().unwrap_or_else(|| Path::new("")).to_owned();
        Self::from_entries(entries, base_dir).map_err(|e| match e {
            Error::InvalidInput(reason) => err(reason),
            other => other,
        })
    }

    /// Build a manifest from in-memory entries; validates, sorts, and checks
    /// that each subject's indices are exactly 1..=n.
    pub fn from_entries(mut entries: Vec<ManifestEntry>, base_dir: PathBuf) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("manifest has no entries"));
        }
        entries.sort_by(|a, b| (&a.subject_id, a.index).cmp(&(&b.subject_id, b.index)));
        for pair in entries.windows(2) {
            if pair[0].subject_id == pair[1].subject_id && pair[0].index == pair[1].index {
                return Err(Error::invalid(format!(
                    "duplicate index {} for subject `{}`",
                    pair[0].index, pair[0].subject_id
                )));
            }
        }
        let mut expected = 1u32;
        let mut current: Option<&str> = None;
        for e in &entries {
            if current != Some(e.subject_id.as_str()) {
                current = Some(e.subject_id.as_str());
                expected = 1;
            }
            if e.index != expected {
                return Err(Error::invalid(format!(
                    "subject `{}` indices are not contiguous from 1: expected {}, found {}",
                    e.subject_id, expected, e.index
                )));
            }
            expected += 1;
        }
        Ok(Self { entries, base_dir })
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Directory that relative entry paths resolve against.
    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    /// Absolute (or cwd-relative) path for one entry.
    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        if entry.path.is_absolute() {
            entry.path.clone()
        } else {
            self.base_dir.join(&entry.path)
        }
    }

    /// Unique subject labels in sorted order.
    pub fn subject_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.entries.iter().map(|e| e.subject_id.as_str()).collect();
        ids.dedup();
        ids
    }

    /// Entries grouped per subject, preserving the sorted order.
    pub fn by_subject(&self) -> BTreeMap<&str, Vec<&ManifestEntry>> {
        let mut map: BTreeMap<&str, Vec<&ManifestEntry>> = BTreeMap::new();
        for e in &self.entries {
            map.entry(e.subject_id.as_str()).or_default().push(e);
        }
        map
    }

    /// Entry positions grouped per subject, each list in index order.
    pub fn positions_by_subject(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut map: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (pos, e) in self.entries.iter().enumerate() {
            map.entry(e.subject_id.as_str()).or_default().push(pos);
        }
        map
    }

    /// Number of images held by the smallest class.
    pub fn min_images_per_subject(&self) -> usize {
        self.by_subject().values().map(Vec::len).min().unwrap_or(0)
    }
}

/// Write entries as a manifest CSV with the canonical header.
pub fn save_manifest(entries: &[ManifestEntry], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::Manifest {
        path: path.to_owned(),
        reason: format!("cannot write: {e}"),
    })?;
    writer
        .write_record(["path", "subject_id", "index"])
        .and_then(|_| {
            for e in entries {
                writer.write_record([
                    e.path.to_string_lossy().as_ref(),
                    &e.subject_id,
                    &e.index.to_string(),
                ])?;
            }
            writer.flush()?;
            Ok(())
        })
        .map_err(|e| Error::Manifest {
            path: path.to_owned(),
            reason: e.to_string(),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn loads_and_sorts() {
        let f = write_temp(
            "path,subject_id,index\n\
             s2/2.pgm,s2,2\n\
             s1/1.pgm,s1,1\n\
             s2/1.pgm,s2,1\n\
             s1/2.pgm,s1,2\n",
        );
        let m = DatasetManifest::load(f.path()).unwrap();
        assert_eq!(m.len(), 4);
        assert_eq!(m.subject_ids(), vec!["s1", "s2"]);
        let order: Vec<(&str, u32)> = m
            .entries()
            .iter()
            .map(|e| (e.subject_id.as_str(), e.index))
            .collect();
        assert_eq!(order, vec![("s1", 1), ("s1", 2), ("s2", 1), ("s2", 2)]);
    }

    #[test]
    fn resolves_relative_to_manifest_dir() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.csv");
        std::fs::write(&path, "path,subject_id,index\nimgs/a.pgm,s1,1\n").unwrap();
        let m = DatasetManifest::load(&path).unwrap();
        assert_eq!(m.resolve(&m.entries()[0]), dir.path().join("imgs/a.pgm"));
    }

    #[test]
    fn duplicate_index_rejected() {
        let f = write_temp("path,subject_id,index\na.pgm,s1,1\nb.pgm,s1,1\n");
        let err = DatasetManifest::load(f.path()).unwrap_err().to_string();
        assert!(err.contains("duplicate index 1 for subject `s1`"), "{err}");
    }

    #[test]
    fn zero_index_rejected() {
        let f = write_temp("path,subject_id,index\na.pgm,s1,0\n");
        let err = DatasetManifest::load(f.path()).unwrap_err().to_string();
        assert!(err.contains("index must be >= 1"), "{err}");
    }

    #[test]
    fn negative_index_rejected() {
        let f = write_temp("path,subject_id,index\na.pgm,s1,-1\n");
        assert!(DatasetManifest::load(f.path()).is_err());
    }

    #[test]
    fn gap_in_indices_rejected() {
        let f = write_temp("path,subject_id,index\na.pgm,s1,1\nb.pgm,s1,3\n");
        let err = DatasetManifest::load(f.path()).unwrap_err().to_string();
        assert!(err.contains("not contiguous"), "{err}");
    }

    #[test]
    fn empty_manifest_rejected() {
        let f = write_temp("path,subject_id,index\n");
        let err = DatasetManifest::load(f.path()).unwrap_err().to_string();
        assert!(err.contains("no entries"), "{err}");
    }

    #[test]
    fn wrong_header_rejected() {
        let f = write_temp("file,label,idx\na.pgm,s1,1\n");
        let err = DatasetManifest::load(f.path()).unwrap_err().to_string();
        assert!(err.contains("header"), "{err}");
    }

    #[test]
    fn round_trip() {
        let entries = vec![
            ManifestEntry {
                path: PathBuf::from("s1/1.pgm"),
                subject_id: "s1".into(),
                index: 1,
            },
            ManifestEntry {
                path: PathBuf::from("s1/2.pgm"),
                subject_id: "s1".into(),
                index: 2,
            },
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        save_manifest(&entries, &path).unwrap();
        let m = DatasetManifest::load(&path).unwrap();
        assert_eq!(m.entries(), entries.as_slice());
    }

    #[test]
    fn min_images_per_subject() {
        let entries = vec![
            ManifestEntry { path: "a".into(), subject_id: "s1".into(), index: 1 },
            ManifestEntry { path: "b".into(), subject_id: "s1".into(), index: 2 },
            ManifestEntry { path: "c".into(), subject_id: "s2".into(), index: 1 },
        ];
        let m = DatasetManifest::from_entries(entries, PathBuf::new()).unwrap();
        assert_eq!(m.min_images_per_subject(), 1);
    }
}
