use std::path::{Path, PathBuf};

use crate::DataError;

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    /// DOT file path, possibly relative to the manifest's directory.
    pub path: PathBuf,
    pub label: u8,
    pub origin: String,
}

/// CSV manifest with header `path,label,origin`.
#[derive(Debug, Clone, Default)]
pub struct Manifest {
    pub rows: Vec<ManifestRow>,
}

impl Manifest {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("path,label,origin\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{}\n",
                row.path.display(),
                row.label,
                row.origin
            ));
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), DataError> {
        std::fs::write(path, self.to_csv()).map_err(|source| DataError::Io {
            action: "write",
            path: path.display().to_string(),
            source,
        })
    }

    pub fn parse(text: &str) -> Result<Self, DataError> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("");
        if header.trim() != "path,label,origin" {
            return Err(DataError::Manifest {
                row: 0,
                message: format!("bad header {header:?}, expected path,label,origin"),
            });
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.splitn(3, ',');
            let path = parts.next().unwrap_or("").trim();
            let label = parts.next().unwrap_or("").trim();
            let origin = parts.next().unwrap_or("").trim();
            if path.is_empty() {
                return Err(DataError::Manifest {
                    row: i + 1,
                    message: "empty path".into(),
                });
            }
            let label: u8 = label.parse().map_err(|_| DataError::Manifest {
                row: i + 1,
                message: format!("label {label:?} not in {{0,1}}"),
            })?;
            if label > 1 {
                return Err(DataError::Manifest {
                    row: i + 1,
                    message: format!("label {label} not in {{0,1}}"),
                });
            }
            rows.push(ManifestRow {
                path: PathBuf::from(path),
                label,
                origin: origin.to_string(),
            });
        }
        Ok(Manifest { rows })
    }

    pub fn load(path: &Path) -> Result<Self, DataError> {
        let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
            action: "read",
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let m = Manifest {
            rows: vec![
                ManifestRow {
                    path: "a__f.dot".into(),
                    label: 1,
                    origin: "CVE-2021-0001".into(),
                },
                ManifestRow {
                    path: "b__g.dot".into(),
                    label: 0,
                    origin: "".into(),
                },
            ],
        };
        let parsed = Manifest::parse(&m.to_csv()).unwrap();
        assert_eq!(parsed.rows, m.rows);
    }

    #[test]
    fn bad_label_is_an_error() {
        let err = Manifest::parse("path,label,origin\nx.dot,2,\n").unwrap_err();
        assert!(matches!(err, DataError::Manifest { row: 1, .. }));
    }

    #[test]
    fn bad_header_is_an_error() {
        assert!(Manifest::parse("file,y\n").is_err());
    }
}
