use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::skipgram::EmbedConfig;
use crate::EmbedError;

/// Trained vocabulary-to-vector mapping plus its training record.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    /// Index order matches the rows of `vectors`.
    pub vocabulary: Vec<String>,
    index: HashMap<String, usize>,
    /// |V| x d.
    pub vectors: Array2<f64>,
    pub config: EmbedConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Sidecar {
    config: EmbedConfig,
}

impl EmbeddingTable {
    pub fn new(vocabulary: Vec<String>, vectors: Array2<f64>, config: EmbedConfig) -> Self {
        assert_eq!(vocabulary.len(), vectors.nrows());
        assert!(vectors.iter().all(|v| v.is_finite()), "non-finite embedding");
        let index = vocabulary
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        EmbeddingTable {
            vocabulary,
            index,
            vectors,
            config,
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn len(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocabulary.is_empty()
    }

    pub fn lookup(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    /// Text format: header `d |V|`, then one `token v_1 ... v_d` line per
    /// vocabulary entry, plus a `<path>.meta.json` sidecar with the
    /// training config. Floats use the shortest round-trip decimal form,
    /// so save/load is lossless.
    pub fn save(&self, path: &Path) -> Result<(), EmbedError> {
        let mut out = String::new();
        writeln!(out, "{} {}", self.dim(), self.len()).unwrap();
        for (i, token) in self.vocabulary.iter().enumerate() {
            out.push_str(token);
            for v in self.vectors.row(i) {
                write!(out, " {v}").unwrap();
            }
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|source| EmbedError::Io {
            action: "write",
            path: path.display().to_string(),
            source,
        })?;
        let sidecar = Sidecar {
            config: self.config.clone(),
        };
        let meta_path = sidecar_path(path);
        std::fs::write(&meta_path, serde_json::to_string_pretty(&sidecar).unwrap()).map_err(
            |source| EmbedError::Io {
                action: "write",
                path: meta_path.display().to_string(),
                source,
            },
        )
    }

    pub fn load(path: &Path) -> Result<Self, EmbedError> {
        let text = std::fs::read_to_string(path).map_err(|source| EmbedError::Io {
            action: "read",
            path: path.display().to_string(),
            source,
        })?;
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| EmbedError::Format("empty file".into()))?;
        let mut parts = header.split_whitespace();
        let d: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| EmbedError::Format("bad header".into()))?;
        let n: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| EmbedError::Format("bad header".into()))?;
        let mut vocabulary = Vec::with_capacity(n);
        let mut vectors = Array2::zeros((n, d));
        for (i, line) in lines.enumerate() {
            if i >= n {
                return Err(EmbedError::Format(format!("more than {n} vector lines")));
            }
            let mut fields = line.split_whitespace();
            let token = fields
                .next()
                .ok_or_else(|| EmbedError::Format(format!("line {}: missing token", i + 2)))?;
            vocabulary.push(token.to_string());
            for j in 0..d {
                let v: f64 = fields
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| EmbedError::Format(format!("line {}: bad vector", i + 2)))?;
                vectors[(i, j)] = v;
            }
        }
        if vocabulary.len() != n {
            return Err(EmbedError::Format(format!(
                "header promised {n} rows, found {}",
                vocabulary.len()
            )));
        }
        let meta_path = sidecar_path(path);
        let config = match std::fs::read_to_string(&meta_path) {
            Ok(json) => {
                let sidecar: Sidecar = serde_json::from_str(&json)
                    .map_err(|e| EmbedError::Format(format!("bad sidecar: {e}")))?;
                sidecar.config
            }
            Err(_) => EmbedConfig::default(),
        };
        Ok(EmbeddingTable::new(vocabulary, vectors, config))
    }
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_os_string();
    os.push(".meta.json");
    os.into()
}
